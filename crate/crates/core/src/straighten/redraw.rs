//! Cell-wise chord straightening over a prefix of great circles, and moving a
//! basis onto great circles while carrying the other curves along.

use crate::arrangement::{coincide, great_circle, path_position, meetings, Arrangement, CellComplex, CellRef, Curve, EdgeEnds, WeightedPseudocircle};
use crate::error::{Error, Result};
use crate::frames::coord_frame;
use crate::spherical_kernel::{Arc, UnitVec3, Vec3};
use crate::tolerance::EPS_CLUSTER;

const CHORD: &str = "chord redraw";

/// Longest arc emitted between two consecutive output vertices.
const MAX_PIECE: f64 = std::f64::consts::PI / 8.0;

/// Vertices per basis circle written by [`basis_normalize`].
const BASIS_VERTICES: usize = 64;

/// A crossing of a curve with the prefix: its point, position along the curve,
/// and the prefix curves through it.
#[derive(Clone, Debug)]
struct Hit {
    point: UnitVec3,
    s: f64,
    on: Vec<usize>,
}

fn prefix_hits(c: &Curve, prefix: &[&Curve]) -> Result<Vec<Hit>> {
    let mut hits: Vec<Hit> = Vec::new();
    for (k, p) in prefix.iter().enumerate() {
        for m in meetings(c, p)? {
            match hits.iter_mut().find(|h| h.point.chord(&m.point) <= EPS_CLUSTER) {
                Some(h) => h.on.push(k),
                None => hits.push(Hit { point: m.point, s: m.s_p, on: vec![k] }),
            }
        }
    }
    hits.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
    Ok(hits)
}

/// Replaces a symmetric curve by chords between the images of its crossings
/// with the prefix; `map` carries a crossing to its new position.
fn redraw(c: &Curve, prefix: &[&Curve], map: &dyn Fn(&Hit) -> Result<UnitVec3>) -> Result<Curve> {
    let hits = prefix_hits(c, prefix)?;
    let n = hits.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::degenerate(CHORD, format!("curve meets the prefix {n} times")));
    }
    let h = n / 2;
    for i in 0..h {
        if (hits[i].point.v() + hits[i + h].point.v()).norm() > 1e-7 {
            return Err(Error::degenerate(CHORD, "prefix crossings are not antipodal"));
        }
    }
    for i in 0..n {
        let (a, b) = (&hits[i], &hits[(i + 1) % n]);
        if a.on.iter().any(|k| b.on.contains(k)) {
            return Err(Error::degenerate(CHORD, "chord would run along a prefix curve"));
        }
    }
    let first: Vec<UnitVec3> = hits[..h].iter().map(map).collect::<Result<_>>()?;
    let mut half = Vec::new();
    for i in 0..h {
        let a = first[i];
        let b = if i + 1 < h { first[i + 1] } else { -first[0] };
        let arc = Arc::new(a, b).ok_or_else(|| Error::degenerate(CHORD, "chord endpoints coincide or are antipodal"))?;
        let pieces = (arc.length() / MAX_PIECE).ceil().max(1.0) as usize;
        half.extend((0..pieces).map(|k| arc.point_at(k as f64 / pieces as f64)));
    }
    let mut vs = half.clone();
    vs.extend(half.iter().map(|v| -*v));
    Curve::new(vs)
}

/// Whether two curves trace the same points (vertex sets within `tol` of each other).
fn same_trace(a: &Curve, b: &Curve, tol: f64) -> bool {
    a.vertices().iter().all(|v| b.distance(v) <= tol) && b.vertices().iter().all(|v| a.distance(v) <= tol)
}

fn require_symmetric(a: &Arrangement) -> Result<()> {
    let ok = a.symmetric && a.elements.iter().all(|e| e.curve().is_none_or(|c| c.is_antipodal_form(1e-9)));
    if !ok {
        return Err(Error::InvalidInput("straightening needs a symmetric arrangement".into()));
    }
    Ok(())
}

/// Redraws every curve outside `prefix`, cell by cell of the prefix
/// arrangement, as geodesic chords between its crossings with the prefix.
/// Prefix curves must be great circles; curves already chordal are kept as is.
pub fn chord_redraw(a: &Arrangement, prefix: &[usize]) -> Result<Arrangement> {
    require_symmetric(a)?;
    let mut pcs: Vec<&Curve> = Vec::new();
    for &i in prefix {
        let c = a
            .elements
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("prefix index {i} out of range")))?
            .curve()
            .ok_or_else(|| Error::InvalidInput(format!("prefix element {i} is trivial")))?;
        if c.great_circle_normal(1e-9).is_none() {
            return Err(Error::InvalidInput(format!("prefix element {i} is not a great circle")));
        }
        pcs.push(c);
    }
    let mut out = a.clone();
    for (j, e) in a.elements.iter().enumerate() {
        let Some(c) = e.curve() else { continue };
        if prefix.contains(&j) || pcs.iter().any(|p| coincide(p, c).is_some()) {
            continue;
        }
        let r = redraw(c, &pcs, &|h| Ok(h.point))?;
        if !same_trace(c, &r, 1e-10) {
            out.elements[j] = WeightedPseudocircle::new(e.weight(), r)?;
        }
    }
    Ok(out)
}

/// Moves the basis curves onto the great circles with normals the columns of
/// coord(I;A), keeping weights, and rebuilds every other curve from chords
/// between its transported basis crossings. A basis already made of great
/// circles stays put and only the chord redraw runs.
pub fn basis_normalize(a: &Arrangement, basis: [usize; 3]) -> Result<Arrangement> {
    require_symmetric(a)?;
    a.require_valid_spanning()?;
    let old: Vec<&Curve> = basis
        .iter()
        .map(|&i| a.element(i).curve().ok_or(Error::NotBasis(basis)))
        .collect::<Result<_>>()?;
    if old.iter().all(|c| c.great_circle_normal(1e-9).is_some()) {
        return chord_redraw(a, &basis);
    }
    let q = coord_frame(basis, a)?;
    let u: [Vec3; 3] = [0, 1, 2].map(|k| q.matrix().column(k).into_owned());
    let new_curves: Vec<Curve> = (0..3).map(|k| great_circle(&u[k], Some(&u[(k + 1) % 3]), BASIS_VERTICES)).collect();
    let sub = |cs: &[&Curve]| {
        Arrangement::new(cs.iter().map(|c| WeightedPseudocircle::new(1.0, (*c).clone()).unwrap()).collect(), true)
    };
    let old_sub = sub(&old);
    let new_refs: Vec<&Curve> = new_curves.iter().collect();
    let old_cx = CellComplex::build(&old_sub)?;
    let new_cx = CellComplex::build(&sub(&new_refs))?;
    let transport = |h: &Hit| -> Result<UnitVec3> {
        let sigma = old_sub.sign_vector(&h.point);
        match (old_cx.cell_of(&sigma)?, new_cx.cell_of(&sigma)?) {
            (CellRef::Vertex(_), CellRef::Vertex(w)) => Ok(new_cx.vertices[w].point),
            (CellRef::Edge(e), CellRef::Edge(f)) => {
                let frac = path_position(&old_cx.edges[e].path, &h.point);
                let start_sign = |cx: &CellComplex, e: usize| match cx.edges[e].ends {
                    EdgeEnds::Segment { start, .. } => Some(cx.vertices[start].sign),
                    EdgeEnds::FullCircle => None,
                };
                let same = start_sign(&old_cx, e) == start_sign(&new_cx, f);
                Ok(new_cx.edge_point(f, if same { frac } else { 1.0 - frac }))
            }
            _ => Err(Error::degenerate("basis transport", format!("crossing off the basis curves ({sigma})"))),
        }
    };
    let mut out = a.clone();
    for (k, &i) in basis.iter().enumerate() {
        out.elements[i] = WeightedPseudocircle::new(a.element(i).weight(), new_curves[k].clone())?;
    }
    for (j, e) in a.elements.iter().enumerate() {
        let Some(c) = e.curve() else { continue };
        if basis.contains(&j) {
            continue;
        }
        let same_as = old.iter().enumerate().find_map(|(k, p)| coincide(p, c).map(|o| (k, o)));
        let curve = match same_as {
            Some((k, 1)) => new_curves[k].clone(),
            Some((k, _)) => new_curves[k].reversed(),
            None => redraw(c, &old, &transport)?,
        };
        out.elements[j] = WeightedPseudocircle::new(e.weight(), curve)?;
    }
    out.symmetric = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{circles, crossing_count};
    use crate::frames::{circles_from_frame, frame_from_circles, stiefel_dist};

    /// Symmetric 64-gon about normal `n` pushed along `n` by `amp·sin(3θ+φ)`.
    fn wavy(n: Vec3, amp: f64, phase: f64) -> Curve {
        let base = great_circle(&n, None, 64);
        let nn = n.normalize();
        let half: Vec<UnitVec3> = base.vertices()[..32]
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let th = std::f64::consts::TAU * k as f64 / 64.0;
                UnitVec3::from_vec(v.v() + nn * (amp * (3.0 * th + phase).sin()))
            })
            .collect();
        let mut vs = half.clone();
        vs.extend(half.iter().map(|v| -*v));
        Curve::new(vs).unwrap()
    }

    fn perturbed() -> Arrangement {
        let normals = [
            Vec3::new(1.0, 0.1, 0.05),
            Vec3::new(-0.1, 1.0, 0.2),
            Vec3::new(0.05, -0.1, 1.0),
            Vec3::new(1.0, 1.0, 0.3),
            Vec3::new(-0.4, 1.0, 1.0),
        ];
        let els = normals
            .iter()
            .enumerate()
            .map(|(i, n)| WeightedPseudocircle::new(1.0 + 0.1 * i as f64, wavy(*n, 0.04, i as f64)).unwrap())
            .collect();
        Arrangement::new(els, true)
    }

    fn counts(a: &Arrangement) -> Vec<usize> {
        let mut v = Vec::new();
        for i in 0..a.n() {
            for j in i + 1..a.n() {
                v.push(crossing_count(a.element(i).curve().unwrap(), a.element(j).curve().unwrap()).unwrap());
            }
        }
        v
    }

    #[test]
    fn chordal_arrangement_is_fixed() {
        let a = circles(&[Vec3::x(), Vec3::y(), Vec3::z(), Vec3::new(1.0, 2.0, 3.0)], 64);
        assert_eq!(chord_redraw(&a, &[0, 1, 2]).unwrap(), a);
        assert_eq!(basis_normalize(&a, [0, 1, 2]).unwrap(), a);
    }

    #[test]
    fn wiggly_curve_becomes_chords() {
        let mut a = circles(&[Vec3::x(), Vec3::y(), Vec3::z()], 64);
        a.elements.push(WeightedPseudocircle::new(1.0, wavy(Vec3::new(1.0, 1.0, 1.0), 0.03, 0.0)).unwrap());
        let r = chord_redraw(&a, &[0, 1, 2]).unwrap();
        let c = r.element(3).curve().unwrap();
        let old = a.element(3).curve().unwrap();
        // Endpoints exact: every crossing with the prefix is a vertex of the output.
        for k in 0..3 {
            for m in meetings(old, a.element(k).curve().unwrap()).unwrap() {
                assert!(c.vertices().iter().any(|v| v.chord(&m.point) < 1e-15));
            }
        }
        // Each piece between crossings lies on one great circle.
        assert!(r.validate().unwrap().valid);
        assert_eq!(counts(&r), counts(&a));
    }

    #[test]
    fn normalize_perturbed_basis() {
        let a = perturbed();
        assert!(a.validate().unwrap().valid);
        let r = basis_normalize(&a, [0, 1, 2]).unwrap();
        for k in 0..3 {
            assert!(r.element(k).curve().unwrap().great_circle_normal(1e-12).is_some());
            assert_eq!(r.element(k).weight(), a.element(k).weight());
        }
        let v = r.validate().unwrap();
        assert!(v.valid && v.spanning, "{v:?}");
        assert_eq!(counts(&r), counts(&a));
        assert_eq!(r.covectors().unwrap(), a.covectors().unwrap());
    }

    #[test]
    fn normalize_commutes_with_rotation() {
        let a = perturbed();
        let q = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
        let lhs = basis_normalize(&a.act_rotation(&q).unwrap(), [0, 1, 2]).unwrap();
        let rhs = basis_normalize(&a, [0, 1, 2]).unwrap().act_rotation(&q).unwrap();
        assert!(crate::arrangement::arrangement_dist(&lhs, &rhs).unwrap() < 1e-8);
    }

    #[test]
    fn great_circles_round_trip_through_frames() {
        let a = circles(&[Vec3::x(), Vec3::y(), Vec3::z()], 64);
        let f = frame_from_circles(&basis_normalize(&a, [0, 1, 2]).unwrap()).unwrap();
        assert!(stiefel_dist(&f, &frame_from_circles(&circles_from_frame(&f)).unwrap()) < 1e-12);
    }
}
