//! Weighted pseudocircle arrangements: the data model, validity, the
//! orthogonal action, subsetting, distances, and the induced cell complex.

mod complex;
mod curve;
mod frechet;
mod meet;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

pub(crate) use complex::{boundary_segments, path_point, path_position};
pub use complex::{CellComplex, CellRef, ComplexEdge, ComplexFace, ComplexVertex, EdgeEnds, KernelClass};
pub use curve::{great_circle, Curve, Nearest};
pub use frechet::{cyclic_frechet, weighted_frechet, FRECHET_SAMPLES};
pub use meet::{crossing_count, meetings, MeetKind, Meeting};

use crate::error::{Error, Result};
use crate::spherical_kernel::{Sign, UnitVec3};
use crate::tolerance::EPS_COINCIDE;

/// A weight with an oriented closed curve; weight 0 is the trivial element and
/// carries no curve.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPseudocircle {
    weight: f64,
    curve: Option<Curve>,
}

impl WeightedPseudocircle {
    pub fn new(weight: f64, curve: Curve) -> Result<Self> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::invalid(format!("weight {weight} is not a nonnegative number")));
        }
        if weight == 0.0 {
            return Ok(Self::trivial());
        }
        Ok(WeightedPseudocircle { weight, curve: Some(curve) })
    }

    pub fn from_vertices(weight: f64, vertices: Vec<UnitVec3>) -> Result<Self> {
        if weight == 0.0 {
            return Ok(Self::trivial());
        }
        Self::new(weight, Curve::new(vertices)?)
    }

    pub fn trivial() -> Self {
        WeightedPseudocircle { weight: 0.0, curve: None }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn curve(&self) -> Option<&Curve> {
        self.curve.as_ref()
    }

    pub fn is_trivial(&self) -> bool {
        self.curve.is_none()
    }

    /// Side of `x`: 0 for the trivial element or on the curve.
    pub fn aim(&self, x: &UnitVec3) -> Sign {
        self.curve.as_ref().map_or(Sign::Zero, |c| c.side(x))
    }

    pub fn with_weight(&self, weight: f64) -> Self {
        match &self.curve {
            Some(c) if weight > 0.0 => WeightedPseudocircle { weight, curve: Some(c.clone()) },
            _ => Self::trivial(),
        }
    }

    pub fn reversed(&self) -> Self {
        WeightedPseudocircle { weight: self.weight, curve: self.curve.as_ref().map(Curve::reversed) }
    }
}

/// Side of `x` with respect to α.
pub fn aim_eval(alpha: &WeightedPseudocircle, x: &UnitVec3) -> Sign {
    alpha.aim(x)
}

/// An ordered list of weighted pseudocircles. `symmetric` declares that every
/// curve is antipodally symmetric with a vertex list of the form v_{j+k} = −v_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::cli_io::ArrangementRepr", into = "crate::cli_io::ArrangementRepr")]
pub struct Arrangement {
    pub elements: Vec<WeightedPseudocircle>,
    pub symmetric: bool,
}

/// Kernel classes and pairwise meetings of class representatives.
#[derive(Clone, Debug)]
pub(crate) struct Analysis {
    pub classes: Vec<KernelClass>,
    /// `meetings[a][b]` for class indices a < b, positions along representative a.
    pub meetings: Vec<Vec<Vec<Meeting>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub crossings: usize,
    pub touches: usize,
    pub overlaps: usize,
    pub antipodal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveIssue {
    pub index: usize,
    pub issue: String,
}

/// Outcome of [`Arrangement::validate`]: every violated pair and curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub symmetric: bool,
    pub spanning: bool,
    pub coincident_pairs: Vec<(usize, usize)>,
    pub pair_violations: Vec<PairReport>,
    pub curve_issues: Vec<CurveIssue>,
}

impl Arrangement {
    pub fn new(elements: Vec<WeightedPseudocircle>, symmetric: bool) -> Self {
        Arrangement { elements, symmetric }
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &WeightedPseudocircle {
        &self.elements[i]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.weight).collect()
    }

    /// Sign vector of `x`.
    pub fn sign_vector(&self, x: &UnitVec3) -> crate::oriented_matroid::SignVector {
        crate::oriented_matroid::SignVector::from_signs(self.elements.iter().map(|e| e.aim(x)))
    }

    /// The action A*Q: each vertex v becomes Qᵀv; for det Q < 0 the vertex
    /// order is reversed so that the positive side follows θ∘Q.
    pub fn act_rotation(&self, q: &Matrix3<f64>) -> Result<Arrangement> {
        if (q.transpose() * q - Matrix3::identity()).amax() > 1e-10 {
            return Err(Error::InvalidInput("matrix is not orthogonal".into()));
        }
        let qt = q.transpose();
        let flip = q.determinant() < 0.0;
        let elements = self
            .elements
            .iter()
            .map(|e| match &e.curve {
                None => WeightedPseudocircle::trivial(),
                Some(c) => {
                    let mut vs: Vec<UnitVec3> = c.vertices().iter().map(|v| v.transform(&qt)).collect();
                    if flip {
                        vs.reverse();
                    }
                    WeightedPseudocircle { weight: e.weight, curve: Some(Curve::new(vs).expect("image of a valid curve")) }
                }
            })
            .collect();
        Ok(Arrangement { elements, symmetric: self.symmetric })
    }

    /// Elements outside `keep` replaced by the trivial element.
    pub fn proj_subset(&self, keep: &[usize]) -> Arrangement {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| if keep.contains(&i) { e.clone() } else { WeightedPseudocircle::trivial() })
            .collect();
        Arrangement { elements, symmetric: self.symmetric }
    }

    pub(crate) fn analyze(&self) -> Result<Analysis> {
        let mut classes: Vec<KernelClass> = Vec::new();
        for (i, e) in self.elements.iter().enumerate() {
            let Some(c) = &e.curve else { continue };
            let mut placed = false;
            for class in classes.iter_mut() {
                let rep = self.elements[class.rep].curve.as_ref().unwrap();
                if let Some(o) = coincide(rep, c) {
                    class.members.push((i, o));
                    placed = true;
                    break;
                }
            }
            if !placed {
                classes.push(KernelClass { rep: i, members: vec![(i, 1)] });
            }
        }
        let m = classes.len();
        let mut table = vec![vec![Vec::new(); m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let ca = self.elements[classes[a].rep].curve.as_ref().unwrap();
                let cb = self.elements[classes[b].rep].curve.as_ref().unwrap();
                table[a][b] = meetings(ca, cb)?;
            }
        }
        Ok(Analysis { classes, meetings: table })
    }

    /// Checks simplicity, declared symmetry, and the pairwise rule (coincide,
    /// or cross transversally exactly twice, antipodally when symmetric).
    pub fn validate(&self) -> Result<ValidityReport> {
        let mut curve_issues = Vec::new();
        for (i, e) in self.elements.iter().enumerate() {
            let Some(c) = &e.curve else { continue };
            if let Some((a, b)) = c.simplicity_violation() {
                curve_issues.push(CurveIssue { index: i, issue: format!("edges {a} and {b} intersect") });
            }
            if self.symmetric && !c.is_antipodal_form(1e-9) {
                curve_issues.push(CurveIssue { index: i, issue: "vertex list is not antipodally symmetric".into() });
            }
        }
        let analysis = self.analyze()?;
        let mut coincident_pairs = Vec::new();
        for class in &analysis.classes {
            for (x, &(i, _)) in class.members.iter().enumerate() {
                for &(j, _) in &class.members[x + 1..] {
                    coincident_pairs.push((i.min(j), i.max(j)));
                }
            }
        }
        coincident_pairs.sort();
        let mut pair_violations = Vec::new();
        let m = analysis.classes.len();
        for a in 0..m {
            for b in a + 1..m {
                let ms = &analysis.meetings[a][b];
                let count = |k: MeetKind| ms.iter().filter(|x| x.kind == k).count();
                let crossings = count(MeetKind::Crossing);
                let touches = count(MeetKind::Touch);
                let overlaps = count(MeetKind::Overlap);
                let antipodal = crossings == 2 && (ms[0].point.v() + ms[1].point.v()).norm() <= 1e-9;
                let ok = crossings == 2 && touches == 0 && overlaps == 0 && (!self.symmetric || antipodal);
                if !ok {
                    let (i, j) = (analysis.classes[a].rep, analysis.classes[b].rep);
                    pair_violations.push(PairReport { i: i.min(j), j: i.max(j), crossings, touches, overlaps, antipodal });
                }
            }
        }
        let valid = curve_issues.is_empty() && pair_violations.is_empty();
        let spanning = valid && spanning_from(&analysis);
        Ok(ValidityReport { valid, symmetric: self.symmetric, spanning, coincident_pairs, pair_violations, curve_issues })
    }

    pub fn is_valid(&self) -> Result<bool> {
        Ok(self.validate()?.valid)
    }

    /// True iff no point lies on every nonzero kernel (valid input assumed).
    pub fn is_spanning(&self) -> Result<bool> {
        Ok(spanning_from(&self.analyze()?))
    }

    /// Fails unless the arrangement is valid and spanning.
    pub fn require_valid_spanning(&self) -> Result<()> {
        let report = self.validate()?;
        if !report.valid {
            return Err(Error::invalid(summarize(&report)));
        }
        if !report.spanning {
            return Err(Error::NotSpanning);
        }
        Ok(())
    }

    pub fn build_complex(&self) -> Result<CellComplex> {
        CellComplex::build(self)
    }

    pub fn covectors(&self) -> Result<crate::oriented_matroid::CovectorSet> {
        Ok(self.build_complex()?.covectors())
    }

    pub fn chirotope(&self) -> Result<crate::oriented_matroid::Chirotope> {
        Ok(self.build_complex()?.chirotope())
    }
}

fn summarize(r: &ValidityReport) -> String {
    let mut parts = Vec::new();
    for c in &r.curve_issues {
        parts.push(format!("curve {}: {}", c.index, c.issue));
    }
    for p in &r.pair_violations {
        parts.push(format!(
            "pair ({}, {}): {} crossings, {} touches, {} overlaps",
            p.i, p.j, p.crossings, p.touches, p.overlaps
        ));
    }
    parts.join("; ")
}

fn spanning_from(a: &Analysis) -> bool {
    let m = a.classes.len();
    if m < 3 {
        return false;
    }
    // Every common point would be a crossing of the first two representatives.
    a.meetings[0][1].iter().all(|x| {
        (2..m).any(|c| {
            let rep_pts = &a.meetings[0][c];
            rep_pts.iter().all(|y| y.point.chord(&x.point) > crate::tolerance::EPS_CLUSTER)
        })
    })
}

/// Orientation (+1 or −1) under which `q` traces the same point set as `p`, if any.
pub fn coincide(p: &Curve, q: &Curve) -> Option<i8> {
    if p.vertices().iter().any(|v| q.distance(v) > EPS_COINCIDE) {
        return None;
    }
    if q.vertices().iter().any(|v| p.distance(v) > EPS_COINCIDE) {
        return None;
    }
    let near = q.nearest(&p.vertex(0));
    let sq = q.position_on_edge(near.edge, &near.point);
    let o: i8 = if p.tangent_at(0.0).dot(&q.tangent_at(sq)) >= 0.0 { 1 } else { -1 };
    let q_oriented = if o > 0 { q.clone() } else { q.reversed() };
    (frechet::curve_frechet(p, 1.0, &q_oriented, 1.0, FRECHET_SAMPLES) <= EPS_COINCIDE).then_some(o)
}

/// Maximum over elements of the weighted Fréchet distance.
pub fn arrangement_dist(a: &Arrangement, b: &Arrangement) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::InvalidInput(format!("arrangements have {} and {} elements", a.n(), b.n())));
    }
    Ok(a.elements.iter().zip(&b.elements).map(|(x, y)| weighted_frechet(x, y)).fold(0.0, f64::max))
}

/// Weight-1 great circles with the given normals, as symmetric `count`-gons.
pub fn circles(normals: &[crate::spherical_kernel::Vec3], count: usize) -> Arrangement {
    let elements = normals
        .iter()
        .map(|n| {
            if n.norm() == 0.0 {
                WeightedPseudocircle::trivial()
            } else {
                WeightedPseudocircle::new(n.norm(), great_circle(n, None, count)).unwrap()
            }
        })
        .collect();
    Arrangement::new(elements, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spherical_kernel::Vec3;

    pub(crate) fn coordinate_circles(count: usize) -> Arrangement {
        circles(&[Vec3::x(), Vec3::y(), Vec3::z()], count)
    }

    #[test]
    fn coordinate_circles_valid_spanning() {
        let r = coordinate_circles(20).validate().unwrap();
        assert!(r.valid && r.symmetric && r.spanning, "{r:?}");
    }

    #[test]
    fn identical_circles_coincide() {
        let a = circles(&[Vec3::z(), Vec3::z()], 64);
        let r = a.validate().unwrap();
        assert!(r.valid);
        assert_eq!(r.coincident_pairs, vec![(0, 1)]);
        assert!(!r.spanning);
    }

    #[test]
    fn four_crossings_invalid() {
        // A wavy band around the equator that crosses it four times.
        let wavy: Vec<UnitVec3> = (0..64)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 64.0;
                UnitVec3::new(t.cos(), t.sin(), 0.2 * (2.0 * t).sin())
            })
            .collect();
        let a = Arrangement::new(
            vec![
                WeightedPseudocircle::new(1.0, great_circle(&Vec3::z(), None, 64)).unwrap(),
                WeightedPseudocircle::from_vertices(1.0, wavy).unwrap(),
            ],
            false,
        );
        let r = a.validate().unwrap();
        assert!(!r.valid);
        assert_eq!(r.pair_violations.len(), 1);
        assert_eq!(r.pair_violations[0].crossings, 4);
    }

    #[test]
    fn aim_examples() {
        let eq = WeightedPseudocircle::new(1.0, great_circle(&Vec3::z(), None, 64)).unwrap();
        assert_eq!(aim_eval(&eq, &UnitVec3::e3()), Sign::Pos);
        assert_eq!(aim_eval(&eq, &eq.curve().unwrap().vertex(3)), Sign::Zero);
        assert_eq!(aim_eval(&WeightedPseudocircle::trivial(), &UnitVec3::e3()), Sign::Zero);
    }

    #[test]
    fn proj_and_spanning() {
        let a = coordinate_circles(20);
        assert_eq!(a.proj_subset(&[0, 1, 2]), a);
        assert!(!a.proj_subset(&[]).is_spanning().unwrap());
        assert!(!a.proj_subset(&[0, 1]).validate().unwrap().spanning);
        assert!(!circles(&[Vec3::z()], 64).is_spanning().unwrap());
        assert!(!circles(&[Vec3::z(), Vec3::z(), Vec3::z()], 64).is_spanning().unwrap());
    }

    #[test]
    fn concurrent_circles_not_spanning() {
        let a = circles(&[Vec3::x(), Vec3::y(), Vec3::new(1.0, 1.0, 0.0)], 64);
        let r = a.validate().unwrap();
        assert!(r.valid);
        assert!(!r.spanning);
    }

    #[test]
    fn rotation_and_distance() {
        let a = coordinate_circles(64);
        assert_eq!(a.act_rotation(&Matrix3::identity()).unwrap(), a);
        assert!(a.act_rotation(&Matrix3::from_diagonal(&Vec3::new(2.0, 1.0, 1.0))).is_err());
        assert!(arrangement_dist(&a, &a).unwrap() < 1e-12);
        let mut b = a.clone();
        b.elements[1] = b.elements[1].with_weight(1.25);
        assert!((arrangement_dist(&a, &b).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn reflection_reverses_orientation() {
        let a = coordinate_circles(64);
        let m = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        let b = a.act_rotation(&m).unwrap();
        // pol(a)*Q = pol(Qᵀa): the equator's normal e3 maps to −e3.
        let n = b.elements[2].curve().unwrap().great_circle_normal(1e-9).unwrap();
        assert!((n + Vec3::z()).norm() < 1e-12);
        let n0 = b.elements[0].curve().unwrap().great_circle_normal(1e-9).unwrap();
        assert!((n0 - Vec3::x()).norm() < 1e-12);
    }
}
