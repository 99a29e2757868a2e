//! The pivot deformations of chart pseudolines: sliding one corner toward a
//! chord inside a cell, and rotating a three-piece pseudoline about its foot
//! point until it is straight.

use std::f64::consts::FRAC_PI_2;

use super::chart::{cross, ChartPseudoline};
use crate::error::{Error, Result};
use crate::spherical_kernel::Vec2;

const STAGE: &str = "projective pivot";

/// The rotation of one pseudoline about q0 over the two basis axes u = 0 and v = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePivot {
    pub q0: Vec2,
    pub dir: Vec2,
    pub phi0: f64,
    /// Axis of each corner in travel order: 0 for u = 0, 1 for v = 0.
    axes: [usize; 2],
    original: ChartPseudoline,
}

impl ProjectivePivot {
    /// None when the pseudoline is left fixed: it is straight, or it does not
    /// meet the horizon and the two axes in three distinct non-collinear points.
    pub fn plan(line: &ChartPseudoline) -> Result<Option<ProjectivePivot>> {
        let ChartPseudoline::Polyline { vertices, dir } = line.simplified() else { return Ok(None) };
        if vertices.len() == 1 {
            return Ok(None);
        }
        if vertices.len() != 2 {
            return Err(Error::degenerate(STAGE, format!("pseudoline has {} corners", vertices.len())));
        }
        let scale = 1.0 + vertices[0].norm().max(vertices[1].norm());
        let axis = |p: &Vec2| -> Option<usize> {
            match (p.x.abs() <= 1e-9 * scale, p.y.abs() <= 1e-9 * scale) {
                (true, false) => Some(0),
                (false, true) => Some(1),
                _ => None,
            }
        };
        let (Some(a0), Some(a1)) = (axis(&vertices[0]), axis(&vertices[1])) else {
            return Err(Error::degenerate(STAGE, "corner off the axes"));
        };
        if a0 == a1 {
            return Err(Error::degenerate(STAGE, "both corners on one axis"));
        }
        let (pa, pb) = (vertices[0], vertices[1]);
        let seg = pb - pa;
        let den = seg.dot(&dir);
        if den.abs() <= 1e-14 * seg.norm() {
            return Err(Error::degenerate(STAGE, "middle segment is perpendicular to the ray direction"));
        }
        // q0 is where the segment meets the line through 0 perpendicular to dir.
        let s = -pa.dot(&dir) / den;
        if !(-1e-12..=1.0 + 1e-12).contains(&s) {
            return Err(Error::degenerate(STAGE, "foot point is not on the middle segment"));
        }
        let q0 = pa + seg * s;
        let phi0 = (cross(&dir, &seg) / den).atan();
        Ok(Some(ProjectivePivot { q0, dir, phi0, axes: [a0, a1], original: line.clone() }))
    }

    /// φ(t) = sign(φ0)·min(|φ0|, (π/2)(1−t)).
    pub fn angle(&self, t: f64) -> f64 {
        self.phi0.signum() * self.phi0.abs().min(FRAC_PI_2 * (1.0 - t))
    }

    pub fn at(&self, t: f64) -> Result<ChartPseudoline> {
        let phi = self.angle(t);
        if phi == self.phi0 {
            return Ok(self.original.clone());
        }
        if phi == 0.0 {
            let q = self.q0;
            return Ok(ChartPseudoline::Line { anchor: q - self.dir * q.dot(&self.dir), dir: self.dir });
        }
        let (c, s) = (phi.cos(), phi.sin());
        let r = Vec2::new(c * self.dir.x - s * self.dir.y, s * self.dir.x + c * self.dir.y);
        let hit = |axis: usize| -> Result<Vec2> {
            let (num, den) = if axis == 0 { (self.q0.x, r.x) } else { (self.q0.y, r.y) };
            if den.abs() <= 1e-14 {
                return Err(Error::degenerate(STAGE, "pivot line parallel to an axis"));
            }
            let mut p = self.q0 - r * (num / den);
            if axis == 0 {
                p.x = 0.0;
            } else {
                p.y = 0.0;
            }
            Ok(p)
        };
        Ok(ChartPseudoline::Polyline { vertices: vec![hit(self.axes[0])?, hit(self.axes[1])?], dir: self.dir })
    }
}

/// Samples of the m = 3 pivot for every pseudoline; `result[k][j]` is line j at `samples[k]`.
pub fn h_projective_pivot(lines: &[ChartPseudoline], samples: &[f64]) -> Result<Vec<Vec<ChartPseudoline>>> {
    let plans: Vec<Option<ProjectivePivot>> = lines.iter().map(ProjectivePivot::plan).collect::<Result<_>>()?;
    samples
        .iter()
        .map(|&t| {
            lines
                .iter()
                .zip(&plans)
                .map(|(l, p)| match p {
                    None => Ok(l.clone()),
                    Some(p) => p.at(t),
                })
                .collect()
        })
        .collect()
}

/// A straight piece of a chart path: origin + τ·dir for τ in [lo, hi], with
/// `base + τ` the arc-length position along the owning path.
#[derive(Clone, Copy, Debug)]
struct Piece {
    origin: Vec2,
    dir: Vec2,
    lo: f64,
    hi: f64,
    base: f64,
}

fn pieces(l: &ChartPseudoline) -> Vec<Piece> {
    match l {
        ChartPseudoline::Horizon => Vec::new(),
        ChartPseudoline::Line { anchor, dir } => {
            vec![Piece { origin: *anchor, dir: *dir, lo: f64::NEG_INFINITY, hi: f64::INFINITY, base: 0.0 }]
        }
        ChartPseudoline::Polyline { vertices, dir } => {
            let mut out = vec![Piece { origin: vertices[0], dir: *dir, lo: f64::NEG_INFINITY, hi: 0.0, base: 0.0 }];
            let mut cum = 0.0;
            for w in vertices.windows(2) {
                let d = w[1] - w[0];
                let len = d.norm();
                if len > 0.0 {
                    out.push(Piece { origin: w[0], dir: d / len, lo: 0.0, hi: len, base: cum });
                }
                cum += len;
            }
            out.push(Piece { origin: *vertices.last().unwrap(), dir: *dir, lo: 0.0, hi: f64::INFINITY, base: cum });
            out
        }
    }
}

/// Finite crossings of `a` with `b` as (position along `a`, point).
fn hits(a: &ChartPseudoline, b: &ChartPseudoline) -> Vec<(f64, Vec2)> {
    let mut out: Vec<(f64, Vec2)> = Vec::new();
    for p in pieces(a) {
        for q in pieces(b) {
            let det = cross(&p.dir, &q.dir);
            if det.abs() <= 1e-14 {
                continue;
            }
            let d = q.origin - p.origin;
            let tp = cross(&d, &q.dir) / det;
            let tq = cross(&d, &p.dir) / det;
            let tol = 1e-12 * (1.0 + tp.abs());
            if tp >= p.lo - tol && tp <= p.hi + tol && tq >= q.lo - tol && tq <= q.hi + tol {
                let pos = p.base + tp;
                if out.iter().all(|(s, _)| (s - pos).abs() > 1e-9) {
                    out.push((pos, p.origin + p.dir * tp));
                }
            }
        }
    }
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    out
}

/// The m > 3 pivot of line `j` in the cell of the `prefix` lines containing its
/// crossing p(0) with line `m`: inside that cell the path becomes [a, p(t), b]
/// with p(t) = t·p(1) + (1−t)·p(0) and p(1) = [a,b] ∩ L_m. Outside the cell
/// the path is fixed. Ends at infinity stand in for a missing a or b.
pub fn h_pivot_cell(
    lines: &[ChartPseudoline],
    prefix: &[usize],
    m: usize,
    j: usize,
    samples: &[f64],
) -> Result<Vec<ChartPseudoline>> {
    let lj = &lines[j];
    let fixed = || samples.iter().map(|_| lj.clone()).collect::<Vec<_>>();
    let Some(dir) = lj.dir() else { return Ok(fixed()) };
    let on_m = hits(lj, &lines[m]);
    let [(pos0, p0)] = on_m[..] else {
        return Err(Error::degenerate("cell pivot", format!("line {j} meets line {m} {} times in the chart", on_m.len())));
    };
    let mut before: Option<(f64, Vec2)> = None;
    let mut after: Option<(f64, Vec2)> = None;
    for &i in prefix {
        for (pos, p) in hits(lj, &lines[i]) {
            if pos < pos0 - 1e-9 && before.is_none_or(|b| pos > b.0) {
                before = Some((pos, p));
            }
            if pos > pos0 + 1e-9 && after.is_none_or(|a| pos < a.0) {
                after = Some((pos, p));
            }
        }
    }
    let chord = match (before, after) {
        (Some((_, a)), Some((_, b))) => ChartPseudoline::polyline(vec![a, b], dir),
        (None, Some((_, b))) => ChartPseudoline::line(b, dir),
        (Some((_, a)), None) => ChartPseudoline::line(a, dir),
        (None, None) => return Ok(fixed()),
    };
    // Only the chord piece inside the cell counts: between a and b.
    let lo = before.map_or(f64::NEG_INFINITY, |b| b.1.dot(&dir));
    let hi = after.map_or(f64::INFINITY, |a| a.1.dot(&dir));
    let inside: Vec<Vec2> = hits(&chord, &lines[m])
        .into_iter()
        .map(|(_, p)| p)
        .filter(|p| match (before, after) {
            (Some((_, a)), Some((_, b))) => {
                let d = b - a;
                let s = (p - a).dot(&d) / d.dot(&d);
                (-1e-12..=1.0 + 1e-12).contains(&s)
            }
            _ => {
                let s = p.dot(&dir);
                s >= lo.min(hi) - 1e-12 && s <= hi.max(lo) + 1e-12
            }
        })
        .collect();
    let [p1] = inside[..] else {
        return Err(Error::degenerate("cell pivot", "chord does not meet the pivot line once inside the cell"));
    };
    if (p1 - p0).norm() <= 1e-12 * (1.0 + p0.norm()) {
        return Ok(fixed());
    }
    let pts = lj.points();
    let positions: Vec<f64> = {
        let mut cum = 0.0;
        let mut v = vec![0.0];
        for w in pts.windows(2) {
            cum += (w[1] - w[0]).norm();
            v.push(cum);
        }
        v
    };
    Ok(samples
        .iter()
        .map(|&t| {
            let pt = p1 * t + p0 * (1.0 - t);
            let mut vs: Vec<Vec2> = Vec::new();
            if let Some((pa, a)) = before {
                vs.extend(pts.iter().zip(&positions).filter(|(_, &s)| s < pa - 1e-9).map(|(p, _)| *p));
                vs.push(a);
            }
            vs.push(pt);
            if let Some((pb, b)) = after {
                vs.push(b);
                vs.extend(pts.iter().zip(&positions).filter(|(_, &s)| s > pb + 1e-9).map(|(p, _)| *p));
            }
            ChartPseudoline::Polyline { vertices: vs, dir }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spherical_kernel::ChartBasis;
    use crate::straighten::chart::chart_crossings;

    #[test]
    fn foot_point_example() {
        // Oracle: P is x = y; the segment from (0,1) to (2,0) meets it at (2/3, 2/3).
        let l = ChartPseudoline::polyline(vec![Vec2::new(0.0, 1.0), Vec2::new(2.0, 0.0)], Vec2::new(1.0, -1.0));
        let p = ProjectivePivot::plan(&l).unwrap().unwrap();
        assert!((p.q0 - Vec2::new(2.0 / 3.0, 2.0 / 3.0)).norm() < 1e-15);
        let ChartPseudoline::Line { anchor, dir } = p.at(1.0).unwrap() else { panic!() };
        assert!((anchor.x + anchor.y - 4.0 / 3.0).abs() < 1e-15);
        assert!((dir.x + dir.y).abs() < 1e-15);
    }

    #[test]
    fn straight_lines_are_fixed() {
        let l = ChartPseudoline::line(Vec2::new(0.3, 0.2), Vec2::new(1.0, 2.0));
        let out = h_projective_pivot(std::slice::from_ref(&l), &[0.0, 0.5, 1.0]).unwrap();
        assert!(out.iter().all(|s| s[0] == l));
    }

    #[test]
    fn angle_schedule() {
        let l = ChartPseudoline::polyline(vec![Vec2::new(0.0, 1.0), Vec2::new(2.0, 0.0)], Vec2::new(1.0, -1.0));
        let p = ProjectivePivot::plan(&l).unwrap().unwrap();
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let a = p.angle(k as f64 / 10.0).abs();
            assert!(a <= last);
            last = a;
        }
        assert_eq!(last, 0.0);
        assert_eq!(p.at(0.0).unwrap(), l);
    }

    #[test]
    fn cell_pivot_corner_formula() {
        // Prefix: the two axes. L_m is the line x = y and line j runs from
        // (0,1) to (1,0) with its corner at (1/4, 1/4) on L_m. The chord
        // [(0,1),(1,0)] meets L_m at (1/2, 1/2).
        let lines = vec![
            ChartPseudoline::line(Vec2::zeros(), Vec2::new(0.0, 1.0)),
            ChartPseudoline::line(Vec2::zeros(), Vec2::new(1.0, 0.0)),
            ChartPseudoline::line(Vec2::zeros(), Vec2::new(1.0, 1.0)),
            ChartPseudoline::polyline(
                vec![Vec2::new(0.0, 1.0), Vec2::new(0.25, 0.25), Vec2::new(1.0, 0.0)],
                Vec2::new(1.0, -1.0),
            ),
        ];
        let out = h_pivot_cell(&lines, &[0, 1], 2, 3, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(out[0].points()[1], Vec2::new(0.25, 0.25));
        assert!((out[1].points()[1] - Vec2::new(0.375, 0.375)).norm() < 1e-15);
        assert!(out[2].simplified().is_straight());
        let b = ChartBasis::standard();
        for s in &out {
            for (i, l) in lines.iter().enumerate().take(3) {
                assert_eq!(chart_crossings(s, l, &b).unwrap(), 1, "line {i}");
            }
        }
    }
}
