//! Pseudolines in the gnomonic chart of a basis.

use serde::{Deserialize, Serialize};

use crate::arrangement::{great_circle, meetings, Curve, MeetKind};
use crate::error::{Error, Result};
use crate::spherical_kernel::{ChartBasis, ChartPoint, UnitVec3, Vec2};

/// Relative tolerance below which consecutive chart directions count as parallel.
const COLLINEAR: f64 = 1e-9;

/// A pseudoline in the affine chart, closed up through the horizon: the
/// polyline ∪ the ray from its first vertex in direction −dir ∪ the ray from
/// its last vertex in direction +dir.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChartPseudoline {
    Horizon,
    Line { anchor: Vec2, dir: Vec2 },
    Polyline { vertices: Vec<Vec2>, dir: Vec2 },
}

impl ChartPseudoline {
    pub fn line(anchor: Vec2, dir: Vec2) -> Self {
        ChartPseudoline::Line { anchor, dir: dir.normalize() }
    }

    pub fn polyline(vertices: Vec<Vec2>, dir: Vec2) -> Self {
        assert!(!vertices.is_empty(), "polyline without vertices");
        ChartPseudoline::Polyline { vertices, dir: dir.normalize() }
    }

    /// Direction class of the horizon crossing; None for the horizon itself.
    pub fn dir(&self) -> Option<Vec2> {
        match self {
            ChartPseudoline::Horizon => None,
            ChartPseudoline::Line { dir, .. } | ChartPseudoline::Polyline { dir, .. } => Some(*dir),
        }
    }

    pub fn is_straight(&self) -> bool {
        !matches!(self, ChartPseudoline::Polyline { .. })
    }

    /// Affine vertices in travel order (a line contributes its anchor).
    pub fn points(&self) -> Vec<Vec2> {
        match self {
            ChartPseudoline::Horizon => Vec::new(),
            ChartPseudoline::Line { anchor, .. } => vec![*anchor],
            ChartPseudoline::Polyline { vertices, .. } => vertices.clone(),
        }
    }

    /// Drops vertices where the path does not turn; a polyline without turns
    /// becomes a line.
    pub fn simplified(&self) -> ChartPseudoline {
        let ChartPseudoline::Polyline { vertices, dir } = self else { return self.clone() };
        let mut vs: Vec<Vec2> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if vs.last().is_none_or(|l: &Vec2| (l - v).norm() > 1e-12 * (1.0 + v.norm())) {
                vs.push(*v);
            }
        }
        loop {
            let k = vs.len();
            let removable = (0..k).find(|&i| {
                let din = if i == 0 { *dir } else { vs[i] - vs[i - 1] };
                let dout = if i + 1 == k { *dir } else { vs[i + 1] - vs[i] };
                let (a, b) = (din.norm(), dout.norm());
                a > 0.0 && b > 0.0 && cross(&din, &dout).abs() <= COLLINEAR * a * b && din.dot(&dout) > 0.0
            });
            match removable {
                Some(i) if k > 1 => {
                    vs.remove(i);
                }
                Some(_) => {
                    let p = vs[0];
                    return ChartPseudoline::Line { anchor: p - dir * p.dot(dir), dir: *dir };
                }
                None => return ChartPseudoline::Polyline { vertices: vs, dir: *dir },
            }
        }
    }

    /// The symmetric sphere curve [h_in, x_1..x_k, h_out, −x_1..−x_k] whose
    /// image in the chart is this pseudoline.
    pub fn lift(&self, basis: &ChartBasis) -> Curve {
        let (pts, dir) = match self {
            ChartPseudoline::Horizon => return great_circle(&basis.a1, None, 64),
            ChartPseudoline::Line { anchor, dir } => (vec![*anchor], *dir),
            ChartPseudoline::Polyline { vertices, dir } => (vertices.clone(), *dir),
        };
        let h_in = basis.lift(0.0, -dir.x, -dir.y);
        let mut half = vec![h_in];
        half.extend(pts.iter().map(|p| basis.lift(1.0, p.x, p.y)));
        let mut vs = half.clone();
        vs.extend(half.iter().map(|v| -*v));
        Curve::new(vs).expect("lift of a chart pseudoline")
    }

    /// Reads a symmetric sphere curve in the chart: the half on the positive
    /// side of the first basis circle, entered from the horizon.
    pub fn from_curve(curve: &Curve, basis: &ChartBasis) -> Result<ChartPseudoline> {
        let a1 = basis.a1.normalize();
        let vs = curve.vertices();
        let n = vs.len();
        let w: Vec<f64> = vs.iter().map(|v| a1.dot(v.v())).collect();
        let eps = 1e-12;
        if w.iter().all(|x| x.abs() <= 1e-9) {
            return Ok(ChartPseudoline::Horizon);
        }
        let starts: Vec<usize> = (0..n).filter(|&i| w[i] > eps && w[(i + n - 1) % n] <= eps).collect();
        if starts.len() != 1 {
            return Err(Error::InvalidInput("curve does not cross the horizon exactly twice".into()));
        }
        let s = starts[0];
        let prev = (s + n - 1) % n;
        let h = if w[prev].abs() <= eps {
            vs[prev]
        } else {
            UnitVec3::from_vec(vs[prev].v() * w[s] - vs[s].v() * w[prev])
        };
        let ChartPoint::Horizon(dh) = basis.to_chart(&h) else {
            return Err(Error::degenerate("chart", "horizon crossing left the horizon"));
        };
        let mut pts = Vec::new();
        let mut i = s;
        while w[i] > eps {
            match basis.to_chart(&vs[i]) {
                ChartPoint::Affine(u, v) => pts.push(Vec2::new(u, v)),
                ChartPoint::Horizon(_) => break,
            }
            i = (i + 1) % n;
            if i == s {
                break;
            }
        }
        Ok(ChartPseudoline::Polyline { vertices: pts, dir: -dh }.simplified())
    }
}

pub(crate) fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Number of crossings of two chart pseudolines in the projective plane.
pub fn chart_crossings(a: &ChartPseudoline, b: &ChartPseudoline, basis: &ChartBasis) -> Result<usize> {
    let ms = meetings(&a.lift(basis), &b.lift(basis))?;
    Ok(ms.iter().filter(|m| m.kind == MeetKind::Crossing).count() / 2)
}
