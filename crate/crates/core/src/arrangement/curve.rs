//! Closed piecewise-geodesic curves on the sphere.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::spherical_kernel::{Arc, NearestOn, Sign, UnitVec3, Vec3};
use crate::tolerance;

/// A closed polygon of unit vectors joined by minor arcs, in travel order.
/// The positive side of every edge (u, v) is sign⟨u×v, ·⟩ = +.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    vertices: Vec<UnitVec3>,
    // cum[i] = arc length from vertex 0 to vertex i; cum[len] = total length.
    cum: Vec<f64>,
}

/// The point of a curve closest to a query point.
#[derive(Clone, Copy, Debug)]
pub struct Nearest {
    pub point: UnitVec3,
    pub chord: f64,
    pub edge: usize,
    pub on: NearestOn,
}

impl Curve {
    /// Builds a curve, dropping consecutive duplicates. Fails on fewer than
    /// three distinct vertices or on an edge of length ≥ π.
    pub fn new(vertices: Vec<UnitVec3>) -> Result<Curve> {
        let mut vs: Vec<UnitVec3> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if vs.last().is_none_or(|l| l.chord(&v) > 1e-14) {
                vs.push(v);
            }
        }
        while vs.len() > 1 && vs[0].chord(vs.last().unwrap()) <= 1e-14 {
            vs.pop();
        }
        if vs.len() < 3 {
            return Err(Error::invalid("a curve needs at least three distinct vertices"));
        }
        let mut cum = Vec::with_capacity(vs.len() + 1);
        cum.push(0.0);
        for i in 0..vs.len() {
            let a = vs[i];
            let b = vs[(i + 1) % vs.len()];
            let len = a.angle_to(&b);
            if len >= std::f64::consts::PI - 1e-9 {
                return Err(Error::invalid(format!("edge {i} is not a minor arc")));
            }
            cum.push(cum[i] + len);
        }
        Ok(Curve { vertices: vs, cum })
    }

    pub fn vertices(&self) -> &[UnitVec3] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> UnitVec3 {
        self.vertices[i % self.vertices.len()]
    }

    pub fn edge(&self, i: usize) -> Arc {
        let n = self.vertices.len();
        Arc { a: self.vertices[i % n], b: self.vertices[(i + 1) % n] }
    }

    pub fn edges(&self) -> impl Iterator<Item = Arc> + '_ {
        (0..self.vertices.len()).map(|i| self.edge(i))
    }

    pub fn length(&self) -> f64 {
        self.cum[self.vertices.len()]
    }

    /// Arc length from vertex 0 to vertex `i`.
    pub fn position_of_vertex(&self, i: usize) -> f64 {
        self.cum[i]
    }

    /// Arc-length position of `p`, a point on edge `i`.
    pub fn position_on_edge(&self, i: usize, p: &UnitVec3) -> f64 {
        let e = self.edge(i);
        let len = self.cum[i + 1] - self.cum[i];
        self.cum[i] + e.a.angle_to(p).min(len)
    }

    /// Edge containing arc-length position `s` (taken modulo the length) and
    /// the fraction along it.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let total = self.length();
        let s = s.rem_euclid(total);
        let n = self.vertices.len();
        let i = match self.cum[..=n].binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        };
        let len = self.cum[i + 1] - self.cum[i];
        let f = if len > 0.0 { ((s - self.cum[i]) / len).clamp(0.0, 1.0) } else { 0.0 };
        (i, f)
    }

    pub fn point_at(&self, s: f64) -> UnitVec3 {
        let (i, f) = self.locate(s);
        if f == 0.0 {
            return self.vertices[i];
        }
        self.edge(i).point_at(f)
    }

    /// Unit tangent of travel at position `s` (the outgoing edge direction at vertices).
    pub fn tangent_at(&self, s: f64) -> Vec3 {
        let (i, _) = self.locate(s);
        let p = self.point_at(s);
        self.edge(i).normal().cross(p.v())
    }

    /// `count` points spaced uniformly by arc length, starting at position `start`.
    pub fn resample_from(&self, start: f64, count: usize) -> Vec<UnitVec3> {
        let step = self.length() / count as f64;
        (0..count).map(|k| self.point_at(start + step * k as f64)).collect()
    }

    pub fn resample(&self, count: usize) -> Vec<UnitVec3> {
        self.resample_from(0.0, count)
    }

    /// Uniform resampling to at least `count` vertices that also keeps every
    /// original vertex and every point of `extra` lying on the curve.
    pub fn refined(&self, count: usize, extra: &[UnitVec3]) -> Curve {
        let total = self.length();
        let mut marks: Vec<f64> = (0..self.vertices.len()).map(|i| self.cum[i]).collect();
        let step = total / count as f64;
        marks.extend((0..count).map(|k| step * k as f64));
        for p in extra {
            let near = self.nearest(p);
            if near.chord <= 1e-9 {
                marks.push(self.position_on_edge(near.edge, &near.point));
            }
        }
        marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        marks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        let pts = marks.into_iter().map(|s| self.point_at(s)).collect();
        Curve::new(pts).expect("refinement of a valid curve")
    }

    /// Splits every edge into equal pieces no longer than `max_step` and adds
    /// the points of `extra` lying on the curve. Unlike [`Curve::refined`] the
    /// result does not depend on the starting vertex or the direction.
    pub fn subdivided(&self, max_step: f64, extra: &[UnitVec3]) -> Curve {
        let mut marks: Vec<f64> = Vec::new();
        for i in 0..self.vertices.len() {
            let len = self.cum[i + 1] - self.cum[i];
            let pieces = (len / max_step).ceil().max(1.0) as usize;
            marks.extend((0..pieces).map(|k| self.cum[i] + len * k as f64 / pieces as f64));
        }
        for p in extra {
            let near = self.nearest(p);
            if near.chord <= 1e-9 {
                marks.push(self.position_on_edge(near.edge, &near.point));
            }
        }
        marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        marks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        let pts = marks.into_iter().map(|s| self.point_at(s)).collect();
        Curve::new(pts).expect("refinement of a valid curve")
    }

    pub fn reversed(&self) -> Curve {
        let mut vs = self.vertices.clone();
        vs.reverse();
        Curve::new(vs).expect("reversal of a valid curve")
    }

    /// Applies `m` to every vertex (renormalizing).
    pub fn mapped(&self, m: &Matrix3<f64>) -> Curve {
        Curve::new(self.vertices.iter().map(|v| v.transform(m)).collect()).expect("image of a valid curve")
    }

    /// Closest point of the curve to `x`.
    pub fn nearest(&self, x: &UnitVec3) -> Nearest {
        let mut best = Nearest { point: self.vertices[0], chord: f64::INFINITY, edge: 0, on: NearestOn::Start };
        for (i, e) in self.edges().enumerate() {
            // Cheap rejection: the whole edge lies within half its length of its midpoint.
            let lower = (e.midpoint().chord(x) - 0.5 * (self.cum[i + 1] - self.cum[i])).max(0.0);
            if lower > best.chord {
                continue;
            }
            let (p, d, on) = e.nearest(x);
            if d < best.chord {
                best = Nearest { point: p, chord: d, edge: i, on };
            }
        }
        best
    }

    /// Chordal distance from `x` to the curve.
    pub fn distance(&self, x: &UnitVec3) -> f64 {
        self.nearest(x).chord
    }

    /// Side of `x`: + on the left of travel, − on the right, 0 within the
    /// incidence tolerance of the curve.
    pub fn side(&self, x: &UnitVec3) -> Sign {
        let eps = tolerance::geo();
        let near = self.nearest(x);
        if near.chord <= eps {
            return Sign::Zero;
        }
        if near.on == NearestOn::Interior && near.chord > 10.0 * eps {
            return Sign::of(self.edge(near.edge).normal().dot(x.v()), 0.0);
        }
        let w = match near.on {
            NearestOn::End => near.edge + 1,
            _ => near.edge,
        };
        if near.on == NearestOn::Interior {
            // Thin margin next to an edge interior: the foot of the perpendicular is exact.
            let s = Sign::of(self.edge(near.edge).normal().dot(x.v()), 0.0);
            if s != Sign::Zero {
                return s;
            }
        } else if let Some(s) = self.wedge_side(w, x) {
            return s;
        }
        self.ray_cast_side(x).unwrap_or(Sign::Zero)
    }

    // Side of x relative to the corner at vertex w, valid when w is the closest
    // point of the curve to x.
    fn wedge_side(&self, w: usize, x: &UnitVec3) -> Option<Sign> {
        let n = self.vertices.len();
        let c = self.vertices[w % n];
        let prev = self.vertices[(w + n - 1) % n];
        let next = self.vertices[(w + 1) % n];
        let tangent = |p: &UnitVec3| -> Option<Vec3> {
            let t = p.v() - c.v() * c.dot(p);
            let len = t.norm();
            (len > 1e-15).then(|| t / len)
        };
        let t_out = tangent(&next)?;
        let t_in = tangent(&prev)?;
        let d = tangent(x)?;
        let ccw = |a: &Vec3, b: &Vec3| -> f64 {
            let ang = c.v().dot(&a.cross(b)).atan2(a.dot(b));
            if ang < 0.0 {
                ang + std::f64::consts::TAU
            } else {
                ang
            }
        };
        let to_d = ccw(&t_out, &d);
        let to_in = ccw(&t_out, &t_in);
        if to_d < 1e-12 || (to_d - to_in).abs() < 1e-12 {
            return None;
        }
        Some(if to_d < to_in { Sign::Pos } else { Sign::Neg })
    }

    // Parity of crossings along the geodesic from x to a reference point of known side.
    fn ray_cast_side(&self, x: &UnitVec3) -> Option<Sign> {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| {
            let la = self.cum[a + 1] - self.cum[a];
            let lb = self.cum[b + 1] - self.cum[b];
            lb.partial_cmp(&la).unwrap()
        });
        for &i in order.iter().take(8) {
            let e = self.edge(i);
            let len = self.cum[i + 1] - self.cum[i];
            let m = e.midpoint();
            let mut h = (0.25 * len).min(1e-3);
            let mut reference = None;
            for _ in 0..20 {
                let y = UnitVec3::from_vec(m.v() * h.cos() + e.normal() * h.sin());
                let ny = self.nearest(&y);
                if ny.edge == i && ny.on == NearestOn::Interior && ny.chord > 1e-13 {
                    reference = Some(y);
                    break;
                }
                h *= 0.25;
            }
            let Some(y) = reference else { continue };
            let Some(ray) = Arc::new(*x, y) else { continue };
            let mut parity = 0usize;
            let mut clean = true;
            for f in self.edges() {
                for c in crate::spherical_kernel::arc_intersect(&ray, &f) {
                    if c.kind == crate::spherical_kernel::ContactKind::Crossing {
                        parity += 1;
                    } else {
                        clean = false;
                    }
                }
            }
            if clean {
                return Some(if parity.is_multiple_of(2) { Sign::Pos } else { Sign::Neg });
            }
        }
        None
    }

    /// Unit normal if every vertex lies within `tol` of a common great circle,
    /// oriented so that the positive side is sign⟨n,·⟩.
    pub fn great_circle_normal(&self, tol: f64) -> Option<Vec3> {
        let mut sum = Vec3::zeros();
        for e in self.edges() {
            sum += e.a.cross(&e.b);
        }
        let n = sum.try_normalize(1e-300)?;
        self.vertices.iter().all(|v| n.dot(v.v()).abs() <= tol).then_some(n)
    }

    /// Whether the vertex list has the form v_{j+k} = −v_j.
    pub fn is_antipodal_form(&self, tol: f64) -> bool {
        let n = self.vertices.len();
        n.is_multiple_of(2) && (0..n / 2).all(|j| (self.vertices[j].v() + self.vertices[j + n / 2].v()).norm() <= tol)
    }

    /// Self-intersection check: non-adjacent edges disjoint, adjacent edges
    /// meeting only at their shared vertex.
    pub fn simplicity_violation(&self) -> Option<(usize, usize)> {
        use crate::spherical_kernel::arc_intersect;
        let n = self.vertices.len();
        let caps: Vec<(UnitVec3, f64)> = (0..n)
            .map(|i| (self.edge(i).midpoint(), 0.5 * (self.cum[i + 1] - self.cum[i])))
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                if caps[i].0.angle_to(&caps[j].0) > caps[i].1 + caps[j].1 + 1e-9 {
                    continue;
                }
                let hits = arc_intersect(&self.edge(i), &self.edge(j));
                let adjacent_ij = j == i + 1;
                let adjacent_ji = i == 0 && j == n - 1;
                if !adjacent_ij && !adjacent_ji {
                    if !hits.is_empty() {
                        return Some((i, j));
                    }
                    continue;
                }
                let shared = if adjacent_ij { self.vertex(j) } else { self.vertex(0) };
                let eps = tolerance::geo();
                if hits.iter().any(|h| h.point.chord(&shared) > eps) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// A symmetric great-circle polygon with `count` vertices (count even), normal
/// `n`, starting at `start` (projected onto the circle).
pub fn great_circle(n: &Vec3, start: Option<&Vec3>, count: usize) -> Curve {
    let n = n.normalize();
    let seed = match start {
        Some(s) if (s - n * n.dot(s)).norm() > 1e-9 => s - n * n.dot(s),
        _ => {
            let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
                Vec3::x()
            } else if n.y.abs() <= n.z.abs() {
                Vec3::y()
            } else {
                Vec3::z()
            };
            axis - n * n.dot(&axis)
        }
    };
    let ea = seed.normalize();
    let eb = n.cross(&ea);
    let half = count / 2;
    let mut vs: Vec<UnitVec3> = (0..half)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / count as f64;
            UnitVec3::from_vec(ea * t.cos() + eb * t.sin())
        })
        .collect();
    let neg: Vec<UnitVec3> = vs.iter().map(|v| -*v).collect();
    vs.extend(neg);
    Curve::new(vs).expect("great circle polygon")
}
