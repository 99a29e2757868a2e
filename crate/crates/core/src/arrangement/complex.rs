//! The cell complex induced on the sphere by an arrangement.

use std::collections::HashMap;

use super::{Analysis, Arrangement, Curve};
use crate::error::{Error, Result};
use crate::oriented_matroid::{Chirotope, CovectorSet, SignVector};
use crate::spherical_kernel::{Arc, Sign, UnitVec3, Vec3};
use crate::tolerance::EPS_CLUSTER;

/// Elements whose curves coincide as point sets. `members` pairs each element
/// with its orientation relative to the representative.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelClass {
    pub rep: usize,
    pub members: Vec<(usize, i8)>,
}

#[derive(Clone, Debug)]
pub struct ComplexVertex {
    pub point: UnitVec3,
    pub sign: SignVector,
    /// Kernel classes through the vertex.
    pub classes: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeEnds {
    Segment { start: usize, end: usize },
    /// A whole curve without vertices on it.
    FullCircle,
}

#[derive(Clone, Debug)]
pub struct ComplexEdge {
    pub class: usize,
    pub ends: EdgeEnds,
    /// Points from start to end along the representative's travel direction.
    pub path: Vec<UnitVec3>,
    pub sign: SignVector,
}

#[derive(Clone, Debug)]
pub struct ComplexFace {
    /// Directed edges (edge id, traversed forward) with the face on their left.
    pub boundary: Vec<(usize, bool)>,
    pub sample: UnitVec3,
    pub sign: SignVector,
}

/// A cell addressed by its sign vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellRef {
    Bottom,
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

/// Vertices, edges and faces with their sign vectors.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub n: usize,
    pub classes: Vec<KernelClass>,
    pub vertices: Vec<ComplexVertex>,
    pub edges: Vec<ComplexEdge>,
    pub faces: Vec<ComplexFace>,
    /// Edge ids of each class in the representative's travel order.
    pub class_edges: Vec<Vec<usize>>,
    /// Class of every element (None for trivial ones) and its orientation.
    pub element_class: Vec<Option<(usize, i8)>>,
    index: HashMap<SignVector, CellRef>,
}

impl CellComplex {
    /// Builds the complex of a valid spanning arrangement.
    pub fn build(a: &Arrangement) -> Result<CellComplex> {
        let c = Self::build_any(a)?;
        let spanning = c.classes.len() >= 3 && c.vertices.iter().all(|v| v.classes.len() < c.classes.len());
        if !spanning {
            return Err(Error::NotSpanning);
        }
        Ok(c)
    }

    /// Builds the complex of any valid arrangement, spanning or not.
    pub fn build_any(a: &Arrangement) -> Result<CellComplex> {
        let analysis = a.analyze()?;
        Builder::new(a, analysis)?.run()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Cell with sign vector σ; the zero vector is the bottom element.
    pub fn cell_of(&self, sigma: &SignVector) -> Result<CellRef> {
        if sigma.len() != self.n {
            return Err(Error::InvalidInput(format!("sign vector has length {} instead of {}", sigma.len(), self.n)));
        }
        if sigma.is_zero() {
            return Ok(CellRef::Bottom);
        }
        self.index
            .get(sigma)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("no cell with sign vector {sigma}")))
    }

    pub fn sign_of(&self, cell: CellRef) -> SignVector {
        match cell {
            CellRef::Bottom => SignVector::zero(self.n),
            CellRef::Vertex(v) => self.vertices[v].sign,
            CellRef::Edge(e) => self.edges[e].sign,
            CellRef::Face(f) => self.faces[f].sign,
        }
    }

    /// All cell sign vectors plus the zero vector.
    pub fn covectors(&self) -> CovectorSet {
        let all = self
            .vertices
            .iter()
            .map(|v| v.sign)
            .chain(self.edges.iter().map(|e| e.sign))
            .chain(self.faces.iter().map(|f| f.sign))
            .chain(std::iter::once(SignVector::zero(self.n)));
        CovectorSet::new(self.n, all).expect("complex sign vectors have length n")
    }

    /// Chirotope by the crossing-point rule: χ(i,j,k) is the side of α_i at
    /// the crossing of S_j and S_k where travel along S_k passes from the −
    /// side to the + side of S_j.
    pub fn chirotope(&self) -> Chirotope {
        Chirotope::from_sorted(self.n, |i, j, k| self.crossing_rule(i, j, k))
    }

    fn crossing_rule(&self, i: usize, j: usize, k: usize) -> Sign {
        let (Some((ci, _)), Some((cj, _)), Some((ck, ok))) =
            (self.element_class[i], self.element_class[j], self.element_class[k])
        else {
            return Sign::Zero;
        };
        if ci == cj || cj == ck || ci == ck {
            return Sign::Zero;
        }
        if self.vertices.iter().any(|v| [ci, cj, ck].iter().all(|c| v.classes.contains(c))) {
            return Sign::Zero;
        }
        let mut cycle = self.class_edges[ck].clone();
        if ok < 0 {
            cycle.reverse();
        }
        let len = cycle.len();
        for t in 0..len {
            let prev = &self.edges[cycle[t]];
            let next = &self.edges[cycle[(t + 1) % len]];
            let EdgeEnds::Segment { start, end } = prev.ends else { continue };
            let v = if ok > 0 { end } else { start };
            if !self.vertices[v].classes.contains(&cj) {
                continue;
            }
            if prev.sign.get(j) == Sign::Neg && next.sign.get(j) == Sign::Pos {
                return self.vertices[v].sign.get(i);
            }
        }
        Sign::Zero
    }

    /// Point on an edge at fraction `f` of its length (constant speed).
    pub fn edge_point(&self, e: usize, f: f64) -> UnitVec3 {
        path_point(&self.edges[e].path, f)
    }
}

pub(crate) fn path_length(path: &[UnitVec3]) -> f64 {
    path.windows(2).map(|w| w[0].angle_to(&w[1])).sum()
}

/// Fraction of the arc length along a polyline at its point nearest `x`.
pub(crate) fn path_position(path: &[UnitVec3], x: &UnitVec3) -> f64 {
    let total = path_length(path);
    if total == 0.0 {
        return 0.0;
    }
    let mut best = (f64::INFINITY, 0.0);
    let mut cum = 0.0;
    for w in path.windows(2) {
        let len = w[0].angle_to(&w[1]);
        if let Some(arc) = Arc::new(w[0], w[1]) {
            let (p, chord, _) = arc.nearest(x);
            if chord < best.0 {
                best = (chord, cum + w[0].angle_to(&p));
            }
        }
        cum += len;
    }
    (best.1 / total).clamp(0.0, 1.0)
}

/// Point at fraction `f` of the arc length along a polyline.
pub(crate) fn path_point(path: &[UnitVec3], f: f64) -> UnitVec3 {
    let total = path_length(path);
    let mut target = f.clamp(0.0, 1.0) * total;
    for w in path.windows(2) {
        let len = w[0].angle_to(&w[1]);
        if target <= len {
            if len == 0.0 {
                return w[0];
            }
            return Arc { a: w[0], b: w[1] }.point_at(target / len);
        }
        target -= len;
    }
    *path.last().unwrap()
}

struct Builder<'a> {
    a: &'a Arrangement,
    analysis: Analysis,
}

impl<'a> Builder<'a> {
    fn new(a: &'a Arrangement, analysis: Analysis) -> Result<Self> {
        let m = analysis.classes.len();
        for x in 0..m {
            for y in x + 1..m {
                let ms = &analysis.meetings[x][y];
                let crossings = ms.iter().filter(|t| t.kind == super::MeetKind::Crossing).count();
                if crossings != 2 || ms.len() != 2 {
                    return Err(Error::invalid(format!(
                        "elements {} and {} meet at {} points ({} crossings)",
                        analysis.classes[x].rep,
                        analysis.classes[y].rep,
                        ms.len(),
                        crossings
                    )));
                }
            }
        }
        Ok(Builder { a, analysis })
    }

    fn rep(&self, c: usize) -> &Curve {
        self.a.elements[self.analysis.classes[c].rep].curve().unwrap()
    }

    fn run(self) -> Result<CellComplex> {
        let n = self.a.n();
        let classes = self.analysis.classes.clone();
        let m = classes.len();
        let mut element_class = vec![None; n];
        for (c, class) in classes.iter().enumerate() {
            for &(i, o) in &class.members {
                element_class[i] = Some((c, o));
            }
        }

        // Vertices: clustered pairwise crossing points, with positions along each class.
        let mut points: Vec<UnitVec3> = Vec::new();
        let mut on_class: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut per_class: Vec<Vec<(f64, usize)>> = vec![Vec::new(); m];
        for x in 0..m {
            for y in x + 1..m {
                for mt in &self.analysis.meetings[x][y] {
                    let id = match points.iter().position(|p| p.chord(&mt.point) <= EPS_CLUSTER) {
                        Some(id) => id,
                        None => {
                            points.push(mt.point);
                            on_class.push(Vec::new());
                            points.len() - 1
                        }
                    };
                    for (c, s) in [(x, mt.s_p), (y, mt.s_q)] {
                        if !on_class[id].iter().any(|e| e.0 == c) {
                            on_class[id].push((c, s));
                            per_class[c].push((s, id));
                        }
                    }
                }
            }
        }

        // Edges along each class.
        let mut edges: Vec<ComplexEdge> = Vec::new();
        let mut class_edges: Vec<Vec<usize>> = vec![Vec::new(); m];
        for c in 0..m {
            let curve = self.rep(c);
            let list = &mut per_class[c];
            list.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
            if list.is_empty() {
                let mut path = curve.vertices().to_vec();
                path.push(curve.vertex(0));
                class_edges[c].push(edges.len());
                edges.push(ComplexEdge { class: c, ends: EdgeEnds::FullCircle, path, sign: SignVector::zero(n) });
                continue;
            }
            let total = curve.length();
            for t in 0..list.len() {
                let (s0, v0) = list[t];
                let (s1, v1) = list[(t + 1) % list.len()];
                let span = if list.len() == 1 { total } else { (s1 - s0).rem_euclid(total) };
                let mut inner: Vec<(f64, UnitVec3)> = (0..curve.vertex_count())
                    .filter_map(|i| {
                        let off = (curve.position_of_vertex(i) - s0).rem_euclid(total);
                        (off > 1e-12 && off < span - 1e-12).then(|| (off, curve.vertex(i)))
                    })
                    .collect();
                inner.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
                let mut path = vec![points[v0]];
                path.extend(inner.into_iter().map(|x| x.1).filter(|p| p.chord(&points[v0]) > 1e-12 && p.chord(&points[v1]) > 1e-12));
                path.push(points[v1]);
                class_edges[c].push(edges.len());
                edges.push(ComplexEdge {
                    class: c,
                    ends: EdgeEnds::Segment { start: v0, end: v1 },
                    path,
                    sign: SignVector::zero(n),
                });
            }
        }

        // Faces by half-edge traversal; half-edge 2e runs forward along edge e, 2e+1 backward.
        let mut boundaries: Vec<Vec<(usize, bool)>> = Vec::new();
        if points.is_empty() {
            for e in 0..edges.len() {
                boundaries.push(vec![(e, true)]);
                boundaries.push(vec![(e, false)]);
            }
        } else {
            let mut outgoing: Vec<Vec<(f64, usize)>> = vec![Vec::new(); points.len()];
            for (e, edge) in edges.iter().enumerate() {
                let EdgeEnds::Segment { start, end } = edge.ends else { continue };
                let p = &edge.path;
                outgoing[start].push((direction_angle(&points[start], &p[1]), 2 * e));
                outgoing[end].push((direction_angle(&points[end], &p[p.len() - 2]), 2 * e + 1));
            }
            for list in outgoing.iter_mut() {
                list.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
            }
            let head = |h: usize| -> usize {
                match edges[h / 2].ends {
                    EdgeEnds::Segment { start, end } => {
                        if h.is_multiple_of(2) {
                            end
                        } else {
                            start
                        }
                    }
                    EdgeEnds::FullCircle => unreachable!(),
                }
            };
            let mut seen = vec![false; 2 * edges.len()];
            for h0 in 0..2 * edges.len() {
                if seen[h0] {
                    continue;
                }
                let mut cycle = Vec::new();
                let mut h = h0;
                while !seen[h] {
                    seen[h] = true;
                    cycle.push((h / 2, h % 2 == 0));
                    let w = head(h);
                    let twin = h ^ 1;
                    let list = &outgoing[w];
                    let at = list.iter().position(|x| x.1 == twin).expect("twin leaves the head vertex");
                    h = list[(at + list.len() - 1) % list.len()].1;
                }
                if h != h0 {
                    return Err(Error::degenerate("cell complex", "face traversal did not close"));
                }
                boundaries.push(cycle);
            }
        }
        let euler = points.len() as i64 - edges.len() as i64 + boundaries.len() as i64;
        if m >= 2 && euler != 2 {
            return Err(Error::degenerate("cell complex", format!("Euler characteristic {euler}")));
        }

        // Sign vectors.
        let expand = |class_signs: &[Sign]| -> SignVector {
            SignVector::from_signs(
                (0..n).map(|i| element_class[i].map_or(Sign::Zero, |(c, o)| class_signs[c] * Sign::from_i8(o))),
            )
        };
        let class_side = |x: &UnitVec3, skip: &[usize]| -> Vec<Sign> {
            (0..m).map(|c| if skip.contains(&c) { Sign::Zero } else { self.rep(c).side(x) }).collect()
        };
        let vertices: Vec<ComplexVertex> = points
            .iter()
            .zip(&on_class)
            .map(|(p, on)| {
                let cls: Vec<usize> = on.iter().map(|x| x.0).collect();
                ComplexVertex { point: *p, sign: expand(&class_side(p, &cls)), classes: cls }
            })
            .collect();
        let mut edge_class_signs = Vec::with_capacity(edges.len());
        for edge in edges.iter_mut() {
            let mid = path_point(&edge.path, 0.5);
            let s = class_side(&mid, &[edge.class]);
            if s.iter().enumerate().any(|(c, v)| c != edge.class && *v == Sign::Zero) {
                return Err(Error::degenerate("cell complex", "edge midpoint lies on another curve"));
            }
            edge.sign = expand(&s);
            edge_class_signs.push(s);
        }
        let mut faces = Vec::with_capacity(boundaries.len());
        for boundary in boundaries {
            let mut s: Vec<Option<Sign>> = vec![None; m];
            for &(e, fwd) in &boundary {
                let c = edges[e].class;
                let here = if fwd { Sign::Pos } else { Sign::Neg };
                match s[c] {
                    Some(prev) if prev != here => {
                        return Err(Error::degenerate("cell complex", "face lies on both sides of a curve"))
                    }
                    _ => s[c] = Some(here),
                }
            }
            let first = &edge_class_signs[boundary[0].0];
            let s: Vec<Sign> = s.iter().enumerate().map(|(c, v)| v.unwrap_or(first[c])).collect();
            let sample = face_sample(&edges, &boundary);
            faces.push(ComplexFace { boundary, sample, sign: expand(&s) });
        }

        let mut index = HashMap::new();
        let cells = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.sign, CellRef::Vertex(i)))
            .chain(edges.iter().enumerate().map(|(i, e)| (e.sign, CellRef::Edge(i))))
            .chain(faces.iter().enumerate().map(|(i, f)| (f.sign, CellRef::Face(i))));
        for (sign, cell) in cells {
            if index.insert(sign, cell).is_some() {
                return Err(Error::degenerate("cell complex", format!("two cells share sign vector {sign}")));
            }
        }
        Ok(CellComplex { n, classes, vertices, edges, faces, class_edges, element_class, index })
    }
}

// Angle of the direction from `c` toward `p` in the tangent plane at `c`.
fn direction_angle(c: &UnitVec3, p: &UnitVec3) -> f64 {
    let axis = if c.x().abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let t0 = (axis - c.v() * c.v().dot(&axis)).normalize();
    let t1 = c.v().cross(&t0);
    let d = p.v() - c.v() * c.dot(p);
    d.dot(&t1).atan2(d.dot(&t0))
}

/// Segments of a face boundary in traversal order (face on the left).
pub(crate) fn boundary_segments(edges: &[ComplexEdge], boundary: &[(usize, bool)]) -> Vec<(UnitVec3, UnitVec3)> {
    let mut segs = Vec::new();
    for &(e, fwd) in boundary {
        let p = &edges[e].path;
        if fwd {
            segs.extend(p.windows(2).map(|w| (w[0], w[1])));
        } else {
            segs.extend(p.windows(2).rev().map(|w| (w[1], w[0])));
        }
    }
    segs
}

// An interior point: shoot a geodesic inward from boundary segment midpoints and
// stop halfway to the first boundary hit; keep the deepest such point.
fn face_sample(edges: &[ComplexEdge], boundary: &[(usize, bool)]) -> UnitVec3 {
    let segs = boundary_segments(edges, boundary);
    let normals: Vec<Vec3> = segs.iter().map(|(a, b)| a.cross(b).normalize()).collect();
    let stride = (segs.len() / 24).max(1);
    let mut best: Option<(f64, UnitVec3)> = None;
    for s in (0..segs.len()).step_by(stride) {
        let (a, b) = segs[s];
        let mid = UnitVec3::from_vec(a.v() + b.v());
        let dir = normals[s];
        let mut hit = std::f64::consts::PI;
        for (t, (c, d)) in segs.iter().enumerate() {
            if t == s {
                continue;
            }
            let nrm = &normals[t];
            let theta0 = (-nrm.dot(mid.v())).atan2(nrm.dot(&dir));
            for theta in [theta0, theta0 + std::f64::consts::PI, theta0 - std::f64::consts::PI] {
                if theta <= 1e-12 || theta >= hit {
                    continue;
                }
                let x = UnitVec3::from_vec(mid.v() * theta.cos() + dir * theta.sin());
                if (Arc { a: *c, b: *d }).contains(&x, 1e-12) {
                    hit = theta;
                }
            }
        }
        let depth = 0.5 * hit;
        if best.is_none_or(|(d, _)| depth > d) {
            best = Some((depth, UnitVec3::from_vec(mid.v() * depth.cos() + dir * depth.sin())));
        }
    }
    best.expect("face boundary has segments").1
}
