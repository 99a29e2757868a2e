//! A piecewise map between two arrangements with the same covectors, taking
//! each cell of one onto the cell with the same sign vector in the other.

use crate::arrangement::{boundary_segments, path_point, path_position, Arrangement, CellComplex, CellRef, EdgeEnds};
use crate::error::{Error, Result};
use crate::spherical_kernel::{Arc, UnitVec3, Vec2, Vec3};

/// Cached complexes of the pair (A, B), with the planar boundary polygons of
/// every face of B and of their images in A.
pub struct Interpolator {
    a: Arrangement,
    b: Arrangement,
    ca: CellComplex,
    cb: CellComplex,
    faces: Vec<FacePair>,
}

struct FacePair {
    sb: Stereo,
    sa: Stereo,
    bp: Vec<Vec2>,
    ap: Vec<Vec2>,
}

impl Interpolator {
    /// Fails with [`Error::CovectorMismatch`] unless covectors(A) = covectors(B).
    pub fn new(a: &Arrangement, b: &Arrangement) -> Result<Self> {
        let ca = CellComplex::build(a)?;
        let cb = CellComplex::build(b)?;
        if ca.covectors() != cb.covectors() {
            return Err(Error::CovectorMismatch);
        }
        let mut it = Interpolator { a: a.clone(), b: b.clone(), ca, cb, faces: Vec::new() };
        it.faces = (0..it.cb.faces.len()).map(|g| it.face_pair(g)).collect::<Result<_>>()?;
        Ok(it)
    }

    fn face_pair(&self, g: usize) -> Result<FacePair> {
        let CellRef::Face(h) = self.ca.cell_of(&self.cb.sign_of(CellRef::Face(g)))? else {
            unreachable!("cell dimension")
        };
        let bpoly: Vec<UnitVec3> = boundary_segments(&self.cb.edges, &self.cb.faces[g].boundary)
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        let sb = Stereo::new(&self.cb.faces[g].sample);
        let sa = Stereo::new(&self.ca.faces[h].sample);
        let bp = bpoly.iter().map(|p| sb.project(p)).collect();
        let ap = bpoly.iter().map(|p| sa.project(&self.boundary_image(p))).collect();
        Ok(FacePair { sb, sa, bp, ap })
    }

    /// The point of A's cell matching the cell of `x` in B.
    pub fn map(&self, x: &UnitVec3) -> Result<UnitVec3> {
        let sigma = self.b.sign_vector(x);
        let y = match self.cb.cell_of(&sigma)? {
            CellRef::Bottom => return Err(Error::InvalidInput("point lies on every curve".into())),
            CellRef::Vertex(_) => {
                let CellRef::Vertex(w) = self.ca.cell_of(&sigma)? else { unreachable!("cell dimension") };
                return Ok(self.ca.vertices[w].point);
            }
            CellRef::Edge(e) => {
                let CellRef::Edge(f) = self.ca.cell_of(&sigma)? else { unreachable!("cell dimension") };
                self.edge_map(e, f, path_position(&self.cb.edges[e].path, x))
            }
            CellRef::Face(g) => self.face_map(g, x),
        };
        // Back off toward the face sample of A until the sign vector agrees.
        if self.a.sign_vector(&y) == sigma {
            return Ok(y);
        }
        let anchor = match self.ca.cell_of(&sigma)? {
            CellRef::Face(h) => self.ca.faces[h].sample,
            CellRef::Edge(f) => path_point(&self.ca.edges[f].path, 0.5),
            _ => unreachable!("vertices map exactly"),
        };
        let mut lo = 0.0;
        let mut hi = 1.0;
        let Some(arc) = Arc::new(anchor, y) else { return Ok(anchor) };
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.a.sign_vector(&arc.point_at(mid)) == sigma {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(arc.point_at(lo))
    }

    /// Point of A's edge `f` at the constant-speed parameter of B's edge `e`
    /// at fraction `frac`, measured from the end vertices with matching signs.
    fn edge_map(&self, e: usize, f: usize, frac: f64) -> UnitVec3 {
        let start = |cx: &CellComplex, e: usize| match cx.edges[e].ends {
            EdgeEnds::Segment { start, .. } => Some(cx.vertices[start].sign),
            EdgeEnds::FullCircle => None,
        };
        let same = start(&self.cb, e) == start(&self.ca, f);
        path_point(&self.ca.edges[f].path, if same { frac } else { 1.0 - frac })
    }

    /// Mean-value coordinates of `x` in B's face boundary, after stereographic
    /// projection from the antipode of the face sample, applied to the images
    /// of the boundary points in A.
    fn face_map(&self, g: usize, x: &UnitVec3) -> UnitVec3 {
        let f = &self.faces[g];
        let w = mean_value_weights(&f.bp, &f.sb.project(x));
        let z = f.ap.iter().zip(&w).fold(Vec2::zeros(), |acc, (p, wi)| acc + p * *wi);
        f.sa.unproject(&z)
    }

    /// Image in A of a point on B's 1-skeleton.
    fn boundary_image(&self, p: &UnitVec3) -> UnitVec3 {
        let sigma = self.b.sign_vector(p);
        match (self.cb.cell_of(&sigma), self.ca.cell_of(&sigma)) {
            (Ok(CellRef::Vertex(_)), Ok(CellRef::Vertex(w))) => self.ca.vertices[w].point,
            (Ok(CellRef::Edge(e)), Ok(CellRef::Edge(f))) => {
                self.edge_map(e, f, path_position(&self.cb.edges[e].path, p))
            }
            _ => *p,
        }
    }
}

/// interp(A,B) evaluated at `x`.
pub fn interp_pl(a: &Arrangement, b: &Arrangement, x: &UnitVec3) -> Result<UnitVec3> {
    Interpolator::new(a, b)?.map(x)
}

/// Stereographic projection from −s onto the plane through 0 orthogonal to s.
struct Stereo {
    s: Vec3,
    e1: Vec3,
    e2: Vec3,
}

impl Stereo {
    fn new(s: &UnitVec3) -> Self {
        let s = *s.v();
        let axis = if s.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = (axis - s * s.dot(&axis)).normalize();
        Stereo { s, e1, e2: s.cross(&e1) }
    }

    fn project(&self, y: &UnitVec3) -> Vec2 {
        let d = 1.0 + self.s.dot(y.v());
        Vec2::new(self.e1.dot(y.v()), self.e2.dot(y.v())) / d
    }

    fn unproject(&self, z: &Vec2) -> UnitVec3 {
        let r2 = z.norm_squared();
        let v = (self.e1 * z.x + self.e2 * z.y) * 2.0 + self.s * (1.0 - r2);
        UnitVec3::from_vec(v / (1.0 + r2))
    }
}

/// Floater's mean-value coordinates of `x` with respect to a closed polygon.
pub(crate) fn mean_value_weights(poly: &[Vec2], x: &Vec2) -> Vec<f64> {
    let n = poly.len();
    let d: Vec<Vec2> = poly.iter().map(|p| p - x).collect();
    let r: Vec<f64> = d.iter().map(|v| v.norm()).collect();
    if let Some(i) = r.iter().position(|&ri| ri <= 1e-14) {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        return w;
    }
    // tan(α_i/2) for the angle α_i at x between p_i and p_{i+1}.
    let tan_half: Vec<f64> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let c = d[i].x * d[j].y - d[i].y * d[j].x;
            let dot = d[i].dot(&d[j]);
            let denom = r[i] * r[j] + dot;
            if denom.abs() <= 1e-300 {
                // x on the edge between p_i and p_j.
                f64::INFINITY
            } else {
                c / denom
            }
        })
        .collect();
    if let Some(i) = tan_half.iter().position(|t| !t.is_finite()) {
        let j = (i + 1) % n;
        let mut w = vec![0.0; n];
        let t = r[i] / (r[i] + r[j]);
        w[i] = 1.0 - t;
        w[j] = t;
        return w;
    }
    let mut w: Vec<f64> = (0..n).map(|i| (tan_half[(i + n - 1) % n] + tan_half[i]) / r[i]).collect();
    let sum: f64 = w.iter().sum();
    for wi in &mut w {
        *wi /= sum;
    }
    w
}
