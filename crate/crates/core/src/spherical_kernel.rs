//! Spherical and projective primitives: unit vectors, orientation signs, minor
//! arcs and their intersections, and the gnomonic chart attached to a basis.

use std::fmt;
use std::ops::{Mul, Neg};

use nalgebra::{Matrix3, Rotation3 as NaRotation, Unit, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tolerance::{self, EPS_DET};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

/// A point of the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    /// Normalizes `(x, y, z)`. Panics on the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self::try_from_vec(Vec3::new(x, y, z)).expect("zero vector has no direction")
    }

    pub fn try_from_vec(v: Vec3) -> Option<Self> {
        let n = v.norm();
        if n > 1e-300 && n.is_finite() {
            Some(UnitVec3(v / n))
        } else {
            None
        }
    }

    /// Wraps a vector that is already unit length (only renormalized if it drifted).
    pub fn from_vec(v: Vec3) -> Self {
        let n = v.norm();
        if (n - 1.0).abs() <= 1e-15 {
            UnitVec3(v)
        } else {
            UnitVec3(v / n)
        }
    }

    pub fn e1() -> Self {
        UnitVec3(Vec3::x())
    }
    pub fn e2() -> Self {
        UnitVec3(Vec3::y())
    }
    pub fn e3() -> Self {
        UnitVec3(Vec3::z())
    }

    pub fn v(&self) -> &Vec3 {
        &self.0
    }
    pub fn x(&self) -> f64 {
        self.0.x
    }
    pub fn y(&self) -> f64 {
        self.0.y
    }
    pub fn z(&self) -> f64 {
        self.0.z
    }
    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    pub fn dot(&self, o: &UnitVec3) -> f64 {
        self.0.dot(&o.0)
    }

    pub fn cross(&self, o: &UnitVec3) -> Vec3 {
        self.0.cross(&o.0)
    }

    /// Geodesic distance, accurate for both tiny and near-π angles.
    pub fn angle_to(&self, o: &UnitVec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }

    /// Euclidean (chordal) distance.
    pub fn chord(&self, o: &UnitVec3) -> f64 {
        (self.0 - o.0).norm()
    }

    /// Image under a linear map, renormalized.
    pub fn transform(&self, m: &Matrix3<f64>) -> UnitVec3 {
        UnitVec3::from_vec(m * self.0)
    }
}

impl Neg for UnitVec3 {
    type Output = UnitVec3;
    fn neg(self) -> UnitVec3 {
        UnitVec3(-self.0)
    }
}

/// Point at angle `theta` along the great circle leaving `p` in tangent direction `t`.
pub fn geodesic_point(p: &UnitVec3, t: &Vec3, theta: f64) -> UnitVec3 {
    UnitVec3::from_vec(p.v() * theta.cos() + t * theta.sin())
}

/// A sign in {-, 0, +}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg = -1,
    Zero = 0,
    Pos = 1,
}

impl Sign {
    pub fn of(x: f64, eps: f64) -> Sign {
        if x > eps {
            Sign::Pos
        } else if x < -eps {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub fn to_i8(self) -> i8 {
        self as i8
    }

    pub fn from_i8(v: i8) -> Sign {
        match v.signum() {
            1 => Sign::Pos,
            -1 => Sign::Neg,
            _ => Sign::Zero,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Zero => '0',
            Sign::Neg => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Pos),
            '0' => Some(Sign::Zero),
            '-' => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        Sign::from_i8(-self.to_i8())
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        Sign::from_i8(self.to_i8() * o.to_i8())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Sign of det[a b c]; zero when |det| ≤ 1e-12.
pub fn orient(a: &UnitVec3, b: &UnitVec3, c: &UnitVec3) -> Sign {
    Sign::of(a.v().dot(&b.cross(c)), EPS_DET)
}

/// A minor geodesic arc from `a` to `b` (length strictly below π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub a: UnitVec3,
    pub b: UnitVec3,
}

/// How two arcs meet at a reported point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContactKind {
    /// Interior points of both arcs, crossing transversally.
    Crossing,
    /// The point is an endpoint of at least one arc.
    Touching,
    /// Endpoint of a shared stretch of a common great circle.
    Overlap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contact {
    pub point: UnitVec3,
    pub kind: ContactKind,
}

impl Arc {
    /// Fails when the endpoints coincide or are antipodal within 1e-9.
    pub fn new(a: UnitVec3, b: UnitVec3) -> Option<Arc> {
        let arc = Arc { a, b };
        let len = arc.length();
        if len <= 1e-9 || len >= std::f64::consts::PI - 1e-9 {
            None
        } else {
            Some(arc)
        }
    }

    pub fn length(&self) -> f64 {
        self.a.angle_to(&self.b)
    }

    /// Unit normal of the arc's plane, oriented by the travel direction.
    pub fn normal(&self) -> Vec3 {
        self.a.cross(&self.b).normalize()
    }

    pub fn reversed(&self) -> Arc {
        Arc { a: self.b, b: self.a }
    }

    /// Point at fraction `f` of the arc length from `a`.
    pub fn point_at(&self, f: f64) -> UnitVec3 {
        let len = self.length();
        let n = self.normal();
        let t = n.cross(self.a.v());
        geodesic_point(&self.a, &t, f * len)
    }

    pub fn midpoint(&self) -> UnitVec3 {
        UnitVec3::from_vec(self.a.v() + self.b.v())
    }

    /// Whether `p` lies on the arc within `eps`.
    pub fn contains(&self, p: &UnitVec3, eps: f64) -> bool {
        let n = self.normal();
        if n.dot(p.v()).abs() > eps {
            return false;
        }
        if p.chord(&self.a) <= eps || p.chord(&self.b) <= eps {
            return true;
        }
        self.a.cross(p).dot(&n) >= -eps && p.cross(&self.b).dot(&n) >= -eps && p.dot(&self.midpoint()) > 0.0
    }

    /// Closest point of the arc to `x` and its chordal distance.
    pub fn nearest(&self, x: &UnitVec3) -> (UnitVec3, f64, NearestOn) {
        let n = self.normal();
        let proj = x.v() - n * n.dot(x.v());
        if let Some(q) = UnitVec3::try_from_vec(proj) {
            let inside = self.a.cross(&q).dot(&n) > 0.0 && q.cross(&self.b).dot(&n) > 0.0;
            if inside {
                return (q, q.chord(x), NearestOn::Interior);
            }
        }
        let da = self.a.chord(x);
        let db = self.b.chord(x);
        if da <= db {
            (self.a, da, NearestOn::Start)
        } else {
            (self.b, db, NearestOn::End)
        }
    }
}

/// Which part of an arc a nearest point falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NearestOn {
    Start,
    Interior,
    End,
}

/// Positive side of a travel-oriented edge: sign⟨u×v, x⟩.
pub fn edge_side(edge: &Arc, x: &UnitVec3) -> Sign {
    Sign::of(edge.normal().dot(x.v()), tolerance::geo())
}

/// Intersections of two minor arcs.
///
/// Returns no points, one point (a transversal crossing or a touch at an
/// endpoint), or the two endpoints of a shared stretch when the arcs overlap on
/// a common great circle.
pub fn arc_intersect(p: &Arc, q: &Arc) -> Vec<Contact> {
    let eps = tolerance::geo();
    let np = p.normal();
    let nq = q.normal();
    let coplanar = np.dot(q.a.v()).abs() <= eps && np.dot(q.b.v()).abs() <= eps;
    if coplanar {
        return cocircular_contacts(p, q, eps);
    }
    let Some(x) = UnitVec3::try_from_vec(np.cross(&nq)) else {
        return cocircular_contacts(p, q, eps);
    };
    let mut out = Vec::new();
    for cand in [x, -x] {
        if p.contains(&cand, eps) && q.contains(&cand, eps) {
            let at_end = [p.a, p.b, q.a, q.b].iter().any(|e| e.chord(&cand) <= eps);
            let point = snap_to_endpoint(cand, &[p.a, p.b, q.a, q.b], eps);
            let kind = if at_end { ContactKind::Touching } else { ContactKind::Crossing };
            out.push(Contact { point, kind });
            break;
        }
    }
    out
}

fn snap_to_endpoint(x: UnitVec3, ends: &[UnitVec3], eps: f64) -> UnitVec3 {
    ends.iter().copied().find(|e| e.chord(&x) <= eps).unwrap_or(x)
}

fn cocircular_contacts(p: &Arc, q: &Arc, eps: f64) -> Vec<Contact> {
    let mut pts: Vec<UnitVec3> = Vec::new();
    for e in [p.a, p.b] {
        if q.contains(&e, eps) {
            pts.push(e);
        }
    }
    for e in [q.a, q.b] {
        if p.contains(&e, eps) && pts.iter().all(|x| x.chord(&e) > eps) {
            pts.push(e);
        }
    }
    match pts.len() {
        0 => Vec::new(),
        1 => vec![Contact { point: pts[0], kind: ContactKind::Touching }],
        _ => pts
            .into_iter()
            .take(2)
            .map(|point| Contact { point, kind: ContactKind::Overlap })
            .collect(),
    }
}

/// A point of the projective plane in a gnomonic chart.
#[derive(Clone, Copy, Debug)]
pub enum ChartPoint {
    Affine(f64, f64),
    /// A point at infinity; `d` and `-d` denote the same point.
    Horizon(Vec2),
}

impl PartialEq for ChartPoint {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ChartPoint::Affine(u, v), ChartPoint::Affine(s, t)) => u == s && v == t,
            (ChartPoint::Horizon(d), ChartPoint::Horizon(e)) => {
                (d - e).norm() <= 1e-12 || (d + e).norm() <= 1e-12
            }
            _ => false,
        }
    }
}

impl ChartPoint {
    /// Approximate equality with tolerance `eps`.
    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        match (self, other) {
            (ChartPoint::Affine(u, v), ChartPoint::Affine(s, t)) => {
                (u - s).abs() <= eps && (v - t).abs() <= eps
            }
            (ChartPoint::Horizon(d), ChartPoint::Horizon(e)) => {
                (d - e).norm() <= eps || (d + e).norm() <= eps
            }
            _ => false,
        }
    }
}

/// The chart sending the first basis circle to the horizon and the other two
/// to the coordinate axes: x ↦ (⟨a2,x⟩/⟨a1,x⟩, ⟨a3,x⟩/⟨a1,x⟩).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartBasis {
    pub a1: Vec3,
    pub a2: Vec3,
    pub a3: Vec3,
    inv: Matrix3<f64>,
}

impl ChartBasis {
    /// Fails unless the three vectors are independent (|det| > 1e-12 after normalization).
    pub fn new(a1: Vec3, a2: Vec3, a3: Vec3) -> Option<ChartBasis> {
        let (n1, n2, n3) = (a1.norm(), a2.norm(), a3.norm());
        if n1 == 0.0 || n2 == 0.0 || n3 == 0.0 {
            return None;
        }
        let det = (a1 / n1).dot(&(a2 / n2).cross(&(a3 / n3)));
        if det.abs() <= EPS_DET {
            return None;
        }
        let m = Matrix3::from_rows(&[a1.transpose(), a2.transpose(), a3.transpose()]);
        let inv = m.try_inverse()?;
        Some(ChartBasis { a1, a2, a3, inv })
    }

    pub fn standard() -> ChartBasis {
        ChartBasis::new(Vec3::x(), Vec3::y(), Vec3::z()).expect("standard basis")
    }

    /// Lift of the homogeneous chart vector (w, u, v) to the sphere.
    pub fn lift(&self, w: f64, u: f64, v: f64) -> UnitVec3 {
        UnitVec3::try_from_vec(self.inv * Vec3::new(w, u, v)).expect("nonzero homogeneous vector")
    }

    pub fn to_chart(&self, x: &UnitVec3) -> ChartPoint {
        let w = self.a1.dot(x.v());
        let u = self.a2.dot(x.v());
        let v = self.a3.dot(x.v());
        if w.abs() <= tolerance::geo() * self.a1.norm() {
            let d = Vec2::new(u, v);
            ChartPoint::Horizon(d.normalize())
        } else {
            ChartPoint::Affine(u / w, v / w)
        }
    }

    /// The two antipodal preimages; the first has ⟨a1,x⟩ ≥ 0.
    pub fn from_chart(&self, p: &ChartPoint) -> [UnitVec3; 2] {
        let x = match p {
            ChartPoint::Affine(u, v) => self.lift(1.0, *u, *v),
            ChartPoint::Horizon(d) => self.lift(0.0, d.x, d.y),
        };
        [x, -x]
    }
}

/// Chart map for a basis; see [`ChartBasis::to_chart`].
pub fn to_chart(b: &ChartBasis, x: &UnitVec3) -> ChartPoint {
    b.to_chart(x)
}

/// Inverse chart map; see [`ChartBasis::from_chart`].
pub fn from_chart(b: &ChartBasis, p: &ChartPoint) -> [UnitVec3; 2] {
    b.from_chart(p)
}

/// The `k`-th seeded rotation by [`tolerance::PERTURB_ANGLE`] used by the
/// perturbation retry.
pub fn perturbation_rotation(seed: u64, k: usize) -> Matrix3<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let axis = loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            break v / n;
        }
    };
    NaRotation::from_axis_angle(&Unit::new_unchecked(axis), tolerance::PERTURB_ANGLE).into_inner()
}

/// Runs `compute` on the unperturbed input; if it reports an unstable answer,
/// retries under three seeded tiny rotations and accepts the answer only if all
/// retries agree.
pub fn stabilized<T: PartialEq + Clone>(
    stage: &'static str,
    seed: u64,
    mut compute: impl FnMut(Option<&Matrix3<f64>>) -> Option<T>,
) -> crate::Result<T> {
    if let Some(v) = compute(None) {
        return Ok(v);
    }
    let mut answers = Vec::new();
    for k in 0..tolerance::PERTURB_RETRIES {
        let rot = perturbation_rotation(seed, k);
        answers.push(compute(Some(&rot)));
    }
    match answers.first() {
        Some(Some(first)) if answers.iter().all(|a| a.as_ref() == Some(first)) => Ok(first.clone()),
        _ => Err(crate::Error::degenerate(stage, "answer unstable under perturbation")),
    }
}
