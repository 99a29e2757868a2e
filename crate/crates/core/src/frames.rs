//! Vector configurations: Parseval frames, the Stiefel metric and its
//! Procrustes quotient surrogate, the coordinate-fixing rotation `coord`, and
//! the polar-decomposition path to a Parseval frame.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::arrangement::{great_circle, Arrangement, CellComplex, CellRef, Curve, WeightedPseudocircle};
use crate::error::{Error, Result};
use crate::oriented_matroid::SignVector;
use crate::spherical_kernel::{Sign, UnitVec3, Vec3};

/// Residual bound for the Parseval property.
pub const PARSEVAL_TOL: f64 = 1e-9;

/// Vertices per circle emitted by [`circles_from_frame`].
pub const CIRCLE_VERTICES: usize = 64;

/// An ordered family of vectors in 3-space, one per element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "FrameRepr", into = "FrameRepr")]
pub struct Frame {
    pub rows: Vec<Vec3>,
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    rows: Vec<[f64; 3]>,
}

impl From<FrameRepr> for Frame {
    fn from(r: FrameRepr) -> Self {
        Frame { rows: r.rows.into_iter().map(|[x, y, z]| Vec3::new(x, y, z)).collect() }
    }
}

impl From<Frame> for FrameRepr {
    fn from(f: Frame) -> Self {
        FrameRepr { rows: f.rows.iter().map(|r| [r.x, r.y, r.z]).collect() }
    }
}

impl Frame {
    pub fn new(rows: Vec<Vec3>) -> Self {
        Frame { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Sum of the outer products of the rows (the Gram matrix of the columns).
    pub fn gram(&self) -> Matrix3<f64> {
        self.rows.iter().fold(Matrix3::zeros(), |g, r| g + r * r.transpose())
    }

    /// F*Q: every row r becomes Qᵀr.
    pub fn act(&self, q: &Matrix3<f64>) -> Frame {
        let qt = q.transpose();
        Frame { rows: self.rows.iter().map(|r| qt * r).collect() }
    }

    pub fn is_parseval(&self) -> bool {
        parseval_check(self).0
    }
}

/// An orthogonal 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 9]", into = "[f64; 9]")]
pub struct Rotation3(Matrix3<f64>);

impl Rotation3 {
    /// Fails unless QᵀQ = I within 1e-10.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if (m.transpose() * m - Matrix3::identity()).amax() > 1e-10 {
            return Err(Error::InvalidInput("matrix is not orthogonal".into()));
        }
        Ok(Rotation3(m))
    }

    pub fn identity() -> Self {
        Rotation3(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 0)], m[(1, 1)], m[(1, 2)], m[(2, 0)], m[(2, 1)], m[(2, 2)]]
    }
}

impl TryFrom<[f64; 9]> for Rotation3 {
    type Error = Error;

    fn try_from(a: [f64; 9]) -> Result<Self> {
        Rotation3::new(Matrix3::from_row_slice(&a))
    }
}

impl From<Rotation3> for [f64; 9] {
    fn from(r: Rotation3) -> Self {
        r.to_row_major()
    }
}

/// Whether the columns are orthonormal, with the max-norm residual of Gram − I.
pub fn parseval_check(f: &Frame) -> (bool, f64) {
    let residual = (f.gram() - Matrix3::identity()).amax();
    (residual <= PARSEVAL_TOL, residual)
}

/// Largest row-wise Euclidean distance.
pub fn stiefel_dist(f: &Frame, g: &Frame) -> f64 {
    assert_eq!(f.n(), g.n(), "frames of different sizes");
    f.rows.iter().zip(&g.rows).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// The orthogonal Q minimizing the Frobenius distance between F and G*Q.
pub fn procrustes_aligner(f: &Frame, g: &Frame) -> Matrix3<f64> {
    // ‖F − GQ‖ with F, G as n×3 matrices: Q = UVᵀ for GᵀF = UΣVᵀ.
    let m = f.rows.iter().zip(&g.rows).fold(Matrix3::zeros(), |acc, (a, b)| acc + b * a.transpose());
    let svd = m.svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// stiefel_dist(F, G*Q̂) with Q̂ the least-squares aligner; an upper bound on
/// the quotient distance inf_Q stiefel_dist(F, G*Q).
pub fn procrustes_gap(f: &Frame, g: &Frame) -> f64 {
    let q = procrustes_aligner(f, g);
    // G*Q as an n×3 product has rows Qᵀ g.
    stiefel_dist(f, &g.act(&q))
}

/// M^(−1/2) for a symmetric positive definite 3×3 matrix.
pub fn spd_inv_sqrt(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    if (m - m.transpose()).amax() > 1e-10 {
        return Err(Error::InvalidInput("matrix is not symmetric".into()));
    }
    let eig = SymmetricEigen::new(0.5 * (m + m.transpose()));
    if eig.eigenvalues.iter().any(|&l| l <= 1e-12) {
        return Err(Error::InvalidInput("matrix is not positive definite".into()));
    }
    let d = Matrix3::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let r = eig.eigenvectors * d * eig.eigenvectors.transpose();
    Ok(0.5 * (r + r.transpose()))
}

/// q(F,t) = F(t(FᵀF)^(−1/2) + (1−t)I).
pub fn orthonormalize_path(f: &Frame, t: f64) -> Result<Frame> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("t = {t} is outside [0, 1]")));
    }
    let g = f.gram();
    let smallest = SymmetricEigen::new(g).eigenvalues.min();
    if smallest.max(0.0).sqrt() <= 1e-10 {
        return Err(Error::InvalidInput("frame is rank deficient".into()));
    }
    let m = t * spd_inv_sqrt(&g)? + (1.0 - t) * Matrix3::identity();
    // The row form of F·M is Mᵀr = Mr.
    Ok(Frame { rows: f.rows.iter().map(|r| m * r).collect() })
}

/// Rows weight·normal of a great-circle arrangement.
pub fn frame_from_circles(a: &Arrangement) -> Result<Frame> {
    let rows = a
        .elements
        .iter()
        .enumerate()
        .map(|(i, e)| match e.curve() {
            None => Ok(Vec3::zeros()),
            Some(c) => c
                .great_circle_normal(1e-6)
                .map(|n| n * e.weight())
                .ok_or_else(|| Error::invalid(format!("element {i} is not a great circle"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Frame { rows })
}

/// Symmetric great-circle polygons with normals and weights read off the rows.
pub fn circles_from_frame(f: &Frame) -> Arrangement {
    let elements = f
        .rows
        .iter()
        .map(|r| {
            let w = r.norm();
            if w == 0.0 {
                WeightedPseudocircle::trivial()
            } else {
                WeightedPseudocircle::new(w, great_circle(r, None, CIRCLE_VERTICES)).expect("positive weight")
            }
        })
        .collect();
    Arrangement::new(elements, true)
}

/// The vertices p_{±k} of the basis sub-arrangement and the orientation χ(I).
#[derive(Clone, Copy, Debug)]
pub struct BasisVertices {
    /// `p[k] = (p_k, p_{−k})`.
    pub p: [(UnitVec3, UnitVec3); 3],
    pub chi: Sign,
}

fn basis_curves(a: &Arrangement, basis: [usize; 3]) -> Result<[WeightedPseudocircle; 3]> {
    if basis.iter().any(|&i| i >= a.n()) {
        return Err(Error::InvalidInput(format!("basis {basis:?} out of range for {} elements", a.n())));
    }
    if basis[0] == basis[1] || basis[1] == basis[2] || basis[0] == basis[2] {
        return Err(Error::NotBasis(basis));
    }
    let els = basis.map(|i| a.element(i).clone());
    if els.iter().any(WeightedPseudocircle::is_trivial) {
        return Err(Error::NotBasis(basis));
    }
    Ok(els)
}

fn sub_vertices(els: &[WeightedPseudocircle; 3], basis: [usize; 3]) -> Result<BasisVertices> {
    let sub = Arrangement::new(els.to_vec(), false);
    let c = match CellComplex::build(&sub) {
        Ok(c) => c,
        Err(Error::NotSpanning) | Err(Error::InvalidArrangement(_)) => return Err(Error::NotBasis(basis)),
        Err(e) => return Err(e),
    };
    let chi = c.chirotope().get(0, 1, 2);
    if chi == Sign::Zero {
        return Err(Error::NotBasis(basis));
    }
    let vertex = |k: usize, s: Sign| -> Result<UnitVec3> {
        let mut sigma = SignVector::zero(3);
        sigma.set(k, s);
        match c.cell_of(&sigma) {
            Ok(CellRef::Vertex(v)) => Ok(c.vertices[v].point),
            _ => Err(Error::NotBasis(basis)),
        }
    };
    let mut p = [(UnitVec3::e1(), UnitVec3::e1()); 3];
    for (k, slot) in p.iter_mut().enumerate() {
        *slot = (vertex(k, Sign::Pos)?, vertex(k, Sign::Neg)?);
    }
    Ok(BasisVertices { p, chi })
}

/// p_{±k} = cell(proj_I(A), ±e_{i_k}) and χ(i1,i2,i3).
pub fn basis_vertices(a: &Arrangement, basis: [usize; 3]) -> Result<BasisVertices> {
    sub_vertices(&basis_curves(a, basis)?, basis)
}

/// The longitude-rescaling homeomorphism that carries −p1 to p_{−1}, inverted
/// and applied to the vertices of every curve after refinement, so that the
/// resulting curves meet where A's met p1 and at −p1.
pub fn antipodal_warp(a: &Arrangement, p1: &UnitVec3, p_minus1: &UnitVec3) -> Result<Arrangement> {
    let Some(w) = Warp::new(p1, p_minus1) else {
        if (p1.v() + p_minus1.v()).norm() <= 1e-12 {
            return Ok(a.clone());
        }
        return Err(Error::InvalidInput("warp points coincide".into()));
    };
    let step = (std::f64::consts::TAU / 64.0 * w.omega / std::f64::consts::PI).max(std::f64::consts::TAU / 4096.0);
    let extra = [*p1, *p_minus1];
    let elements = a
        .elements
        .iter()
        .map(|e| match e.curve() {
            None => Ok(WeightedPseudocircle::trivial()),
            Some(c) => {
                let r = c.subdivided(step, &extra);
                let vs = r.vertices().iter().map(|v| w.inverse(v)).collect();
                WeightedPseudocircle::new(e.weight(), Curve::new(vs)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Arrangement::new(elements, false))
}

/// Polar coordinates with p1 at angle 0 and p_{−1} at angle ω in the plane
/// they span.
struct Warp {
    ea: Vec3,
    eb: Vec3,
    ec: Vec3,
    omega: f64,
}

impl Warp {
    fn new(p1: &UnitVec3, pm1: &UnitVec3) -> Option<Warp> {
        let ea = *p1.v();
        let perp = pm1.v() - ea * ea.dot(pm1.v());
        if perp.norm() <= 1e-12 {
            return None;
        }
        let eb = perp.normalize();
        let omega = pm1.v().dot(&eb).atan2(pm1.v().dot(&ea));
        Some(Warp { ea, eb, ec: ea.cross(&eb), omega })
    }

    /// φ(θ) = θω/π on [0,π] and θ(2−ω/π) on [−π,0].
    fn forward(&self, x: &UnitVec3) -> UnitVec3 {
        use std::f64::consts::PI;
        self.remap(x, |th| if th >= 0.0 { th * self.omega / PI } else { th * (2.0 - self.omega / PI) })
    }

    fn inverse(&self, x: &UnitVec3) -> UnitVec3 {
        use std::f64::consts::PI;
        let w = self.omega;
        self.remap(x, |th| {
            if (0.0..=w).contains(&th) {
                th * PI / w
            } else {
                let t = if th > w { th - 2.0 * PI } else { th };
                t / (2.0 - w / PI)
            }
        })
    }

    fn remap(&self, x: &UnitVec3, f: impl Fn(f64) -> f64) -> UnitVec3 {
        let (a, b, h) = (x.v().dot(&self.ea), x.v().dot(&self.eb), x.v().dot(&self.ec));
        let r = a.hypot(b);
        if r <= 1e-300 {
            return *x;
        }
        let th = f(b.atan2(a));
        UnitVec3::from_vec(self.ea * (r * th.cos()) + self.eb * (r * th.sin()) + self.ec * h)
    }
}

/// Applies the forward warp φ to a point; exposed for checking the formula.
pub fn warp_point(p1: &UnitVec3, p_minus1: &UnitVec3, x: &UnitVec3) -> UnitVec3 {
    Warp::new(p1, p_minus1).map_or(*x, |w| w.forward(x))
}

/// The rotation with columns u1 = p1, u2 ∝ p2 − ⟨u1,p2⟩u1, u3 = χ(I)·u1×u2.
pub fn coord_frame(basis: [usize; 3], a: &Arrangement) -> Result<Rotation3> {
    let els = basis_curves(a, basis)?;
    let mut bv = sub_vertices(&els, basis)?;
    let (p1, pm1) = bv.p[0];
    if (p1.v() + pm1.v()).norm() > 1e-9 {
        let sub = Arrangement::new(els.to_vec(), false);
        let warped = antipodal_warp(&sub, &p1, &pm1)?;
        let els2: [WeightedPseudocircle; 3] = [0, 1, 2].map(|k| warped.element(k).clone());
        bv = sub_vertices(&els2, basis)?;
        let (q1, qm1) = bv.p[0];
        if (q1.v() + qm1.v()).norm() > 1e-6 {
            return Err(Error::degenerate("coord", "warp failed to make p1 and p-1 antipodal"));
        }
    }
    let u1 = *bv.p[0].0.v();
    let p2 = bv.p[1].0.v();
    let u2 = (p2 - u1 * u1.dot(p2))
        .try_normalize(1e-12)
        .ok_or_else(|| Error::degenerate("coord", "p1 and p2 are dependent"))?;
    let u3 = u1.cross(&u2) * f64::from(bv.chi.to_i8());
    Rotation3::new(Matrix3::from_columns(&[u1, u2, u3]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::circles;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rows(v: &[[f64; 3]]) -> Frame {
        Frame::new(v.iter().map(|r| Vec3::new(r[0], r[1], r[2])).collect())
    }

    fn random_frame(rng: &mut ChaCha8Rng, n: usize) -> Frame {
        Frame::new((0..n).map(|_| Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0))).collect())
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
        let m = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let qr = m.qr();
        qr.q()
    }

    #[test]
    fn parseval_examples() {
        let s = 0.5f64.sqrt();
        assert_eq!(parseval_check(&rows(&[[1., 0., 0.], [0., 1., 0.], [0., 0., 1.]])), (true, 0.0));
        assert!(parseval_check(&rows(&[[s, 0., 0.], [s, 0., 0.], [0., 1., 0.], [0., 0., 1.]])).0);
        let (ok, r) = parseval_check(&rows(&[[2., 0., 0.], [0., 1., 0.], [0., 0., 1.]]));
        assert!(!ok);
        assert_eq!(r, 3.0);
    }

    #[test]
    fn metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_frame(&mut rng, 5);
        assert_eq!(stiefel_dist(&f, &f), 0.0);
        assert!(procrustes_gap(&f, &f) < 1e-12);
        let mut g = f.clone();
        g.rows[2].y += 0.125;
        assert!((stiefel_dist(&f, &g) - 0.125).abs() < 1e-15);
        for _ in 0..100 {
            let f = random_frame(&mut rng, 6);
            let q = random_orthogonal(&mut rng);
            assert!(procrustes_gap(&f, &f.act(&q)) <= 1e-9);
        }
    }

    #[test]
    fn inverse_square_root() {
        assert_eq!(spd_inv_sqrt(&Matrix3::identity()).unwrap(), Matrix3::identity());
        let r = spd_inv_sqrt(&Matrix3::from_diagonal(&Vec3::new(4.0, 1.0, 1.0))).unwrap();
        assert!((r - Matrix3::from_diagonal(&Vec3::new(0.5, 1.0, 1.0))).amax() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let b = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let m = b * b.transpose() + Matrix3::identity() * 0.1;
            let r = spd_inv_sqrt(&m).unwrap();
            assert!((r * m * r - Matrix3::identity()).amax() <= 1e-10);
        }
        assert!(spd_inv_sqrt(&Matrix3::from_diagonal(&Vec3::new(1.0, 0.0, 1.0))).is_err());
    }

    #[test]
    fn orthonormalize_examples() {
        let f = rows(&[[2., 0., 0.], [0., 1., 0.], [0., 0., 1.]]);
        let g = orthonormalize_path(&f, 1.0).unwrap();
        assert!(stiefel_dist(&g, &rows(&[[1., 0., 0.], [0., 1., 0.], [0., 0., 1.]])) < 1e-15);
        assert_eq!(orthonormalize_path(&f, 0.0).unwrap(), f);
        assert!(orthonormalize_path(&rows(&[[1., 0., 0.], [0., 1., 0.]]), 0.5).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_frame(&mut rng, 5);
        let p = orthonormalize_path(&f, 1.0).unwrap();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            assert!(stiefel_dist(&orthonormalize_path(&p, t).unwrap(), &p) < 1e-12);
        }
    }

    #[test]
    fn circle_frames() {
        let a = circles(&[Vec3::x(), Vec3::y(), Vec3::z()], 64);
        let f = frame_from_circles(&a).unwrap();
        assert!(stiefel_dist(&f, &rows(&[[1., 0., 0.], [0., 1., 0.], [0., 0., 1.]])) < 1e-12);
        let mut b = a.clone();
        b.elements[1] = b.elements[1].reversed();
        b.elements[2] = WeightedPseudocircle::trivial();
        let g = frame_from_circles(&b).unwrap();
        assert!((g.rows[1] + Vec3::y()).norm() < 1e-12);
        assert_eq!(g.rows[2], Vec3::zeros());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let f = random_frame(&mut rng, 4);
            assert!(stiefel_dist(&frame_from_circles(&circles_from_frame(&f)).unwrap(), &f) <= 1e-8);
        }
    }

    #[test]
    fn rotation_json_is_row_major() {
        let m = Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let r = Rotation3::new(m).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), "[0.0,1.0,0.0,-1.0,0.0,0.0,0.0,0.0,1.0]");
        assert!(serde_json::from_str::<Rotation3>("[2,0,0,0,1,0,0,0,1]").is_err());
    }

    #[test]
    fn warp_formula() {
        use std::f64::consts::FRAC_1_SQRT_2;
        // ω = π/2: longitude π goes to longitude π/2.
        let p1 = UnitVec3::e1();
        let pm1 = UnitVec3::e2();
        let x = warp_point(&p1, &pm1, &UnitVec3::new(-1.0, 0.0, 0.0));
        assert!(x.chord(&UnitVec3::e2()) < 1e-12);
        let y = warp_point(&p1, &pm1, &UnitVec3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2));
        assert!(y.chord(&UnitVec3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2)) < 1e-12);
        let w = Warp::new(&p1, &pm1).unwrap();
        let z = UnitVec3::new(0.3, -0.8, 0.2);
        assert!(w.inverse(&w.forward(&z)).chord(&z) < 1e-12);
        let a = circles(&[Vec3::x(), Vec3::y(), Vec3::z()], 64);
        assert_eq!(antipodal_warp(&a, &p1, &-p1).unwrap(), a);
    }

    #[test]
    fn coord_identity_on_coordinate_circles() {
        let a = circles(&[Vec3::x(), Vec3::y(), Vec3::z()], 64);
        let q = coord_frame([0, 1, 2], &a).unwrap();
        assert!((q.matrix() - Matrix3::identity()).amax() < 1e-12, "{q:?}");
        assert!(matches!(coord_frame([0, 0, 1], &a), Err(Error::NotBasis(_))));
    }

    #[test]
    fn coord_with_non_antipodal_vertices() {
        // Curve 2 is a great circle; curve 3 is bent so it meets curve 2 at
        // two non-antipodal points.
        let bent: Vec<UnitVec3> = (0..48)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 48.0;
                UnitVec3::new(t.cos(), 0.4 * (1.0 + t.cos()) * 0.3 + t.sin() * 0.0, t.sin())
            })
            .collect();
        let a = Arrangement::new(
            vec![
                WeightedPseudocircle::new(1.0, great_circle(&Vec3::new(0.2, 0.1, 1.0), None, 64)).unwrap(),
                WeightedPseudocircle::new(1.0, great_circle(&Vec3::z(), None, 64)).unwrap(),
                WeightedPseudocircle::from_vertices(1.0, bent).unwrap(),
            ],
            false,
        );
        let bv = basis_vertices(&a, [0, 1, 2]).unwrap();
        assert!((bv.p[0].0.v() + bv.p[0].1.v()).norm() > 1e-3);
        let q = coord_frame([0, 1, 2], &a).unwrap();
        assert!((q.det().abs() - 1.0).abs() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = random_orthogonal(&mut rng);
        let qr = coord_frame([0, 1, 2], &a.act_rotation(&r).unwrap()).unwrap();
        assert!((qr.matrix() - r.transpose() * q.matrix()).amax() < 1e-8);
    }
}
