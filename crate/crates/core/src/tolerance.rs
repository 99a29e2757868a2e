//! Numerical tolerances.
//!
//! The incidence tolerance can be overridden per thread (the CLI's
//! `--tolerance`) with [`with_geo`]; everything else is fixed.

use std::cell::Cell;

/// Default incidence tolerance for point-on-curve and tangency decisions.
pub const EPS_GEO: f64 = 1e-9;
/// Below this |det| three unit vectors are treated as coplanar.
pub const EPS_DET: f64 = 1e-12;
/// Crossing points closer than this (chordal) are merged into one vertex.
pub const EPS_CLUSTER: f64 = 1e-8;
/// Weighted Fréchet threshold for coinciding kernels.
pub const EPS_COINCIDE: f64 = 1e-6;
/// Angle of the seeded rotations used by the perturbation retry.
pub const PERTURB_ANGLE: f64 = 1e-7;
/// Number of perturbed recomputations before giving up.
pub const PERTURB_RETRIES: usize = 3;

thread_local! {
    static GEO: Cell<f64> = const { Cell::new(EPS_GEO) };
}

/// Current incidence tolerance on this thread.
pub fn geo() -> f64 {
    GEO.with(|g| g.get())
}

/// Runs `f` with the incidence tolerance set to `eps`, restoring it afterwards.
pub fn with_geo<T>(eps: f64, f: impl FnOnce() -> T) -> T {
    struct Restore(f64);
    impl Drop for Restore {
        fn drop(&mut self) {
            GEO.with(|g| g.set(self.0));
        }
    }
    let _restore = Restore(GEO.with(|g| g.replace(eps)));
    f()
}
