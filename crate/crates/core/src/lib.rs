//! Rank-3 weighted pseudocircle arrangements on the 2-sphere.
//!
//! The crate validates arrangements, extracts their oriented-matroid data
//! (covectors, chirotopes, bases) from the induced cell complex, and straightens
//! any spanning symmetric arrangement into a great-circle arrangement and then a
//! Parseval frame, recording sampled intermediate states.

pub mod arrangement;
pub mod cli_io;
pub mod error;
pub mod frames;
pub mod oriented_matroid;
pub mod spherical_kernel;
pub mod straighten;
pub mod tolerance;

pub use arrangement::{Arrangement, CellComplex, Curve, WeightedPseudocircle};
pub use error::{Error, Result};
pub use frames::{Frame, Rotation3};
pub use oriented_matroid::{Chirotope, CovectorSet, SignVector};
pub use spherical_kernel::{Arc, ChartBasis, ChartPoint, Sign, UnitVec3};
