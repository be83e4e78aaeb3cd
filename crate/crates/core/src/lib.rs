//! Numerical toolkit for shear flows near Couette flow in the channel
//! `-1 < y < 1`.

// `!(x > 0.0)` guards also reject NaN, and index loops mirror the stencils
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod damping;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod profiles;
pub mod sobolev;
pub mod special;
pub mod spectral1d;
pub mod stability;
pub mod steady;
pub mod spline;

pub use error::{Error, Result};
