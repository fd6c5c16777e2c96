//! Scalar types, dense matrices, polynomials and truncated power series.

mod matrix;
mod mpfr;
mod poly;
mod scalar;
mod series;
pub mod svd;

pub use matrix::Matrix;
pub use mpfr::BigReal;
pub use num_complex::Complex;
pub use poly::Poly;
pub use scalar::{convert_scalar, Embed, Real, Scalar};
pub use series::TruncSeries;

/// Working precision (bits) for coefficient optimization.
pub const DEFAULT_OPT_PREC: u32 = 256;
/// Working precision (bits) for backward-error certification.
pub const DEFAULT_THETA_PREC: u32 = 1024;
/// Default number of retained series terms.
pub const DEFAULT_NTERMS: usize = 100;

/// Binary64 unit roundoff, 2^-53.
pub const U_BINARY64: f64 = 1.0 / 9007199254740992.0;
