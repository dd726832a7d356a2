//! Exact truncated power-series algebra in two variables, plus the
//! high-precision complex type used for numerical evaluation.

mod hp;
mod hpmap;
mod map;
mod scalar;
mod series;
mod univariate;

use thiserror::Error;

pub use hp::{decimal_digits, fmt_float, HpComplex, MIN_PRECISION};
pub use hpmap::{HpMap2, HpPoly2};
pub use map::{linear_inverse, Linear, Map2};
pub use scalar::Scalar;
pub use series::{Mono, TruncatedSeries2, Ts2};
pub use univariate::Series1;

/// Default total-degree truncation.
pub const DEFAULT_TRUNCATION: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TpsError {
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(u32, u32),
    #[error("substituted series must vanish at the origin")]
    NonzeroConstant,
    #[error("not invertible: {0}")]
    NotInvertible(&'static str),
    #[error("map is not tangent to the identity")]
    NotTangentToIdentity,
    #[error("degree {j} outside 1..={n}")]
    DegreeOutOfRange { j: u32, n: u32 },
    #[error("series is not divisible as requested")]
    NotDivisible,
    #[error("malformed rational-complex scalar {0:?}")]
    BadScalar(String),
    #[error("evaluation produced NaN or overflow")]
    NonFinite,
}

/// `h⁻¹` for a univariate series with `h(0) = 0` and `h'(0) ≠ 0`.
pub fn reverse_univariate(h: &Series1) -> Result<Series1, TpsError> {
    h.reverse()
}
