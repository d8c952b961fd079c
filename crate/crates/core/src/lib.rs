//! Densities of integers classified by the proper k-full integers between
//! consecutive kth powers, with tracked error bounds, and the exact
//! enumeration machinery used to check them.
//!
//! The analytic side is generic over [`Real`]; the aliases below fix the
//! double-double type used for production tables.

// `!(a < b)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod arith;
pub mod bounded;
pub mod density;
pub mod empirical;
pub mod error;
pub mod lambda;
pub mod power_sums;
pub mod scalar;
pub mod zeta;

pub use bounded::ErrorBoundedReal;
pub use density::{DensityEngine, DensityMethod, DensityTable, EngineConfig, ShiuMethod, SubsetSpec};
pub use error::{Error, Result};
pub use lambda::LambdaElement;
pub use scalar::{DoubleDouble, Real};

pub type Dd = DoubleDouble;
pub type Bounded = ErrorBoundedReal<DoubleDouble>;
pub type Bounded64 = ErrorBoundedReal<f64>;
pub type Engine = DensityEngine<DoubleDouble>;
pub type Engine64 = DensityEngine<f64>;
pub type Table = DensityTable<DoubleDouble>;
