//! Scalar abstraction.
//!
//! All analytic code is written against [`Real`], a thin extension of the
//! `num-traits` numeric tower with the handful of transcendental functions
//! the density computations need. Implementations exist for `f32`, `f64`
//! and the double-double type [`DoubleDouble`]; exact rational inputs
//! (Bernoulli numbers, log-series coefficients) enter through
//! [`Real::from_rational`].

mod dd;

pub use dd::DoubleDouble;

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, NumCast, ToPrimitive, Zero};

/// Real scalar used by every analytic routine in the crate.
pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + Display
    + PartialOrd
    + Num
    + NumCast
    + FromPrimitive
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Significant decimal digits the type can deliver with some slack left
    /// for accumulated rounding.
    const DIGITS: u32;

    /// Unit roundoff.
    fn epsilon() -> Self;
    fn pi() -> Self;
    fn ln2() -> Self;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn floor(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn powf(self, e: Self) -> Self {
        (e * self.ln()).exp()
    }

    fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    fn from_int(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("integer conversion")
    }

    fn from_u128_lossy(n: u128) -> Self;

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Nearest representable value of an exact big integer.
    fn from_bigint(n: &BigInt) -> Self;

    fn from_rational(q: &BigRational) -> Self {
        Self::from_bigint(q.numer()) / Self::from_bigint(q.denom())
    }

    /// Decimal rendering with `decimals` digits after the point.
    fn to_fixed(self, decimals: usize) -> String;

    /// Scientific rendering with `sig` significant digits.
    fn to_sci(self, sig: usize) -> String;
}

fn bigint_to_f64_parts(n: &BigInt, parts: usize) -> Vec<f64> {
    let mut rest = n.clone();
    let mut out = Vec::with_capacity(parts);
    for _ in 0..parts {
        let hi = rest.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            out.push(hi);
            break;
        }
        out.push(hi);
        let back = BigInt::from_f64(hi).expect("finite integral f64");
        rest -= back;
        if rest.is_zero() {
            break;
        }
    }
    out
}

macro_rules! impl_real_for_float {
    ($t:ty, $digits:expr) => {
        impl Real for $t {
            const DIGITS: u32 = $digits;

            fn epsilon() -> Self {
                <$t>::EPSILON / 2.0
            }
            fn pi() -> Self {
                std::f64::consts::PI as $t
            }
            fn ln2() -> Self {
                std::f64::consts::LN_2 as $t
            }
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            fn exp_m1(self) -> Self {
                <$t>::exp_m1(self)
            }
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            fn ln_1p(self) -> Self {
                <$t>::ln_1p(self)
            }
            fn floor(self) -> Self {
                <$t>::floor(self)
            }
            fn powi(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
            fn powf(self, e: Self) -> Self {
                <$t>::powf(self, e)
            }
            fn from_u128_lossy(n: u128) -> Self {
                n as $t
            }
            fn from_bigint(n: &BigInt) -> Self {
                bigint_to_f64_parts(n, 1)[0] as $t
            }
            fn from_rational(q: &BigRational) -> Self {
                let parts_n = bigint_to_f64_parts(q.numer(), 2);
                let parts_d = bigint_to_f64_parts(q.denom(), 2);
                let n: f64 = parts_n.iter().sum();
                let d: f64 = parts_d.iter().sum();
                (n / d) as $t
            }
            fn to_fixed(self, decimals: usize) -> String {
                format!("{:.*}", decimals, self)
            }
            fn to_sci(self, sig: usize) -> String {
                format!("{:.*e}", sig.saturating_sub(1), self)
            }
        }
    };
}

impl_real_for_float!(f32, 6);
impl_real_for_float!(f64, 15);

pub(crate) fn bigint_parts(n: &BigInt) -> Vec<f64> {
    bigint_to_f64_parts(n, 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_identity<T: Real>() -> T {
        // exp(ln 10) - 10, should vanish to working precision
        let ten = T::from_int(10);
        ten.ln().exp() - ten
    }

    #[test]
    fn identities_hold_per_precision() {
        assert!(generic_identity::<f32>().abs() < 1e-5);
        assert!(generic_identity::<f64>().abs() < 1e-13);
        assert!(generic_identity::<DoubleDouble>().abs() < DoubleDouble::lit(1e-29));
    }

    #[test]
    fn rational_conversion() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let third = DoubleDouble::from_rational(&q);
        let err = third * DoubleDouble::from_int(3) - DoubleDouble::one();
        assert!(err.abs() < DoubleDouble::lit(1e-31));
        assert!((f64::from_rational(&q) - 1.0 / 3.0).abs() < 1e-16);
    }

    use num_traits::One;
}
