//! Values carried together with an error radius.
//!
//! Propagation is first order with exact product terms: sums add radii,
//! products use `|a|·rb + |b|·ra + ra·rb`, quotients bound the divisor away
//! from zero. Each operation also adds a rounding allowance of a few unit
//! roundoffs of the result.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Real;

/// Rounding allowance per operation, in units of `T::epsilon()`.
const ROUNDING_ULPS: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorBoundedReal<T> {
    pub value: T,
    pub radius: T,
}

impl<T: Real> ErrorBoundedReal<T> {
    pub fn new(value: T, radius: T) -> Self {
        debug_assert!(!(radius < T::zero()), "negative radius");
        Self { value, radius }
    }

    pub fn exact(value: T) -> Self {
        Self {
            value,
            radius: T::zero(),
        }
    }

    /// A value computed by one rounded operation.
    pub fn rounded(value: T) -> Self {
        Self {
            value,
            radius: rounding(value),
        }
    }

    /// The interval `[lo, hi]` as a midpoint/radius pair.
    pub fn from_bounds(lo: T, hi: T) -> Self {
        let two = T::from_int(2);
        let value = (lo + hi) / two;
        let radius = ((hi - lo) / two).abs() + rounding(value);
        Self { value, radius }
    }

    pub fn lower(&self) -> T {
        self.value - self.radius
    }

    pub fn upper(&self) -> T {
        self.value + self.radius
    }

    pub fn abs_upper(&self) -> T {
        self.value.abs() + self.radius
    }

    pub fn widen(self, extra: T) -> Self {
        Self {
            value: self.value,
            radius: self.radius + extra.abs(),
        }
    }

    pub fn contains(&self, x: T) -> bool {
        (x - self.value).abs() <= self.radius
    }

    /// Whether the two enclosures intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        (self.value - other.value).abs() <= self.radius + other.radius
    }

    /// Relative radius, `radius / |value|`.
    pub fn relative_radius(&self) -> T {
        if self.value.is_zero() {
            self.radius
        } else {
            self.radius / self.value.abs()
        }
    }

    pub fn scale(self, factor: T) -> Self {
        let value = self.value * factor;
        Self {
            value,
            radius: self.radius * factor.abs() + rounding(value),
        }
    }

    pub fn exp(self) -> Self {
        let value = self.value.exp();
        // exp(v + r) - exp(v) <= exp(v) (exp(r) - 1)
        let spread = value * self.radius.exp_m1();
        Self {
            value,
            radius: spread + function_rounding(value, self.value),
        }
    }

    pub fn exp_m1(self) -> Self {
        let value = self.value.exp_m1();
        let spread = self.value.exp() * self.radius.exp_m1();
        Self {
            value,
            radius: spread + function_rounding(value, self.value),
        }
    }

    /// Natural log; the enclosure must lie in the positive reals.
    pub fn ln(self) -> Self {
        let value = self.value.ln();
        let lo = self.lower();
        let spread = if lo > T::zero() {
            -(T::one() - self.radius / self.value).ln()
        } else {
            T::lit(f64::INFINITY)
        };
        Self {
            value,
            radius: spread + function_rounding(value, T::one()),
        }
    }

    /// `ln(1 + x)` for an enclosure of `x` above -1.
    pub fn ln_1p(self) -> Self {
        let value = self.value.ln_1p();
        let lo = T::one() + self.lower();
        let spread = if lo > T::zero() {
            self.radius / lo
        } else {
            T::lit(f64::INFINITY)
        };
        Self {
            value,
            radius: spread + function_rounding(value, T::one()),
        }
    }

    pub fn recip(self) -> Self {
        Self::exact(T::one()) / self
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::exact(T::one());
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

// Product of a magnitude and a radius, where an exact zero wins over an
// infinite radius.
fn spread<T: Real>(x: T, r: T) -> T {
    if x.is_zero() || r.is_zero() {
        T::zero()
    } else {
        x * r
    }
}

fn rounding<T: Real>(v: T) -> T {
    v.abs() * T::epsilon() * T::lit(ROUNDING_ULPS)
}

/// Allowance for a transcendental evaluation: its relative error grows with
/// the size of the argument after range reduction.
fn function_rounding<T: Real>(value: T, arg: T) -> T {
    value.abs() * T::epsilon() * (T::lit(16.0) + arg.abs())
}

impl<T: Real> Add for ErrorBoundedReal<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let value = self.value + rhs.value;
        Self {
            value,
            radius: self.radius + rhs.radius + rounding(value),
        }
    }
}

impl<T: Real> Sub for ErrorBoundedReal<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let value = self.value - rhs.value;
        Self {
            value,
            radius: self.radius + rhs.radius + rounding(value),
        }
    }
}

impl<T: Real> Neg for ErrorBoundedReal<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            radius: self.radius,
        }
    }
}

impl<T: Real> Mul for ErrorBoundedReal<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let value = self.value * rhs.value;
        let radius = spread(self.value.abs(), rhs.radius)
            + spread(rhs.value.abs(), self.radius)
            + spread(self.radius, rhs.radius)
            + rounding(value);
        Self { value, radius }
    }
}

impl<T: Real> Div for ErrorBoundedReal<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let value = self.value / rhs.value;
        let floor = rhs.value.abs() - rhs.radius;
        let radius = if floor > T::zero() {
            (self.radius + value.abs() * rhs.radius) / floor + rounding(value)
        } else {
            T::lit(f64::INFINITY)
        };
        Self { value, radius }
    }
}

impl<T: Real> Zero for ErrorBoundedReal<T> {
    fn zero() -> Self {
        Self::exact(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.radius.is_zero()
    }
}

impl<T: Real> One for ErrorBoundedReal<T> {
    fn one() -> Self {
        Self::exact(T::one())
    }
}

impl<T: Real> fmt::Display for ErrorBoundedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.value.to_sci(20), self.radius.to_sci(3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;
    use proptest::prelude::*;

    type B = ErrorBoundedReal<f64>;

    #[test]
    fn division_by_enclosure_of_zero_is_unbounded() {
        let q = B::exact(1.0) / B::new(0.0, 0.1);
        assert!(q.radius.is_infinite());
    }

    #[test]
    fn exp_and_ln_are_inverse_enclosures() {
        let x = ErrorBoundedReal::new(DoubleDouble::lit(1.5), DoubleDouble::lit(1e-20));
        let y = x.exp().ln();
        assert!(y.contains(DoubleDouble::lit(1.5)));
        assert!(y.radius < DoubleDouble::lit(1.1e-20));
    }

    proptest! {
        // Any point of the operand enclosures maps into the result enclosure.
        #[test]
        fn arithmetic_encloses_samples(
            a in -100.0f64..100.0, ra in 0.0f64..1.0, ta in -1.0f64..1.0,
            b in 0.5f64..100.0, rb in 0.0f64..0.4, tb in -1.0f64..1.0,
        ) {
            let x = B::new(a, ra);
            let y = B::new(b, rb);
            let xs = a + ta * ra;
            let ys = b + tb * rb;
            prop_assert!((x + y).contains(xs + ys));
            prop_assert!((x - y).contains(xs - ys));
            prop_assert!((x * y).contains(xs * ys));
            prop_assert!((x / y).contains(xs / ys));
        }

        #[test]
        fn transcendental_enclosures(a in -5.0f64..5.0, ra in 0.0f64..0.5, t in -1.0f64..1.0) {
            let x = B::new(a, ra);
            let xs = a + t * ra;
            prop_assert!(x.exp().contains(xs.exp()));
            prop_assert!(x.exp_m1().contains(xs.exp_m1()));
            let p = B::new(a.abs() + 1.0, ra);
            let ps = a.abs() + 1.0 + t * ra;
            prop_assert!(p.ln().contains(ps.ln()));
            prop_assert!(p.ln_1p().contains(ps.ln_1p()));
        }
    }
}
