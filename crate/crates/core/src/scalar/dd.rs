//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! with `|lo| <= ulp(hi)/2`, giving about 106 bits of significand.
//!
//! The error-free transformations follow Dekker and Knuth; `two_prod` uses
//! a fused multiply-add.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

use super::{bigint_parts, Real};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};
const PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};
const EPS: f64 = 4.930_380_657_631_324e-32; // 2^-104

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Builds from two components, renormalizing.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan()
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, mut p2) = two_prod(self.hi, b);
        p2 += self.lo * b;
        let (h, l) = quick_two_sum(p1, p2);
        Self { hi: h, lo: l }
    }

    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn sqr(self) -> Self {
        self * self
    }

    pub fn trunc(self) -> Self {
        if self.hi < 0.0 {
            -(-self).floor()
        } else {
            self.floor()
        }
    }

    /// `exp(x) - 1` for `|x|` below `ln 2 / 2`, with relative accuracy.
    fn expm1_reduced(r: Self) -> Self {
        const SQUARINGS: i32 = 9;
        let r = r.ldexp(-SQUARINGS);
        let mut s = r;
        let mut term = r;
        for n in 2..30 {
            term = term * r / Self::from_f64(n as f64);
            s += term;
            if term.hi.abs() <= EPS * 1e-3 * s.hi.abs() {
                break;
            }
        }
        for _ in 0..SQUARINGS {
            s = s.ldexp(1) + s.sqr();
        }
        s
    }

    fn to_u128_exact(self) -> Option<u128> {
        if !(self.hi >= 0.0) || self.hi >= 1.7e38 {
            return None;
        }
        let hi = self.hi as u128;
        let lo = self.lo as i128;
        (hi as i128).checked_add(lo).map(|v| v as u128)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_fixed(p)),
            None => f.write_str(&self.to_sci(32)),
        }
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (h, l) = quick_two_sum(s1, s2 + t2);
        Self { hi: h, lo: l }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, b.hi);
        p2 += self.hi * b.lo + self.lo * b.hi;
        let (h, l) = quick_two_sum(p1, p2);
        Self { hi: h, lo: l }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let mut r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        r -= b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - b * (self / b).trunc()
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDoubleDoubleError;

impl fmt::Display for ParseDoubleDoubleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid decimal literal")
    }
}

impl std::error::Error for ParseDoubleDoubleError {}

impl Num for DoubleDouble {
    type FromStrRadixErr = ParseDoubleDoubleError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(ParseDoubleDoubleError);
        }
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (mantissa, exp_part) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let mut exp10: i32 = match exp_part {
            Some(e) => e.parse().map_err(|_| ParseDoubleDoubleError)?,
            None => 0,
        };
        let mut value = Self::ZERO;
        let mut seen_digit = false;
        let mut after_point = false;
        let ten = Self::from_f64(10.0);
        for c in mantissa.chars() {
            match c {
                '0'..='9' => {
                    seen_digit = true;
                    value = value * ten + Self::from_f64(c as u32 as f64 - 48.0);
                    if after_point {
                        exp10 -= 1;
                    }
                }
                '.' if !after_point => after_point = true,
                '_' => {}
                _ => return Err(ParseDoubleDoubleError),
            }
        }
        if !seen_digit {
            return Err(ParseDoubleDoubleError);
        }
        let value = if exp10 >= 0 {
            value * ten.powi(exp10)
        } else {
            value / ten.powi(-exp10)
        };
        Ok(if neg { -value } else { value })
    }
}

impl std::str::FromStr for DoubleDouble {
    type Err = ParseDoubleDoubleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as Num>::from_str_radix(s, 10)
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        if !t.hi.is_finite() || t.hi.abs() > 9.2e18 {
            return None;
        }
        (t.hi as i64).checked_add(t.lo as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        let t = self.trunc();
        if !(t.hi >= 0.0) || t.hi > 1.8e19 {
            return None;
        }
        let v = t.hi as i128 + t.lo as i128;
        u64::try_from(v).ok()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::from_i128(n as i128).unwrap())
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::from_u128(n as u128).unwrap())
    }
    fn from_i128(n: i128) -> Option<Self> {
        let hi = n as f64;
        let rest = n - hi as i128;
        Some(Self::from_parts(hi, rest as f64))
    }
    fn from_u128(n: u128) -> Option<Self> {
        let hi = n as f64;
        let rest = n as i128 - hi as i128;
        if hi >= 1.7e38 {
            return Some(Self::from_f64(hi));
        }
        Some(Self::from_parts(hi, rest as f64))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::from_f64(x))
    }
}

impl NumCast for DoubleDouble {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        let f = n.to_f64()?;
        if f.fract() == 0.0 && f.abs() >= 9.0e15 {
            if let Some(i) = n.to_i128() {
                return <Self as FromPrimitive>::from_i128(i);
            }
        }
        Some(Self::from_f64(f))
    }
}

impl Real for DoubleDouble {
    const DIGITS: u32 = 30;

    fn epsilon() -> Self {
        Self::from_f64(EPS)
    }

    fn pi() -> Self {
        PI
    }

    fn ln2() -> Self {
        LN2
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::from_f64(f64::NAN)
            };
        }
        let q = self.hi.sqrt();
        let y = Self::from_f64(q);
        y + (self - y.sqr()).mul_f64(0.5 / q)
    }

    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        (Self::expm1_reduced(r) + Self::ONE).ldexp(k as i32)
    }

    fn exp_m1(self) -> Self {
        if self.hi.abs() < 0.5 * LN2.hi {
            Self::expm1_reduced(self)
        } else {
            self.exp() - Self::ONE
        }
    }

    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if self.hi == 1.0 && self.lo == 0.0 {
            return Self::ZERO;
        }
        let mut x = Self::from_f64(self.hi.ln());
        x = x + self * (-x).exp() - Self::ONE;
        x
    }

    fn ln_1p(self) -> Self {
        if self.hi.abs() < 0.5 {
            let y = Self::from_f64(self.hi.ln_1p());
            let e = y.exp_m1();
            y - (e - self) / (Self::ONE + e)
        } else {
            (Self::ONE + self).ln()
        }
    }

    fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            Self::from_parts(hi, self.lo.floor())
        } else {
            Self::from_f64(hi)
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if n < 0 {
            Self::ONE / acc
        } else {
            acc
        }
    }

    fn from_u128_lossy(n: u128) -> Self {
        <Self as FromPrimitive>::from_u128(n).unwrap()
    }

    fn from_bigint(n: &BigInt) -> Self {
        bigint_parts(n)
            .into_iter()
            .fold(Self::ZERO, |acc, p| acc + Self::from_f64(p))
    }

    fn to_fixed(self, decimals: usize) -> String {
        let neg = self.hi < 0.0;
        let x = self.abs();
        let scale = Self::from_f64(10.0).powi(decimals as i32);
        let scaled = x * scale;
        let base = scaled.floor();
        let frac = scaled - base;
        let half = Self::from_f64(0.5);
        let Some(mut digits) = base.to_u128_exact() else {
            return format!("{:.*}", decimals, self.hi + self.lo);
        };
        if frac > half || (frac == half && digits % 2 == 1) {
            digits += 1;
        }
        let s = format!("{:0>width$}", digits, width = decimals + 1);
        let (int, dec) = s.split_at(s.len() - decimals);
        let sign = if neg && digits != 0 { "-" } else { "" };
        if decimals == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{dec}")
        }
    }

    fn to_sci(self, sig: usize) -> String {
        if self.hi == 0.0 {
            return format!("{:.*e}", sig.saturating_sub(1), 0.0);
        }
        if !self.hi.is_finite() {
            return format!("{}", self.hi);
        }
        let sig = sig.clamp(1, 32);
        let neg = self.hi < 0.0;
        let x = self.abs();
        let ten = Self::from_f64(10.0);
        let mut e10 = x.hi.log10().floor() as i32;
        let scale = |e: i32| if e >= 0 { ten.powi(e) } else { Self::ONE / ten.powi(-e) };
        let mut m = x / scale(e10);
        if m >= ten {
            m /= ten;
            e10 += 1;
        } else if m < Self::ONE {
            m *= ten;
            e10 -= 1;
        }
        let mut digits = (m * ten.powi(sig as i32 - 1) + Self::from_f64(0.5))
            .floor()
            .to_u128_exact()
            .unwrap_or(0);
        if digits >= 10u128.pow(sig as u32) {
            digits /= 10;
            e10 += 1;
        }
        let s = digits.to_string();
        let (lead, rest) = s.split_at(1);
        let sign = if neg { "-" } else { "" };
        if rest.is_empty() {
            format!("{sign}{lead}e{e10}")
        } else {
            format!("{sign}{lead}.{rest}e{e10}")
        }
    }
}
