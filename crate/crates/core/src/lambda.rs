//! Elements of Λ_k: the numbers `λ = (b_1^(k+1) ··· b_(k-1)^(2k-1))^(1/k)`
//! with squarefree `b_1 ··· b_(k-1) >= 2`.
//!
//! An element is identified by its integer tuple. Its kth power is an exact
//! integer, so ordering and comparisons never touch floating point; real
//! values are recomputed at whatever precision a caller asks for.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::enumerate::shapes_up_to;
use crate::arith::repr::{shape_base, squarefree_coprime};
use crate::bounded::ErrorBoundedReal;
use crate::error::{check_k, Error, Result};
use crate::scalar::{DoubleDouble, Real};

/// Default limit on the number of elements [`enumerate_lambda`] returns.
pub const DEFAULT_LAMBDA_CAP: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LambdaElement {
    k: u32,
    b: Vec<u64>,
    /// λ^k
    power: u128,
}

impl LambdaElement {
    pub fn new(k: u32, b: Vec<u64>) -> Result<Self> {
        check_k(k)?;
        if b.len() != (k - 1) as usize || b.contains(&0) {
            return Err(Error::NotInLambda(b));
        }
        let product = b.iter().try_fold(1u64, |acc, &x| acc.checked_mul(x));
        if product.is_none_or(|p| p < 2) || !squarefree_coprime(&b) {
            return Err(Error::NotInLambda(b));
        }
        let power = shape_base(k, &b)?;
        Ok(Self { k, b, power })
    }

    pub(crate) fn from_shape(k: u32, b: Vec<u64>, power: u128) -> Self {
        Self { k, b, power }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    /// `λ^k = ∏ b_j^(k+j)`, exact.
    pub fn kth_power(&self) -> u128 {
        self.power
    }

    /// λ to the working precision of `T`: a Newton kth root of the exact
    /// integer `λ^k`.
    pub fn value<T: Real>(&self) -> T {
        kth_root::<T>(self.power, self.k)
    }

    /// Comma-separated tuple, the form accepted on the command line.
    pub fn tuple_string(&self) -> String {
        self.b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for LambdaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.tuple_string())
    }
}

impl PartialOrd for LambdaElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by λ (for equal k, by the exact kth power).
impl Ord for LambdaElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.k, self.power, &self.b).cmp(&(other.k, other.power, &other.b))
    }
}

pub(crate) fn kth_root<T: Real>(v: u128, k: u32) -> T {
    let target = T::from_u128_lossy(v);
    let kk = T::from_int(k as i64);
    let mut x = T::lit((v as f64).powf(1.0 / k as f64));
    for _ in 0..3 {
        let xk1 = x.powi(k as i32 - 1);
        x -= (xk1 * x - target) / (kk * xk1);
    }
    x
}

/// Elements with `λ <= bound`, ascending.
pub fn enumerate_lambda(k: u32, bound: f64) -> Result<Vec<LambdaElement>> {
    enumerate_lambda_capped(k, bound, DEFAULT_LAMBDA_CAP)
}

pub fn enumerate_lambda_capped(k: u32, bound: f64, cap: usize) -> Result<Vec<LambdaElement>> {
    check_k(k)?;
    if !(bound > 2.0) || !bound.is_finite() {
        return Err(Error::InvalidArgument(format!("bound must exceed 2, got {bound}")));
    }
    // λ <= bound  <=>  λ^k <= floor(bound^k)
    let pow = DoubleDouble::lit(bound).powi(k as i32).floor();
    if pow.hi() >= 1.0e36 {
        return Err(Error::OutOfRange {
            what: "bound^k",
            value: format!("{:e}", pow.hi()),
            max: "1e36".into(),
        });
    }
    let limit = pow.to_u128().ok_or(Error::Overflow("bound^k"))?;
    let shapes = shapes_up_to(k, limit, false)?;
    if shapes.len() > cap {
        return Err(Error::CapExceeded { cap });
    }
    Ok(shapes
        .into_iter()
        .map(|s| LambdaElement::from_shape(k, s.b, s.base))
        .collect())
}

/// The first `count` elements of Λ_k in increasing order.
pub fn first_lambdas(k: u32, count: usize) -> Result<Vec<LambdaElement>> {
    check_k(k)?;
    let mut bound = 2.0f64.powf((k + 1) as f64 / k as f64) * 2.0;
    loop {
        let all = enumerate_lambda(k, bound)?;
        if all.len() >= count {
            return Ok(all.into_iter().take(count).collect());
        }
        bound *= 2.0;
    }
}

/// λ with a relative radius of at most `10^-digits`.
pub fn lambda_value<T: Real>(e: &LambdaElement, digits: u32) -> Result<ErrorBoundedReal<T>> {
    if digits > T::DIGITS {
        return Err(Error::PrecisionUnavailable {
            requested: digits,
            available: T::DIGITS,
        });
    }
    let v = e.value::<T>();
    // Newton converged from a double estimate; residual is a few roundings
    // of the kth power, divided by k.
    let radius = v * T::epsilon() * T::from_int(8 + e.k() as i64);
    Ok(ErrorBoundedReal::new(v, radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    type Dd = DoubleDouble;

    #[test]
    fn enumeration_examples_k2() {
        let els = enumerate_lambda(2, 30.0).unwrap();
        let tuples: Vec<Vec<u64>> = els.iter().map(|e| e.b().to_vec()).collect();
        assert_eq!(tuples, vec![vec![2], vec![3], vec![5], vec![6], vec![7]]);
        let want = [2.82843, 5.19615, 11.18034, 14.69694, 18.52026];
        for (e, w) in els.iter().zip(want) {
            assert!((e.value::<f64>() - w).abs() < 5e-6);
        }
        assert!(enumerate_lambda(2, 2.5).unwrap().is_empty());
    }

    #[test]
    fn enumeration_examples_k3() {
        let els = enumerate_lambda(3, 7.0).unwrap();
        let tuples: Vec<Vec<u64>> = els.iter().map(|e| e.b().to_vec()).collect();
        assert_eq!(tuples, vec![vec![2, 1], vec![1, 2], vec![3, 1], vec![1, 3]]);
        let want = [2.51984, 3.17480, 4.32675, 6.24025];
        for (e, w) in els.iter().zip(want) {
            assert!((e.value::<f64>() - w).abs() < 5e-6);
        }
    }

    #[test]
    fn brute_force_filter_agrees() {
        // every tuple below this bound has coordinates <= 20
        for k in 2..=4u32 {
            let bound = 20f64.powf((k + 1) as f64 / k as f64) * 0.999;
            let mut got: Vec<Vec<u64>> = enumerate_lambda(k, bound)
                .unwrap()
                .into_iter()
                .map(|e| e.b().to_vec())
                .collect();
            let dims = (k - 1) as usize;
            let mut want = Vec::new();
            let mut idx = vec![1u64; dims];
            'outer: loop {
                let prod: u64 = idx.iter().product();
                let lam: f64 = idx
                    .iter()
                    .enumerate()
                    .map(|(j, &b)| (b as f64).powf((k + j as u32 + 1) as f64 / k as f64))
                    .product();
                if prod >= 2 && crate::arith::is_squarefree(prod).unwrap() && lam <= bound {
                    want.push(idx.clone());
                }
                for d in 0..=dims {
                    if d == dims {
                        break 'outer;
                    }
                    idx[d] += 1;
                    if idx[d] <= 20 {
                        break;
                    }
                    idx[d] = 1;
                }
            }
            got.sort();
            want.sort();
            assert_eq!(got, want, "k={k}");
        }
    }

    #[test]
    fn ordering_is_strict_and_starts_at_minimum() {
        for k in 2..=5u32 {
            let els = enumerate_lambda(k, 200.0).unwrap();
            assert!(els.windows(2).all(|w| w[0].kth_power() < w[1].kth_power()));
            let mut first = vec![1u64; (k - 1) as usize];
            first[0] = 2;
            assert_eq!(els[0].b(), &first[..]);
            let lmin = 2f64.powf((k + 1) as f64 / k as f64);
            assert!((els[0].value::<f64>() - lmin).abs() < 1e-12);
        }
    }

    #[test]
    fn values_to_full_precision() {
        let e = LambdaElement::new(2, vec![2]).unwrap();
        let v = lambda_value::<Dd>(&e, 30).unwrap();
        let sqrt8: Dd = "2.8284271247461900976033774484193961571".parse().unwrap();
        assert!(v.contains(sqrt8));
        assert!(v.relative_radius() <= Dd::lit(1e-30));
        let e3 = LambdaElement::new(3, vec![2, 1]).unwrap();
        let v3 = lambda_value::<Dd>(&e3, 25).unwrap();
        let cbrt16: Dd = "2.5198420997897463295344212145564567011".parse().unwrap();
        assert!(v3.contains(cbrt16));
        assert!(lambda_value::<f64>(&e, 20).is_err());
    }

    #[test]
    fn rejects_non_elements() {
        assert!(LambdaElement::new(2, vec![1]).is_err());
        assert!(LambdaElement::new(2, vec![4]).is_err());
        assert!(LambdaElement::new(3, vec![2, 2]).is_err());
        assert!(enumerate_lambda(2, 1.5).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_lambda_capped(2, 1000.0, 10),
            Err(Error::CapExceeded { cap: 10 })
        ));
    }
}
