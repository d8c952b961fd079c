//! Dirichlet power sums `P_k(m) = Σ_{λ∈Λ_k} λ^-m`.
//!
//! Two routes. The direct one sums over a box of tuples and bounds what is
//! left by integral comparison; it converges like `B^-(m/k)` and serves as
//! the oracle. The Euler route uses
//! `1 + P_k(m) = ∏_p (1 + Σ_j p^(-m(k+j)/k))`, which holds because every
//! prime divides at most one `b_j`. Primes up to `p0` enter through their
//! exact factors; beyond `p0`, `log(1 + H(u))` with `u = p^(-m/k)` and
//! `H(u) = Σ_j u^(k+j)` is expanded as `Σ_e c_e u^e` and summed over primes
//! with prime zeta tails. The result is assembled as `expm1(log)` so that
//! it keeps a relative radius even when `P_k(m)` is tiny.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::gcd_u64;
use crate::arith::primes::squarefree_sieve;
use crate::bounded::ErrorBoundedReal;
use crate::error::{check_k, Error, Result};
use crate::scalar::Real;
use crate::zeta::{power_tail_bound, zeta, zeta_enclosure, PrimeZeta};

/// Default cutoff below which Euler factors are multiplied in exactly.
pub const DEFAULT_PRIME_CUTOFF: u64 = 100;

/// Largest number of tuples the direct route will visit.
pub const DIRECT_BOX_CAP: f64 = 1.0e9;

const MAX_LOG_SERIES_TERMS: usize = 4000;

#[derive(Clone, Debug)]
pub struct PowerSums<T> {
    pub k: u32,
    /// `values[m - 1] = P_k(m)`
    pub values: Vec<ErrorBoundedReal<T>>,
}

impl<T: Real> PowerSums<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `P_k(m)`, `m >= 1`.
    pub fn get(&self, m: usize) -> Option<ErrorBoundedReal<T>> {
        m.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }
}

/// Per-coordinate cutoffs `B_j = floor(B^((k+1)/(k+j)))`, so every boundary
/// tuple has about the same `λ^k ≈ B^(k+1)`.
pub fn box_bounds(k: u32, big_b: u64) -> Vec<u64> {
    (1..k)
        .map(|j| {
            let e = (k + 1) as f64 / (k + j) as f64;
            let mut b = (big_b as f64).powf(e).floor() as u64;
            // guard the float estimate against landing one off
            while b > 1 && (b as f64).powf(1.0 / e) > big_b as f64 {
                b -= 1;
            }
            b.max(1)
        })
        .collect()
}

fn exponent<T: Real>(k: u32, m: u32, j: u32) -> T {
    T::from_int((m * (k + j)) as i64) / T::from_int(k as i64)
}

/// Upper bound on `Σ λ^-m` over the tuples outside the box of
/// [`box_bounds`]: a tuple outside has some `b_j > B_j`, so the omitted sum
/// is at most `Σ_j (Σ_{b>B_j} b^-s_j) ∏_{i≠j} ζ(s_i)` with
/// `s_j = m(k+j)/k`, and `Σ_{b>B_j} b^-s ≤ B_j^(1-s)/(s-1)`.
pub fn tail_bound<T: Real>(k: u32, m: u32, big_b: u64) -> Result<T> {
    check_k(k)?;
    if m == 0 || big_b < 2 {
        return Err(Error::InvalidArgument(format!(
            "tail bound needs m >= 1 and B >= 2 (m = {m}, B = {big_b})"
        )));
    }
    let bounds = box_bounds(k, big_b);
    let zetas: Vec<T> = (1..k)
        .map(|j| zeta_enclosure(exponent::<T>(k, m, j)).map(|z| z.upper()))
        .collect::<Result<_>>()?;
    let mut total = T::zero();
    for j in 1..k {
        let s = exponent::<T>(k, m, j);
        let bj = T::from_int(bounds[(j - 1) as usize] as i64);
        let mut term = (-(s - T::one()) * bj.ln()).exp() / (s - T::one());
        for i in 1..k {
            if i != j {
                term *= zetas[(i - 1) as usize];
            }
        }
        total += term;
    }
    // round up
    Ok(total * (T::one() + T::epsilon() * T::from_int(64)))
}

/// Truncated sums over the box for `m = 1..=m_max`, with the number of
/// tuples visited.
fn box_sums<T: Real>(k: u32, m_max: u32, big_b: u64) -> Result<(Vec<T>, u64)> {
    let bounds = box_bounds(k, big_b);
    let volume: f64 = bounds.iter().map(|&b| b as f64).product();
    if volume > DIRECT_BOX_CAP {
        return Err(Error::CapExceeded {
            cap: DIRECT_BOX_CAP as usize,
        });
    }
    let squarefree = squarefree_sieve(bounds[0] as usize);
    // tables[j][b] = b^-((k+j)/k) for squarefree b, else 0
    let tables: Vec<Vec<T>> = bounds
        .iter()
        .enumerate()
        .map(|(j, &bj)| {
            let s = exponent::<T>(k, 1, j as u32 + 1);
            (0..=bj)
                .map(|b| {
                    if b == 0 || !squarefree[b as usize] {
                        T::zero()
                    } else {
                        (-s * T::from_int(b as i64).ln()).exp()
                    }
                })
                .collect()
        })
        .collect();
    let mut acc = vec![T::zero(); m_max as usize];
    let mut count = 0u64;
    let weights = vec![T::one(); m_max as usize];
    visit_box(k as usize - 1, 1, true, &weights, &tables, &mut acc, &mut count);
    Ok((acc, count))
}

// Coordinates are chosen from the last (largest exponent) down to b_1.
fn visit_box<T: Real>(
    idx: usize,
    product: u64,
    trivial: bool,
    weights: &[T],
    tables: &[Vec<T>],
    acc: &mut [T],
    count: &mut u64,
) {
    let table = &tables[idx - 1];
    let mut w = weights.to_vec();
    for b in 1..table.len() as u64 {
        let t = table[b as usize];
        if t.is_zero() || (b > 1 && gcd_u64(b, product) != 1) {
            continue;
        }
        let still_trivial = trivial && b == 1;
        if idx == 1 {
            if still_trivial {
                continue;
            }
            *count += 1;
            let mut x = t;
            for (a, &wt) in acc.iter_mut().zip(weights) {
                *a += wt * x;
                x *= t;
            }
        } else {
            let mut x = t;
            for (slot, &wt) in w.iter_mut().zip(weights) {
                *slot = wt * x;
                x *= t;
            }
            visit_box(idx - 1, product * b, still_trivial, &w, tables, acc, count);
        }
    }
}

/// `P_k(m)` from the tuples in the box of [`box_bounds`]; the radius is the
/// tail bound plus accumulated rounding.
pub fn power_sum_direct<T: Real>(k: u32, m: u32, big_b: u64) -> Result<ErrorBoundedReal<T>> {
    Ok(power_sums_direct::<T>(k, m, big_b)?.values[m as usize - 1])
}

/// All of `P_k(1..=m_max)` from one pass over the box.
pub fn power_sums_direct<T: Real>(k: u32, m_max: u32, big_b: u64) -> Result<PowerSums<T>> {
    check_k(k)?;
    if m_max == 0 || big_b < 2 {
        return Err(Error::InvalidArgument(format!(
            "direct power sums need m >= 1 and B >= 2 (m = {m_max}, B = {big_b})"
        )));
    }
    let (sums, count) = box_sums::<T>(k, m_max, big_b)?;
    let values = sums
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let m = i as u32 + 1;
            // recursive summation of positive terms, each off by a few roundings
            let rounding = s * T::epsilon() * (T::from_int(count as i64) + T::from_int(16 + 4 * m as i64));
            Ok(ErrorBoundedReal::new(s, tail_bound::<T>(k, m, big_b)? + rounding))
        })
        .collect::<Result<_>>()?;
    Ok(PowerSums { k, values })
}

/// Exact coefficients of `log(1 + Σ_{j=1}^{k-1} u^(k+j)) = Σ_e c_e u^e`,
/// from `e c_e = e h_e - Σ_{i<e} i c_i h_(e-i)`.
pub fn log_series_coefficients(k: u32, count: usize) -> Vec<BigRational> {
    let h = |e: usize| e > k as usize && e < 2 * k as usize;
    let mut c: Vec<BigRational> = vec![BigRational::zero(); count + 1];
    for e in 1..=count {
        let mut acc = if h(e) {
            BigRational::from_integer(BigInt::from(e))
        } else {
            BigRational::zero()
        };
        for i in 1..e {
            if h(e - i) && !c[i].is_zero() {
                acc -= &c[i] * BigRational::from_integer(BigInt::from(i));
            }
        }
        c[e] = acc / BigRational::from_integer(BigInt::from(e));
    }
    c
}

/// Radius `r` with `H(r) = Σ_j r^(k+j) ≤ 1/2`, so `|log(1+H)| ≤ ln 2` on
/// `|u| = r` and the Cauchy estimate `|c_e| ≤ ln 2 · r^-e` holds.
fn cauchy_radius(k: u32) -> f64 {
    let h = |r: f64| (1..k).map(|j| r.powi((k + j) as i32)).sum::<f64>();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if h(mid) <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Euler-product evaluator for one `k`, caching prime zeta tails and the
/// log-series coefficients between calls.
pub struct EulerProduct<T> {
    k: u32,
    digits: u32,
    prime_zeta: PrimeZeta<T>,
    coeffs: Mutex<Vec<T>>,
    cache: Mutex<HashMap<u32, ErrorBoundedReal<T>>>,
}

impl<T: Real> EulerProduct<T> {
    pub fn new(k: u32, prime_cutoff: u64, digits: u32) -> Result<Self> {
        check_k(k)?;
        if digits > T::DIGITS {
            return Err(Error::PrecisionUnavailable {
                requested: digits,
                available: T::DIGITS,
            });
        }
        let prime_zeta = PrimeZeta::new(prime_cutoff.max(1), T::DIGITS.min(digits + 2))?;
        Ok(Self {
            k,
            digits,
            prime_zeta,
            coeffs: Mutex::new(Vec::new()),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn prime_cutoff(&self) -> u64 {
        self.prime_zeta.cutoff()
    }

    fn coefficient(&self, e: usize) -> T {
        let mut c = self.coeffs.lock().unwrap();
        if c.len() <= e {
            let want = (e + 1).max(2 * c.len()).max(64);
            *c = log_series_coefficients(self.k, want)
                .iter()
                .map(T::from_rational)
                .collect();
        }
        c[e]
    }

    /// `log(1 + P_k(m))`.
    fn log_product(&self, m: u32) -> Result<ErrorBoundedReal<T>> {
        let k = self.k;
        let mut log = ErrorBoundedReal::exact(T::zero());
        for &p in self.prime_zeta.primes().iter().rev() {
            let lnp = T::from_int(p as i64).ln();
            let mut x = ErrorBoundedReal::exact(T::zero());
            for j in 1..k {
                let t = ErrorBoundedReal::rounded(-exponent::<T>(k, m, j) * lnp).exp();
                x = x + t;
            }
            log = log + x.ln_1p();
        }
        // primes above the cutoff
        let n0 = self.prime_zeta.next_prime();
        let r = cauchy_radius(k);
        let u_max = (n0 as f64).powf(-(m as f64) / k as f64);
        if u_max >= r {
            return Err(Error::GuardInsufficient {
                order: 0,
                target: u_max,
            });
        }
        // tail sizes are relative to the leading prime tail term
        let lead = (-exponent::<T>(k, m, 1) * T::from_int(n0 as i64).ln()).exp();
        let target = lead.min(log.value.abs().max(lead)) * T::lit(10f64).powi(-(self.digits as i32) - 2);
        let first = (k + 1) as usize;
        let mut e = first;
        loop {
            let c = self.coefficient(e);
            if !c.is_zero() {
                let t = self.prime_zeta.tail_ratio(m as u64 * e as u64, k as u64)?;
                log = log + t.scale(c);
            }
            // Σ_{e'>e} |c_e'| Σ_{p>p0} p^(-me'/k) via the Cauchy estimate
            let sigma = T::from_int((m as usize * (e + 1)) as i64) / T::from_int(k as i64);
            let rest = T::ln2() / (T::one() - T::lit(u_max / r))
                * T::lit(r).powi(-(e as i32 + 1))
                * power_tail_bound(n0, sigma);
            if rest <= target {
                return Ok(log.widen(rest));
            }
            e += 1;
            if e > MAX_LOG_SERIES_TERMS {
                return Err(Error::GuardInsufficient {
                    order: e,
                    target: target.to_f64_lossy(),
                });
            }
        }
    }

    /// `P_k(m)`, `m >= 1`.
    pub fn power_sum(&self, m: u32) -> Result<ErrorBoundedReal<T>> {
        if m == 0 {
            return Err(Error::InvalidArgument("power sums start at m = 1".into()));
        }
        if let Some(v) = self.cache.lock().unwrap().get(&m) {
            return Ok(*v);
        }
        let p = self.log_product(m)?.exp_m1();
        let limit = T::lit(10f64).powi(-(self.digits as i32)) * p.value.max(T::one());
        if p.radius > limit {
            return Err(Error::PrecisionUnavailable {
                requested: self.digits,
                available: T::DIGITS,
            });
        }
        self.cache.lock().unwrap().insert(m, p);
        Ok(p)
    }

    pub fn power_sums(&self, m_max: u32) -> Result<PowerSums<T>> {
        let values = (1..=m_max).map(|m| self.power_sum(m)).collect::<Result<_>>()?;
        Ok(PowerSums { k: self.k, values })
    }
}

/// `P_k(m)` by the Euler route with the default prime cutoff.
pub fn power_sum_euler<T: Real>(k: u32, m: u32, digits: u32) -> Result<ErrorBoundedReal<T>> {
    EulerProduct::<T>::new(k, DEFAULT_PRIME_CUTOFF, digits)?.power_sum(m)
}

/// `ζ(3m/2)/ζ(3m) - 1`, the closed form of `P_2(m)`.
pub fn closed_form_k2<T: Real>(m: u32, digits: u32) -> Result<ErrorBoundedReal<T>> {
    let s = T::from_int(3 * m as i64) / T::from_int(2);
    let num = zeta(s, digits)?;
    let den = zeta(T::from_int(3 * m as i64), digits)?;
    Ok(num / den - ErrorBoundedReal::exact(T::one()))
}

/// `∏_{j=1}^{k-1} ζ(1 + j/k)`, the bound on `1 + P_k(1)` obtained by dropping
/// the squarefree condition.
pub fn unconstrained_bound<T: Real>(k: u32, digits: u32) -> Result<ErrorBoundedReal<T>> {
    check_k(k)?;
    let mut acc = ErrorBoundedReal::exact(T::one());
    for j in 1..k {
        acc = acc * zeta(T::one() + T::from_int(j as i64) / T::from_int(k as i64), digits)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;
    use num_traits::One;

    type Dd = DoubleDouble;

    #[test]
    fn tail_bound_examples() {
        let t: f64 = tail_bound(2, 1, 10_000).unwrap();
        assert!(t <= 0.02 + 1e-12, "{t}");
        let t2: f64 = tail_bound(2, 2, 10_000).unwrap();
        assert!(t2 <= 5.0e-9 + 1e-18, "{t2}");
        let mut last = f64::INFINITY;
        for b in [10u64, 100, 1000, 10_000, 100_000] {
            let t: f64 = tail_bound(3, 2, b).unwrap();
            assert!(t <= last);
            last = t;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn log_series_k2() {
        // log(1 + u^3) = u^3 - u^6/2 + u^9/3 - ...
        let c = log_series_coefficients(2, 12);
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(c[3], q(1, 1));
        assert_eq!(c[6], q(-1, 2));
        assert_eq!(c[9], q(1, 3));
        assert!(c[4].is_zero() && c[5].is_zero() && c[7].is_zero());
        // k=3: log(1 + u^4 + u^5): c_8 = -1/2, c_9 = -1, c_10 = -1/2
        let c3 = log_series_coefficients(3, 12);
        assert_eq!(c3[4], q(1, 1));
        assert_eq!(c3[5], q(1, 1));
        assert_eq!(c3[8], q(-1, 2));
        assert_eq!(c3[9], q(-1, 1));
        assert_eq!(c3[10], q(-1, 2));
    }

    #[test]
    fn euler_matches_closed_form_k2() {
        let ep = EulerProduct::<Dd>::new(2, DEFAULT_PRIME_CUTOFF, 28).unwrap();
        for m in 1..=10 {
            let e = ep.power_sum(m).unwrap();
            let c = closed_form_k2::<Dd>(m, 28).unwrap();
            assert!(e.overlaps(&c), "m={m}: {e} vs {c}");
            assert!(e.relative_radius() < Dd::lit(1e-26), "m={m}: {e}");
        }
        let p1 = ep.power_sum(1).unwrap();
        let want: Dd = "1.1732543125195541382370898404382237".parse().unwrap();
        assert!((p1.value - want).abs() < Dd::lit(1e-28));
    }

    #[test]
    fn euler_values_k3() {
        let ep = EulerProduct::<Dd>::new(3, DEFAULT_PRIME_CUTOFF, 28).unwrap();
        let p1 = ep.power_sum(1).unwrap();
        let want: Dd = "3.659266122500656941".parse().unwrap();
        assert!((p1.value - want).abs() < Dd::lit(1e-17), "{p1}");
        let bound = unconstrained_bound::<Dd>(3, 25).unwrap();
        assert!(p1.upper() < bound.lower() - Dd::one());
        // strictly decreasing in m, and tiny m-large values stay relative
        let ps = ep.power_sums(60).unwrap();
        assert!(ps.values.windows(2).all(|w| w[1].value < w[0].value));
        let lead = Dd::lit(2.0).powi(-80);
        let p60 = ps.get(60).unwrap();
        assert!(p60.value > lead && p60.relative_radius() < Dd::lit(1e-26));
    }

    #[test]
    fn cutoff_does_not_change_values() {
        let a = EulerProduct::<Dd>::new(3, 100, 28).unwrap();
        let b = EulerProduct::<Dd>::new(3, 1000, 28).unwrap();
        for m in [1, 2, 5, 13] {
            let (x, y) = (a.power_sum(m).unwrap(), b.power_sum(m).unwrap());
            assert!(x.overlaps(&y), "m={m}: {x} vs {y}");
        }
    }

    #[test]
    fn f64_euler_route() {
        let p = power_sum_euler::<f64>(2, 1, 13).unwrap();
        assert!((p.value - 1.173_254_312_519_554).abs() < 1e-13);
    }

    #[test]
    fn direct_route_small_boxes() {
        // k=2, B=10: squarefree b in 2..=10
        let p: ErrorBoundedReal<f64> = power_sum_direct(2, 1, 10).unwrap();
        let want: f64 = [2u64, 3, 5, 6, 7, 10].iter().map(|&b| (b as f64).powf(-1.5)).sum();
        assert!((p.value - want).abs() < 1e-14);
        assert!(p.radius >= tail_bound::<f64>(2, 1, 10).unwrap());
        let ps: PowerSums<f64> = power_sums_direct(2, 3, 100).unwrap();
        let e: ErrorBoundedReal<f64> = power_sum_euler(2, 3, 14).unwrap();
        assert!(ps.get(3).unwrap().overlaps(&e));
    }

    #[test]
    fn direct_route_k3_tuple_set() {
        let p: ErrorBoundedReal<f64> = power_sum_direct(3, 1, 3).unwrap();
        // B_1 = 3, B_2 = floor(3^(4/5)) = 2: tuples (2,1),(3,1),(1,2),(3,2)
        assert_eq!(box_bounds(3, 3), vec![3, 2]);
        let lam = |b1: f64, b2: f64| b1.powf(4.0 / 3.0) * b2.powf(5.0 / 3.0);
        let want = 1.0 / lam(2.0, 1.0) + 1.0 / lam(3.0, 1.0) + 1.0 / lam(1.0, 2.0) + 1.0 / lam(3.0, 2.0);
        assert!((p.value - want).abs() < 1e-14);
    }

    #[test]
    fn direct_route_rejects_large_boxes() {
        assert!(matches!(
            power_sum_direct::<f64>(4, 1, 1_000_000),
            Err(Error::CapExceeded { .. })
        ));
    }
}
