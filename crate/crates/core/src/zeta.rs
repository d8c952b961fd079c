//! Riemann zeta for real `s > 1` by Euler-Maclaurin summation, and the
//! prime zeta function `P(s) = Σ_p p^-s` through the Möbius inversion
//! `P(s) = Σ_n μ(n)/n · log ζ(ns)`.
//!
//! [`PrimeZeta`] applies the inversion to the zeta function with the
//! primes up to a cutoff `q` removed, which yields the prime tail
//! `Σ_{p>q} p^-s` with relative accuracy; the power sums depend on that.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::arith::primes::{moebius_sieve, primes_up_to};
use crate::bounded::ErrorBoundedReal;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_BERNOULLI_INDEX: usize = 80;

/// `B_{2j} / (2j)!` for `j = 0..=MAX_BERNOULLI_INDEX`, exact.
pub fn bernoulli_over_factorial() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let b = bernoulli_numbers(2 * MAX_BERNOULLI_INDEX);
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(MAX_BERNOULLI_INDEX + 1);
        for (n, bn) in b.iter().enumerate() {
            if n > 0 {
                fact *= BigInt::from(n);
            }
            if n % 2 == 0 {
                out.push(bn / BigRational::from_integer(fact.clone()));
            }
        }
        out
    })
}

/// Bernoulli numbers `B_0..=B_n` (Akiyama-Tanigawa; `B_1 = +1/2`).
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &a[j - 1] - &a[j];
            a[j - 1] = diff * BigRational::from_integer(BigInt::from(j));
        }
        out.push(a[0].clone());
    }
    out
}

fn check_digits<T: Real>(digits: u32) -> Result<()> {
    if digits > T::DIGITS {
        Err(Error::PrecisionUnavailable {
            requested: digits,
            available: T::DIGITS,
        })
    } else {
        Ok(())
    }
}

fn ten_pow<T: Real>(exp: i32) -> T {
    T::from_int(10).powi(exp)
}

/// ζ(s) for real `s > 1` with relative radius at most `10^-digits`.
///
/// `ζ(s) = Σ_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2 + Σ_j B_2j/(2j)! s(s+1)···(s+2j-2) N^(-s-2j+1)`,
/// the remainder bounded by the first omitted correction (valid for real s).
pub fn zeta<T: Real>(s: T, digits: u32) -> Result<ErrorBoundedReal<T>> {
    check_digits::<T>(digits)?;
    let z = zeta_enclosure(s)?;
    if z.radius > ten_pow::<T>(-(digits as i32)) * z.value {
        return Err(Error::PrecisionUnavailable {
            requested: digits,
            available: T::DIGITS,
        });
    }
    Ok(z)
}

/// ζ(s) as tight as the working precision allows.
pub(crate) fn zeta_enclosure<T: Real>(s: T) -> Result<ErrorBoundedReal<T>> {
    if !(s > T::one()) {
        return Err(Error::NotConvergent(s.to_f64_lossy()));
    }
    let target = T::epsilon();
    let mut n_terms: u64 = 24;
    loop {
        if let Some(z) = zeta_euler_maclaurin(s, n_terms, target) {
            return Ok(z);
        }
        n_terms *= 2;
        if n_terms > 10_000 {
            return Err(Error::GuardInsufficient {
                order: MAX_BERNOULLI_INDEX,
                target: target.to_f64_lossy(),
            });
        }
    }
}

fn zeta_euler_maclaurin<T: Real>(s: T, n_terms: u64, target: T) -> Option<ErrorBoundedReal<T>> {
    let one = T::one();
    let eps = T::epsilon();
    let mut sum = one;
    let mut abs_sum = one;
    // exp(-s ln n): the rounding of ln n is amplified by s ln n
    let mut rounding = T::zero();
    for n in 2..n_terms {
        let arg = s * T::from_int(n as i64).ln();
        let t = (-arg).exp();
        sum += t;
        abs_sum += t;
        rounding += t * eps * (T::from_int(4) + T::from_int(2) * arg);
    }
    let big_n = T::from_int(n_terms as i64);
    let ln_n = big_n.ln();
    let n_pow = (-s * ln_n).exp(); // N^-s
    let integral = n_pow * big_n / (s - one);
    let half = n_pow / T::from_int(2);
    sum += integral + half;
    abs_sum += integral + half;
    rounding += (integral + half) * eps * (T::from_int(8) + T::from_int(2) * s * ln_n);

    let coeffs = bernoulli_over_factorial();
    let inv_n2 = one / (big_n * big_n);
    let mut poch = s; // s(s+1)...(s+2j-2)
    let mut npow = n_pow / big_n; // N^(-s-2j+1) at j = 1
    let mut j = 1;
    loop {
        if j + 1 >= coeffs.len() {
            return None;
        }
        let term = T::from_rational(&coeffs[j]) * poch * npow;
        let next_poch = poch * (s + T::from_int(2 * j as i64 - 1)) * (s + T::from_int(2 * j as i64));
        let next_npow = npow * inv_n2;
        let next = T::from_rational(&coeffs[j + 1]) * next_poch * next_npow;
        sum += term;
        abs_sum += term.abs();
        rounding += term.abs() * eps * (T::from_int(8 + 2 * j as i64) + T::from_int(2) * s * ln_n);
        if next.abs() <= target * sum * T::lit(1e-3) {
            let radius = next.abs() + rounding + abs_sum * eps * T::from_int(2);
            return Some(ErrorBoundedReal::new(sum, radius));
        }
        // corrections diverge once the Pochhammer growth beats N^2
        if next.abs() > term.abs() && j > 2 {
            return None;
        }
        poch = next_poch;
        npow = next_npow;
        j += 1;
    }
}

/// Upper bound of `Σ_{n>=n0} n^-t`: `n0^-t (1 + n0/(t-1))`.
pub(crate) fn power_tail_bound<T: Real>(n0: u64, t: T) -> T {
    let n0 = T::from_int(n0 as i64);
    (-t * n0.ln()).exp() * (T::one() + n0 / (t - T::one()))
}

type Key = (u64, u64);

/// Prime zeta tails `Σ_{p>q} p^-s` for a fixed cutoff `q`.
pub struct PrimeZeta<T> {
    cutoff: u64,
    primes: Vec<u64>,
    next_prime: u64,
    digits: u32,
    moebius: Vec<i8>,
    log_rough: Mutex<HashMap<Key, ErrorBoundedReal<T>>>,
    tails: Mutex<HashMap<Key, ErrorBoundedReal<T>>>,
}

impl<T: Real> PrimeZeta<T> {
    /// `cutoff = 1` removes no primes and gives the full prime zeta function.
    pub fn new(cutoff: u64, digits: u32) -> Result<Self> {
        check_digits::<T>(digits)?;
        if cutoff == 0 || cutoff > 10_000_000 {
            return Err(Error::OutOfRange {
                what: "prime cutoff",
                value: cutoff.to_string(),
                max: "10000000".into(),
            });
        }
        let primes = primes_up_to(cutoff);
        let next_prime = primes_up_to(2 * cutoff + 2)
            .into_iter()
            .find(|&p| p > cutoff)
            .expect("Bertrand");
        Ok(Self {
            cutoff,
            primes,
            next_prime,
            digits,
            moebius: moebius_sieve(4096),
            log_rough: Mutex::new(HashMap::new()),
            tails: Mutex::new(HashMap::new()),
        })
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn next_prime(&self) -> u64 {
        self.next_prime
    }

    /// Below this size a tail is better enclosed by its a-priori bounds than
    /// by evaluating `log ζ(t)`, which is only good to about one ulp of 1.
    fn route_error(&self, _t: T) -> T {
        T::epsilon()
    }

    /// `log ζ_q(t) = log ζ(t) + Σ_{p<=q} log(1 - p^-t)`, always inside
    /// `[0, Σ_{n>=p'} n^-t]` with `p'` the first prime above `q`.
    fn log_rough_zeta(&self, t: T, key: Option<Key>) -> Result<ErrorBoundedReal<T>> {
        if let Some(k) = key {
            if let Some(v) = self.log_rough.lock().unwrap().get(&k) {
                return Ok(*v);
            }
        }
        let upper = power_tail_bound(self.next_prime, t);
        let v = if upper <= self.route_error(t) {
            ErrorBoundedReal::from_bounds(T::zero(), upper)
        } else {
            // smallest terms first keeps the per-addition allowance small
            let mut acc = ErrorBoundedReal::exact(T::zero());
            for &p in self.primes.iter().rev() {
                let pt = (-t * T::from_int(p as i64).ln()).exp();
                acc = acc + ErrorBoundedReal::rounded(-pt).ln_1p();
            }
            let acc = acc + zeta_enclosure(t)?.ln();
            if acc.radius * T::from_int(2) > upper {
                ErrorBoundedReal::from_bounds(T::zero(), upper)
            } else {
                acc
            }
        };
        if let Some(k) = key {
            self.log_rough.lock().unwrap().insert(k, v);
        }
        Ok(v)
    }

    /// `Σ_{p>q} p^-s` with relative radius about `10^-digits`.
    pub fn tail(&self, s: T) -> Result<ErrorBoundedReal<T>> {
        self.tail_keyed(s, None)
    }

    /// Tail at the exact rational exponent `num/den`; results are memoized.
    pub fn tail_ratio(&self, num: u64, den: u64) -> Result<ErrorBoundedReal<T>> {
        let g = num_integer::gcd(num, den);
        let (num, den) = (num / g, den / g);
        if let Some(v) = self.tails.lock().unwrap().get(&(num, den)) {
            return Ok(*v);
        }
        let s = T::from_int(num as i64) / T::from_int(den as i64);
        let v = self.tail_keyed(s, Some((num, den)))?;
        self.tails.lock().unwrap().insert((num, den), v);
        Ok(v)
    }

    fn tail_keyed(&self, s: T, key: Option<Key>) -> Result<ErrorBoundedReal<T>> {
        if !(s > T::one()) {
            return Err(Error::NotConvergent(s.to_f64_lossy()));
        }
        let n0 = self.next_prime;
        let ln_n0 = T::from_int(n0 as i64).ln();
        let lower = (-s * ln_n0).exp();
        let upper = power_tail_bound(n0, s);
        let target = lower * ten_pow::<T>(-(self.digits as i32));
        if upper <= target {
            return Ok(ErrorBoundedReal::from_bounds(lower, upper));
        }
        // The inversion carries an absolute error of a few ulps of log ζ,
        // which swamps tails far below 1. Summing primes directly up to a
        // modest limit keeps the result relative there.
        if self.route_error(s) > target {
            if let Some(v) = self.direct_tail(s, target) {
                return Ok(v);
            }
            if upper <= self.route_error(s) {
                return Ok(ErrorBoundedReal::from_bounds(lower, upper));
            }
        }
        let ratio = (-s * ln_n0).exp();
        let mut acc = ErrorBoundedReal::exact(T::zero());
        let mut n: u64 = 1;
        loop {
            let mu = self.moebius[n as usize];
            if mu != 0 {
                let t = s * T::from_int(n as i64);
                let inner_key = key.map(|(a, b)| (a * n, b));
                let l = self.log_rough_zeta(t, inner_key)?;
                let w = T::from_int(mu as i64) / T::from_int(n as i64);
                acc = acc + l.scale(w);
            }
            // Σ_{m>n} (1/m) log ζ_q(ms) <= Σ_{m>n} n0^-ms (1 + n0/(ms-1))
            let next_s = s * T::from_int(n as i64 + 1);
            let rest = (-next_s * ln_n0).exp() * (T::one() + T::from_int(n0 as i64) / (next_s - T::one()))
                / (T::one() - ratio);
            if rest <= target || n as usize + 1 >= self.moebius.len() {
                let acc = acc.widen(rest);
                // intersect with the a-priori enclosure
                if acc.upper() > upper || acc.lower() < lower {
                    let lo = acc.lower().max(lower);
                    let hi = acc.upper().min(upper);
                    if lo <= hi {
                        return Ok(ErrorBoundedReal::from_bounds(lo, hi));
                    }
                }
                return Ok(acc);
            }
            n += 1;
        }
    }
}

impl<T: Real> PrimeZeta<T> {
    /// `Σ_{q<p<=Q} p^-s` plus an enclosure of the rest, with `Q` the
    /// smallest power of two for which that rest is below `target`.
    fn direct_tail(&self, s: T, target: T) -> Option<ErrorBoundedReal<T>> {
        let mut limit: u64 = 1024.max(self.next_prime);
        while power_tail_bound(limit + 1, s) > target {
            limit *= 2;
            if limit > DIRECT_PRIME_LIMIT {
                return None;
            }
        }
        let primes = direct_primes();
        let mut sum = T::zero();
        let mut rounding = T::zero();
        for &p in primes.iter().filter(|&&p| p > self.cutoff && p <= limit) {
            let arg = s * T::from_int(p as i64).ln();
            let t = (-arg).exp();
            sum += t;
            rounding += t * T::epsilon() * (T::from_int(6) + T::from_int(2) * arg);
        }
        let rest = power_tail_bound(limit + 1, s);
        let lo = sum - rounding;
        let hi = sum + rounding + rest;
        Some(ErrorBoundedReal::from_bounds(lo, hi))
    }
}

const DIRECT_PRIME_LIMIT: u64 = 1 << 21;

fn direct_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(DIRECT_PRIME_LIMIT))
}

/// The prime zeta function `Σ_p p^-s`, `s > 1`, from `Σ_n μ(n)/n log ζ(ns)`.
pub fn prime_zeta<T: Real>(s: T, digits: u32) -> Result<ErrorBoundedReal<T>> {
    PrimeZeta::<T>::new(1, digits)?.tail(s)
}
