//! Densities of the sets `A_{ℓ,m}` and `B_{I,J}` and the Shiu densities
//! `d_{k,ℓ}`, all derived from the entire function
//! `F_k(z) = ∏_λ (1 + (z-2)/λ) = Σ_r ξ_r (z-2)^r = Σ_n a_n z^n`.
//!
//! The elementary symmetric sums `ξ_r` of `{1/λ}` come from the power sums
//! by Newton's identities. Every alternating series here is cut off at the
//! last available `ξ` and its remainder bounded with `ξ_r ≤ P^r/r!`
//! (`P = P_k(1)`), which turns all tails into Poisson tails
//! `Σ_{t≥t0} x^t/t!`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bounded::ErrorBoundedReal;
use crate::error::{check_k, Error, Result};
use crate::lambda::{first_lambdas, LambdaElement};
use crate::power_sums::{EulerProduct, PowerSums, DEFAULT_PRIME_CUTOFF};
use crate::scalar::Real;

type B<T> = ErrorBoundedReal<T>;

#[derive(Clone, Debug)]
pub struct XiSequence<T> {
    pub k: u32,
    /// `xi[r] = ξ_{k,r}`, `xi[0] = 1`
    pub xi: Vec<B<T>>,
}

impl<T> XiSequence<T> {
    pub fn r_max(&self) -> usize {
        self.xi.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct SeriesCoeffs<T> {
    pub k: u32,
    /// Taylor coefficients of `F_k` at 0; `a[0] = C_k`.
    pub a: Vec<B<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMethod {
    /// `C(ℓ+m, ℓ) a_{ℓ+m}`
    Direct,
    /// alternating sum over the Shiu densities
    Inversion,
    /// trinomial sum over `ξ`
    Xi,
}

impl DensityMethod {
    pub const ALL: [DensityMethod; 3] = [Self::Direct, Self::Inversion, Self::Xi];

    pub fn name(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Inversion => "inversion",
            Self::Xi => "xi",
        }
    }
}

impl fmt::Display for DensityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DensityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "inversion" => Ok(Self::Inversion),
            "xi" => Ok(Self::Xi),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiuMethod {
    XiAlternating,
    RowSum,
}

#[derive(Clone, Debug)]
pub struct DensityTable<T> {
    pub k: u32,
    pub max_index: usize,
    pub method: DensityMethod,
    /// `entries[ℓ][m] = d(A_{ℓ,m})`
    pub entries: Vec<Vec<B<T>>>,
}

impl<T: Real> DensityTable<T> {
    pub fn get(&self, l: usize, m: usize) -> Option<B<T>> {
        self.entries.get(l).and_then(|row| row.get(m)).copied()
    }
}

/// A finite set of distinct elements of one Λ_k.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubsetSpec {
    k: u32,
    elements: Vec<LambdaElement>,
}

impl SubsetSpec {
    pub fn new(k: u32, mut elements: Vec<LambdaElement>) -> Result<Self> {
        check_k(k)?;
        if let Some(e) = elements.iter().find(|e| e.k() != k) {
            return Err(Error::KMismatch { left: k, right: e.k() });
        }
        elements.sort();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("subset elements must be distinct".into()));
        }
        Ok(Self { k, elements })
    }

    pub fn empty(k: u32) -> Self {
        Self {
            k,
            elements: Vec::new(),
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn elements(&self) -> &[LambdaElement] {
        &self.elements
    }

    pub fn is_disjoint(&self, other: &SubsetSpec) -> bool {
        self.elements.iter().all(|e| !other.elements.contains(e))
    }
}

/// Upper bound of `Σ_{t≥t0} x^t/t!`: the terms are summed while they still
/// grow, then the rest is bounded geometrically.
pub fn poisson_tail<T: Real>(x: T, t0: usize) -> T {
    let mut term = T::one();
    for t in 1..=t0 {
        term = term * x / T::from_int(t as i64);
    }
    let mut sum = T::zero();
    let mut t = t0;
    let half = T::lit(0.5);
    while x / T::from_int(t as i64 + 1) > half {
        sum += term;
        t += 1;
        term = term * x / T::from_int(t as i64);
    }
    let ratio = x / T::from_int(t as i64 + 1);
    (sum + term / (T::one() - ratio)) * (T::one() + T::epsilon() * T::from_int(4 * t as i64 + 8))
}

/// `x^n/n!`
fn power_over_factorial<T: Real>(x: T, n: usize) -> T {
    let mut v = T::one();
    for t in 1..=n {
        v = v * x / T::from_int(t as i64);
    }
    v
}

/// Exact binomial coefficients `C(n, j)` for `n ≤ size`, stored as bounded
/// reals (exact when they fit the mantissa).
struct Binomials<T> {
    rows: Vec<Vec<B<T>>>,
}

impl<T: Real> Binomials<T> {
    fn new(size: usize) -> Self {
        let mut exact: Vec<BigInt> = vec![BigInt::one()];
        let mut rows = Vec::with_capacity(size + 1);
        for n in 0..=size {
            if n > 0 {
                let mut next = vec![BigInt::one(); n + 1];
                for j in 1..n {
                    next[j] = &exact[j - 1] + &exact[j];
                }
                exact = next;
            }
            rows.push(exact.iter().map(|c| B::rounded(T::from_bigint(c))).collect());
        }
        Self { rows }
    }

    fn get(&self, n: usize, j: usize) -> B<T> {
        self.rows[n][j]
    }
}

/// `ξ_0..=ξ_{r_max}` by Newton's identities
/// `r ξ_r = Σ_{i=1}^r (-1)^(i-1) ξ_{r-i} P_i`, each value intersected with
/// the a-priori enclosure `[0, P_1^r / r!]`.
pub fn xi_from_power_sums<T: Real>(ps: &PowerSums<T>, r_max: usize) -> Result<XiSequence<T>> {
    if ps.len() < r_max {
        return Err(Error::InsufficientPowerSums {
            have: ps.len(),
            need: r_max,
        });
    }
    let p1_upper = if r_max > 0 { ps.values[0].upper() } else { T::zero() };
    let mut xi = vec![B::exact(T::one())];
    for r in 1..=r_max {
        let mut acc = B::exact(T::zero());
        for i in 1..=r {
            let term = xi[r - i] * ps.values[i - 1];
            acc = if i % 2 == 1 { acc + term } else { acc - term };
        }
        let v = acc.scale(T::one() / T::from_int(r as i64));
        let cap = power_over_factorial(p1_upper, r) * (T::one() + T::epsilon() * T::from_int(4 * r as i64));
        let lo = v.lower().max(T::zero());
        let hi = v.upper().min(cap);
        xi.push(if lo > v.lower() || hi < v.upper() {
            B::from_bounds(lo.min(hi), hi)
        } else {
            v
        });
    }
    Ok(XiSequence { k: ps.k, xi })
}

/// Elementary symmetric sums of `{1/λ}` over a finite set, by multiplying
/// out `∏ (1 + x/λ)` one factor at a time.
pub fn xi_direct<T: Real>(elements: &[LambdaElement], r_max: usize) -> Vec<T> {
    let mut e = vec![T::zero(); r_max + 1];
    e[0] = T::one();
    for el in elements {
        let x = T::one() / el.value::<T>();
        for r in (1..=r_max).rev() {
            let prev = e[r - 1];
            e[r] += x * prev;
        }
    }
    e
}

/// Tail targets above this make [`coeffs_a`] refuse: the result would not
/// be worth reporting.
pub const MAX_COEFF_TAIL: f64 = 1e-12;

/// `a_n = Σ_{r≥n} C(r,n) (-2)^(r-n) ξ_r`, `n = 0..=n_max`, each with the
/// remainder `P^n/n! · Σ_{t>r_max-n} (2P)^t/t!` in its radius.
pub fn coeffs_a<T: Real>(xi: &XiSequence<T>, n_max: usize) -> Result<SeriesCoeffs<T>> {
    let binom = Binomials::<T>::new(xi.r_max());
    let p = p1_bound(xi);
    let a = coeffs_with(xi, n_max, &binom, p)?;
    let tail0 = poisson_tail(T::from_int(2) * p, xi.r_max() + 1);
    if tail0 > T::lit(MAX_COEFF_TAIL) {
        return Err(Error::GuardInsufficient {
            order: xi.r_max(),
            target: MAX_COEFF_TAIL,
        });
    }
    Ok(SeriesCoeffs { k: xi.k, a })
}

// Upper bound of P_1 recovered from ξ_1.
fn p1_bound<T: Real>(xi: &XiSequence<T>) -> T {
    xi.xi.get(1).map_or(T::zero(), |x| x.upper())
}

fn coeffs_with<T: Real>(xi: &XiSequence<T>, n_max: usize, binom: &Binomials<T>, p: T) -> Result<Vec<B<T>>> {
    let r_max = xi.r_max();
    if n_max > r_max {
        return Err(Error::IndexOutOfRange {
            index: n_max,
            max: r_max,
        });
    }
    let two_p = T::from_int(2) * p;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = B::exact(T::zero());
        let mut pow2 = T::one();
        for r in n..=r_max {
            let term = (binom.get(r, n) * xi.xi[r]).scale(pow2);
            acc = acc + term;
            pow2 = -(pow2 * T::from_int(2));
        }
        let tail = power_over_factorial(p, n) * poisson_tail(two_p, r_max - n + 1);
        out.push(acc.widen(tail));
    }
    Ok(out)
}

/// Engine settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Largest ℓ and m of interest.
    pub max_index: usize,
    /// Highest ξ index; `None` picks the smallest order that brings every
    /// truncation tail below `tail_target`.
    pub r_max: Option<usize>,
    pub prime_cutoff: u64,
    pub digits: u32,
    pub tail_target: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_index: 5,
            r_max: None,
            prime_cutoff: DEFAULT_PRIME_CUTOFF,
            digits: 28,
            tail_target: 1e-15,
        }
    }
}

/// Guard terms never fall below this many beyond `2 L`.
pub const MIN_GUARD_TERMS: usize = 40;

/// The smallest ξ order whose worst truncation tail stays below `target`.
///
/// The largest tail is the one of the normalization sum `Σ a_n 2^n`, whose
/// truncated coefficients carry radii summing to at most
/// `e^(2P) (4P)^(R+1)/(R+1)!`-ish; both that and the remainder of the sum
/// itself are checked.
pub fn required_r_max(p1: f64, max_index: usize, target: f64) -> usize {
    let floor = 2 * max_index + MIN_GUARD_TERMS;
    let mut r = floor;
    loop {
        let conv = (2.0 * p1).exp() * poisson_tail(4.0 * p1, r + 1);
        let norm = (2.0 * p1).exp() * poisson_tail(2.0 * p1, r + 1);
        if conv.max(norm) <= target || r > 2000 {
            return r;
        }
        r += 1;
    }
}

/// Everything derived from the power sums of one `k`.
pub struct DensityEngine<T: Real> {
    k: u32,
    config: EngineConfig,
    euler: EulerProduct<T>,
    power_sums: PowerSums<T>,
    xi: XiSequence<T>,
    a: SeriesCoeffs<T>,
    shiu: Vec<B<T>>,
    binom: Binomials<T>,
    p1: T,
    lambda_min: T,
}

impl<T: Real> DensityEngine<T> {
    pub fn new(k: u32, config: EngineConfig) -> Result<Self> {
        check_k(k)?;
        let digits = config.digits.min(T::DIGITS.saturating_sub(2));
        let euler = EulerProduct::<T>::new(k, config.prime_cutoff, digits)?;
        let p1 = euler.power_sum(1)?;
        let r_max = config
            .r_max
            .unwrap_or_else(|| required_r_max(p1.upper().to_f64_lossy(), config.max_index, config.tail_target));
        if r_max < 2 * config.max_index {
            return Err(Error::InvalidArgument(format!(
                "r_max = {r_max} is below 2 * max_index = {}",
                2 * config.max_index
            )));
        }
        let power_sums = euler.power_sums(r_max.max(1) as u32)?;
        let xi = xi_from_power_sums(&power_sums, r_max)?;
        let binom = Binomials::<T>::new(r_max);
        let p = p1.upper();
        let a = SeriesCoeffs {
            k,
            a: coeffs_with(&xi, r_max, &binom, p)?,
        };
        let shiu = (0..=r_max).map(|l| shiu_from_xi(&xi, l, &binom, p)).collect();
        let lambda_min = T::from_int(2).powf(T::from_int(k as i64 + 1) / T::from_int(k as i64));
        Ok(Self {
            k,
            config,
            euler,
            power_sums,
            xi,
            a,
            shiu,
            binom,
            p1: p,
            lambda_min,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn r_max(&self) -> usize {
        self.xi.r_max()
    }

    pub fn power_sums(&self) -> &PowerSums<T> {
        &self.power_sums
    }

    pub fn xi(&self) -> &XiSequence<T> {
        &self.xi
    }

    pub fn coeffs(&self) -> &SeriesCoeffs<T> {
        &self.a
    }

    /// `C_k = a_0 = ∏ (1 - 2/λ)`.
    pub fn c_k(&self) -> B<T> {
        self.a.a[0]
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index > self.r_max() {
            Err(Error::IndexOutOfRange {
                index,
                max: self.r_max(),
            })
        } else {
            Ok(())
        }
    }

    /// `C(ℓ+m, ℓ)` read so that swapping ℓ and m gives the same bits.
    fn central(&self, l: usize, m: usize) -> B<T> {
        self.binom.get(l + m, l.min(m))
    }

    /// `d(A_{ℓ,m})`.
    pub fn density_a(&self, l: usize, m: usize, method: DensityMethod) -> Result<B<T>> {
        let s = l + m;
        self.check_index(s)?;
        let c = self.central(l, m);
        match method {
            DensityMethod::Direct => Ok(c * self.a.a[s]),
            DensityMethod::Xi => {
                // Σ_n (-2)^n (s+n)!/(ℓ! m! n!) ξ_{s+n}
                let r_max = self.r_max();
                let mut acc = B::exact(T::zero());
                let mut pow2 = T::one();
                for n in 0..=(r_max - s) {
                    let trinom = self.binom.get(s + n, n) * c;
                    acc = acc + (trinom * self.xi.xi[s + n]).scale(pow2);
                    pow2 = -(pow2 * T::from_int(2));
                }
                let tail = power_over_factorial(self.p1, l)
                    * power_over_factorial(self.p1, m)
                    * poisson_tail(T::from_int(2) * self.p1, r_max - s + 1);
                Ok(acc.widen(tail))
            }
            DensityMethod::Inversion => {
                // Σ_n (-1)^n (s+n)!/(ℓ! m! n!) d_{k,s+n}
                let r_max = self.r_max();
                let mut acc = B::exact(T::zero());
                for n in 0..=(r_max - s) {
                    let term = self.binom.get(s + n, n) * c * self.shiu[s + n];
                    acc = if n % 2 == 0 { acc + term } else { acc - term };
                }
                let tail = self.p1.exp()
                    * power_over_factorial(self.p1, l)
                    * power_over_factorial(self.p1, m)
                    * poisson_tail(self.p1, r_max - s + 1);
                Ok(acc.widen(tail))
            }
        }
    }

    /// The table `d(A_{ℓ,m})`, `0 ≤ ℓ, m ≤ L`.
    pub fn density_table(&self, max_index: usize, method: DensityMethod) -> Result<DensityTable<T>> {
        let entries = (0..=max_index)
            .map(|l| (0..=max_index).map(|m| self.density_a(l, m, method)).collect())
            .collect::<Result<_>>()?;
        Ok(DensityTable {
            k: self.k,
            max_index,
            method,
            entries,
        })
    }

    /// `d(B_{I,J}) = ∏_{I∪J} 1/λ · ∏_{rest} (1 - 2/λ) = C_k ∏_{I∪J} 1/(λ-2)`.
    pub fn density_b(&self, i: &SubsetSpec, j: &SubsetSpec) -> Result<B<T>> {
        for s in [i, j] {
            if s.k() != self.k {
                return Err(Error::KMismatch {
                    left: self.k,
                    right: s.k(),
                });
            }
        }
        if !i.is_disjoint(j) {
            return Err(Error::Overlap);
        }
        let mut union: Vec<&LambdaElement> = i.elements().iter().chain(j.elements()).collect();
        // order-independent result: multiply in λ order
        union.sort();
        let mut acc = self.c_k();
        for e in union {
            let lam = B::new(
                e.value::<T>(),
                e.value::<T>() * T::epsilon() * T::from_int(8 + e.k() as i64),
            );
            acc = acc / (lam - B::exact(T::from_int(2)));
        }
        Ok(acc)
    }

    /// `d_{k,ℓ}`, the density of n with exactly ℓ proper k-full integers in
    /// `(n^k, (n+1)^k)`.
    pub fn density_shiu(&self, l: usize, method: ShiuMethod) -> Result<B<T>> {
        self.check_index(l)?;
        match method {
            ShiuMethod::XiAlternating => Ok(self.shiu[l]),
            ShiuMethod::RowSum => {
                let r_max = self.r_max();
                let mut acc = B::exact(T::zero());
                for m in 0..=(r_max - l) {
                    acc = acc + self.density_a(l, m, DensityMethod::Direct)?;
                }
                // Σ_{m>M} C(ℓ+m,ℓ)|a_{ℓ+m}| with |a_n| ≤ e^(2P) P^n/n!
                let tail = (T::from_int(2) * self.p1).exp()
                    * power_over_factorial(self.p1, l)
                    * poisson_tail(self.p1, r_max - l + 1);
                Ok(acc.widen(tail))
            }
        }
    }

    /// `Σ_{m≤M} d(A_{ℓ,m})` without any tail allowance.
    pub fn row_partial_sum(&self, l: usize, last_m: usize) -> Result<B<T>> {
        let mut acc = B::exact(T::zero());
        for m in 0..=last_m {
            acc = acc + self.density_a(l, m, DensityMethod::Direct)?;
        }
        Ok(acc)
    }

    /// Upper bound on `Σ_{m>M} d(A_{ℓ,m})`.
    pub fn row_tail_bound(&self, l: usize, last_m: usize) -> T {
        (T::from_int(2) * self.p1).exp() * power_over_factorial(self.p1, l) * poisson_tail(self.p1, last_m + 1)
    }

    /// `Σ_n a_n 2^n = F_k(2)`, which must be 1.
    pub fn normalization_check(&self) -> B<T> {
        let n_max = self.r_max();
        let tail = (T::from_int(2) * self.p1).exp() * poisson_tail(T::from_int(2) * self.p1, n_max + 1);
        self.normalization_truncated(n_max).widen(tail)
    }

    /// `Σ_{n≤n_max} a_n 2^n`, with no allowance for the omitted terms.
    pub fn normalization_truncated(&self, n_max: usize) -> B<T> {
        let mut acc = B::exact(T::zero());
        let mut pow2 = T::one();
        for n in 0..=n_max.min(self.r_max()) {
            acc = acc + self.a.a[n].scale(pow2);
            pow2 *= T::from_int(2);
        }
        acc
    }

    /// `F_k(z) = ∏ (1 + (z-2)/λ)`.
    ///
    /// Near `z = 2` the logarithm `Σ_m (-1)^(m-1) P_m (z-2)^m / m` converges
    /// geometrically and is used; elsewhere the ξ expansion.
    pub fn eval_f(&self, z: T) -> Result<B<T>> {
        let t = z - T::from_int(2);
        let ratio = t.abs() / self.lambda_min;
        if ratio <= T::lit(0.85) {
            let mut acc = B::exact(T::zero());
            let mut tp = T::one();
            let p1 = self.power_sums.values[0];
            let target = T::epsilon();
            let mut m = 1usize;
            loop {
                tp *= t;
                let pm = self.euler.power_sum(m as u32)?;
                let term = pm.scale(tp / T::from_int(m as i64));
                acc = if m % 2 == 1 { acc + term } else { acc - term };
                // P_m ≤ P_1 λmin^(1-m)
                let rest = p1.upper() * self.lambda_min * ratio.powi(m as i32 + 1)
                    / (T::from_int(m as i64 + 1) * (T::one() - ratio));
                if rest <= target || m > 4000 {
                    return Ok(acc.widen(rest).exp());
                }
                m += 1;
            }
        }
        let r_max = self.r_max();
        let x = self.p1 * t.abs();
        if x >= T::from_int(r_max as i64 + 2) {
            return Err(Error::NotConvergent(z.to_f64_lossy()));
        }
        let mut acc = B::exact(T::zero());
        let mut tp = T::one();
        for r in 0..=r_max {
            acc = acc + self.xi.xi[r].scale(tp);
            tp *= t;
        }
        Ok(acc.widen(poisson_tail(x, r_max + 1)))
    }
}

fn shiu_from_xi<T: Real>(xi: &XiSequence<T>, l: usize, binom: &Binomials<T>, p: T) -> B<T> {
    // d_{k,ℓ} = Σ_n (-1)^n C(ℓ+n, ℓ) ξ_{ℓ+n}
    let r_max = xi.r_max();
    let mut acc = B::exact(T::zero());
    for n in 0..=(r_max - l) {
        let term = binom.get(l + n, l) * xi.xi[l + n];
        acc = if n % 2 == 0 { acc + term } else { acc - term };
    }
    acc.widen(power_over_factorial(p, l) * poisson_tail(p, r_max - l + 1))
}

/// `ξ_r` over the first `count` elements of Λ_k, returned with the bound on
/// what the remaining elements can add: for `S = Σ_{rest} 1/λ` the full
/// `ξ_r` exceeds the truncated one by at most `Σ_{i≥1} ξ'_{r-i} S^i/i!`.
pub fn xi_truncated_with_tail<T: Real>(k: u32, count: usize, r_max: usize, p1: B<T>) -> Result<Vec<B<T>>> {
    let els = first_lambdas(k, count)?;
    let head = xi_direct::<T>(&els, r_max);
    let head_p1: T = els
        .iter()
        .map(|e| T::one() / e.value::<T>())
        .fold(T::zero(), |a, b| a + b);
    let rest = (p1.upper() - head_p1).max(T::zero()) * (T::one() + T::epsilon() * T::from_int(count as i64 + 8));
    let mut out = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        let mut extra = T::zero();
        for i in 1..=r {
            extra += head[r - i] * power_over_factorial(rest, i);
        }
        let rounding = head[r].abs() * T::epsilon() * T::from_int(4 * (count as i64 + r as i64 + 2));
        // the truncated value is a lower bound
        out.push(B::from_bounds(head[r] - rounding, head[r] + extra + rounding));
    }
    Ok(out)
}

impl<T: Real> fmt::Debug for DensityEngine<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityEngine")
            .field("k", &self.k)
            .field("r_max", &self.r_max())
            .field("config", &self.config)
            .finish()
    }
}
