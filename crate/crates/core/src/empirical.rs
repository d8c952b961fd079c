//! Exact counts behind the analytic densities.
//!
//! Every proper k-full `v` lies strictly between two consecutive kth
//! powers, `j^k < v < (j+1)^k` with `j = floor(v^(1/k))`. Writing `c_j` for
//! the number of such `v`, the integer `n` falls in cell `(c_n, c_{n+1})`.
//! One ascending pass over the k-full stream therefore classifies every
//! `n ≤ N` while holding only the counts of the current `j`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, enumerate_kfull_range, iroot, KFullRepr};
use crate::density::{DensityTable, SubsetSpec};
use crate::error::{check_k, Error, Result};
use crate::lambda::LambdaElement;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `(n^k, (n+1)^k)`
    Left,
    /// `((n+1)^k, (n+2)^k)`
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalHit {
    pub n: u64,
    pub side: Side,
    pub value: u128,
    pub repr: KFullRepr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalCounts {
    pub k: u32,
    /// Range bound: `n = 1..=N` were classified.
    pub n: u64,
    /// `(ℓ, m) → #{n ≤ N in A_{ℓ,m}}`
    pub counts: BTreeMap<(usize, usize), u64>,
    /// Largest value the enumeration had to reach, `(N+2)^k`.
    pub enumeration_bound: u128,
}

impl EmpiricalCounts {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn count(&self, l: usize, m: usize) -> u64 {
        self.counts.get(&(l, m)).copied().unwrap_or(0)
    }

    pub fn frequency(&self, l: usize, m: usize) -> f64 {
        self.count(l, m) as f64 / self.n as f64
    }

    /// Largest ℓ or m with a nonzero count.
    pub fn max_index(&self) -> usize {
        self.counts.keys().map(|&(l, m)| l.max(m)).max().unwrap_or(0)
    }
}

fn kth_power(n: u64, k: u32) -> Result<u128> {
    checked_pow(n as u128, k).ok_or(Error::Overflow("n^k"))
}

/// Proper k-full integers in `(n^k, (n+1)^k)` and `((n+1)^k, (n+2)^k)`.
pub fn interval_hits(n: u64, k: u32) -> Result<Vec<IntervalHit>> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let lo = kth_power(n, k)?;
    let mid = kth_power(n + 1, k)?;
    let hi = kth_power(n + 2, k)?;
    let stream = enumerate_kfull_range(k, lo + 1, hi - 1, true)?;
    Ok(stream
        .map(|(value, repr)| IntervalHit {
            n,
            side: if value < mid { Side::Left } else { Side::Right },
            value,
            repr,
        })
        .collect())
}

/// `(ℓ, m)` such that `n ∈ A_{ℓ,m}`.
pub fn classify_pair(n: u64, k: u32) -> Result<(usize, usize)> {
    let hits = interval_hits(n, k)?;
    let left = hits.iter().filter(|h| h.side == Side::Left).count();
    Ok((left, hits.len() - left))
}

/// Runs over the proper k-full integers in `(lo^k, (hi+2)^k)` and reports
/// `j` together with the shape indices of the values with `floor(v^(1/k)) = j`,
/// for `j = lo..=hi+1` in order (including empty `j`). Returns the shape
/// table the indices refer to.
fn sweep<F>(k: u32, lo: u64, hi: u64, mut visit: F) -> Result<Vec<Vec<u64>>>
where
    F: FnMut(u64, &[usize]),
{
    let lo_pow = kth_power(lo, k)?;
    let hi_pow = kth_power(hi + 2, k)?;
    let mut stream = enumerate_kfull_range(k, lo_pow + 1, hi_pow - 1, true)?;
    let shapes: Vec<Vec<u64>> = stream.shapes().iter().map(|s| s.b.clone()).collect();
    let mut j = lo;
    let mut current: Vec<usize> = Vec::new();
    while let Some((v, shape, _a)) = stream.next_raw() {
        let root = iroot(v, k) as u64;
        while j < root {
            visit(j, &current);
            current.clear();
            j += 1;
        }
        current.push(shape);
    }
    while j <= hi + 1 {
        visit(j, &current);
        current.clear();
        j += 1;
    }
    Ok(shapes)
}

fn count_chunk(k: u32, lo: u64, hi: u64) -> Result<BTreeMap<(usize, usize), u64>> {
    let mut counts = BTreeMap::new();
    let mut prev: Option<(u64, usize)> = None;
    sweep(k, lo, hi, |j, shapes| {
        if let Some((pj, pc)) = prev {
            if pj >= lo && pj <= hi {
                *counts.entry((pc, shapes.len())).or_insert(0) += 1;
            }
        }
        prev = Some((j, shapes.len()));
    })?;
    Ok(counts)
}

/// Cell counts for `n = 1..=N` from one sweep.
pub fn empirical_table(k: u32, n: u64) -> Result<EmpiricalCounts> {
    empirical_table_chunked(k, n, 1)
}

/// As [`empirical_table`], with `[1, N]` split into `chunks` windows that are
/// swept in parallel on the current rayon pool. The merged counts do not
/// depend on the number of chunks.
pub fn empirical_table_chunked(k: u32, n: u64, chunks: usize) -> Result<EmpiricalCounts> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let enumeration_bound = kth_power(n + 2, k)?;
    let chunks = chunks.clamp(1, n as usize) as u64;
    let step = n.div_ceil(chunks);
    let ranges: Vec<(u64, u64)> = (0..chunks)
        .map(|c| (1 + c * step, ((c + 1) * step).min(n)))
        .filter(|(a, b)| a <= b)
        .collect();
    let parts: Vec<BTreeMap<(usize, usize), u64>> = ranges
        .par_iter()
        .map(|&(a, b)| count_chunk(k, a, b))
        .collect::<Result<_>>()?;
    let mut counts = BTreeMap::new();
    for part in parts {
        for (cell, c) in part {
            *counts.entry(cell).or_insert(0) += c;
        }
    }
    Ok(EmpiricalCounts {
        k,
        n,
        counts,
        enumeration_bound,
    })
}

/// `n ≤ N` whose left interval is hit by exactly the shapes in `I` and whose
/// right interval by exactly those in `J`.
pub fn members_b(k: u32, i: &SubsetSpec, j: &SubsetSpec, n: u64) -> Result<Vec<u64>> {
    check_k(k)?;
    for s in [i, j] {
        if s.k() != k {
            return Err(Error::KMismatch { left: k, right: s.k() });
        }
    }
    if !i.is_disjoint(j) {
        return Err(Error::Overlap);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let want_i: Vec<&[u64]> = i.elements().iter().map(|e| e.b()).collect();
    let want_j: Vec<&[u64]> = j.elements().iter().map(|e| e.b()).collect();
    // shape indices are only known once the stream exists; collect per j first
    let mut per_j: Vec<Vec<usize>> = Vec::new();
    let shapes = sweep(k, 1, n, |_, s| per_j.push(s.to_vec()))?;
    let matches = |hits: &[usize], want: &[&[u64]]| {
        hits.len() == want.len() && want.iter().all(|w| hits.iter().any(|&h| shapes[h] == *w))
    };
    Ok((1..=n)
        .filter(|&x| {
            let idx = (x - 1) as usize;
            matches(&per_j[idx], &want_i) && matches(&per_j[idx + 1], &want_j)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaOutcome {
    /// `{n/λ} > 1 - j/λ`
    pub criterion: bool,
    /// `(n^k, (n+j)^k)` contains some `a^k λ^k`
    pub direct: bool,
    /// number of such `a`
    pub witnesses: u32,
    /// fractional bits needed to decide the criterion (0: double precision)
    pub bits: u32,
}

/// Bits at which [`lemma_check`] gives up.
pub const MAX_LEMMA_BITS: u32 = 8192;

/// Evaluates the fractional-part criterion and the interval test for the
/// pair `(n, λ)` and gap `j`.
pub fn lemma_check(n: u64, e: &LambdaElement, j: u32) -> Result<LemmaOutcome> {
    if j == 0 {
        return Err(Error::InvalidArgument("j must be positive".into()));
    }
    let (criterion, bits) = fractional_criterion(n, e, j)?;
    let (direct, witnesses) = interval_witnesses(n, e, j)?;
    Ok(LemmaOutcome {
        criterion,
        direct,
        witnesses,
        bits,
    })
}

fn fractional_criterion(n: u64, e: &LambdaElement, j: u32) -> Result<(bool, u32)> {
    // double precision first, trusted only away from the threshold
    let lam = e.value::<f64>();
    let x = n as f64 / lam;
    let frac = x - x.floor();
    let threshold = 1.0 - j as f64 / lam;
    let margin = 1e-12 * (1.0 + x);
    if (frac - threshold).abs() > margin && frac > margin && frac < 1.0 - margin {
        return Ok((frac > threshold, 0));
    }
    let mut bits = 64;
    while bits <= MAX_LEMMA_BITS {
        if let Some(v) = fractional_criterion_fixed(n, e, j, bits) {
            return Ok((v, bits));
        }
        bits *= 2;
    }
    Err(Error::PrecisionEscalation {
        bits: MAX_LEMMA_BITS as u64,
    })
}

/// Interval evaluation with `bits` fractional bits; `None` when the
/// enclosures do not separate.
fn fractional_criterion_fixed(n: u64, e: &LambdaElement, j: u32, bits: u32) -> Option<bool> {
    let k = e.k();
    let one = BigUint::from(1u32) << bits;
    // R ≤ λ 2^bits < R + 1
    let scaled_power = BigUint::from(e.kth_power()) << (k as usize * bits as usize);
    let r = scaled_power.nth_root(k);
    let r1 = &r + 1u32;
    // n/λ in (n 2^2b / (R+1), n 2^2b / R), as fixed point with `bits` bits
    let num = BigUint::from(n) << (2 * bits as usize);
    let x_lo = &num / &r1;
    let x_hi = (&num + &r - 1u32) / &r;
    let q_lo = &x_lo >> bits as usize;
    let q_hi = (&x_hi - 1u32) >> bits as usize;
    if q_lo != q_hi {
        return None;
    }
    let base = &q_lo << bits as usize;
    let frac_lo = &x_lo - &base;
    let frac_hi = &x_hi - &base;
    // 1 - j/λ in (1 - j 2^2b / R, 1 - j 2^2b / (R+1))
    let jn = BigUint::from(j) << (2 * bits as usize);
    let jl_hi = (&jn + &r - 1u32) / &r;
    let jl_lo = &jn / &r1;
    if jl_hi > one {
        // threshold may be negative: the criterion holds trivially once the
        // lower threshold bound is below the fraction
        if jl_lo >= one {
            return Some(true);
        }
        return None;
    }
    let thr_lo = &one - &jl_hi;
    let thr_hi = &one - &jl_lo;
    if frac_lo > thr_hi {
        Some(true)
    } else if frac_hi < thr_lo {
        Some(false)
    } else {
        None
    }
}

fn interval_witnesses(n: u64, e: &LambdaElement, j: u32) -> Result<(bool, u32)> {
    let k = e.k();
    let lo = BigUint::from(n).pow(k);
    let hi = BigUint::from(n + j as u64).pow(k);
    let base = BigUint::from(e.kth_power());
    let mut a = (&lo / &base).nth_root(k);
    if a == BigUint::from(0u32) {
        a = BigUint::from(1u32);
    }
    while a.pow(k) * &base <= lo {
        a += 1u32;
    }
    let mut count = 0u32;
    while a.pow(k) * &base < hi {
        count += 1;
        a += 1u32;
    }
    Ok((count > 0, count))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDeviation {
    pub l: usize,
    pub m: usize,
    pub frequency: f64,
    pub analytic: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub k: u32,
    pub n: u64,
    pub max_deviation: f64,
    pub cells: Vec<CellDeviation>,
}

/// `|count/N - d(A_{ℓ,m})|` for every cell of the table and every observed
/// cell. The table must cover all observed cells.
pub fn compare_tables<T: Real>(emp: &EmpiricalCounts, ana: &DensityTable<T>) -> Result<ComparisonReport> {
    if emp.k != ana.k {
        return Err(Error::KMismatch {
            left: emp.k,
            right: ana.k,
        });
    }
    if emp.max_index() > ana.max_index {
        return Err(Error::IndexOutOfRange {
            index: emp.max_index(),
            max: ana.max_index,
        });
    }
    let mut cells = Vec::new();
    let mut max_deviation = 0.0f64;
    for l in 0..=ana.max_index {
        for m in 0..=ana.max_index {
            let analytic = ana.entries[l][m].value.to_f64_lossy();
            let frequency = emp.frequency(l, m);
            let deviation = (frequency - analytic).abs();
            max_deviation = max_deviation.max(deviation);
            cells.push(CellDeviation {
                l,
                m,
                frequency,
                analytic,
                deviation,
            });
        }
    }
    Ok(ComparisonReport {
        k: emp.k,
        n: emp.n,
        max_deviation,
        cells,
    })
}
