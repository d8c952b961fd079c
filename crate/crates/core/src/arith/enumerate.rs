//! Exhaustive enumeration of k-full integers from their representations.
//!
//! Every k-full integer is `a^k · s` for a unique *shape* `s = ∏ b_j^(k+j)`
//! with squarefree `∏ b_j`. For a fixed shape the values form the sequence
//! `a^k · s`, `a = 1, 2, ...`; a binary heap merges these sequences into
//! one ascending stream holding one pending entry per shape.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::primes::squarefree_sieve;
use super::repr::KFullRepr;
use super::{checked_pow, gcd_u64, iroot, iroot_ceil};
use crate::error::{check_k, Error, Result};

/// Largest `b_j` the shape enumerator will sieve for.
pub const MAX_SHAPE_COORDINATE: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub b: Vec<u64>,
    /// `∏ b_j^(k+j)`
    pub base: u128,
}

impl Shape {
    pub fn is_trivial(&self) -> bool {
        self.base == 1
    }
}

/// All shapes with `base <= bound`, sorted by base. The trivial shape
/// (all `b_j = 1`) is included only when `include_trivial`.
pub fn shapes_up_to(k: u32, bound: u128, include_trivial: bool) -> Result<Vec<Shape>> {
    check_k(k)?;
    if bound == 0 {
        return Ok(Vec::new());
    }
    let max_b = iroot(bound, k + 1);
    if max_b > MAX_SHAPE_COORDINATE as u128 {
        return Err(Error::OutOfRange {
            what: "enumeration bound",
            value: bound.to_string(),
            max: format!("{}^{}", MAX_SHAPE_COORDINATE, k + 1),
        });
    }
    let squarefree = squarefree_sieve(max_b as usize);
    let mut out = Vec::new();
    let mut b = vec![1u64; (k - 1) as usize];
    collect_shapes(k, bound, (k - 1) as usize, 1, 1, &squarefree, &mut b, &mut out);
    if !include_trivial {
        out.retain(|s| !s.is_trivial());
    }
    out.sort_by_key(|s| s.base);
    Ok(out)
}

// Fills b_j for j = idx down to 1 (largest exponent first).
#[allow(clippy::too_many_arguments)]
fn collect_shapes(
    k: u32,
    bound: u128,
    idx: usize,
    base: u128,
    product: u64,
    squarefree: &[bool],
    b: &mut Vec<u64>,
    out: &mut Vec<Shape>,
) {
    if idx == 0 {
        out.push(Shape { b: b.clone(), base });
        return;
    }
    let exp = k + idx as u32;
    let limit = iroot(bound / base, exp) as u64;
    for x in 1..=limit {
        if !squarefree[x as usize] || (x > 1 && gcd_u64(x, product) != 1) {
            continue;
        }
        let Some(p) = checked_pow(x as u128, exp) else { break };
        let Some(next) = base.checked_mul(p) else { break };
        if next > bound {
            break;
        }
        b[idx - 1] = x;
        collect_shapes(k, bound, idx - 1, next, product * x, squarefree, b, out);
    }
    b[idx - 1] = 1;
}

/// Ascending stream of the k-full integers in `[lo, hi]`.
pub struct KFullStream {
    k: u32,
    hi: u128,
    shapes: Vec<Shape>,
    heap: BinaryHeap<Reverse<(u128, u32, u64)>>,
}

impl KFullStream {
    fn new(k: u32, lo: u128, hi: u128, proper_only: bool) -> Result<Self> {
        let shapes = shapes_up_to(k, hi, !proper_only)?;
        let lo = lo.max(1);
        let mut heap = BinaryHeap::with_capacity(shapes.len());
        for (i, s) in shapes.iter().enumerate() {
            let q = lo.div_ceil(s.base);
            let a = iroot_ceil(q, k);
            if let Some(v) = checked_pow(a, k).and_then(|ak| ak.checked_mul(s.base)) {
                if v <= hi {
                    heap.push(Reverse((v, i as u32, a as u64)));
                }
            }
        }
        Ok(Self { k, hi, shapes, heap })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn shape(&self, index: usize) -> &Shape {
        &self.shapes[index]
    }

    /// Next `(value, shape index, a)` without building a representation.
    pub fn next_raw(&mut self) -> Option<(u128, usize, u64)> {
        let Reverse((v, i, a)) = self.heap.pop()?;
        let next_a = a as u128 + 1;
        let base = self.shapes[i as usize].base;
        if let Some(nv) = checked_pow(next_a, self.k).and_then(|x| x.checked_mul(base)) {
            if nv <= self.hi {
                self.heap.push(Reverse((nv, i, next_a as u64)));
            }
        }
        Some((v, i as usize, a))
    }
}

impl Iterator for KFullStream {
    type Item = (u128, KFullRepr);

    fn next(&mut self) -> Option<Self::Item> {
        let (v, i, a) = self.next_raw()?;
        let repr = KFullRepr {
            k: self.k,
            a,
            b: self.shapes[i].b.clone(),
        };
        Some((v, repr))
    }
}

/// k-full integers `<= x` in ascending order with their representations;
/// `proper_only` drops the perfect kth powers.
pub fn enumerate_kfull(k: u32, x: u128, proper_only: bool) -> Result<KFullStream> {
    KFullStream::new(k, 1, x, proper_only)
}

/// k-full integers in `[lo, hi]`.
pub fn enumerate_kfull_range(k: u32, lo: u128, hi: u128, proper_only: bool) -> Result<KFullStream> {
    KFullStream::new(k, lo, hi, proper_only)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor::is_kfull;
    use crate::arith::repr::canonical_repr;

    fn values(k: u32, x: u128, proper: bool) -> Vec<u128> {
        enumerate_kfull(k, x, proper).unwrap().map(|(v, _)| v).collect()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(values(2, 100, true), vec![8, 27, 32, 72]);
        assert!(values(2, 7, true).is_empty());
        assert_eq!(
            values(2, 100, false),
            vec![1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]
        );
    }

    #[test]
    fn enumeration_matches_membership_oracle() {
        for k in 2..=4u32 {
            let enumerated = values(k, 100_000, false);
            let proper = values(k, 100_000, true);
            let mut expected = Vec::new();
            let mut expected_proper = Vec::new();
            for n in 1..=100_000u64 {
                if is_kfull(n, k).unwrap() {
                    expected.push(n as u128);
                    if iroot(n as u128, k).pow(k) != n as u128 {
                        expected_proper.push(n as u128);
                    }
                }
            }
            assert_eq!(enumerated, expected, "k={k}");
            assert_eq!(proper, expected_proper, "k={k}");
        }
    }

    #[test]
    fn emitted_representations_round_trip() {
        for k in 2..=4u32 {
            let mut last = 0u128;
            for (v, r) in enumerate_kfull(k, 300_000, false).unwrap() {
                assert!(v > last, "strictly increasing, no duplicates");
                last = v;
                assert_eq!(r.value().unwrap(), v);
                assert_eq!(canonical_repr(v as u64, k).unwrap(), r);
            }
        }
    }

    #[test]
    fn range_enumeration_is_a_window_of_the_full_stream() {
        let all = values(3, 1_000_000, true);
        let window: Vec<u128> = enumerate_kfull_range(3, 5000, 400_000, true)
            .unwrap()
            .map(|(v, _)| v)
            .collect();
        let expected: Vec<u128> = all.into_iter().filter(|&v| (5000..=400_000).contains(&v)).collect();
        assert_eq!(window, expected);
    }

    #[test]
    fn large_bounds_do_not_overflow() {
        // endpoints beyond 2^64: (10^7)^3 = 10^21
        let lo = 10u128.pow(21);
        let hi = lo + 10u128.pow(14);
        let vals: Vec<u128> = enumerate_kfull_range(3, lo, hi, true)
            .unwrap()
            .map(|(v, _)| v)
            .collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        assert!(vals.iter().all(|&v| v >= lo && v <= hi));
    }

    #[test]
    fn shape_bound_is_enforced() {
        assert!(shapes_up_to(2, u128::MAX, false).is_err());
    }
}
