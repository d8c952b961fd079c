use serde::{Deserialize, Serialize};

use super::factor::factorize;
use super::{checked_pow, gcd_u64};
use crate::error::{check_k, Error, Result};

/// Canonical decomposition `n = a^k · b_1^(k+1) ··· b_(k-1)^(2k-1)` of a
/// k-full integer with `b_1 ··· b_(k-1)` squarefree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KFullRepr {
    pub k: u32,
    pub a: u64,
    pub b: Vec<u64>,
}

impl KFullRepr {
    pub fn new(k: u32, a: u64, b: Vec<u64>) -> Result<Self> {
        check_k(k)?;
        if b.len() != (k - 1) as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {} b-coordinates, got {}",
                k - 1,
                b.len()
            )));
        }
        if a == 0 || b.contains(&0) {
            return Err(Error::InvalidArgument("coordinates must be positive".into()));
        }
        if !squarefree_coprime(&b) {
            return Err(Error::InvalidArgument(format!(
                "b = {b:?} does not have a squarefree product"
            )));
        }
        Ok(Self { k, a, b })
    }

    /// `∏ b_j^(k+j)`, the part of the value that is not a kth power.
    pub fn shape_base(&self) -> Result<u128> {
        shape_base(self.k, &self.b)
    }

    pub fn value(&self) -> Result<u128> {
        let ak = checked_pow(self.a as u128, self.k).ok_or(Error::Overflow("a^k"))?;
        ak.checked_mul(self.shape_base()?)
            .ok_or(Error::Overflow("k-full value"))
    }

    /// True when all `b_j = 1`, i.e. the value is a perfect kth power.
    pub fn is_perfect_power(&self) -> bool {
        self.b.iter().all(|&x| x == 1)
    }
}

pub(crate) fn shape_base(k: u32, b: &[u64]) -> Result<u128> {
    let mut acc: u128 = 1;
    for (j, &bj) in b.iter().enumerate() {
        let p = checked_pow(bj as u128, k + j as u32 + 1).ok_or(Error::Overflow("b_j^(k+j)"))?;
        acc = acc.checked_mul(p).ok_or(Error::Overflow("shape base"))?;
    }
    Ok(acc)
}

/// Each `b_j` squarefree and the `b_j` pairwise coprime, i.e. the product
/// is squarefree.
pub(crate) fn squarefree_coprime(b: &[u64]) -> bool {
    for (i, &x) in b.iter().enumerate() {
        if x > 1 && !super::factor::is_squarefree(x).unwrap_or(false) {
            return false;
        }
        for &y in &b[i + 1..] {
            if gcd_u64(x, y) != 1 {
                return false;
            }
        }
    }
    true
}

/// Splits each prime power `p^e` (`e >= k`) by `r = e mod k`: for `r = 0`
/// the whole power goes into `a`; otherwise `p` joins `b_r` with exponent
/// `k + r` and the remaining `p^(e-k-r)` goes into `a`.
pub fn canonical_repr(n: u64, k: u32) -> Result<KFullRepr> {
    check_k(k)?;
    let f = factorize(n)?;
    if f.factors().iter().any(|&(_, e)| e < k) {
        return Err(Error::NotKFull { n: n as u128, k });
    }
    let mut a: u64 = 1;
    let mut b = vec![1u64; (k - 1) as usize];
    for &(p, e) in f.factors() {
        let r = e % k;
        let a_exp = if r == 0 {
            e / k
        } else {
            b[(r - 1) as usize] *= p;
            (e - k - r) / k
        };
        a *= p.pow(a_exp);
    }
    Ok(KFullRepr { k, a, b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_repr(72, 2).unwrap(), KFullRepr { k: 2, a: 3, b: vec![2] });
        assert_eq!(canonical_repr(64, 2).unwrap(), KFullRepr { k: 2, a: 8, b: vec![1] });
        assert_eq!(
            canonical_repr(16, 3).unwrap(),
            KFullRepr {
                k: 3,
                a: 1,
                b: vec![2, 1]
            }
        );
        assert_eq!(
            canonical_repr(1, 4).unwrap(),
            KFullRepr {
                k: 4,
                a: 1,
                b: vec![1, 1, 1]
            }
        );
        assert!(matches!(canonical_repr(12, 2), Err(Error::NotKFull { .. })));
    }

    #[test]
    fn repr_round_trips_for_all_small_kfull() {
        for k in 2..=5 {
            for n in 1..20_000u64 {
                if super::super::factor::is_kfull(n, k).unwrap() {
                    let r = canonical_repr(n, k).unwrap();
                    assert_eq!(r.value().unwrap(), n as u128);
                    assert!(squarefree_coprime(&r.b));
                }
            }
        }
    }

    #[test]
    fn constructor_validates() {
        assert!(KFullRepr::new(2, 1, vec![4]).is_err());
        assert!(KFullRepr::new(3, 1, vec![2, 6]).is_err());
        assert!(KFullRepr::new(3, 1, vec![2]).is_err());
        assert_eq!(KFullRepr::new(3, 2, vec![3, 2]).unwrap().value().unwrap(), 8 * 81 * 32);
    }
}
