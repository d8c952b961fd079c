use serde::{Deserialize, Serialize};

use super::primes::{is_prime, pollard_brent, small_primes, TRIAL_DIVISION_LIMIT};
use crate::error::{Error, Result};

/// Largest accepted input of [`factorize`].
pub const MAX_FACTOR_INPUT: u64 = (1u64 << 63) - 1;

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization(pub Vec<(u64, u32)>);

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn value(&self) -> u128 {
        self.0.iter().map(|&(p, e)| (p as u128).pow(e)).product()
    }

    pub fn min_exponent(&self) -> Option<u32> {
        self.0.iter().map(|&(_, e)| e).min()
    }
}

fn check_range(n: u64) -> Result<()> {
    if n == 0 || n > MAX_FACTOR_INPUT {
        return Err(Error::OutOfRange {
            what: "n",
            value: n.to_string(),
            max: MAX_FACTOR_INPUT.to_string(),
        });
    }
    Ok(())
}

/// Trial division by primes up to 10^6, then Miller-Rabin and Pollard-Brent
/// on whatever cofactor remains.
pub fn factorize(n: u64) -> Result<Factorization> {
    check_range(n)?;
    let mut rest = n;
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if rest > 1 {
        // no factor below 10^6 remains, so a cofactor below 10^12 is prime
        if rest <= TRIAL_DIVISION_LIMIT * TRIAL_DIVISION_LIMIT {
            out.push((rest, 1));
        } else {
            split_large(rest, &mut out);
        }
    }
    out.sort_unstable();
    let mut merged: Vec<(u64, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(Factorization(merged))
}

fn split_large(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push((n, 1));
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

pub fn moebius(n: u64) -> Result<i8> {
    let f = factorize(n)?;
    if f.0.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.0.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(moebius(n)? != 0)
}

/// Every prime divisor appears to at least the kth power; 1 qualifies.
pub fn is_kfull(n: u64, k: u32) -> Result<bool> {
    crate::error::check_k(k)?;
    let f = factorize(n)?;
    Ok(f.0.iter().all(|&(_, e)| e >= k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_examples() {
        assert_eq!(factorize(1).unwrap().0, vec![]);
        assert_eq!(factorize(72).unwrap().0, vec![(2, 3), (3, 2)]);
        assert_eq!(factorize(1 << 40).unwrap().0, vec![(2, 40)]);
        let big = 999_999_000_001u64 * 7; // large prime cofactor
        assert_eq!(factorize(big).unwrap().0, vec![(7, 1), (999_999_000_001, 1)]);
        let semi = 1_000_003u64 * 1_000_033 * 4;
        assert_eq!(factorize(semi).unwrap().0, vec![(2, 2), (1_000_003, 1), (1_000_033, 1)]);
        assert_eq!(factorize(MAX_FACTOR_INPUT).unwrap().value(), MAX_FACTOR_INPUT as u128);
    }

    #[test]
    fn factorization_range_is_enforced() {
        assert!(factorize(0).is_err());
        assert!(factorize(1u64 << 63).is_err());
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(moebius(12).unwrap(), 0);
        assert_eq!(moebius(6).unwrap(), 1);
        assert_eq!(moebius(30).unwrap(), -1);
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(1).unwrap());
        assert!(is_squarefree(6).unwrap());
        assert!(!is_squarefree(8).unwrap());
    }

    #[test]
    fn kfull_examples() {
        assert!(is_kfull(8, 2).unwrap());
        assert!(!is_kfull(12, 2).unwrap());
        assert!(is_kfull(16, 3).unwrap());
        assert!(is_kfull(1, 5).unwrap());
        assert!(is_kfull(8, 1).is_err());
    }

    #[test]
    fn factorization_matches_brute_force() {
        for n in 1..5000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n as u128);
            assert!(f.0.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.0.iter().all(|&(p, _)| super::super::primes::is_prime(p)));
        }
    }
}
