//! Exact integer arithmetic: factorization, squarefree and Möbius
//! predicates, k-full testing, canonical representations and enumeration.

pub mod enumerate;
pub mod factor;
pub mod primes;
pub mod repr;

pub use enumerate::{enumerate_kfull, enumerate_kfull_range, shapes_up_to, KFullStream, Shape};
pub use factor::{factorize, is_kfull, is_squarefree, moebius, Factorization, MAX_FACTOR_INPUT};
pub use repr::{canonical_repr, KFullRepr};

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

/// `floor(x^(1/k))`.
pub fn iroot(x: u128, k: u32) -> u128 {
    if x < 2 || k == 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64) as u128;
    // fix up the floating estimate in both directions
    while r > 0 && checked_pow(r, k).is_none_or(|p| p > x) {
        r -= 1;
    }
    while checked_pow(r + 1, k).is_some_and(|p| p <= x) {
        r += 1;
    }
    r
}

/// `ceil(x^(1/k))`.
pub fn iroot_ceil(x: u128, k: u32) -> u128 {
    let r = iroot(x, k);
    if checked_pow(r, k) == Some(x) {
        r
    } else {
        r + 1
    }
}

/// Whether `x` is a perfect kth power.
pub fn is_perfect_power(x: u128, k: u32) -> bool {
    checked_pow(iroot(x, k), k) == Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn iroot_edges() {
        assert_eq!(iroot(0, 3), 0);
        assert_eq!(iroot(1, 3), 1);
        assert_eq!(iroot(7, 3), 1);
        assert_eq!(iroot(8, 3), 2);
        assert_eq!(iroot(u128::MAX, 2), u64::MAX as u128);
        assert_eq!(iroot_ceil(9, 2), 3);
        assert_eq!(iroot_ceil(10, 2), 4);
        assert!(is_perfect_power(10u128.pow(18), 3));
    }

    proptest! {
        #[test]
        fn iroot_brackets(x in any::<u128>(), k in 2u32..8) {
            let r = iroot(x, k);
            prop_assert!(checked_pow(r, k).is_some_and(|p| p <= x));
            prop_assert!(checked_pow(r + 1, k).is_none_or(|p| p > x));
        }
    }
}
