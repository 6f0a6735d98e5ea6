//! Exact pattern counts.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `binom(n, k)` as an exact big integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of canonical patterns of order `k` for a family of `s` sequences
/// of length `n`: `binom(SN, k) - binom(S(N-1), k)`, i.e. all `k`-subsets of
/// the `S x N` grid of pairs minus those avoiding shift 0.
pub fn pattern_count(n: u64, s: u64, k: u64) -> BigUint {
    if k == 0 {
        return BigUint::zero();
    }
    binomial(s * n, k) - binomial(s * (n - 1), k)
}

/// The same count summed over the number `l` of zero-shift pairs:
/// `sum_{l=1..min(S,k)} binom(S, l) binom(S(N-1), k-l)`.
pub fn pattern_count_by_zero_shifts(n: u64, s: u64, k: u64) -> BigUint {
    (1..=s.min(k))
        .map(|l| binomial(s, l) * binomial(s * (n - 1), k - l))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(6, 2), BigUint::from(15u32));
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(1000, 500).bits(), 995);
    }

    #[test]
    fn count_examples() {
        assert_eq!(pattern_count(3, 2, 2), BigUint::from(9u32));
        assert_eq!(pattern_count(4, 1, 2), BigUint::from(3u32));
        assert_eq!(pattern_count(3, 2, 7), BigUint::zero());
        assert_eq!(pattern_count(3, 2, 6), BigUint::one());
    }

    #[test]
    fn single_sequence_count_is_binom_n_minus_one() {
        for n in 1..30u64 {
            for k in 1..=n {
                assert_eq!(pattern_count(n, 1, k), binomial(n - 1, k - 1));
            }
        }
    }

    #[test]
    fn zero_shift_decomposition_matches_difference() {
        for n in 1..=20u64 {
            for s in 1..=20u64 {
                for k in 1..=20u64 {
                    assert_eq!(
                        pattern_count_by_zero_shifts(n, s, k),
                        pattern_count(n, s, k),
                        "N={n} S={s} k={k}"
                    );
                }
            }
        }
    }
}
