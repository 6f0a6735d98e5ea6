//! Explicit sequences and families with small measures.

use crate::error::{Error, Result};
use crate::sequence::{BinarySequence, Family};

/// `(1, -1, 1, -1, ...)` of length `N`.
pub fn alternating_sequence(seq_len: usize) -> Result<BinarySequence> {
    BinarySequence::from_fn(seq_len, |n| n % 2 == 0)
}

/// `ceil(log2 S)` for `S >= 1`.
pub(crate) fn ceil_log2(s: usize) -> usize {
    s.next_power_of_two().trailing_zeros() as usize
}

/// The binary-digit family: with `K = ceil(log2 S)` and `i - 1 =
/// sum_n i_n 2^(n-1)`, row `i` has `e_n(i) = (-1)^(i_n)` for `n < K` and
/// `(-1)^(i_K + n)` from `n = K` on. Its odd-order measures are at most `K`.
pub fn digit_construction(seq_len: usize, count: usize) -> Result<Family> {
    if count < 2 {
        return Err(Error::domain("S >= 2", format!("S={count}")));
    }
    let header = ceil_log2(count);
    if seq_len < header {
        return Err(Error::domain(
            "N >= ceil(log2 S)",
            format!("N={seq_len}, ceil(log2 S)={header}"),
        ));
    }
    let rows = (0..count)
        .map(|i| {
            let digit = |n: usize| (i >> (n - 1)) & 1 == 1;
            BinarySequence::from_fn(seq_len, |n| {
                if n < header {
                    digit(n)
                } else {
                    digit(header) ^ (n % 2 == 1)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Family::new(rows)
}
