//! Binary sequences over {-1, +1}, families of them, and correlation patterns.
//!
//! Positions are 1-based at the API surface (`e_1 .. e_N`) and 0-based in
//! storage. A set bit encodes `-1`, a clear bit encodes `+1`, so the
//! elementwise product of two sequences is the XOR of their words and the sum
//! over a window of length `L` is `L - 2 * popcount`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Mask selecting the valid bits of the last word of a `len`-bit vector.
#[inline]
pub(crate) fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A length-`N` sequence over {-1, +1}, bit-packed.
///
/// Bits past position `N` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinarySequence {
    len: usize,
    words: Vec<u64>,
}

impl BinarySequence {
    /// Builds a sequence from `±1` values.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::domain("length >= 1", "empty sequence"));
        }
        let mut words = vec![0u64; words_for(signs.len())];
        for (i, &e) in signs.iter().enumerate() {
            match e {
                1 => {}
                -1 => words[i / WORD_BITS] |= 1 << (i % WORD_BITS),
                other => {
                    return Err(Error::domain(
                        "entries in {-1,+1}",
                        format!("entry {} is {other}", i + 1),
                    ))
                }
            }
        }
        Ok(Self {
            len: signs.len(),
            words,
        })
    }

    /// Builds a sequence from packed words; bit `j` holds position `j + 1`.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Result<Self> {
        if len == 0 {
            return Err(Error::domain("length >= 1", "empty sequence"));
        }
        if words.len() != words_for(len) {
            return Err(Error::domain(
                "word count = ceil(N/64)",
                format!("N={len}, got {} words", words.len()),
            ));
        }
        *words.last_mut().expect("non-empty") &= tail_mask(len);
        Ok(Self { len, words })
    }

    /// Builds a sequence from a function of the 1-based position returning
    /// `true` for `-1`.
    pub fn from_fn(len: usize, mut is_negative: impl FnMut(usize) -> bool) -> Result<Self> {
        if len == 0 {
            return Err(Error::domain("length >= 1", "empty sequence"));
        }
        let mut words = vec![0u64; words_for(len)];
        for i in 0..len {
            if is_negative(i + 1) {
                words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        Ok(Self { len, words })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The raw bit at 0-based index `i` (`true` means `-1`).
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// `e_n` for 1-based `n`.
    #[inline]
    pub fn get(&self, n: usize) -> i8 {
        assert!(
            n >= 1 && n <= self.len,
            "position {n} outside 1..={}",
            self.len
        );
        if self.bit(n - 1) {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (1..=self.len).map(|n| self.get(n)).collect()
    }

    pub fn negated(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        *words.last_mut().expect("non-empty") &= tail_mask(self.len);
        Self {
            len: self.len,
            words,
        }
    }

    pub fn reversed(&self) -> Self {
        Self::from_fn(self.len, |n| self.bit(self.len - n)).expect("non-empty")
    }

    /// The first `len` positions.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len {
            return Err(Error::domain(
                "1 <= prefix length <= N",
                format!("prefix {len}, N={}", self.len),
            ));
        }
        let mut words = self.words[..words_for(len)].to_vec();
        *words.last_mut().expect("non-empty") &= tail_mask(len);
        Ok(Self { len, words })
    }

    /// Elementwise product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::domain(
                "equal lengths",
                format!("{} vs {}", self.len, other.len),
            ));
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    /// Number of leading positions on which the two sequences agree.
    pub fn common_prefix(&self, other: &Self) -> usize {
        let len = self.len.min(other.len);
        for (w, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let diff = a ^ b;
            if diff != 0 {
                return (w * WORD_BITS + diff.trailing_zeros() as usize).min(len);
            }
        }
        len
    }
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinarySequence({self})")
    }
}

/// Lexicographic order on `(e_1, e_2, ...)` with `+1 < -1`; shorter
/// sequences sort first on a common prefix.
impl Ord for BinarySequence {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let low = diff & diff.wrapping_neg();
                return if a & low == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BinarySequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An ordered list of `S >= 1` sequences of a common length `N`.
///
/// Rows need not be distinct; see [`Family::is_injective`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    seq_len: usize,
    rows: Vec<BinarySequence>,
}

impl Family {
    pub fn new(rows: Vec<BinarySequence>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::domain("S >= 1", "family has no rows"))?;
        let seq_len = first.len();
        if let Some((s, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != seq_len) {
            return Err(Error::domain(
                "all rows share one length",
                format!(
                    "row {} has length {}, row 1 has {seq_len}",
                    s + 1,
                    row.len()
                ),
            ));
        }
        Ok(Self { seq_len, rows })
    }

    pub fn from_signs(rows: &[Vec<i8>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| BinarySequence::from_signs(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn singleton(seq: BinarySequence) -> Self {
        Self {
            seq_len: seq.len(),
            rows: vec![seq],
        }
    }

    /// Sequence length `N`.
    #[inline]
    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    /// Number of sequences `S`.
    #[inline]
    pub fn count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn rows(&self) -> &[BinarySequence] {
        &self.rows
    }

    /// Row `s` for 1-based `s`.
    #[inline]
    pub fn row(&self, s: usize) -> &BinarySequence {
        &self.rows[s - 1]
    }

    /// `e_n(s)`, both 1-based.
    #[inline]
    pub fn entry(&self, n: usize, s: usize) -> i8 {
        self.rows[s - 1].get(n)
    }

    pub fn into_rows(self) -> Vec<BinarySequence> {
        self.rows
    }

    /// True when all rows are pairwise distinct.
    pub fn is_injective(&self) -> bool {
        let mut sorted: Vec<&BinarySequence> = self.rows.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// The family with row `s` (1-based) negated.
    pub fn with_row_negated(&self, s: usize) -> Self {
        let mut rows = self.rows.clone();
        rows[s - 1] = rows[s - 1].negated();
        Self {
            seq_len: self.seq_len,
            rows,
        }
    }

    /// Rows reordered so that new row `i` is old row `order[i]` (0-based).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.count()];
        for &i in order {
            if i >= self.count() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::domain(
                    "order is a permutation of rows",
                    format!("{order:?}"),
                ));
            }
        }
        if order.len() != self.count() {
            return Err(Error::domain(
                "order is a permutation of rows",
                format!("{order:?}"),
            ));
        }
        Ok(Self {
            seq_len: self.seq_len,
            rows: order.iter().map(|&i| self.rows[i].clone()).collect(),
        })
    }

    /// All rows reversed simultaneously.
    pub fn reversed(&self) -> Self {
        Self {
            seq_len: self.seq_len,
            rows: self.rows.iter().map(BinarySequence::reversed).collect(),
        }
    }

    /// The family restricted to its first `len` columns.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.truncated(len))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { seq_len: len, rows })
    }

    /// The first `count` rows.
    pub fn first_rows(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.count() {
            return Err(Error::domain(
                "1 <= row count <= S",
                format!("{count} of {}", self.count()),
            ));
        }
        Ok(Self {
            seq_len: self.seq_len,
            rows: self.rows[..count].to_vec(),
        })
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.to_string()))
            .finish()
    }
}

/// One `(sequence index, shift)` factor of a correlation term. The sequence
/// index is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub seq: usize,
    pub shift: usize,
}

impl Pair {
    pub const fn new(seq: usize, shift: usize) -> Self {
        Self { seq, shift }
    }
}

/// A canonical set of `k` distinct `(s, d)` pairs, sorted lexicographically,
/// whose smallest shift is 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Pair>", into = "Vec<Pair>")]
pub struct Pattern {
    pairs: Vec<Pair>,
}

impl Pattern {
    /// Validates an already canonical pair list.
    pub fn new(pairs: Vec<Pair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::domain("order k >= 1", "empty pattern"));
        }
        if let Some(p) = pairs.iter().find(|p| p.seq == 0) {
            return Err(Error::domain(
                "sequence index >= 1",
                format!("pair ({}, {})", p.seq, p.shift),
            ));
        }
        if !pairs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain(
                "pairs strictly increasing in (s, d)",
                format!("{pairs:?}"),
            ));
        }
        if pairs.iter().map(|p| p.shift).min() != Some(0) {
            return Err(Error::domain("minimum shift = 0", format!("{pairs:?}")));
        }
        Ok(Self { pairs })
    }

    /// Sorts the pairs and translates shifts so the smallest is 0. Fails on
    /// duplicate pairs.
    pub fn canonicalize(mut pairs: Vec<Pair>) -> Result<Self> {
        pairs.sort_unstable();
        let min = pairs.iter().map(|p| p.shift).min().unwrap_or(0);
        for p in &mut pairs {
            p.shift -= min;
        }
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(
                "d_i != d_j when s_i = s_j",
                format!("duplicate pair in {pairs:?}"),
            ));
        }
        Self::new(pairs)
    }

    /// Shifts only, all on sequence 1 (the single-sequence case).
    pub fn from_shifts(shifts: &[usize]) -> Result<Self> {
        Self::canonicalize(shifts.iter().map(|&d| Pair::new(1, d)).collect())
    }

    #[inline]
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    #[inline]
    pub fn max_shift(&self) -> usize {
        self.pairs.iter().map(|p| p.shift).max().unwrap_or(0)
    }

    /// Checks the pattern fits a family with `count` rows of length `seq_len`.
    pub fn check_fits(&self, seq_len: usize, count: usize) -> Result<()> {
        if let Some(p) = self.pairs.iter().find(|p| p.seq > count) {
            return Err(Error::domain(
                "sequence index <= S",
                format!("pair ({}, {}) with S={count}", p.seq, p.shift),
            ));
        }
        if self.max_shift() >= seq_len {
            return Err(Error::domain(
                "d_max <= N-1",
                format!("d_max={} with N={seq_len}", self.max_shift()),
            ));
        }
        Ok(())
    }
}

impl TryFrom<Vec<Pair>> for Pattern {
    type Error = Error;
    fn try_from(pairs: Vec<Pair>) -> Result<Self> {
        Self::new(pairs)
    }
}

impl From<Pattern> for Vec<Pair> {
    fn from(p: Pattern) -> Self {
        p.pairs
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", p.seq, p.shift)?;
        }
        f.write_str("}")
    }
}

/// The value of a measure together with the term and window attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: u64,
    pub pattern: Pattern,
    /// 1-based inclusive window `(m1, m2)` with `m2 <= N - d_max`.
    pub window: (usize, usize),
}

impl MeasureResult {
    /// Ordering used to pick a unique witness: larger value first, then the
    /// lexicographically smallest `(pattern, m1, m2)`.
    pub fn precedes(&self, other: &Self) -> bool {
        match self.value.cmp(&other.value) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (&self.pattern, self.window) < (&other.pattern, other.window),
        }
    }

    /// The preferred of two results; associative and commutative.
    pub fn merge(a: Self, b: Self) -> Self {
        if b.precedes(&a) {
            b
        } else {
            a
        }
    }

    pub fn merge_opt(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(a), Some(b)) => Some(Self::merge(a, b)),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_round_trip_and_padding() {
        let signs: Vec<i8> = (0..70).map(|i| if i % 3 == 0 { -1 } else { 1 }).collect();
        let e = BinarySequence::from_signs(&signs).unwrap();
        assert_eq!(e.signs(), signs);
        assert_eq!(e.words().len(), 2);
        assert_eq!(e.negated().words()[1] >> 6, 0);
        assert_eq!(e.negated().negated(), e);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(BinarySequence::from_signs(&[1, 0, -1]).is_err());
        assert!(BinarySequence::from_signs(&[]).is_err());
        assert!(BinarySequence::from_words(3, vec![]).is_err());
    }

    #[test]
    fn from_words_clears_padding() {
        let e = BinarySequence::from_words(3, vec![u64::MAX]).unwrap();
        assert_eq!(e.words(), &[0b111]);
    }

    #[test]
    fn order_is_lexicographic_on_positions() {
        let a = BinarySequence::from_signs(&[1, -1, -1]).unwrap();
        let b = BinarySequence::from_signs(&[-1, 1, 1]).unwrap();
        assert!(a < b);
        let c = BinarySequence::from_signs(&[1, 1, -1]).unwrap();
        assert!(c < a);
    }

    #[test]
    fn common_prefix_counts_agreement() {
        let a = BinarySequence::from_signs(&[1, -1, 1, 1]).unwrap();
        let b = BinarySequence::from_signs(&[1, -1, -1, 1]).unwrap();
        assert_eq!(a.common_prefix(&b), 2);
        assert_eq!(a.common_prefix(&a), 4);
    }

    #[test]
    fn family_rejects_ragged_rows() {
        let err = Family::from_signs(&[vec![1, 1], vec![1]]).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
        assert!(Family::new(vec![]).is_err());
    }

    #[test]
    fn injectivity_is_a_predicate() {
        let g = Family::from_signs(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(!g.is_injective());
        let g = Family::from_signs(&[vec![1, 1], vec![1, -1]]).unwrap();
        assert!(g.is_injective());
    }

    #[test]
    fn pattern_validation() {
        assert!(Pattern::new(vec![Pair::new(1, 0), Pair::new(1, 1)]).is_ok());
        assert!(Pattern::new(vec![Pair::new(1, 1), Pair::new(1, 2)]).is_err());
        assert!(Pattern::new(vec![Pair::new(1, 1), Pair::new(1, 0)]).is_err());
        assert!(Pattern::new(vec![Pair::new(0, 0)]).is_err());
        let p = Pattern::canonicalize(vec![Pair::new(2, 5), Pair::new(1, 3)]).unwrap();
        assert_eq!(p.pairs(), &[Pair::new(1, 0), Pair::new(2, 2)]);
        assert!(Pattern::canonicalize(vec![Pair::new(1, 2), Pair::new(1, 2)]).is_err());
    }

    #[test]
    fn merge_prefers_value_then_lexicographic_witness() {
        let p = Pattern::from_shifts(&[0, 1]).unwrap();
        let q = Pattern::from_shifts(&[0, 2]).unwrap();
        let a = MeasureResult {
            value: 3,
            pattern: q.clone(),
            window: (1, 2),
        };
        let b = MeasureResult {
            value: 3,
            pattern: p.clone(),
            window: (2, 3),
        };
        let c = MeasureResult {
            value: 4,
            pattern: q,
            window: (1, 1),
        };
        assert_eq!(MeasureResult::merge(a.clone(), b.clone()), b);
        assert_eq!(MeasureResult::merge(b.clone(), a.clone()), b);
        assert_eq!(MeasureResult::merge(b, c.clone()), c);
    }
}
