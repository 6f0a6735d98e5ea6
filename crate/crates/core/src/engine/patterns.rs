use crate::sequence::{Pair, Pattern};

/// Iterator over the canonical patterns of order `k` for `S` sequences of
/// length `N`, in lexicographic `(s, d)` order.
///
/// Internally a `k`-combination cursor over grid cells `c = (s-1) N + d`;
/// combinations without a zero shift are skipped.
#[derive(Debug, Clone)]
pub struct PatternStream {
    seq_len: usize,
    count: usize,
    order: usize,
    cells: Vec<usize>,
    started: bool,
    done: bool,
}

/// Patterns of order `k` over `count` sequences of length `seq_len`.
pub fn enumerate_patterns(seq_len: usize, count: usize, order: usize) -> PatternStream {
    let total = seq_len * count;
    PatternStream {
        seq_len,
        count,
        order,
        cells: (0..order).collect(),
        started: false,
        done: order == 0 || order > total,
    }
}

impl PatternStream {
    pub fn params(&self) -> (usize, usize, usize) {
        (self.seq_len, self.count, self.order)
    }

    fn advance(&mut self) -> bool {
        let total = self.seq_len * self.count;
        let k = self.order;
        let Some(i) = (0..k).rev().find(|&i| self.cells[i] < total - k + i) else {
            return false;
        };
        self.cells[i] += 1;
        for j in i + 1..k {
            self.cells[j] = self.cells[j - 1] + 1;
        }
        true
    }

    fn has_zero_shift(&self) -> bool {
        self.cells.iter().any(|c| c % self.seq_len == 0)
    }
}

impl Iterator for PatternStream {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        if self.done {
            return None;
        }
        if self.started {
            loop {
                if !self.advance() {
                    self.done = true;
                    return None;
                }
                if self.has_zero_shift() {
                    break;
                }
            }
        }
        // The first combination starts at cell 0, which has shift 0.
        self.started = true;
        let n = self.seq_len;
        let pairs = self
            .cells
            .iter()
            .map(|c| Pair::new(c / n + 1, c % n))
            .collect();
        Some(Pattern::new(pairs).expect("cursor yields canonical patterns"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn single_pattern_for_two_positions() {
        let all: Vec<_> = enumerate_patterns(2, 1, 2).collect();
        assert_eq!(all, vec![Pattern::from_shifts(&[0, 1]).unwrap()]);
    }

    #[test]
    fn nine_patterns_first_and_last() {
        let all: Vec<_> = enumerate_patterns(3, 2, 2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].pairs(), &[Pair::new(1, 0), Pair::new(1, 1)]);
        assert_eq!(all[8].pairs(), &[Pair::new(2, 0), Pair::new(2, 2)]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let unique: BTreeSet<_> = all.into_iter().collect();
        assert_eq!(unique.len(), 9);
    }

    #[test]
    fn infeasible_orders_are_empty() {
        assert_eq!(enumerate_patterns(3, 2, 7).count(), 0);
        assert_eq!(enumerate_patterns(3, 2, 0).count(), 0);
        assert_eq!(enumerate_patterns(3, 2, 6).count(), 1);
    }
}
