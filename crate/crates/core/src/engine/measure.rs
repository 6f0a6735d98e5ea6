//! Fast exact evaluation of `C_k` and `Phi_k`.
//!
//! The product sequence of a pattern is an XOR of `k` shifted rows. Patterns
//! are visited depth first in lexicographic order with one XOR accumulator
//! per depth, and the value of each leaf is the range of its product walk.
//! Rows are shifted on the fly rather than tabulated, which keeps the whole
//! working set in the first-level cache.
//!
//! A leaf is skipped when it provably cannot beat the current threshold:
//! either its window range `L` is too short, or a popcount bound over 64-bit
//! blocks already falls below it.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::engine::walk::{
    best_range_bound, shift_into, shifted_word, xor_extremes, xor_range, RangeBound,
};
use crate::error::{Error, Result};
use crate::sequence::{words_for, BinarySequence, Family, MeasureResult, Pair, Pattern, WORD_BITS};

/// Below this window range the block bound costs more than it saves.
const BLOCK_BOUND_MIN_LEN: usize = 2 * WORD_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Worker threads; `None` uses the ambient rayon pool.
    pub workers: Option<usize>,
    /// Skip leaves that cannot improve the result. Disabling it evaluates
    /// every pattern exactly.
    pub prune: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            workers: None,
            prune: true,
        }
    }
}

/// Work counters of one engine run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineStats {
    /// Leaves reached by the search (every pattern when pruning is off).
    pub leaves: u64,
    /// Leaves whose exact range was computed.
    pub exact: u64,
}

impl EngineStats {
    fn add(self, other: Self) -> Self {
        Self {
            leaves: self.leaves + other.leaves,
            exact: self.exact + other.exact,
        }
    }
}

/// `Phi_k(G)` with its lexicographically smallest witness.
pub fn cross_correlation_measure(family: &Family, order: usize) -> Result<MeasureResult> {
    cross_correlation_measure_with(family, order, &EngineOptions::default()).map(|(r, _)| r)
}

/// `C_k(E)`, computed as `Phi_k` of the one-row family `{E}`.
pub fn correlation_measure(seq: &BinarySequence, order: usize) -> Result<MeasureResult> {
    cross_correlation_measure(&Family::singleton(seq.clone()), order)
}

pub fn cross_correlation_measure_with(
    family: &Family,
    order: usize,
    options: &EngineOptions,
) -> Result<(MeasureResult, EngineStats)> {
    let (n, s) = (family.seq_len(), family.count());
    if order == 0 || order > n * s {
        return Err(Error::NoAdmissiblePattern { order, n, s });
    }
    let rows = Rows::new(family);
    let search = Search {
        table: &rows,
        order,
        prune: options.prune,
        bound: best_range_bound(),
        shared: AtomicU64::new(0),
    };
    let run = || search.run();
    let (best, stats) = match options.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::domain("worker pool", e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok((best.expect("order <= S*N admits a pattern"), stats))
}

/// Value and witness window of a single pattern.
pub fn evaluate_pattern(family: &Family, pattern: &Pattern) -> Result<MeasureResult> {
    let n = family.seq_len();
    pattern.check_fits(n, family.count())?;
    let len = n - pattern.max_shift();
    let w = words_for(n);
    let mut acc = vec![0u64; w];
    let mut row = vec![0u64; w];
    for p in pattern.pairs() {
        shift_into(family.row(p.seq).words(), p.shift, &mut row);
        for (a, r) in acc.iter_mut().zip(&row) {
            *a ^= r;
        }
    }
    let zeros = vec![0u64; w];
    let win = xor_extremes(&acc, &zeros, len).window();
    Ok(MeasureResult {
        value: win.value,
        pattern: pattern.clone(),
        window: (win.m1, win.m2),
    })
}

/// The family's rows, each followed by one zero word so that shifted reads
/// never run past a row.
struct Rows {
    seq_len: usize,
    count: usize,
    words: usize,
    data: Vec<u64>,
}

impl Rows {
    fn new(family: &Family) -> Self {
        let words = words_for(family.seq_len());
        let mut data = Vec::with_capacity(family.count() * (words + 1));
        for seq in family.rows() {
            data.extend_from_slice(seq.words());
            data.push(0);
        }
        Self {
            seq_len: family.seq_len(),
            count: family.count(),
            words,
            data,
        }
    }

    /// Row `s` (0-based) including its padding word.
    #[inline(always)]
    fn row(&self, s: usize) -> &[u64] {
        let stride = self.words + 1;
        &self.data[s * stride..(s + 1) * stride]
    }
}

struct Search<'a> {
    table: &'a Rows,
    order: usize,
    prune: bool,
    bound: RangeBound,
    /// Best value found by any task so far.
    shared: AtomicU64,
}

/// Per-task state: the chosen cells as 0-based `(s, d)` and one accumulator
/// per depth.
struct Walker<'a> {
    search: &'a Search<'a>,
    cells: Vec<(usize, usize)>,
    acc: Vec<u64>,
    zeros: Vec<u64>,
    scratch: Vec<u64>,
    best: Option<MeasureResult>,
    best_value: u64,
    stats: EngineStats,
}

impl Search<'_> {
    fn run(&self) -> (Option<MeasureResult>, EngineStats) {
        let (n, s, k) = (self.table.seq_len, self.table.count, self.order);
        let total = n * s;
        let firsts: Vec<usize> = if k == 1 {
            (0..s).map(|i| i * n).collect()
        } else {
            // A first cell needs k-1 larger cells, one of them with shift 0
            // unless it has shift 0 itself.
            (0..=total - k)
                .filter(|&c| c % n == 0 || c < (s - 1) * n)
                .collect()
        };
        firsts
            .into_par_iter()
            .map(|c| {
                let mut w = Walker::new(self);
                w.start(c / n, c % n);
                (w.best, w.stats)
            })
            .reduce(
                || (None, EngineStats::default()),
                |(a, sa), (b, sb)| (MeasureResult::merge_opt(a, b), sa.add(sb)),
            )
    }
}

impl<'a> Walker<'a> {
    fn new(search: &'a Search<'a>) -> Self {
        let w = search.table.words;
        Self {
            search,
            cells: Vec::with_capacity(search.order),
            acc: vec![0u64; w * search.order],
            zeros: vec![0u64; w],
            scratch: vec![0u64; w],
            best: None,
            best_value: 0,
            stats: EngineStats::default(),
        }
    }

    /// Values at or below this cannot become the final witness.
    #[inline(always)]
    fn threshold(&self) -> u64 {
        if !self.search.prune {
            return self.best_value;
        }
        let shared = self.search.shared.load(Ordering::Relaxed);
        self.best_value.max(shared.saturating_sub(1))
    }

    /// Whether a subtree whose window range is at most `len` is hopeless.
    #[inline(always)]
    fn too_short(&self, len: usize) -> bool {
        self.search.prune && len as u64 <= self.threshold()
    }

    fn start(&mut self, si: usize, d: usize) {
        let table = self.search.table;
        if self.search.order == 1 {
            let zeros = std::mem::take(&mut self.zeros);
            self.leaf(si, 0, 0, &zeros);
            self.zeros = zeros;
            return;
        }
        if self.too_short(table.seq_len - d) {
            return;
        }
        let w = table.words;
        shift_into(table.row(si), d, &mut self.acc[..w]);
        self.cells.push((si, d));
        self.descend(1, si * table.seq_len + d + 1, d, d == 0);
        self.cells.pop();
    }

    /// Chooses the cell at depth `level >= 1`, starting from grid cell
    /// `first = s N + d`.
    fn descend(&mut self, level: usize, first: usize, dmax: usize, has_zero: bool) {
        let table = self.search.table;
        let (n, s, k) = (table.seq_len, table.count, self.search.order);
        let w = table.words;
        if level + 1 == k {
            let acc = std::mem::take(&mut self.acc);
            self.last_level(first, dmax, has_zero, &acc[(level - 1) * w..level * w]);
            self.acc = acc;
            return;
        }
        // Cells after this one still to be chosen.
        let remaining = k - 1 - level;
        let total = n * s;
        for si in first / n..s {
            let d_first = if si == first / n { first % n } else { 0 };
            for d in d_first..n {
                if si * n + d + remaining >= total {
                    return;
                }
                if !has_zero && d != 0 && si + 1 >= s {
                    return;
                }
                let dm = dmax.max(d);
                if self.too_short(n - dm) {
                    if d < dmax {
                        return;
                    }
                    break;
                }
                let (lower, upper) = self.acc.split_at_mut(level * w);
                let prev = &lower[(level - 1) * w..];
                let src = table.row(si);
                for (i, (u, p)) in upper[..w].iter_mut().zip(prev).enumerate() {
                    *u = p ^ shifted_word(src, d, i);
                }
                self.cells.push((si, d));
                self.descend(level + 1, si * n + d + 1, dm, has_zero || d == 0);
                self.cells.pop();
            }
        }
    }

    fn last_level(&mut self, first: usize, dmax: usize, has_zero: bool, acc: &[u64]) {
        let table = self.search.table;
        let (n, s) = (table.seq_len, table.count);
        if !has_zero {
            for si in first.div_ceil(n)..s {
                self.leaf(si, 0, dmax, acc);
            }
            return;
        }
        for si in first / n..s {
            let d_first = if si == first / n { first % n } else { 0 };
            for d in d_first..n {
                if self.too_short(n - dmax.max(d)) {
                    if d < dmax {
                        return;
                    }
                    break;
                }
                self.leaf(si, d, dmax, acc);
            }
        }
    }

    /// Evaluates the chosen cells plus `(si, d)`, given the product `acc`
    /// of the chosen cells.
    #[inline(always)]
    fn leaf(&mut self, si: usize, d: usize, dmax: usize, acc: &[u64]) {
        let table = self.search.table;
        let len = table.seq_len - dmax.max(d);
        let src = table.row(si);
        self.stats.leaves += 1;
        let t = self.threshold();
        if self.search.prune {
            if len as u64 <= t {
                return;
            }
            if len > BLOCK_BOUND_MIN_LEN && u64::from((self.search.bound)(acc, src, d, len)) <= t {
                return;
            }
        }
        self.stats.exact += 1;
        shift_into(src, d, &mut self.scratch);
        let row = &self.scratch;
        let v = u64::from(xor_range(acc, row, len));
        if v <= t {
            return;
        }
        let win = xor_extremes(acc, row, len).window();
        debug_assert_eq!(win.value, v);
        let pairs = self
            .cells
            .iter()
            .chain(std::iter::once(&(si, d)))
            .map(|&(s, d)| Pair::new(s + 1, d))
            .collect();
        self.best = Some(MeasureResult {
            value: v,
            pattern: Pattern::new(pairs).expect("search visits canonical patterns"),
            window: (win.m1, win.m2),
        });
        self.best_value = v;
        if self.search.prune {
            self.search.shared.fetch_max(v, Ordering::Relaxed);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::count::pattern_count;
    use crate::oracle::cross_correlation_measure_naive;
    use num_bigint::BigUint;

    fn fam(rows: &[&[i8]]) -> Family {
        Family::from_signs(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_examples() {
        let g = fam(&[&[1, 1, 1], &[1, -1, 1]]);
        let r = cross_correlation_measure(&g, 2).unwrap();
        assert_eq!(r, cross_correlation_measure_naive(&g, 2).unwrap());
        assert_eq!(r.value, 2);

        let ones = fam(&[&[1; 7], &[1; 7], &[1; 7]]);
        assert_eq!(cross_correlation_measure(&ones, 2).unwrap().value, 7);

        let alt = BinarySequence::from_fn(4, |i| i % 2 == 0).unwrap();
        assert_eq!(correlation_measure(&alt, 2).unwrap().value, 3);
        assert_eq!(correlation_measure(&alt, 3).unwrap().value, 1);
    }

    #[test]
    fn infeasible_orders() {
        let g = fam(&[&[1, -1]]);
        assert!(matches!(
            cross_correlation_measure(&g, 3),
            Err(Error::NoAdmissiblePattern {
                order: 3,
                n: 2,
                s: 1
            })
        ));
        assert!(cross_correlation_measure(&g, 0).is_err());
        assert_eq!(cross_correlation_measure(&g, 2).unwrap().value, 1);
    }

    #[test]
    fn unpruned_search_visits_every_pattern() {
        let g = fam(&[&[1, -1, -1, 1, 1], &[-1, -1, 1, 1, 1], &[1, 1, 1, -1, 1]]);
        let opts = EngineOptions {
            workers: Some(1),
            prune: false,
        };
        for k in 1..=5 {
            let (r, stats) = cross_correlation_measure_with(&g, k, &opts).unwrap();
            assert_eq!(BigUint::from(stats.leaves), pattern_count(5, 3, k as u64));
            assert_eq!(r, cross_correlation_measure(&g, k).unwrap());
        }
    }

    #[test]
    fn long_rows_cross_word_boundaries() {
        let rows: Vec<Vec<i8>> = (0..2)
            .map(|s| {
                (0..150)
                    .map(|i| if (i * 7 + s * 3) % 5 < 2 { -1 } else { 1 })
                    .collect()
            })
            .collect();
        let g = Family::from_signs(&rows).unwrap();
        let fast = cross_correlation_measure(&g, 2).unwrap();
        let slow = cross_correlation_measure_with(
            &g,
            2,
            &EngineOptions {
                workers: None,
                prune: false,
            },
        )
        .unwrap()
        .0;
        assert_eq!(fast, slow);
        assert_eq!(
            evaluate_pattern(&g, &fast.pattern).unwrap().value,
            fast.value
        );
    }

    #[test]
    fn evaluate_pattern_matches_window_sum() {
        let g = fam(&[&[1, 1, 1], &[1, -1, 1]]);
        let p = Pattern::new(vec![Pair::new(1, 0), Pair::new(2, 0)]).unwrap();
        let r = evaluate_pattern(&g, &p).unwrap();
        assert_eq!((r.value, r.window), (1, (1, 1)));
        let bad = Pattern::new(vec![Pair::new(3, 0)]).unwrap();
        assert!(evaluate_pattern(&g, &bad).is_err());
    }
}
