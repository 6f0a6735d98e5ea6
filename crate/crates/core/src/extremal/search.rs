//! Proven minima of `Phi_k` over small injective families.
//!
//! `Phi_k` is unchanged by negating a row, permuting rows, and reversing all
//! rows, so families are enumerated up to those symmetries: every row is
//! normalized to start with `+1` (a row and its negation then share one
//! normalized form, hence multiplicity at most two), rows are taken in
//! sorted order, and a family is kept only if it is not larger than its
//! reversal.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::engine::{cross_correlation_measure_with, EngineOptions};
use crate::error::{Error, Result};
use crate::extremal::certificate::{gram_certificate, pigeonhole_certificate, SubsetStrategy};
use crate::sequence::{BinarySequence, Family, MeasureResult};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Longest rows the search accepts.
pub const MAX_SEARCH_LEN: usize = 24;

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Refuse when the unpruned tree has more nodes than this.
    pub node_budget: u64,
    /// Prune subtrees whose partial family already exceeds the incumbent.
    pub prune: bool,
    pub workers: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            prune: true,
            workers: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExhaustiveMin {
    pub order: usize,
    pub min_value: u64,
    /// The smallest optimal family in canonical form.
    pub argmin: Family,
    pub witness: MeasureResult,
    /// Optimal families counted up to negation, permutation and reversal.
    pub optima: u64,
    /// Size of the unpruned tree.
    pub tree_size: f64,
    pub nodes: u64,
    pub leaves: u64,
}

/// Nodes of the unpruned tree: multisets of at most `S` of the `R`
/// normalized rows, each used at most twice.
pub fn search_tree_size(seq_len: usize, count: usize) -> f64 {
    let rows = 2f64.powi(seq_len as i32 - 1);
    let choose =
        |n: f64, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i as f64) / (i + 1) as f64);
    (0..=count)
        .map(|size| {
            (0..=size / 2)
                .map(|twice| choose(rows, twice) * choose(rows - twice as f64, size - 2 * twice))
                .sum::<f64>()
        })
        .sum()
}

pub fn exhaustive_min(
    seq_len: usize,
    count: usize,
    order: usize,
    options: &SearchOptions,
) -> Result<ExhaustiveMin> {
    if !(1..=MAX_SEARCH_LEN).contains(&seq_len) {
        return Err(Error::domain("1 <= N <= 24", format!("N={seq_len}")));
    }
    if count == 0 || count as u64 > 1u64 << seq_len {
        return Err(Error::domain(
            "1 <= S <= 2^N",
            format!("S={count}, N={seq_len}"),
        ));
    }
    if order == 0 || order > seq_len * count {
        return Err(Error::NoAdmissiblePattern {
            order,
            n: seq_len,
            s: count,
        });
    }
    let tree_size = search_tree_size(seq_len, count);
    if tree_size > options.node_budget as f64 {
        return Err(Error::BudgetExceeded {
            cost: format!("{tree_size:.0} nodes"),
            budget: format!("{} nodes", options.node_budget),
        });
    }
    let mut candidates: Vec<BinarySequence> = (0..1u64 << (seq_len - 1))
        .map(|r| BinarySequence::from_words(seq_len, vec![r << 1]))
        .collect::<Result<_>>()?;
    candidates.sort();

    let shared = AtomicU64::new(u64::MAX);
    let search = Tree {
        candidates: &candidates,
        count,
        order,
        prune: options.prune,
        shared: &shared,
    };
    let run = || {
        (0..candidates.len())
            .into_par_iter()
            .map(|first| {
                let mut state = Branch::default();
                search.descend(&mut vec![first], &mut state);
                state
            })
            .reduce(Branch::default, Branch::merge)
    };
    let best = match options.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::domain("worker pool", e.to_string()))?
            .install(run),
        None => run(),
    };
    let (chosen, witness) = best.argmin.expect("every complete family is a leaf");
    Ok(ExhaustiveMin {
        order,
        min_value: best.value,
        argmin: search.family(&chosen),
        witness,
        optima: best.optima,
        tree_size,
        nodes: best.nodes,
        leaves: best.leaves,
    })
}

struct Tree<'a> {
    candidates: &'a [BinarySequence],
    count: usize,
    order: usize,
    prune: bool,
    shared: &'a AtomicU64,
}

#[derive(Debug)]
struct Branch {
    value: u64,
    optima: u64,
    argmin: Option<(Vec<usize>, MeasureResult)>,
    nodes: u64,
    leaves: u64,
}

impl Default for Branch {
    fn default() -> Self {
        Self {
            value: u64::MAX,
            optima: 0,
            argmin: None,
            nodes: 0,
            leaves: 0,
        }
    }
}

impl Branch {
    fn merge(a: Self, b: Self) -> Self {
        let (nodes, leaves) = (a.nodes + b.nodes, a.leaves + b.leaves);
        let mut out = match a.value.cmp(&b.value) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                let optima = a.optima + b.optima;
                let argmin = match (a.argmin, b.argmin) {
                    (Some(x), Some(y)) => Some(if y.0 < x.0 { y } else { x }),
                    (x, y) => x.or(y),
                };
                Branch {
                    value: a.value,
                    optima,
                    argmin,
                    nodes: 0,
                    leaves: 0,
                }
            }
        };
        out.nodes = nodes;
        out.leaves = leaves;
        out
    }
}

impl Tree<'_> {
    /// Materializes chosen candidates; the second copy of a row is negated.
    fn family(&self, chosen: &[usize]) -> Family {
        let rows = chosen
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let row = &self.candidates[c];
                if i > 0 && chosen[i - 1] == c {
                    row.negated()
                } else {
                    row.clone()
                }
            })
            .collect();
        Family::new(rows).expect("rows share a length")
    }

    fn measure(&self, family: &Family) -> MeasureResult {
        let options = EngineOptions {
            workers: Some(1),
            prune: true,
        };
        cross_correlation_measure_with(family, self.order, &options)
            .expect("order fits the family")
            .0
    }

    /// A cheap certified lower bound, or 0.
    fn certified_bound(&self, family: &Family) -> u64 {
        let k = self.order / 2;
        if k == 0 || family.count() < self.order {
            return 0;
        }
        let cert = if self.order % 2 == 1 {
            pigeonhole_certificate(family, k).map(|c| c.implied_bound())
        } else {
            gram_certificate(family, k, SubsetStrategy::Distinct, 2).map(|c| c.implied_bound())
        };
        cert.unwrap_or(0)
    }

    fn exceeds(&self, family: &Family, local: u64) -> bool {
        let incumbent = local.min(self.shared.load(Ordering::Relaxed));
        if self.certified_bound(family) > incumbent {
            return true;
        }
        self.order <= family.count() * family.seq_len() && self.measure(family).value > incumbent
    }

    fn descend(&self, chosen: &mut Vec<usize>, state: &mut Branch) {
        state.nodes += 1;
        let family = self.family(chosen);
        if chosen.len() == self.count {
            if !self.is_canonical(&family, chosen) {
                return;
            }
            state.leaves += 1;
            let result = self.measure(&family);
            if result.value < state.value {
                state.value = result.value;
                state.optima = 0;
                state.argmin = Some((chosen.clone(), result.clone()));
                self.shared.fetch_min(result.value, Ordering::Relaxed);
            }
            if result.value == state.value {
                state.optima += 1;
            }
            return;
        }
        if self.prune && self.exceeds(&family, state.value) {
            return;
        }
        let last = *chosen.last().expect("non-empty");
        let twice = chosen.len() >= 2 && chosen[chosen.len() - 2] == last;
        let start = if twice { last + 1 } else { last };
        for next in start..self.candidates.len() {
            chosen.push(next);
            self.descend(chosen, state);
            chosen.pop();
        }
    }

    /// Keeps the smaller of a family and its reversal.
    fn is_canonical(&self, family: &Family, chosen: &[usize]) -> bool {
        let mut reversed: Vec<BinarySequence> = family
            .rows()
            .iter()
            .map(|r| {
                let r = r.reversed();
                if r.bit(0) {
                    r.negated()
                } else {
                    r
                }
            })
            .collect();
        reversed.sort();
        chosen
            .iter()
            .map(|&c| &self.candidates[c])
            .le(reversed.iter())
    }
}
