//! Direct, unoptimized evaluation of the correlation measures.
//!
//! Everything here works on plain `i64` sums of `±1` products and enumerates
//! its search space with the simplest loops available. The fast engine in
//! [`crate::engine`] is tested against these functions.

use crate::error::{Error, Result};
use crate::sequence::{BinarySequence, Family, MeasureResult, Pair, Pattern};

/// `V_k(E, M, D) = sum_{n=1..M} e_{n+d_1} ... e_{n+d_k}`.
pub fn correlation_sum(seq: &BinarySequence, m: usize, shifts: &[usize]) -> Result<i64> {
    let n = seq.len();
    if shifts.is_empty() {
        return Err(Error::domain("k >= 1", "empty shift tuple"));
    }
    if !shifts.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::domain("d_1 < ... < d_k", format!("{shifts:?}")));
    }
    if m == 0 {
        return Err(Error::domain("M >= 1", "M = 0"));
    }
    let d_k = *shifts.last().expect("non-empty");
    if m + d_k > n {
        return Err(Error::domain(
            "M + d_k <= N",
            format!("M={m}, d_k={d_k}, N={n}"),
        ));
    }
    Ok((1..=m)
        .map(|i| {
            shifts
                .iter()
                .map(|&d| i64::from(seq.get(i + d)))
                .product::<i64>()
        })
        .sum())
}

/// `C_k(E)` by exhaustive search over every `(M, D)` of the defining
/// maximum. The witness is reported in window form: `D - d_1` as the
/// pattern and `[d_1 + 1, d_1 + M]` as the window.
pub fn correlation_measure_naive(seq: &BinarySequence, order: usize) -> Result<MeasureResult> {
    let n = seq.len();
    if order == 0 || order > n {
        return Err(Error::NoAdmissiblePattern { order, n, s: 1 });
    }
    let mut best: Option<MeasureResult> = None;
    for_each_combination(n, order, |shifts| {
        let d_1 = shifts[0];
        let pattern = Pattern::from_shifts(shifts).expect("distinct shifts");
        for m in 1..=(n - shifts[order - 1]) {
            let v = correlation_sum(seq, m, shifts)
                .expect("admissible")
                .unsigned_abs();
            let candidate = MeasureResult {
                value: v,
                pattern: pattern.clone(),
                window: (d_1 + 1, d_1 + m),
            };
            best = MeasureResult::merge_opt(best.take(), Some(candidate));
        }
    });
    Ok(best.expect("at least one admissible (M, D)"))
}

/// `sum_{n=m1..m2} prod_{(s,d) in pattern} e_{n+d}(s)`.
pub fn cross_correlation_sum(
    family: &Family,
    pattern: &Pattern,
    m1: usize,
    m2: usize,
) -> Result<i64> {
    let n = family.seq_len();
    pattern.check_fits(n, family.count())?;
    let limit = n - pattern.max_shift();
    if m1 < 1 || m1 > m2 || m2 > limit {
        return Err(Error::domain(
            "1 <= m1 <= m2 <= N - d_max",
            format!("window ({m1}, {m2}) with N - d_max = {limit}"),
        ));
    }
    Ok((m1..=m2)
        .map(|i| {
            pattern
                .pairs()
                .iter()
                .map(|p| i64::from(family.entry(i + p.shift, p.seq)))
                .product::<i64>()
        })
        .sum())
}

/// `Phi_k(G)` by exhaustive search over every canonical pattern and every
/// window.
pub fn cross_correlation_measure_naive(family: &Family, order: usize) -> Result<MeasureResult> {
    let (n, s) = (family.seq_len(), family.count());
    if order == 0 || order > n * s {
        return Err(Error::NoAdmissiblePattern { order, n, s });
    }
    let mut best: Option<MeasureResult> = None;
    // Cell c stands for the pair (c / N + 1, c % N); cell order is (s, d) order.
    for_each_combination(n * s, order, |cells| {
        if !cells.iter().any(|c| c % n == 0) {
            return;
        }
        let pairs = cells.iter().map(|c| Pair::new(c / n + 1, c % n)).collect();
        let pattern = Pattern::new(pairs).expect("sorted cells with a zero shift");
        let limit = n - pattern.max_shift();
        for m1 in 1..=limit {
            for m2 in m1..=limit {
                let v = cross_correlation_sum(family, &pattern, m1, m2)
                    .expect("admissible window")
                    .unsigned_abs();
                if best.as_ref().is_some_and(|b| b.value >= v) {
                    continue;
                }
                best = Some(MeasureResult {
                    value: v,
                    pattern: pattern.clone(),
                    window: (m1, m2),
                });
            }
        }
    });
    Ok(best.expect("order <= S*N admits a pattern"))
}

/// Calls `f` with every strictly increasing `k`-tuple from `0..n`, in
/// lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
            return;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}
