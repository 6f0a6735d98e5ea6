//! Closed-form bounds on the smallest measures over injective families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::construct::ceil_log2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddBounds {
    /// `max(1, floor(log2 S - log2(2k+1)))`.
    pub lower: u64,
    /// `ceil(log2 S)`.
    pub upper: u64,
}

/// Bounds on the minimum of `Phi_{2k+1}` over injective families of `S`
/// sequences of length `N`.
pub fn odd_min_bounds(seq_len: usize, count: usize, k: usize) -> Result<OddBounds> {
    if count < 2 {
        return Err(Error::domain("S >= 2", format!("S={count}")));
    }
    if 2 * k + 1 > seq_len {
        return Err(Error::domain("2k+1 <= N", format!("k={k}, N={seq_len}")));
    }
    // floor(log2(S / (2k+1))) is the largest L with (2k+1) 2^L <= S.
    let width = 2 * k as u128 + 1;
    let mut lower = 0u64;
    while width << (lower + 1) <= count as u128 {
        lower += 1;
    }
    Ok(OddBounds {
        lower: lower.max(1),
        upper: ceil_log2(count) as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvenBranch {
    /// `2kN <= S`.
    #[serde(rename = "min-1")]
    Min1,
    /// `2kN > S`.
    #[serde(rename = "min-2")]
    Min2,
}

impl EvenBranch {
    pub fn label(self) -> &'static str {
        match self {
            EvenBranch::Min1 => "min-1",
            EvenBranch::Min2 => "min-2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvenBound {
    pub branch: EvenBranch,
    pub branch_value: f64,
    /// `sqrt(floor(N/(2k+1)) / 2)`, valid for every family.
    pub baseline: f64,
    pub bound: f64,
    pub baseline_dominates: bool,
}

/// Lower bound on `Phi_{2k}` over injective families: the applicable
/// branch or the single-sequence baseline, whichever is larger.
pub fn even_min_bound(seq_len: usize, count: usize, k: usize) -> Result<EvenBound> {
    if seq_len == 0 || count == 0 || k == 0 {
        return Err(Error::domain(
            "N, S, k >= 1",
            format!("N={seq_len}, S={count}, k={k}"),
        ));
    }
    let n = seq_len as f64;
    let (branch, branch_value) = if 2 * k * seq_len <= count {
        let log_t = ((count / k) as f64).ln();
        (
            EvenBranch::Min1,
            (n * log_t / 50.0 / (50.0 * n / log_t).ln()).sqrt(),
        )
    } else {
        let ell = k.div_ceil(count);
        (EvenBranch::Min2, (n / (2 * ell + 1) as f64).sqrt())
    };
    let baseline = ((seq_len / (2 * k + 1)) as f64 / 2.0).sqrt();
    Ok(EvenBound {
        branch,
        branch_value,
        baseline,
        bound: branch_value.max(baseline),
        baseline_dominates: baseline > branch_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_examples() {
        assert_eq!(
            odd_min_bounds(8, 2, 1).unwrap(),
            OddBounds { lower: 1, upper: 1 }
        );
        assert_eq!(
            odd_min_bounds(8, 1024, 1).unwrap(),
            OddBounds {
                lower: 8,
                upper: 10
            }
        );
        assert_eq!(
            odd_min_bounds(8, 3, 1).unwrap(),
            OddBounds { lower: 1, upper: 2 }
        );
        assert!(odd_min_bounds(2, 4, 1).is_err());
        assert!(odd_min_bounds(8, 1, 1).is_err());
    }

    #[test]
    fn odd_gap_is_bounded() {
        for s in 2..2000 {
            for k in 1..6 {
                let b = odd_min_bounds(64, s, k).unwrap();
                let gap = ceil_log2(2 * k + 1) as u64 + 1;
                assert!(b.upper - b.lower.min(b.upper) <= gap, "S={s} k={k}");
                let exact = (s as f64).log2() - ((2 * k + 1) as f64).log2();
                if (exact - exact.round()).abs() > 1e-9 {
                    assert_eq!(b.lower, (exact.floor() as i64).max(1) as u64, "S={s} k={k}");
                }
            }
        }
        // Exact powers: S = (2k+1) 2^L.
        assert_eq!(odd_min_bounds(64, 28, 3).unwrap().lower, 2);
        assert_eq!(odd_min_bounds(64, 27, 3).unwrap().lower, 1);
        assert_eq!(odd_min_bounds(64, 96, 1).unwrap().lower, 5);
    }

    #[test]
    fn even_examples() {
        let b = even_min_bound(100, 300, 1).unwrap();
        assert_eq!(b.branch, EvenBranch::Min1);
        let expected = (100.0 * 300f64.ln() / (50.0 * (5000.0 / 300f64.ln()).ln())).sqrt();
        assert!((b.branch_value - expected).abs() < 1e-12);
        assert!((b.branch_value - 1.29750110630865).abs() < 1e-12);
        assert!(b.baseline_dominates);

        let b = even_min_bound(30, 4, 2).unwrap();
        assert_eq!(b.branch, EvenBranch::Min2);
        assert!((b.branch_value - 10f64.sqrt()).abs() < 1e-12);

        assert!((even_min_bound(99, 2, 1).unwrap().baseline - 16.5f64.sqrt()).abs() < 1e-12);
        let b = even_min_bound(10, 1, 3).unwrap();
        assert!((b.branch_value - (10.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }
}
