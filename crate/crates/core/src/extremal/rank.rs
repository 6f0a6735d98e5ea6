//! Rank lower bounds for symmetric matrices with unit diagonal and small
//! off-diagonal entries.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Matrices up to this size get an exact rank.
pub const EXACT_RANK_MAX_DIM: usize = 128;

/// The rational matrix `entries / denominator`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledMatrix {
    pub entries: Vec<Vec<i64>>,
    pub denominator: u64,
}

impl ScaledMatrix {
    pub fn new(entries: Vec<Vec<i64>>, denominator: u64) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::domain("non-empty matrix", "0x0"));
        }
        if denominator == 0 {
            return Err(Error::domain("denominator >= 1", "0"));
        }
        if let Some(row) = entries.iter().position(|r| r.len() != n) {
            return Err(Error::domain(
                "square matrix",
                format!(
                    "row {} has {} entries, expected {n}",
                    row + 1,
                    entries[row].len()
                ),
            ));
        }
        Ok(Self {
            entries,
            denominator,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        let q = self.denominator as f64;
        self.entries
            .iter()
            .map(|r| r.iter().map(|&v| v as f64 / q).collect())
            .collect()
    }
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn exact_rank(entries: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = entries
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &a[r][c] * &a[rank][col] - &a[r][col] * &a[rank][c];
                debug_assert!((&v % &prev).is_zero());
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank by partial-pivot elimination, counting pivots above
/// `2^-40 n max|a|`.
pub fn numerical_rank(matrix: &[Vec<f64>]) -> usize {
    let mut a = matrix.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = scale * rows.max(cols) as f64 * 2f64.powi(-40);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("rank < rows");
        if a[pivot][col].abs() <= tol {
            continue;
        }
        a.swap(rank, pivot);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMethod {
    Exact,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankInequality {
    pub required: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub dim: usize,
    /// Largest off-diagonal `|a_ij|` as a reduced fraction.
    pub epsilon: String,
    pub epsilon_value: f64,
    pub rank: usize,
    pub method: RankMethod,
    /// `rank >= n / (1 + eps^2 (n-1))`.
    pub basic: RankInequality,
    /// `rank >= log n / (50 eps^2 log(1/eps))`, only when
    /// `1/sqrt(n) <= eps <= 1/2`.
    pub logarithmic: Option<RankInequality>,
}

pub fn rank_inequality_check(matrix: &ScaledMatrix) -> Result<RankReport> {
    let n = matrix.dim();
    let q = matrix.denominator as i64;
    let mut top = 0i64;
    for i in 0..n {
        if matrix.entries[i][i] != q {
            return Err(Error::domain(
                "unit diagonal",
                format!("a_{0}{0} = {1}/{q}", i + 1, matrix.entries[i][i]),
            ));
        }
        for j in i + 1..n {
            let (a, b) = (matrix.entries[i][j], matrix.entries[j][i]);
            if a != b {
                return Err(Error::domain(
                    "symmetric matrix",
                    format!("a_{}{} != a_{}{}", i + 1, j + 1, j + 1, i + 1),
                ));
            }
            top = top.max(a.abs());
        }
    }
    let (rank, method) = if n <= EXACT_RANK_MAX_DIM {
        (exact_rank(&matrix.entries), RankMethod::Exact)
    } else {
        (numerical_rank(&matrix.to_f64()), RankMethod::Numerical)
    };
    let eps = top as f64 / q as f64;
    let nf = n as f64;

    // Exact in integers: rank (q^2 + p^2 (n-1)) >= n q^2.
    let (p2, q2) = (i128::from(top).pow(2), i128::from(q).pow(2));
    let basic = RankInequality {
        required: nf / (1.0 + eps * eps * (nf - 1.0)),
        holds: rank as i128 * (q2 + p2 * (n as i128 - 1)) >= n as i128 * q2,
    };
    let logarithmic = (n >= 2 && eps > 0.0 && eps * eps * nf >= 1.0 && eps <= 0.5).then(|| {
        let required = nf.ln() / (50.0 * eps * eps * (1.0 / eps).ln());
        RankInequality {
            required,
            holds: rank as f64 >= required,
        }
    });
    let divisor = gcd(top, q).max(1);
    Ok(RankReport {
        dim: n,
        epsilon: format!("{}/{}", top / divisor, q / divisor),
        epsilon_value: eps,
        rank,
        method,
        basic,
        logarithmic,
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a.abs(), b.abs())
}
