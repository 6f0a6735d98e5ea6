//! Closed-form thresholds and normalizers for `Phi_k` of random families.
//!
//! All logarithms are natural. Logs of binomials come from exact big
//! integers for `n < 1000` and from log-gamma above that.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::engine::{binomial, pattern_count};
use crate::error::{Error, Result};

const EXACT_BINOMIAL_LIMIT: u64 = 1000;

fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().expect("at most 1000 bits")
}

/// Natural log of a positive big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return to_f64(x).ln();
    }
    // Keep the 64 leading bits and add the dropped scale back in log space.
    let shift = bits - 64;
    to_f64(&(x >> shift)).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln binom(n, k)`; negative infinity when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if n < EXACT_BINOMIAL_LIMIT {
        return ln_biguint(&binomial(n, k));
    }
    let (n, k) = (n as f64, k as f64);
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

fn check_order(seq_len: usize, order: usize) -> Result<()> {
    if order < 2 || order > seq_len {
        return Err(Error::domain(
            "2 <= k <= N",
            format!("k={order}, N={seq_len}"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Band {
    pub lo: f64,
    pub hi: f64,
    /// Whether `1 <= log2 S < N/12` and `2 <= k <= N / (6 log2 S)` hold.
    pub hypothesis_holds: bool,
}

/// `(2/5, 5/2) * sqrt(N (ln binom(N, k) + k ln S))`.
pub fn theorem1_band(seq_len: usize, count: usize, order: usize) -> Result<Theorem1Band> {
    check_order(seq_len, order)?;
    if count == 0 {
        return Err(Error::domain("S >= 1", "S=0"));
    }
    let n = seq_len as f64;
    let k = order as f64;
    let core = (n * (ln_binomial(seq_len as u64, order as u64) + k * (count as f64).ln())).sqrt();
    let log2_s = (count as f64).log2();
    Ok(Theorem1Band {
        lo: 0.4 * core,
        hi: 2.5 * core,
        hypothesis_holds: log2_s >= 1.0 && log2_s < n / 12.0 && k <= n / (6.0 * log2_s),
    })
}

/// `(1 + eps) sqrt(2N ln(binom(SN, k) - binom(S(N-1), k)))`, with the
/// difference taken exactly before the log.
pub fn theorem3_threshold(seq_len: usize, count: usize, order: usize, eps: f64) -> Result<f64> {
    let cells = seq_len * count;
    if order < 2 || order >= cells {
        return Err(Error::domain(
            "2 <= k < S*N",
            format!("k={order}, S*N={cells}"),
        ));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::domain("eps >= 0", eps.to_string()));
    }
    let count = pattern_count(seq_len as u64, count as u64, order as u64);
    Ok((1.0 + eps) * (2.0 * seq_len as f64 * ln_biguint(&count)).sqrt())
}

/// `sqrt(2N ln binom(N, k-1))`.
pub fn t4_norm(seq_len: usize, order: usize) -> Result<f64> {
    check_order(seq_len, order)?;
    Ok((2.0 * seq_len as f64 * ln_binomial(seq_len as u64, order as u64 - 1)).sqrt())
}

/// `sqrt(2N (k-1) ln N)`.
pub fn conv_norm(seq_len: usize, order: usize) -> Result<f64> {
    check_order(seq_len, order)?;
    let n = seq_len as f64;
    Ok((2.0 * n * (order as f64 - 1.0) * n.ln()).sqrt())
}

/// `2 exp(-theta^2 / (2 k^2 N))`, the tail bound on `|Phi_k - E Phi_k|`.
pub fn mcdiarmid_bound(seq_len: usize, order: usize, theta: f64) -> f64 {
    let k = order as f64;
    2.0 * (-theta * theta / (2.0 * k * k * seq_len as f64)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRange {
    pub max_order: usize,
    /// False when the raw value fell below 2 and was clamped.
    pub feasible: bool,
}

/// `floor((ln N + ln S) / ln ln N)`, clamped below at 2.
pub fn theorem2_k_range(seq_len: usize, count: usize) -> Result<OrderRange> {
    if seq_len < 3 || count == 0 {
        return Err(Error::domain(
            "N >= 3 and S >= 1",
            format!("N={seq_len}, S={count}"),
        ));
    }
    let n = seq_len as f64;
    let raw = ((n.ln() + (count as f64).ln()) / n.ln().ln()).floor();
    Ok(OrderRange {
        max_order: raw.max(2.0) as usize,
        feasible: raw >= 2.0,
    })
}

/// Every envelope for one `(N, S, k, eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelopes {
    pub t1_lo: f64,
    pub t1_hi: f64,
    pub t1_hypothesis_holds: bool,
    pub t3: f64,
    pub t4_norm: f64,
    pub conv_norm: f64,
}

impl Envelopes {
    pub fn new(seq_len: usize, count: usize, order: usize, eps: f64) -> Result<Self> {
        let band = theorem1_band(seq_len, count, order)?;
        Ok(Self {
            t1_lo: band.lo,
            t1_hi: band.hi,
            t1_hypothesis_holds: band.hypothesis_holds,
            t3: theorem3_threshold(seq_len, count, order, eps)?,
            t4_norm: t4_norm(seq_len, order)?,
            conv_norm: conv_norm(seq_len, order)?,
        })
    }
}
