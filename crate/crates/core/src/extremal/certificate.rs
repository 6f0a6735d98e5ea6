//! Certified lower bounds on `Phi_k` from a single explicit term.
//!
//! Each certificate names a pattern and window of the family whose sum it
//! reports, so the bound can be replayed with [`crate::oracle`].

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::engine::evaluate_pattern;
use crate::error::{Error, Result};
use crate::sequence::{BinarySequence, Family, MeasureResult, Pair, Pattern};

/// `2k+1` rows sharing the longest common prefix of any `2k+1` rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PigeonholeCertificate {
    pub k: usize,
    /// 1-based, increasing. Empty when `S < 2k+1`.
    pub rows: Vec<usize>,
    /// Length of the common prefix of `rows`.
    pub agree_len: usize,
    /// `floor(log2((S-1)/(2k)))` when `S > 4k+1`, else 0; `agree_len` is
    /// never smaller.
    pub guaranteed_len: usize,
    /// The zero-shift pattern over `rows` with its best window. Its value is
    /// a lower bound on `Phi_{2k+1}`.
    pub witness: Option<MeasureResult>,
}

impl PigeonholeCertificate {
    pub fn implied_bound(&self) -> u64 {
        self.witness.as_ref().map_or(0, |w| w.value)
    }
}

/// Largest `L` with `2k 2^L + 1 <= S`, assuming `S > 4k+1`.
pub fn pigeonhole_guarantee(count: usize, k: usize) -> usize {
    if k == 0 || count <= 4 * k + 1 {
        return 0;
    }
    let mut len = 1;
    while (2 * k as u128) << (len + 1) < count as u128 {
        len += 1;
    }
    len
}

pub fn pigeonhole_certificate(family: &Family, k: usize) -> Result<PigeonholeCertificate> {
    if k == 0 {
        return Err(Error::domain("k >= 1", "k=0"));
    }
    let width = 2 * k + 1;
    let count = family.count();
    let mut cert = PigeonholeCertificate {
        k,
        rows: Vec::new(),
        agree_len: 0,
        guaranteed_len: pigeonhole_guarantee(count, k),
        witness: None,
    };
    if count < width {
        return Ok(cert);
    }
    let mut order: Vec<usize> = (1..=count).collect();
    order.sort_by(|&a, &b| family.row(a).cmp(family.row(b)).then(a.cmp(&b)));
    let lcp: Vec<usize> = order
        .windows(2)
        .map(|w| family.row(w[0]).common_prefix(family.row(w[1])))
        .collect();
    // Any `width` rows agree on at most the smallest adjacent common prefix
    // of the sorted block spanning them.
    let agree_len = lcp
        .windows(width - 1)
        .map(|w| *w.iter().min().expect("non-empty"))
        .max()
        .expect("count >= width");

    // Maximal runs of sorted rows agreeing on `agree_len` positions; pick the
    // lexicographically smallest set of `width` indices.
    let mut best: Option<Vec<usize>> = None;
    let mut start = 0;
    for end in 1..=count {
        if end < count && lcp[end - 1] >= agree_len {
            continue;
        }
        if end - start >= width {
            let mut run = order[start..end].to_vec();
            run.sort_unstable();
            run.truncate(width);
            if best.as_ref().is_none_or(|b| run < *b) {
                best = Some(run);
            }
        }
        start = end;
    }
    let rows = best.expect("a run of width rows exists");
    let pattern = Pattern::new(rows.iter().map(|&s| Pair::new(s, 0)).collect())?;
    cert.witness = Some(evaluate_pattern(family, &pattern)?);
    cert.rows = rows;
    cert.agree_len = agree_len;
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetStrategy {
    /// `floor(S/k)` disjoint blocks of `k` consecutive rows, no shifts.
    Distinct,
    /// Disjoint `k`-sets of shifted pairs, vectors of length
    /// `M = floor(N/(2l+1))` with `l = ceil(k/S)`.
    DisjointShifted,
}

impl SubsetStrategy {
    pub fn label(self) -> &'static str {
        match self {
            SubsetStrategy::Distinct => "distinct",
            SubsetStrategy::DisjointShifted => "disjoint-shifted",
        }
    }
}

/// Cap on the number of vectors; the Gram matrix is quadratic in it.
pub const DEFAULT_MAX_SUBSETS: usize = 64;

/// Gram matrix of the product vectors of disjoint pair sets. Every
/// off-diagonal entry is a sum of the family over a pattern of order `2k`,
/// so the largest one bounds `Phi_{2k}` from below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramCertificate {
    pub strategy: SubsetStrategy,
    pub k: usize,
    pub subsets: Vec<Vec<Pair>>,
    pub vector_len: usize,
    /// Integer inner products; the normalized matrix is `gram / vector_len`.
    pub gram: Vec<Vec<i64>>,
    /// Largest off-diagonal `|gram| / vector_len`, reduced.
    pub epsilon: String,
    pub epsilon_value: f64,
    /// The term attaining the largest off-diagonal entry.
    pub witness: MeasureResult,
}

impl GramCertificate {
    pub fn implied_bound(&self) -> u64 {
        self.witness.value
    }
}

pub fn gram_certificate(
    family: &Family,
    k: usize,
    strategy: SubsetStrategy,
    max_subsets: usize,
) -> Result<GramCertificate> {
    let (n, s) = (family.seq_len(), family.count());
    if k == 0 {
        return Err(Error::domain("k >= 1", "k=0"));
    }
    if max_subsets < 2 {
        return Err(Error::domain(
            "max_subsets >= 2",
            format!("max_subsets={max_subsets}"),
        ));
    }
    let (subsets, vector_len): (Vec<Vec<Pair>>, usize) = match strategy {
        SubsetStrategy::Distinct => {
            if s < 2 * k {
                return Err(Error::domain("S >= 2k", format!("S={s}, k={k}")));
            }
            let t = (s / k).min(max_subsets);
            let subsets = (0..t)
                .map(|i| (i * k + 1..=i * k + k).map(|r| Pair::new(r, 0)).collect())
                .collect();
            (subsets, n)
        }
        SubsetStrategy::DisjointShifted => {
            let ell = k.div_ceil(s);
            let m = n / (2 * ell + 1);
            if m == 0 {
                return Err(Error::domain(
                    "N >= 2*ceil(k/S)+1",
                    format!("N={n}, S={s}, k={k}"),
                ));
            }
            let shifts = n - m + 1;
            let t = (s * shifts / k).min(max_subsets);
            if t < 2 {
                return Err(Error::domain(
                    "at least two disjoint k-sets",
                    format!("N={n}, S={s}, k={k}"),
                ));
            }
            let subsets = (0..t)
                .map(|i| {
                    (i * k..i * k + k)
                        .map(|c| Pair::new(c % s + 1, c / s))
                        .collect()
                })
                .collect();
            (subsets, m)
        }
    };
    let vectors: Vec<BinarySequence> = subsets
        .iter()
        .map(|pairs| {
            BinarySequence::from_fn(vector_len, |i| {
                pairs
                    .iter()
                    .fold(false, |acc, p| acc ^ family.row(p.seq).bit(i - 1 + p.shift))
            })
        })
        .collect::<Result<_>>()?;
    let t = vectors.len();
    let mut gram = vec![vec![0i64; t]; t];
    let mut top = (0i64, 0usize, 1usize);
    for i in 0..t {
        for j in 0..t {
            let diff: u32 = vectors[i]
                .words()
                .iter()
                .zip(vectors[j].words())
                .map(|(a, b)| (a ^ b).count_ones())
                .sum();
            let g = vector_len as i64 - 2 * i64::from(diff);
            gram[i][j] = g;
            if i < j && g.abs() > top.0 {
                top = (g.abs(), i, j);
            }
        }
    }
    let (value, i, j) = top;
    let mut pairs: Vec<Pair> = subsets[i].iter().chain(&subsets[j]).copied().collect();
    let low = pairs.iter().map(|p| p.shift).min().expect("non-empty");
    pairs.iter_mut().for_each(|p| p.shift -= low);
    let witness = MeasureResult {
        value: value as u64,
        pattern: Pattern::canonicalize(pairs)?,
        window: (1 + low, vector_len + low),
    };
    let divisor = value.gcd(&(vector_len as i64)).max(1);
    Ok(GramCertificate {
        strategy,
        k,
        subsets,
        vector_len,
        gram,
        epsilon: format!("{}/{}", value / divisor, vector_len as i64 / divisor),
        epsilon_value: value as f64 / vector_len as f64,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::cross_correlation_measure;
    use crate::oracle::cross_correlation_sum;
    use crate::randstat::sample_family;

    fn replay(family: &Family, w: &MeasureResult) -> u64 {
        cross_correlation_sum(family, &w.pattern, w.window.0, w.window.1)
            .unwrap()
            .unsigned_abs()
    }

    #[test]
    fn guarantee_matches_pigeonhole() {
        assert_eq!(pigeonhole_guarantee(32, 1), 3);
        assert_eq!(pigeonhole_guarantee(5, 1), 0);
        assert_eq!(pigeonhole_guarantee(6, 1), 1);
        for s in 6..500 {
            for k in 1..4 {
                let l = pigeonhole_guarantee(s, k);
                if s > 4 * k + 1 {
                    assert!(
                        2 * k * (1 << l) < s && 2 * k * (1 << (l + 1)) >= s,
                        "S={s} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn pigeonhole_on_random_families() {
        for index in 0..20 {
            let g = sample_family(64, 32, 7, index).unwrap();
            let cert = pigeonhole_certificate(&g, 1).unwrap();
            assert!(cert.agree_len >= 3);
            assert_eq!(cert.rows.len(), 3);
            let first = g.row(cert.rows[0]);
            for &r in &cert.rows {
                assert!(first.common_prefix(g.row(r)) >= cert.agree_len);
            }
            let w = cert.witness.as_ref().unwrap();
            assert_eq!(replay(&g, w), cert.implied_bound());
        }
    }

    #[test]
    fn pigeonhole_agree_len_is_maximal() {
        for index in 0..10 {
            let g = sample_family(12, 9, 3, index).unwrap();
            let cert = pigeonhole_certificate(&g, 1).unwrap();
            let mut best = 0;
            for a in 1..=9 {
                for b in a + 1..=9 {
                    for c in b + 1..=9 {
                        let l = g
                            .row(a)
                            .common_prefix(g.row(b))
                            .min(g.row(a).common_prefix(g.row(c)));
                        best = best.max(l);
                    }
                }
            }
            assert_eq!(cert.agree_len, best);
            assert!(cert.implied_bound() <= cross_correlation_measure(&g, 3).unwrap().value);
        }
    }

    #[test]
    fn agree_len_alone_is_not_a_bound() {
        let g = Family::from_signs(&[
            vec![1, -1, 1, -1, 1, -1, 1, -1, 1, 1],
            vec![1, -1, 1, -1, 1, -1, 1, -1, -1, 1],
            vec![1, -1, 1, -1, 1, -1, 1, -1, -1, -1],
        ])
        .unwrap();
        let cert = pigeonhole_certificate(&g, 1).unwrap();
        assert_eq!(cert.agree_len, 8);
        let phi = cross_correlation_measure(&g, 3).unwrap().value;
        assert!(phi < cert.agree_len as u64);
        assert!(cert.implied_bound() <= phi);
    }

    #[test]
    fn too_few_rows_give_the_trivial_certificate() {
        let g = sample_family(8, 2, 1, 0).unwrap();
        let cert = pigeonhole_certificate(&g, 1).unwrap();
        assert_eq!(
            (cert.rows.len(), cert.agree_len, cert.implied_bound()),
            (0, 0, 0)
        );
    }

    #[test]
    fn gram_witnesses_replay() {
        for index in 0..10 {
            let g = sample_family(16, 6, 11, index).unwrap();
            for k in 1..=3 {
                let cert = gram_certificate(&g, k, SubsetStrategy::Distinct, 64).unwrap();
                assert_eq!(cert.subsets.len(), 6 / k);
                assert_eq!(replay(&g, &cert.witness), cert.implied_bound());
                let phi = cross_correlation_measure(&g, 2 * k).unwrap().value;
                assert!(cert.implied_bound() <= phi);

                let cert = gram_certificate(&g, k, SubsetStrategy::DisjointShifted, 8).unwrap();
                assert_eq!(cert.subsets.len(), 8);
                assert_eq!(cert.vector_len, 16 / 3);
                assert_eq!(replay(&g, &cert.witness), cert.implied_bound());
                assert!(cert.implied_bound() <= phi);
                for i in 0..8 {
                    assert_eq!(cert.gram[i][i], cert.vector_len as i64);
                    for j in 0..8 {
                        assert_eq!(cert.gram[i][j], cert.gram[j][i]);
                    }
                }
            }
        }
    }

    #[test]
    fn gram_of_identical_rows_is_saturated() {
        let row = vec![1, -1, -1, 1, 1, 1, -1, 1];
        let g = Family::from_signs(&[row.clone(), row]).unwrap();
        let cert = gram_certificate(&g, 1, SubsetStrategy::Distinct, 64).unwrap();
        assert_eq!(cert.epsilon, "1/1");
        assert_eq!(cert.implied_bound(), 8);
    }

    #[test]
    fn gram_single_sequence() {
        let g = Family::from_signs(&[vec![1, 1, 1, -1, -1, 1, -1, 1, 1]]).unwrap();
        let cert = gram_certificate(&g, 2, SubsetStrategy::DisjointShifted, 64).unwrap();
        // l = 2, M = 1: nine shifts give four disjoint pairs.
        assert_eq!((cert.vector_len, cert.subsets.len()), (1, 4));
        assert_eq!(cert.implied_bound(), 1);
        assert!(gram_certificate(&g, 1, SubsetStrategy::Distinct, 64).is_err());
        assert!(gram_certificate(&g, 5, SubsetStrategy::DisjointShifted, 64).is_err());
    }
}
