//! Monte Carlo experiments on `Phi_k` of uniformly random families.

use num_traits::ToPrimitive;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{
    cross_correlation_measure_with, evaluate_pattern, pattern_count, EngineOptions,
};
use crate::error::{Error, Result};
use crate::randstat::envelopes::{ln_biguint, ln_binomial, mcdiarmid_bound, Envelopes};
use crate::randstat::rng::{sample_family, stream_rng, AUX_STREAM};
use crate::sequence::{Family, MeasureResult, Pair, Pattern};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_EPS: f64 = 0.2;
/// Default cost ceiling per family and order, in bit operations.
pub const DEFAULT_BUDGET: f64 = 1e12;
pub const MIN_CONCENTRATION_SAMPLES: usize = 30;

const CSV_COLUMNS: [&str; 7] = [
    "index",
    "k",
    "phi",
    "phi_over_t4",
    "phi_over_conv",
    "in_t1_band",
    "below_t3",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Estimator {
    Exact,
    /// Maximum over `patterns` uniformly drawn canonical patterns; a lower
    /// bound on `Phi_k`.
    Subsample {
        patterns: u64,
    },
}

impl Estimator {
    pub fn label(&self) -> String {
        match self {
            Estimator::Exact => "exact".to_owned(),
            Estimator::Subsample { patterns } => {
                format!("pattern-subsample({patterns}), lower bound")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seq_len: usize,
    pub count: usize,
    pub orders: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub estimator: Estimator,
    pub eps: f64,
    /// Deviations probed by the concentration table; `None` means
    /// `{2k sqrt(N), 4k sqrt(N)}`.
    pub theta_grid: Option<Vec<f64>>,
    pub budget: f64,
    /// Worker threads; never affects the report.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(
        seq_len: usize,
        count: usize,
        orders: Vec<usize>,
        samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            seq_len,
            count,
            orders,
            samples,
            seed,
            estimator: Estimator::Exact,
            eps: DEFAULT_EPS,
            theta_grid: None,
            budget: DEFAULT_BUDGET,
            workers: None,
        }
    }

    fn thetas(&self, order: usize) -> Vec<f64> {
        self.theta_grid.clone().unwrap_or_else(|| {
            let unit = order as f64 * (self.seq_len as f64).sqrt();
            vec![2.0 * unit, 4.0 * unit]
        })
    }

    fn validate(&self) -> Result<()> {
        let (n, s) = (self.seq_len, self.count);
        if n == 0 || s == 0 {
            return Err(Error::domain("N >= 1 and S >= 1", format!("N={n}, S={s}")));
        }
        if self.samples == 0 {
            return Err(Error::domain("samples >= 1", "0 samples"));
        }
        if self.orders.is_empty() {
            return Err(Error::domain("at least one order", "empty order list"));
        }
        for &k in &self.orders {
            if k == 0 || k > n * s {
                return Err(Error::NoAdmissiblePattern { order: k, n, s });
            }
            let cost = match self.estimator {
                Estimator::Exact => {
                    pattern_count(n as u64, s as u64, k as u64)
                        .to_f64()
                        .unwrap_or(f64::INFINITY)
                        * n as f64
                }
                Estimator::Subsample { patterns } => patterns as f64 * n as f64,
            };
            if cost > self.budget {
                return Err(Error::BudgetExceeded {
                    cost: format!("{cost:e} bit operations per family at k={k}"),
                    budget: format!("{:e}", self.budget),
                });
            }
        }
        Ok(())
    }
}

/// One `(sample, order)` measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    pub order: usize,
    pub phi: u64,
    pub phi_over_t4: f64,
    pub phi_over_conv: f64,
    pub in_t1_band: bool,
    pub below_t3: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (divisor `n - 1`); 0 for one sample.
    pub std_dev: f64,
    pub min: u64,
    pub max: u64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
}

impl Summary {
    pub fn of(values: &[u64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let xs: Vec<f64> = sorted.iter().map(|&v| v as f64).collect();
        let (mean, std_dev) = mean_and_sd(&xs);
        Self {
            mean,
            std_dev,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            q05: quantile(&xs, 0.05),
            q25: quantile(&xs, 0.25),
            median: quantile(&xs, 0.5),
            q75: quantile(&xs, 0.75),
            q95: quantile(&xs, 0.95),
        }
    }
}

fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Linear interpolation between order statistics of sorted `xs`.
fn quantile(xs: &[f64], q: f64) -> f64 {
    let h = q * (xs.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(xs.len() - 1);
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub theta: f64,
    /// Fraction of samples with `|phi - mean| >= theta`.
    pub empirical: f64,
    pub bound: f64,
    /// Binomial standard error of the empirical fraction under a true tail
    /// probability of `min(bound, 1)`.
    pub std_error: f64,
    pub flagged: bool,
}

/// Empirical tail of `|phi - mean(phi)|` against `2 exp(-theta^2/(2k^2N))`.
/// The sample mean stands in for the unknown expectation.
pub fn concentration_check(
    values: &[u64],
    seq_len: usize,
    order: usize,
    thetas: &[f64],
) -> Result<Vec<ConcentrationRow>> {
    if values.len() < MIN_CONCENTRATION_SAMPLES {
        return Err(Error::domain(
            "at least 30 samples",
            format!("{} samples", values.len()),
        ));
    }
    let n = values.len() as f64;
    let xs: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let (mean, _) = mean_and_sd(&xs);
    Ok(thetas
        .iter()
        .map(|&theta| {
            let hits = xs.iter().filter(|&&x| (x - mean).abs() >= theta).count();
            let empirical = hits as f64 / n;
            let bound = mcdiarmid_bound(seq_len, order, theta);
            let p0 = bound.min(1.0);
            let std_error = (p0 * (1.0 - p0) / n).sqrt();
            ConcentrationRow {
                theta,
                empirical,
                bound,
                std_error,
                flagged: empirical > bound + 3.0 * std_error,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub order: usize,
    pub envelopes: Envelopes,
    pub summary: Summary,
    pub fraction_in_t1_band: f64,
    pub fraction_below_t3: f64,
    pub mean_phi_over_t4: f64,
    /// Mean of `phi / conv_norm` with its standard error.
    pub conv_ratio: RatioEstimate,
    /// Present when there are at least 30 samples.
    pub concentration: Option<Vec<ConcentrationRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub estimator: String,
    pub concentration_note: String,
    pub orders: Vec<OrderReport>,
    /// Sorted by `(index, order)`.
    pub records: Vec<SampleRecord>,
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    format_version: u32,
    config: &'a ExperimentConfig,
    estimator: &'a str,
    concentration_note: &'a str,
    orders: &'a [OrderReport],
}

impl ExperimentReport {
    pub fn order(&self, order: usize) -> Option<&OrderReport> {
        self.orders.iter().find(|o| o.order == order)
    }

    /// Summary without per-sample records.
    pub fn to_json(&self) -> String {
        let summary = JsonSummary {
            format_version: self.format_version,
            config: &self.config,
            estimator: &self.estimator,
            concentration_note: &self.concentration_note,
            orders: &self.orders,
        };
        serde_json::to_string_pretty(&summary).expect("report serializes") + "\n"
    }

    /// One row per `(sample, order)` after a versioned comment line.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# famcorr experiment csv v{}: {}\n",
            self.format_version,
            CSV_COLUMNS.join(",")
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.index.to_string(),
                r.order.to_string(),
                r.phi.to_string(),
                r.phi_over_t4.to_string(),
                r.phi_over_conv.to_string(),
                r.in_t1_band.to_string(),
                r.below_t3.to_string(),
            ])
            .expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory write");
        out.push_str(std::str::from_utf8(&body).expect("ascii csv"));
        out
    }
}

/// Samples `cfg.samples` families and measures every requested order on each.
pub fn run_distribution_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let envelopes = cfg
        .orders
        .iter()
        .map(|&k| Envelopes::new(cfg.seq_len, cfg.count, k, cfg.eps))
        .collect::<Result<Vec<_>>>()?;
    let run = || {
        (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| measure_sample(cfg, i))
            .collect::<Result<Vec<Vec<u64>>>>()
    };
    let phis = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::domain("worker pool", e.to_string()))?
            .install(run),
        None => run(),
    }?;

    let mut records = Vec::with_capacity(cfg.samples * cfg.orders.len());
    for (i, row) in phis.iter().enumerate() {
        for ((&k, env), &phi) in cfg.orders.iter().zip(&envelopes).zip(row) {
            let v = phi as f64;
            records.push(SampleRecord {
                index: i as u64,
                order: k,
                phi,
                phi_over_t4: v / env.t4_norm,
                phi_over_conv: v / env.conv_norm,
                in_t1_band: env.t1_lo < v && v < env.t1_hi,
                below_t3: v <= env.t3,
            });
        }
    }

    let orders = cfg
        .orders
        .iter()
        .zip(&envelopes)
        .enumerate()
        .map(|(j, (&k, env))| {
            let values: Vec<u64> = phis.iter().map(|row| row[j]).collect();
            let mine: Vec<&SampleRecord> = records.iter().filter(|r| r.order == k).collect();
            let n = mine.len() as f64;
            let frac =
                |f: fn(&SampleRecord) -> bool| mine.iter().filter(|r| f(r)).count() as f64 / n;
            let conv: Vec<f64> = mine.iter().map(|r| r.phi_over_conv).collect();
            let (ratio, sd) = mean_and_sd(&conv);
            let concentration = if values.len() >= MIN_CONCENTRATION_SAMPLES {
                Some(concentration_check(
                    &values,
                    cfg.seq_len,
                    k,
                    &cfg.thetas(k),
                )?)
            } else {
                None
            };
            Ok(OrderReport {
                order: k,
                envelopes: *env,
                summary: Summary::of(&values),
                fraction_in_t1_band: frac(|r| r.in_t1_band),
                fraction_below_t3: frac(|r| r.below_t3),
                mean_phi_over_t4: mine.iter().map(|r| r.phi_over_t4).sum::<f64>() / n,
                conv_ratio: RatioEstimate {
                    ratio,
                    std_error: sd / n.sqrt(),
                },
                concentration,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentReport {
        format_version: FORMAT_VERSION,
        config: cfg.clone(),
        estimator: cfg.estimator.label(),
        concentration_note: "tails are measured around the sample mean, which stands in for \
                             the expectation"
            .to_owned(),
        orders,
        records,
    })
}

/// `Phi_k` of family `index` for every configured order.
fn measure_sample(cfg: &ExperimentConfig, index: u64) -> Result<Vec<u64>> {
    let family = sample_family(cfg.seq_len, cfg.count, cfg.seed, index)?;
    match cfg.estimator {
        Estimator::Exact => cfg
            .orders
            .iter()
            .map(|&k| {
                cross_correlation_measure_with(&family, k, &EngineOptions::default())
                    .map(|(r, _)| r.value)
            })
            .collect(),
        Estimator::Subsample { patterns } => {
            let mut rng = stream_rng(cfg.seed, AUX_STREAM | index);
            cfg.orders
                .iter()
                .map(|&k| subsample_measure(&family, k, patterns, &mut rng).map(|r| r.value))
                .collect()
        }
    }
}

/// Best of `draws` canonical patterns drawn uniformly at random; a lower
/// bound on `Phi_k`.
pub fn subsample_measure(
    family: &Family,
    order: usize,
    draws: u64,
    rng: &mut impl rand::Rng,
) -> Result<MeasureResult> {
    let (n, s) = (family.seq_len(), family.count());
    if order == 0 || order > n * s {
        return Err(Error::NoAdmissiblePattern { order, n, s });
    }
    if draws == 0 {
        return Err(Error::domain("at least one draw", "0 patterns"));
    }
    // A canonical pattern with `l` zero-shift pairs is an l-subset of the
    // S zero cells plus a (k-l)-subset of the S(N-1) others.
    let (n64, s64, k64) = (n as u64, s as u64, order as u64);
    let ln_total = ln_biguint(&pattern_count(n64, s64, k64));
    let splits: Vec<usize> = (1..=s.min(order)).collect();
    let weights: Vec<f64> = splits
        .iter()
        .map(|&l| {
            let l = l as u64;
            (ln_binomial(s64, l) + ln_binomial(s64 * (n64 - 1), k64 - l) - ln_total).exp()
        })
        .collect();
    let pick = WeightedIndex::new(&weights)
        .map_err(|e| Error::domain("pattern split weights", e.to_string()))?;
    let mut best: Option<MeasureResult> = None;
    for _ in 0..draws {
        let l = splits[pick.sample(rng)];
        let mut pairs: Vec<Pair> = index::sample(rng, s, l)
            .into_iter()
            .map(|si| Pair::new(si + 1, 0))
            .collect();
        pairs.extend(
            index::sample(rng, s * (n - 1), order - l)
                .into_iter()
                .map(|c| Pair::new(c / (n - 1) + 1, c % (n - 1) + 1)),
        );
        pairs.sort_unstable();
        let pattern = Pattern::new(pairs).expect("distinct pairs with a zero shift");
        best = MeasureResult::merge_opt(best, Some(evaluate_pattern(family, &pattern)?));
    }
    Ok(best.expect("at least one draw"))
}

/// Mean of `Phi_k / sqrt(2N(k-1) ln N)` over exact measurements of seeded
/// random families, with its standard error.
pub fn expectation_ratio(
    seq_len: usize,
    count: usize,
    order: usize,
    samples: usize,
    seed: u64,
) -> Result<RatioEstimate> {
    let cfg = ExperimentConfig::new(seq_len, count, vec![order], samples, seed);
    Ok(run_distribution_experiment(&cfg)?.orders[0].conv_ratio)
}
