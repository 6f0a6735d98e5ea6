//! Seeded random families and Monte Carlo statistics of `Phi_k`.

pub mod envelopes;
pub mod experiment;
pub mod rng;

pub use envelopes::{
    conv_norm, ln_biguint, ln_binomial, mcdiarmid_bound, t4_norm, theorem1_band, theorem2_k_range,
    theorem3_threshold, Envelopes, OrderRange, Theorem1Band,
};
pub use experiment::{
    concentration_check, expectation_ratio, run_distribution_experiment, subsample_measure,
    ConcentrationRow, Estimator, ExperimentConfig, ExperimentReport, OrderReport, RatioEstimate,
    SampleRecord, Summary, DEFAULT_BUDGET, DEFAULT_EPS, FORMAT_VERSION, MIN_CONCENTRATION_SAMPLES,
};
pub use rng::sample_family;
