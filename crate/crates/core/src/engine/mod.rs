//! The fast exact evaluator.

pub mod count;
pub mod measure;
pub mod patterns;
pub mod walk;

pub use count::{binomial, pattern_count, pattern_count_by_zero_shifts};
pub use measure::{
    correlation_measure, cross_correlation_measure, cross_correlation_measure_with,
    evaluate_pattern, EngineOptions, EngineStats,
};
pub use patterns::{enumerate_patterns, PatternStream};
pub use walk::{window_max_abs, PrefixArray, WindowMax};
