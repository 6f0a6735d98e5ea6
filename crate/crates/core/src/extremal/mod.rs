//! Extremal questions: explicit constructions, closed-form bounds,
//! certificates, rank inequalities and exhaustive minima.

pub mod bounds;
pub mod certificate;
pub mod construct;
pub mod rank;
pub mod search;

pub use bounds::{even_min_bound, odd_min_bounds, EvenBound, EvenBranch, OddBounds};
pub use certificate::{
    gram_certificate, pigeonhole_certificate, pigeonhole_guarantee, GramCertificate,
    PigeonholeCertificate, SubsetStrategy, DEFAULT_MAX_SUBSETS,
};
pub use construct::{alternating_sequence, digit_construction};
pub use rank::{
    exact_rank, numerical_rank, rank_inequality_check, RankInequality, RankMethod, RankReport,
    ScaledMatrix,
};
pub use search::{
    exhaustive_min, search_tree_size, ExhaustiveMin, SearchOptions, DEFAULT_NODE_BUDGET,
};
