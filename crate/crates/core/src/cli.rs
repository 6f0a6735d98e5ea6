//! The `famcorr` command line.
//!
//! Exit codes: 0 success, 2 usage, parse, I/O or domain error, 3 no
//! admissible pattern for the requested order, 4 budget refusal.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::engine::{cross_correlation_measure_with, EngineOptions};
use crate::error::{Error, Result};
use crate::extremal::{
    alternating_sequence, digit_construction, even_min_bound, exhaustive_min, gram_certificate,
    odd_min_bounds, pigeonhole_certificate, rank_inequality_check, ScaledMatrix, SearchOptions,
    SubsetStrategy, DEFAULT_MAX_SUBSETS, DEFAULT_NODE_BUDGET,
};
use crate::format::{read_family_file, write_family};
use crate::oracle::cross_correlation_measure_naive;
use crate::randstat::{
    run_distribution_experiment, sample_family, Estimator, ExperimentConfig, DEFAULT_BUDGET,
    DEFAULT_EPS, FORMAT_VERSION,
};
use crate::sequence::{Family, MeasureResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser)]
#[command(
    name = "famcorr",
    version,
    about = "Correlation measures of binary sequence families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Phi_k (or C_k) of a family or sequence file
    Compute(ComputeArgs),
    /// Distribution of Phi_k over seeded random families
    Experiment(ExperimentArgs),
    /// Write a seeded random family
    Sample(SampleArgs),
    /// Write an explicit family with small odd-order measures
    Construct(ConstructArgs),
    /// Proven minimum of Phi_k over small injective families
    Minimize(MinimizeArgs),
    /// Closed-form bounds on the minimum of Phi_k
    Bound(BoundArgs),
    /// Certified lower bound on Phi_k of a family
    Certify(CertifyArgs),
}

#[derive(Args)]
#[group(id = "input", required = true, multiple = false)]
struct InputArgs {
    /// Family file, one row per line
    #[arg(long, group = "input")]
    family: Option<PathBuf>,
    /// Single-sequence file
    #[arg(long, group = "input")]
    sequence: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self) -> Result<Family> {
        match (&self.family, &self.sequence) {
            (Some(path), _) => read_family_file(path),
            (None, Some(path)) => {
                let family = read_family_file(path)?;
                if family.count() != 1 {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!(
                            "{}: expected one sequence, found {}",
                            path.display(),
                            family.count()
                        ),
                    });
                }
                Ok(family)
            }
            (None, None) => unreachable!("clap requires an input"),
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    order: usize,
    /// Use the brute-force definition instead of the fast engine
    #[arg(long)]
    naive: bool,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    /// Orders, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Deviations for the concentration table, comma separated
    #[arg(long, value_delimiter = ',')]
    theta_grid: Option<Vec<f64>>,
    /// Estimate each measure from this many random patterns (a lower bound)
    #[arg(long)]
    subsample: Option<u64>,
    /// Largest accepted cost in bit operations per family and order
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: f64,
    #[arg(long)]
    workers: Option<usize>,
    /// Write <PREFIX>.csv and <PREFIX>.json instead of printing
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
    /// What to print when --out is absent
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    seed: u64,
    /// Sample index within the seed's stream family
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Digit,
    Alternating,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, value_enum, default_value = "digit")]
    kind: Construction,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MinimizeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    order: usize,
    /// Explore the whole tree
    #[arg(long)]
    no_prune: bool,
    /// Largest accepted tree size in nodes
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Also write the optimal family here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    order: usize,
    /// Require an even order
    #[arg(long, conflicts_with = "odd")]
    even: bool,
    /// Require an odd order
    #[arg(long)]
    odd: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Distinct,
    DisjointShifted,
}

impl From<StrategyArg> for SubsetStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Distinct => SubsetStrategy::Distinct,
            StrategyArg::DisjointShifted => SubsetStrategy::DisjointShifted,
        }
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Odd orders use the prefix certificate, even orders the Gram one
    #[arg(long)]
    order: usize,
    #[arg(long, value_enum, default_value = "disjoint-shifted")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = DEFAULT_MAX_SUBSETS)]
    max_subsets: usize,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoAdmissiblePattern { .. } => EXIT_INFEASIBLE,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Domain { .. } | Error::Parse { .. } | Error::Io { .. } => EXIT_USAGE,
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Experiment(a) => experiment(a),
        Command::Sample(a) => sample(a),
        Command::Construct(a) => construct(a),
        Command::Minimize(a) => minimize(a),
        Command::Bound(a) => bound(a),
        Command::Certify(a) => certify(a),
    };
    match result {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "famcorr: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "famcorr: {e}");
            exit_code(&e)
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Writes to `path` when given, otherwise returns the text for stdout.
fn emit(path: Option<&Path>, contents: String) -> Result<String> {
    match path {
        Some(p) => write_file(p, &contents).map(|()| String::new()),
        None => Ok(contents),
    }
}

fn compute(a: ComputeArgs) -> Result<String> {
    let family = a.input.load()?;
    let result = if a.naive {
        cross_correlation_measure_naive(&family, a.order)?
    } else {
        let options = EngineOptions {
            workers: a.workers,
            ..EngineOptions::default()
        };
        cross_correlation_measure_with(&family, a.order, &options)?.0
    };
    let MeasureResult {
        value,
        pattern,
        window,
    } = &result;
    let method = if a.naive { "naive" } else { "engine" };
    if a.json {
        return Ok(to_json(&json!({
            "format_version": FORMAT_VERSION,
            "n": family.seq_len(),
            "s": family.count(),
            "order": a.order,
            "method": method,
            "value": value,
            "pattern": pattern,
            "window": window,
        })));
    }
    if a.csv {
        let columns = ["n", "s", "order", "method", "value", "pattern", "m1", "m2"];
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(columns).expect("in-memory write");
        w.write_record([
            family.seq_len().to_string(),
            family.count().to_string(),
            a.order.to_string(),
            method.to_owned(),
            value.to_string(),
            pattern.to_string(),
            window.0.to_string(),
            window.1.to_string(),
        ])
        .expect("in-memory write");
        let body = String::from_utf8(w.into_inner().expect("in-memory write")).expect("ascii");
        return Ok(format!(
            "# famcorr compute csv v{FORMAT_VERSION}: {}\n{body}",
            columns.join(",")
        ));
    }
    Ok(format!(
        "value {value}\npattern {pattern}\nwindow {} {}\n",
        window.0, window.1
    ))
}

fn experiment(a: ExperimentArgs) -> Result<String> {
    let mut cfg = ExperimentConfig::new(a.n, a.s, a.k, a.samples, a.seed);
    cfg.eps = a.eps;
    cfg.theta_grid = a.theta_grid;
    cfg.budget = a.budget;
    cfg.workers = a.workers;
    if let Some(patterns) = a.subsample {
        cfg.estimator = Estimator::Subsample { patterns };
    }
    let report = run_distribution_experiment(&cfg)?;
    match a.out {
        Some(prefix) => {
            let with_ext = |ext: &str| {
                let mut p = prefix.clone().into_os_string();
                p.push(ext);
                PathBuf::from(p)
            };
            write_file(&with_ext(".csv"), &report.to_csv())?;
            write_file(&with_ext(".json"), &report.to_json())?;
            Ok(String::new())
        }
        None => Ok(match a.format {
            ReportFormat::Json => report.to_json(),
            ReportFormat::Csv => report.to_csv(),
        }),
    }
}

fn sample(a: SampleArgs) -> Result<String> {
    let family = sample_family(a.n, a.s, a.seed, a.index)?;
    emit(a.out.as_deref(), write_family(&family))
}

fn construct(a: ConstructArgs) -> Result<String> {
    let family = match a.kind {
        Construction::Digit => digit_construction(a.n, a.s)?,
        Construction::Alternating => {
            if a.s != 1 {
                return Err(Error::domain(
                    "S = 1 for the alternating sequence",
                    format!("S={}", a.s),
                ));
            }
            Family::singleton(alternating_sequence(a.n)?)
        }
    };
    emit(a.out.as_deref(), write_family(&family))
}

fn minimize(a: MinimizeArgs) -> Result<String> {
    let options = SearchOptions {
        node_budget: a.budget,
        prune: !a.no_prune,
        workers: a.workers,
    };
    let found = exhaustive_min(a.n, a.s, a.order, &options)?;
    if let Some(path) = &a.out {
        write_file(path, &write_family(&found.argmin))?;
    }
    let rows: Vec<String> = found
        .argmin
        .rows()
        .iter()
        .map(ToString::to_string)
        .collect();
    Ok(to_json(&json!({
        "format_version": FORMAT_VERSION,
        "n": a.n,
        "s": a.s,
        "order": a.order,
        "min": found.min_value,
        "optima_up_to_symmetry": found.optima,
        "argmin": rows,
        "witness": found.witness,
        "pruned": options.prune,
    })))
}

fn bound(a: BoundArgs) -> Result<String> {
    let even = a.order.is_multiple_of(2);
    if a.order < 2 || (a.even && !even) || (a.odd && even) {
        return Err(Error::domain(
            "order >= 2 with the requested parity",
            format!("order={}", a.order),
        ));
    }
    let k = a.order / 2;
    let head = json!({
        "format_version": FORMAT_VERSION,
        "n": a.n,
        "s": a.s,
        "order": a.order,
        "k": k,
    });
    let body = if even {
        let b = even_min_bound(a.n, a.s, k)?;
        json!({
            "parity": "even",
            "branch": b.branch.label(),
            "branch_value": b.branch_value,
            "baseline": b.baseline,
            "bound": b.bound,
            "baseline_dominates": b.baseline_dominates,
        })
    } else {
        let b = odd_min_bounds(a.n, a.s, k)?;
        json!({ "parity": "odd", "lower": b.lower, "upper": b.upper })
    };
    Ok(to_json(&merge(head, body)))
}

fn certify(a: CertifyArgs) -> Result<String> {
    let family = a.input.load()?;
    if a.order < 2 {
        return Err(Error::domain("order >= 2", format!("order={}", a.order)));
    }
    let k = a.order / 2;
    let head = json!({
        "format_version": FORMAT_VERSION,
        "n": family.seq_len(),
        "s": family.count(),
        "order": a.order,
    });
    let body = if a.order % 2 == 1 {
        let cert = pigeonhole_certificate(&family, k)?;
        json!({
            "kind": "prefix",
            "implied_bound": cert.implied_bound(),
            "certificate": cert,
        })
    } else {
        let cert = gram_certificate(&family, k, a.strategy.into(), a.max_subsets)?;
        let matrix = ScaledMatrix::new(cert.gram.clone(), cert.vector_len as u64)?;
        let rank = rank_inequality_check(&matrix)?;
        json!({
            "kind": "gram",
            "implied_bound": cert.implied_bound(),
            "certificate": cert,
            "rank": rank,
        })
    };
    Ok(to_json(&merge(head, body)))
}

fn merge(mut head: serde_json::Value, body: serde_json::Value) -> serde_json::Value {
    if let (Some(h), serde_json::Value::Object(b)) = (head.as_object_mut(), body) {
        h.extend(b);
    }
    head
}
