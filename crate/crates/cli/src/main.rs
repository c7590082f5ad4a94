//! `persym` — census, closed-form and oracle tools for stacked persymmetric
//! GF(2) matrices, with machine-readable reports.
//!
//! Every subcommand prints one JSON report to stdout (see [`report`]) and
//! exits 0 when all checks pass, 1 on a mathematical mismatch, 2 on a usage
//! error or closed-form coverage gap, and 3 when a computation would exceed
//! its work budget.

mod report;

use clap::{Parser, Subcommand, ValueEnum};
use persym_core::engine::{census_with_budget, EngineError, RankDistribution, DEFAULT_BUDGET_LOG2};
use persym_core::fit::{
    fit_rank_polynomial, solve_moment_system, FitConflict, FitError, FitOutcome, MomentSystemError,
};
use persym_core::formulas::{
    from_closed_forms, gamma6_fixed_n, gamma_closed, gamma_poly_with_source, r_formula,
    verify_distribution, FormulaError,
};
use persym_core::oracle::{
    count_kernel_with_budget, count_naive_with_budget, OracleError, KERNEL_BUDGET_LOG2,
    NAIVE_BUDGET_LOG2,
};
use persym_core::rational::rat;
use report::{gamma_csv, gamma_strings, rational, CheckLine, Report, ShardMeta, SystemMeta};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "persym",
    version,
    about = "Exact rank censuses, closed-form tables and solution-count oracles \
             for stacks of 2xk persymmetric GF(2) matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank every parameter tuple in (a shard of) the space and report the
    /// histogram.
    Census {
        /// Number of 2-row blocks.
        #[arg(long)]
        n: usize,
        /// Columns per block.
        #[arg(long)]
        k: usize,
        /// Split the index space into this many contiguous shards.
        #[arg(long, default_value_t = 1)]
        shards: u64,
        /// Which shard to scan.
        #[arg(long, default_value_t = 0)]
        shard_index: u64,
        /// Refuse shards wider than 2^this tuples.
        #[arg(long, default_value_t = DEFAULT_BUDGET_LOG2)]
        budget_log2: u32,
        /// Also write the histogram as CSV (header `i,gamma`).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the closed-form count of rank-i parameter tuples.
    Formula {
        /// Rank whose count to evaluate.
        #[arg(long)]
        i: usize,
        /// Number of 2-row blocks.
        #[arg(long)]
        n: usize,
        /// Columns per block.
        #[arg(long)]
        k: usize,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Census the space and check it against every applicable closed form
    /// and moment identity.
    Verify {
        /// Number of 2-row blocks.
        #[arg(long, required_unless_present = "from", conflicts_with = "from")]
        n: Option<usize>,
        /// Columns per block.
        #[arg(long, required_unless_present = "from", conflicts_with = "from")]
        k: Option<usize>,
        /// Re-check a previously saved census report instead of rescanning.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Refuse censuses wider than 2^this tuples.
        #[arg(long, default_value_t = DEFAULT_BUDGET_LOG2)]
        budget_log2: u32,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count solutions of the degree-bounded bilinear system with q unknowns.
    Rqnk {
        /// Number of polynomial unknowns.
        #[arg(long)]
        q: u32,
        /// Number of 2-row blocks (system equations).
        #[arg(long)]
        n: usize,
        /// Degree bound: unknowns have degree below k.
        #[arg(long)]
        k: usize,
        /// How to obtain the count.
        #[arg(long, value_enum)]
        method: Method,
        /// Override the method's default work budget (log2 of the loop count).
        #[arg(long)]
        budget_log2: Option<u32>,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive table rows from identities instead of transcribing them.
    Fit {
        #[command(subcommand)]
        what: FitWhat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Scaled moment of the closed-form histogram.
    Formula,
    /// Scaled moment of a freshly scanned census.
    Census,
    /// Kernel-dimension sum over all coefficient matrices.
    Kernel,
    /// Plain enumeration of every assignment.
    Naive,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Formula => "formula",
            Method::Census => "census",
            Method::Kernel => "kernel",
            Method::Naive => "naive",
        }
    }
}

#[derive(Subcommand)]
enum FitWhat {
    /// Solve the weighted-moment system for the three highest k=9 histogram
    /// rows.
    Moments {
        /// Only k=9 carries enough identities; other values are rejected.
        #[arg(long, default_value_t = 9)]
        k: usize,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interpolate the rank-i polynomial in Y = 2^n from per-n counts.
    ///
    /// Counts come from censuses for every n whose space fits the budget;
    /// for rank 6 the fixed-n closed forms fill in beyond that.
    Samples {
        /// Rank whose polynomial to fit.
        #[arg(long)]
        i: usize,
        /// Columns per block.
        #[arg(long)]
        k: usize,
        /// Largest block count to sample.
        #[arg(long)]
        max_n: usize,
        /// Y-values where the polynomial must vanish, comma separated.
        #[arg(long, value_delimiter = ',')]
        roots: Vec<i64>,
        /// Pin the leading coefficient instead of solving for it.
        #[arg(long)]
        leading: Option<i64>,
        /// Interpolation degree; defaults to i.
        #[arg(long)]
        degree: Option<usize>,
        /// Refuse sample censuses wider than 2^this tuples.
        #[arg(long, default_value_t = DEFAULT_BUDGET_LOG2)]
        budget_log2: u32,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Everything a finished subcommand hands back to `main`.
struct Outcome {
    report: Report,
    exit_code: i32,
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum AppError {
    Engine(EngineError),
    Formula(FormulaError),
    Oracle(OracleError),
    Moment(MomentSystemError),
    Fit(FitError),
    Io(std::io::Error),
    Input(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Engine(e) => fmt::Display::fmt(e, f),
            AppError::Formula(e) => fmt::Display::fmt(e, f),
            AppError::Oracle(e) => fmt::Display::fmt(e, f),
            AppError::Moment(e) => fmt::Display::fmt(e, f),
            AppError::Fit(e) => fmt::Display::fmt(e, f),
            AppError::Io(e) => fmt::Display::fmt(e, f),
            AppError::Input(msg) => f.write_str(msg),
        }
    }
}

macro_rules! from_error {
    ($variant:ident, $ty:ty) => {
        impl From<$ty> for AppError {
            fn from(e: $ty) -> Self {
                AppError::$variant(e)
            }
        }
    };
}

from_error!(Engine, EngineError);
from_error!(Formula, FormulaError);
from_error!(Oracle, OracleError);
from_error!(Moment, MomentSystemError);
from_error!(Fit, FitError);
from_error!(Io, std::io::Error);

fn engine_code(e: &EngineError) -> i32 {
    match e {
        EngineError::BudgetExceeded { .. } => 3,
        _ => 2,
    }
}

fn formula_code(e: &FormulaError) -> i32 {
    match e {
        // The transcribed sources or a supposed count contradicting exact
        // arithmetic is a mathematical failure, not a usage problem.
        FormulaError::SourceConflict { .. }
        | FormulaError::NotACount { .. }
        | FormulaError::NotAnIntegerCount { .. } => 1,
        FormulaError::Uncovered { .. } | FormulaError::Incomplete { .. } => 2,
        FormulaError::Engine(e) => engine_code(e),
    }
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Engine(e) => engine_code(e),
            AppError::Formula(e) => formula_code(e),
            AppError::Oracle(OracleError::BudgetExceeded { .. }) => 3,
            AppError::Oracle(OracleError::Domain { .. }) => 2,
            AppError::Moment(MomentSystemError::Inconsistent(_)) => 1,
            AppError::Moment(MomentSystemError::Formula(e)) => formula_code(e),
            AppError::Fit(_) => 2,
            AppError::Io(_) | AppError::Input(_) => 2,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli.command) {
        Ok(mut outcome) => {
            outcome.report.elapsed_ms = started.elapsed().as_millis();
            let text = outcome.report.to_json();
            if let Some(path) = &outcome.out {
                if let Err(e) = fs::write(path, format!("{text}\n")) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    process::exit(2);
                }
            }
            // A closed pipe (`persym ... | head`) is normal usage, not an
            // error; anything else failing on stdout is.
            if let Err(e) = writeln!(io::stdout(), "{text}") {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: cannot write report: {e}");
                    process::exit(2);
                }
            }
            process::exit(outcome.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.exit_code());
        }
    }
}

fn run(command: Command) -> Result<Outcome, AppError> {
    match command {
        Command::Census {
            n,
            k,
            shards,
            shard_index,
            budget_log2,
            csv,
            out,
        } => run_census(n, k, shards, shard_index, budget_log2, csv, out),
        Command::Formula { i, n, k, out } => run_formula(i, n, k, out),
        Command::Verify {
            n,
            k,
            from,
            budget_log2,
            out,
        } => run_verify(n, k, from, budget_log2, out),
        Command::Rqnk {
            q,
            n,
            k,
            method,
            budget_log2,
            out,
        } => run_rqnk(q, n, k, method, budget_log2, out),
        Command::Fit { what } => match what {
            FitWhat::Moments { k, out } => run_fit_moments(k, out),
            FitWhat::Samples {
                i,
                k,
                max_n,
                roots,
                leading,
                degree,
                budget_log2,
                out,
            } => run_fit_samples(i, k, max_n, roots, leading, degree, budget_log2, out),
        },
    }
}

fn shard_meta(dist: &RankDistribution, count: u64, index: u64) -> ShardMeta {
    ShardMeta {
        count,
        index,
        tuples_scanned: dist.tuples_scanned.to_string(),
    }
}

fn run_census(
    n: usize,
    k: usize,
    shards: u64,
    shard_index: u64,
    budget_log2: u32,
    csv: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<Outcome, AppError> {
    let dist = census_with_budget(n, k, shards, shard_index, budget_log2)?;
    let mut rep = Report::new("census");
    rep.param("n", n)
        .param("k", k)
        .param("budget_log2", budget_log2);
    rep.gamma = Some(gamma_strings(&dist));
    rep.shards = Some(shard_meta(&dist, shards, shard_index));
    if let Some(path) = csv {
        fs::write(path, gamma_csv(&dist))?;
    }
    Ok(Outcome {
        report: rep,
        exit_code: 0,
        out,
    })
}

fn run_formula(i: usize, n: usize, k: usize, out: Option<PathBuf>) -> Result<Outcome, AppError> {
    let (_, coverage) = gamma_poly_with_source(i, k)?;
    let value = gamma_closed(i, n, k)?;
    let mut rep = Report::new("formula");
    rep.param("i", i).param("n", n).param("k", k);
    rep.value = Some(value.to_string());
    rep.source = Some(coverage.describe().to_string());
    Ok(Outcome {
        report: rep,
        exit_code: 0,
        out,
    })
}

fn run_verify(
    n: Option<usize>,
    k: Option<usize>,
    from: Option<PathBuf>,
    budget_log2: u32,
    out: Option<PathBuf>,
) -> Result<Outcome, AppError> {
    let dist = match &from {
        Some(path) => {
            report::parse_census_report(&fs::read_to_string(path)?).map_err(AppError::Input)?
        }
        // clap guarantees n and k are present when --from is absent.
        None => census_with_budget(n.unwrap(), k.unwrap(), 1, 0, budget_log2)?,
    };
    let verdict = verify_distribution(&dist)?;

    let mut rep = Report::new("verify");
    rep.param("n", dist.n).param("k", dist.k);
    if let Some(path) = &from {
        rep.param("from", path.display().to_string());
    }
    rep.gamma = Some(gamma_strings(&dist));
    rep.checks = verdict.checks.iter().map(CheckLine::from).collect();
    if verdict.has_gaps() {
        rep.uncovered = Some(verdict.uncovered.clone());
    }
    rep.outcome = Some(
        if !verdict.all_ok() {
            "mismatch"
        } else if verdict.has_gaps() {
            "passed-with-gaps"
        } else {
            "passed"
        }
        .to_string(),
    );
    let exit_code = if !verdict.all_ok() {
        1
    } else if verdict.has_gaps() {
        2
    } else {
        0
    };
    Ok(Outcome {
        report: rep,
        exit_code,
        out,
    })
}

fn run_rqnk(
    q: u32,
    n: usize,
    k: usize,
    method: Method,
    budget_log2: Option<u32>,
    out: Option<PathBuf>,
) -> Result<Outcome, AppError> {
    let mut rep = Report::new("rqnk");
    rep.param("q", q)
        .param("n", n)
        .param("k", k)
        .param("method", method.name());
    let value = match method {
        Method::Formula => r_formula(q, &from_closed_forms(n, k)?)?,
        Method::Census => {
            let budget = budget_log2.unwrap_or(DEFAULT_BUDGET_LOG2);
            let dist = census_with_budget(n, k, 1, 0, budget)?;
            rep.shards = Some(shard_meta(&dist, 1, 0));
            r_formula(q, &dist)?
        }
        Method::Kernel => {
            count_kernel_with_budget(q, n, k, budget_log2.unwrap_or(KERNEL_BUDGET_LOG2))?
        }
        Method::Naive => {
            count_naive_with_budget(q, n, k, budget_log2.unwrap_or(NAIVE_BUDGET_LOG2))?
        }
    };
    rep.value = Some(value.to_string());
    Ok(Outcome {
        report: rep,
        exit_code: 0,
        out,
    })
}

fn run_fit_moments(k: usize, out: Option<PathBuf>) -> Result<Outcome, AppError> {
    if k != 9 {
        return Err(AppError::Input(format!(
            "the weighted-moment system is only available for k=9, got k={k}"
        )));
    }
    let sol = solve_moment_system()?;
    let mut rep = Report::new("fit-moments");
    rep.param("k", k);
    rep.system = Some(SystemMeta {
        rows: sol.rows,
        cols: sol.cols,
        rank: sol.rank,
        unique: sol.unique,
    });
    rep.solved = Some(
        sol.coefficients
            .iter()
            .map(|(&(rank, exponent), v)| report::SolvedCoefficient {
                rank,
                exponent,
                value: rational(v),
            })
            .collect(),
    );
    rep.polynomials = Some(
        sol.polynomials
            .iter()
            .map(|p| p.coeffs().iter().map(rational).collect())
            .collect(),
    );
    rep.outcome = Some(
        if sol.unique {
            "unique"
        } else {
            "underdetermined"
        }
        .to_string(),
    );
    Ok(Outcome {
        report: rep,
        exit_code: if sol.unique { 0 } else { 1 },
        out,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_fit_samples(
    i: usize,
    k: usize,
    max_n: usize,
    roots: Vec<i64>,
    leading: Option<i64>,
    degree: Option<usize>,
    budget_log2: u32,
    out: Option<PathBuf>,
) -> Result<Outcome, AppError> {
    let degree = degree.unwrap_or(i);
    let mut samples = Vec::new();
    for n in 0..=max_n {
        match census_with_budget(n, k, 1, 0, budget_log2) {
            Ok(dist) => samples.push((n, dist.gamma.get(i).cloned().unwrap_or_default())),
            Err(e @ EngineError::BudgetExceeded { .. }) => {
                // Beyond the census budget only rank 6 has fixed-n closed
                // forms to fall back on.
                let fallback = (i == 6).then(|| gamma6_fixed_n(n, k)).and_then(Result::ok);
                match fallback {
                    Some(v) => samples.push((n, v.into_inner())),
                    None => return Err(e.into()),
                }
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut rep = Report::new("fit-samples");
    rep.param("i", i)
        .param("k", k)
        .param("max_n", max_n)
        .param("degree", degree)
        .param("roots", roots.clone());
    if let Some(c) = leading {
        rep.param("leading", c);
    }

    let outcome = fit_rank_polynomial(&samples, degree, &roots, leading.map(rat))?;
    let exit_code = match &outcome {
        FitOutcome::Fitted(p) => {
            rep.coefficients = Some(p.coeffs().iter().map(rational).collect());
            rep.outcome = Some("fitted".to_string());
            0
        }
        FitOutcome::Underdetermined { free_dim } => {
            rep.free_dim = Some(*free_dim);
            rep.outcome = Some("underdetermined".to_string());
            2
        }
        FitOutcome::Inconsistent(conflict) => {
            rep.conflict = Some(match conflict {
                FitConflict::RootClash { n, value } => {
                    format!("sample at n={n} sits on a forced root but counts {value}")
                }
                FitConflict::System(_) => {
                    "samples contradict each other; certificate available".to_string()
                }
            });
            rep.outcome = Some("inconsistent".to_string());
            1
        }
    };
    Ok(Outcome {
        report: rep,
        exit_code,
        out,
    })
}
