//! `iml`: exact values, witnesses, and surveys of the interval covering
//! number `f(n, m)` (least `L` with `n` distinct multiples `a_i` of their
//! indices inside `(m, m + L]`).
//!
//! Exit codes: 0 success, 1 a verification failure surfaced in the
//! computed output (an inequality row that fails, a cache conflict), 2 a
//! usage error (bad arguments, guard or cap exceeded).

mod output;

use clap::{Parser, Subcommand};
use iml_core::{
    bounds_ratios, chain_report, compose_witness, composed_len, exhaustive_max_with_cap,
    brute_force_f_with_guard, hall_check_with_guard, sampled_max, solve_f, verify_witness,
    AnalysisError, ResultStore, SearchError, SearchReport, SolveCache, SolveResultRecord,
    StoreError, DEFAULT_BACKTRACK_GUARD, DEFAULT_HALL_GUARD, DEFAULT_RESIDUE_CAP,
};
use output::{Cell, OutputFormat, Table};
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(
    name = "iml",
    version,
    about = "Exact solver and survey tools for the interval covering number f(n, m)"
)]
struct Cli {
    /// Result cache file (created on first use)
    #[arg(long, global = true, env = "IML_CACHE", value_name = "FILE")]
    cache: Option<PathBuf>,

    /// Output format; defaults to json for `f` and csv for table commands
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Suppress the CSV invocation comment (timestamped, so not reproducible)
    #[arg(long, global = true)]
    no_meta: bool,

    /// Worker threads for parallel commands (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance exactly: value, witness, minimality certificate
    F {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    /// Evaluate every residue class mod lcm(1..=n) and report the maximum
    Scan {
        #[arg(long)]
        n: u64,
        /// Refuse residue spaces larger than this
        #[arg(long, default_value_t = DEFAULT_RESIDUE_CAP)]
        cap: u64,
    },
    /// Seeded stochastic search for a residue with large f(n, m)
    Hunt {
        #[arg(long)]
        n: u64,
        /// Number of exact evaluations to spend
        #[arg(long, default_value_t = 500)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify the rescaling inequality with witnesses over an (n, k) grid
    Lemma1 {
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        k_max: u64,
    },
    /// Evaluate the five-link residue-gap chain at one n
    Chain {
        #[arg(long)]
        n: u64,
    },
    /// Measure f(n, n) against its asymptotic envelopes
    Bounds {
        /// Comma-separated list of n values
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
    },
    /// Independent reference oracles (exponential, guarded by n)
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
    /// Cache maintenance
    Cache {
        #[command(subcommand)]
        op: CacheOp,
    },
}

#[derive(Subcommand)]
enum OracleOp {
    /// Backtracking search for f(n, m), no shared code with the solver
    F {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        /// Largest n the oracle will accept
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Subset feasibility check for the interval (m, m + len]
    Hall {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        len: u64,
        #[arg(long)]
        guard: Option<u64>,
    },
}

#[derive(Subcommand)]
enum CacheOp {
    /// Union two cache shards into one sorted file, rejecting conflicts
    Merge {
        /// First shard
        a: PathBuf,
        /// Second shard
        b: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

enum RunError {
    /// Bad invocation or refused workload: exit 2.
    Usage(String),
    /// The computation ran and surfaced a failure: exit 1.
    Failure(String),
}

impl From<StoreError> for RunError {
    fn from(e: StoreError) -> Self {
        RunError::Failure(e.to_string())
    }
}

impl From<AnalysisError> for RunError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::UnsupportedN { .. } => RunError::Usage(e.to_string()),
            other => RunError::Failure(other.to_string()),
        }
    }
}

struct CommandResult {
    table: Table,
    default_format: OutputFormat,
    /// Set when the report itself contains a failed check; the report is
    /// still written, then the process exits 1.
    violation: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(RunError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| RunError::Failure(format!("thread pool: {e}")))?;
    }

    let cache = match &cli.cache {
        Some(path) => SolveCache::with_store(ResultStore::open(path)?),
        None => SolveCache::ephemeral(),
    };

    let result = dispatch(&cli.command, &cache)?;

    let format = cli.format.unwrap_or(result.default_format);
    let meta = if cli.no_meta {
        None
    } else {
        Some(meta_line())
    };
    let text = result.table.render(format, meta.as_deref());
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| RunError::Failure(format!("writing {}: {e}", path.display())))?,
        None => print!("{text}"),
    }

    match result.violation {
        Some(msg) => Err(RunError::Failure(msg)),
        None => Ok(()),
    }
}

/// Invocation context for the CSV comment line.
fn meta_line() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("iml {} | unix-time {}", args.join(" "), stamp)
}

fn require(cond: bool, msg: &str) -> Result<(), RunError> {
    if cond {
        Ok(())
    } else {
        Err(RunError::Usage(msg.into()))
    }
}

fn dispatch(command: &Command, cache: &SolveCache) -> Result<CommandResult, RunError> {
    match command {
        Command::F { n, m } => {
            require(*n >= 1, "--n must be at least 1")?;
            cmd_f(*n, *m, cache)
        }
        Command::Scan { n, cap } => {
            require(*n >= 1, "--n must be at least 1")?;
            require(*cap >= 1, "--cap must be at least 1")?;
            cmd_scan(*n, *cap, cache)
        }
        Command::Hunt { n, budget, seed } => {
            require(*n >= 1, "--n must be at least 1")?;
            require(*budget >= 1, "--budget must be at least 1")?;
            cmd_hunt(*n, *budget, *seed, cache)
        }
        Command::Lemma1 { n_max, k_max } => {
            require(*n_max >= 1, "--n-max must be at least 1")?;
            require(*k_max >= 1, "--k-max must be at least 1")?;
            cmd_lemma1(*n_max, *k_max, cache)
        }
        Command::Chain { n } => {
            require(*n >= 3, "--n must be at least 3 for the gap parameters")?;
            cmd_chain(*n, cache)
        }
        Command::Bounds { n_list } => {
            require(!n_list.is_empty(), "--n-list needs at least one value")?;
            require(
                n_list.iter().all(|&n| n >= 3),
                "--n-list entries must be at least 3",
            )?;
            cmd_bounds(n_list, cache)
        }
        Command::Oracle { op } => cmd_oracle(op),
        Command::Cache { op } => cmd_cache_op(op),
    }
}

fn cmd_f(n: u64, m: u64, cache: &SolveCache) -> Result<CommandResult, RunError> {
    let result = solve_f(n, m);
    let f = result.f_value;
    verify_witness(n, m, f, &result.witness)
        .map_err(|e| RunError::Failure(format!("solver witness failed verification: {e}")))?;
    if !result.certificate.verify(n, m, f - 1) {
        return Err(RunError::Failure(
            "minimality certificate failed verification".into(),
        ));
    }
    cache.record(n, m, f)?;
    let record = SolveResultRecord::from(&result);
    let join = |xs: &[u64]| {
        xs.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    let table = Table {
        headers: vec!["n", "m", "f", "witness", "violator"],
        rows: vec![vec![
            Cell::Int(record.n),
            Cell::Int(record.m),
            Cell::Int(record.f),
            Cell::Text(join(&record.witness)),
            Cell::Text(join(&record.violator)),
        ]],
        json: serde_json::to_value(&record).expect("record serializes"),
    };
    Ok(CommandResult {
        table,
        default_format: OutputFormat::Json,
        violation: None,
    })
}

#[derive(Serialize)]
struct SearchRow {
    n: u64,
    strategy: String,
    best_m: u64,
    best_f: u64,
    f_nn: u64,
    gap: i64,
    evaluations: u64,
    seed: u64,
}

fn search_table(report: &SearchReport, cache: &SolveCache) -> Result<Table, RunError> {
    let f_nn = cache.f_value(report.n, report.n)?;
    let row = SearchRow {
        n: report.n,
        strategy: report.strategy.to_string(),
        best_m: report.best_m,
        best_f: report.best_f,
        f_nn,
        gap: report.best_f as i64 - f_nn as i64,
        evaluations: report.evaluations,
        seed: report.seed,
    };
    Ok(Table {
        headers: vec![
            "n",
            "strategy",
            "best_m",
            "best_f",
            "f_nn",
            "gap",
            "evaluations",
            "seed",
        ],
        rows: vec![vec![
            Cell::Int(row.n),
            Cell::Text(row.strategy.clone()),
            Cell::Int(row.best_m),
            Cell::Int(row.best_f),
            Cell::Int(row.f_nn),
            Cell::Signed(row.gap),
            Cell::Int(row.evaluations),
            Cell::Int(row.seed),
        ]],
        json: serde_json::to_value(&row).expect("row serializes"),
    })
}

fn cmd_scan(n: u64, cap: u64, cache: &SolveCache) -> Result<CommandResult, RunError> {
    let report = exhaustive_max_with_cap(n, cap, cache).map_err(|e| match e {
        SearchError::ResidueSpaceExceedsCap { .. } => RunError::Usage(e.to_string()),
        SearchError::Store(inner) => RunError::Failure(inner.to_string()),
    })?;
    Ok(CommandResult {
        table: search_table(&report, cache)?,
        default_format: OutputFormat::Csv,
        violation: None,
    })
}

fn cmd_hunt(n: u64, budget: u64, seed: u64, cache: &SolveCache) -> Result<CommandResult, RunError> {
    let report = sampled_max(n, budget, seed, cache)
        .map_err(|e| RunError::Failure(e.to_string()))?;
    Ok(CommandResult {
        table: search_table(&report, cache)?,
        default_format: OutputFormat::Csv,
        violation: None,
    })
}

#[derive(Serialize)]
struct LemmaRow {
    n: u64,
    k: u64,
    lhs: u64,
    rhs: u64,
    holds: bool,
    witness_ok: bool,
}

fn cmd_lemma1(n_max: u64, k_max: u64, cache: &SolveCache) -> Result<CommandResult, RunError> {
    let grid: Vec<(u64, u64)> = (1..=n_max)
        .flat_map(|n| (1..=k_max).map(move |k| (n, k)))
        .collect();
    let rows: Vec<LemmaRow> = grid
        .par_iter()
        .map(|&(n, k)| -> Result<LemmaRow, RunError> {
            let k2n = k
                .checked_mul(k)
                .and_then(|kk| kk.checked_mul(n))
                .ok_or_else(|| RunError::Usage(format!("k^2*n overflows at n={n}, k={k}")))?;
            let kn = k * n;
            let inner = solve_f(n, k2n);
            cache.record(n, k2n, inner.f_value)?;
            let lhs = kn + cache.f_value(kn, kn)?;
            let rhs = k2n + inner.f_value;
            let witness_ok = match compose_witness(k, n, inner.f_value, &inner.witness) {
                Ok(composed) => {
                    let len = composed_len(k, n, inner.f_value);
                    verify_witness(kn, kn, len, &composed).is_ok()
                }
                Err(_) => false,
            };
            Ok(LemmaRow {
                n,
                k,
                lhs,
                rhs,
                holds: lhs <= rhs,
                witness_ok,
            })
        })
        .collect::<Result<_, _>>()?;

    let bad = rows.iter().filter(|r| !r.holds || !r.witness_ok).count();
    let table = Table {
        headers: vec!["n", "k", "lhs", "rhs", "holds", "witness_ok"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Int(r.n),
                    Cell::Int(r.k),
                    Cell::Int(r.lhs),
                    Cell::Int(r.rhs),
                    Cell::Bool(r.holds),
                    Cell::Bool(r.witness_ok),
                ]
            })
            .collect(),
        json: serde_json::to_value(&rows).expect("rows serialize"),
    };
    Ok(CommandResult {
        table,
        default_format: OutputFormat::Csv,
        violation: (bad > 0).then(|| format!("{bad} grid row(s) failed verification")),
    })
}

fn cmd_chain(n: u64, cache: &SolveCache) -> Result<CommandResult, RunError> {
    let links = chain_report(n, cache)?;
    let table = Table {
        headers: vec!["link", "lhs", "rhs", "holds"],
        rows: links
            .iter()
            .map(|l| {
                vec![
                    Cell::Text(l.name.to_string()),
                    l.lhs.map_or(Cell::Empty, Cell::Float),
                    Cell::Float(l.rhs),
                    Cell::Bool(l.holds),
                ]
            })
            .collect(),
        json: serde_json::to_value(&links).expect("links serialize"),
    };
    Ok(CommandResult {
        table,
        default_format: OutputFormat::Csv,
        violation: None,
    })
}

fn cmd_bounds(ns: &[u64], cache: &SolveCache) -> Result<CommandResult, RunError> {
    let rows = bounds_ratios(ns, cache)?;
    let table = Table {
        headers: vec![
            "n",
            "f_nn",
            "lower_env",
            "upper_env",
            "ratio_lower",
            "ratio_upper",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Int(r.n),
                    Cell::Int(r.f_nn),
                    Cell::Float(r.lower_env),
                    Cell::Float(r.upper_env),
                    Cell::Float(r.ratio_lower),
                    Cell::Float(r.ratio_upper),
                ]
            })
            .collect(),
        json: serde_json::to_value(&rows).expect("rows serialize"),
    };
    Ok(CommandResult {
        table,
        default_format: OutputFormat::Csv,
        violation: None,
    })
}

fn cmd_oracle(op: &OracleOp) -> Result<CommandResult, RunError> {
    match op {
        OracleOp::F { n, m, guard } => {
            require(*n >= 1, "--n must be at least 1")?;
            let f = brute_force_f_with_guard(*n, *m, guard.unwrap_or(DEFAULT_BACKTRACK_GUARD))
                .map_err(|e| RunError::Usage(e.to_string()))?;
            let json = serde_json::json!({ "n": n, "m": m, "f": f });
            Ok(CommandResult {
                table: Table {
                    headers: vec!["n", "m", "f"],
                    rows: vec![vec![Cell::Int(*n), Cell::Int(*m), Cell::Int(f)]],
                    json,
                },
                default_format: OutputFormat::Csv,
                violation: None,
            })
        }
        OracleOp::Hall { n, m, len, guard } => {
            require(*n >= 1, "--n must be at least 1")?;
            let feasible = hall_check_with_guard(*n, *m, *len, guard.unwrap_or(DEFAULT_HALL_GUARD))
                .map_err(|e| RunError::Usage(e.to_string()))?;
            let json = serde_json::json!({ "n": n, "m": m, "len": len, "feasible": feasible });
            Ok(CommandResult {
                table: Table {
                    headers: vec!["n", "m", "len", "feasible"],
                    rows: vec![vec![
                        Cell::Int(*n),
                        Cell::Int(*m),
                        Cell::Int(*len),
                        Cell::Bool(feasible),
                    ]],
                    json,
                },
                default_format: OutputFormat::Csv,
                violation: None,
            })
        }
    }
}

fn cmd_cache_op(op: &CacheOp) -> Result<CommandResult, RunError> {
    match op {
        CacheOp::Merge { a, b, out } => {
            let records = iml_core::store::merge_files(a, b, out)?;
            let json = serde_json::json!({ "records": records, "out": out.display().to_string() });
            Ok(CommandResult {
                table: Table {
                    headers: vec!["records", "out"],
                    rows: vec![vec![
                        Cell::Int(records as u64),
                        Cell::Text(out.display().to_string()),
                    ]],
                    json,
                },
                default_format: OutputFormat::Csv,
                violation: None,
            })
        }
    }
}
