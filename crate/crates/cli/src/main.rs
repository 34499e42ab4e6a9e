//! `ks1`: generate graphs, run the matching pipeline, run experiments, verify matchings.
//!
//! Exit codes: 0 success, 2 validation failure, 3 anomaly or threshold exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ks1_core::analysis::{analyze, histogram_csv};
use ks1_core::configmodel::{sample_no_loops, DegreeSequence, DEFAULT_MAX_RETRIES};
use ks1_core::harness::{
    default_omega, exp_deficit, exp_drift, exp_hybrid, exp_oracle, exp_scaling, run_pipeline, ExperimentReport, Mode,
    Params, StopLabel,
};
use ks1_core::io::{parse_degree_sequence, EdgeList, MatchingFile};
use ks1_core::rng::from_seed;

const EXIT_VALIDATION: u8 = 2;
const EXIT_ANOMALY: u8 = 3;

#[derive(Parser)]
#[command(name = "ks1", version, about = "Karp-Sipser matching on random {3,4}-degree multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a loop-free configuration multigraph and write it as an edge list.
    Generate {
        #[arg(long, required_unless_present = "degrees")]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        deg4_frac: f64,
        /// Degree-sequence file (one degree per line) instead of --n/--deg4-frac.
        #[arg(long, conflicts_with = "n")]
        degrees: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run REDUCE + CONSTRUCT on an edge list.
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = RunMode::Full)]
        mode: RunMode,
        /// Snapshot window for hybrid mode; defaults to ceil(n^(2/3)).
        #[arg(long)]
        omega: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        matching_out: Option<PathBuf>,
        /// Write the action trace in its text form.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Write the hyperaction histogram as CSV (full mode).
        #[arg(long)]
        histogram_out: Option<PathBuf>,
    },
    /// Run a seeded experiment and write its JSON report.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        deg4_frac: f64,
        #[arg(long)]
        omega: Option<usize>,
        /// Comma-separated sizes for `scaling`; defaults to n and 4n.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Hyperaction histogram CSV (drift only).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check a matching file against an edge list.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        matching: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RunMode {
    Full,
    Hybrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Deficit,
    Hybrid,
    Scaling,
    Drift,
    Oracle,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn generate(n: Option<usize>, deg4_frac: f64, degrees: Option<PathBuf>, seed: u64, out: &Path) -> Result<u8> {
    let (d, adjusted) = match degrees {
        Some(path) => (parse_degree_sequence(&read(&path)?)?, false),
        None => DegreeSequence::with_deg4_fraction(n.unwrap_or(0), deg4_frac)?,
    };
    let n = d.len();
    let sample = sample_no_loops(&d, &mut from_seed(seed), DEFAULT_MAX_RETRIES)?;
    let fours = d.as_slice().iter().filter(|&&x| x == 4).count();
    write(out, &EdgeList::from_graph_pairs(n, sample.pairs.clone()).to_text())?;
    let summary = serde_json::json!({
        "n": n,
        "m": sample.pairs.len(),
        "degree4": fours,
        "degree_adjusted": adjusted,
        "retries": sample.retries,
    });
    println!("{summary}");
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run(
    input: &Path,
    mode: RunMode,
    omega: Option<usize>,
    seed: u64,
    matching_out: Option<PathBuf>,
    trace_out: Option<PathBuf>,
    histogram_out: Option<PathBuf>,
) -> Result<u8> {
    let edges = EdgeList::parse(&read(input)?)?;
    let g = edges.to_graph()?;
    let mode = match mode {
        RunMode::Full => Mode::Full,
        RunMode::Hybrid => Mode::Hybrid { omega: omega.unwrap_or_else(|| default_omega(edges.n)) },
    };
    let out = run_pipeline(&g, &mut from_seed(seed), mode)?;
    if !out.identity_holds {
        bail!("deficiency identity failed on recheck");
    }
    if let Some(path) = matching_out {
        let pairs = out.pairs.iter().map(|&(a, b)| (a.index(), b.index())).collect();
        let file = MatchingFile { kappa: out.kappa, r0: out.ledger.r0, r2b: out.ledger.r2b, pairs };
        write(&path, &file.to_text())?;
    }
    if let Some(path) = trace_out {
        write(&path, &out.trace.to_text())?;
    }
    if let Some(path) = histogram_out {
        if !matches!(mode, Mode::Full) {
            bail!("--histogram-out needs --mode full");
        }
        let a = analyze(&g, &out.trace, 0)?;
        write(&path, &histogram_csv(&a.histogram()))?;
    }
    let stop = StopLabel::from(out.trace.stop);
    let summary = serde_json::json!({
        "n": edges.n,
        "kappa": out.kappa,
        "r0": out.ledger.r0,
        "r2b": out.ledger.r2b,
        "kappa_j": out.ledger.kappa_j,
        "matching_size": out.matching.len(),
        "actions": out.trace.actions.len(),
        "stop": stop,
        "timings": out.timings,
    });
    println!("{summary}");
    Ok(if out.trace.stop.is_anomaly() { EXIT_ANOMALY } else { 0 })
}

fn experiment(kind: ExperimentKind, mut params: Params, json: Option<PathBuf>, csv: Option<PathBuf>) -> Result<u8> {
    let report: ExperimentReport = match kind {
        ExperimentKind::Deficit => exp_deficit(&params)?,
        ExperimentKind::Hybrid => exp_hybrid(&params)?,
        ExperimentKind::Oracle => exp_oracle(&params)?,
        ExperimentKind::Drift => exp_drift(&params)?,
        ExperimentKind::Scaling => {
            if params.sizes.is_empty() {
                params.sizes = vec![params.n, 4 * params.n];
            }
            exp_scaling(&params)?
        }
    };
    match json {
        Some(path) => write(&path, &report.to_json())?,
        None => println!("{}", report.to_json()),
    }
    if let Some(path) = csv {
        write(&path, &report.histogram_csv())?;
    }
    for c in &report.aggregates.checks {
        let verdict = match (c.applicable, c.passed) {
            (false, _) => "n/a",
            (true, true) => "ok",
            (true, false) => "FAILED",
        };
        eprintln!("{}: {} (threshold {}) {verdict}", c.name, c.value, c.threshold);
    }
    if report.aggregates.identity_violations > 0 {
        return Ok(EXIT_VALIDATION);
    }
    Ok(if report.passed() { 0 } else { EXIT_ANOMALY })
}

fn verify(input: &Path, matching: &Path) -> Result<u8> {
    let edges = EdgeList::parse(&read(input)?)?;
    let m = MatchingFile::parse(&read(matching)?)?;
    m.verify(&edges)?;
    println!("ok: {} pairs, kappa={}", m.pairs.len(), m.kappa);
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Generate { n, deg4_frac, degrees, seed, out } => generate(n, deg4_frac, degrees, seed, &out),
        Command::Run { input, mode, omega, seed, matching_out, trace_out, histogram_out } => {
            run(&input, mode, omega, seed, matching_out, trace_out, histogram_out)
        }
        Command::Experiment { kind, n, trials, seed, deg4_frac, omega, sizes, json, csv } => {
            let params = Params { n, trials, seed, deg4_frac, omega, sizes };
            experiment(kind, params, json, csv)
        }
        Command::Verify { input, matching } => verify(&input, &matching),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
