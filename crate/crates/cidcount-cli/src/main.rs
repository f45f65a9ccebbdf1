//! Command line harness around the `cidcount` estimators.
//!
//! Five subcommands cover the workflow end to end: `gen` writes random
//! instances, `rough` runs the coarse scale ladder, `exact` certifies
//! bounded counts, `estimate` runs the full pipeline, and `verify-claims`
//! re-measures the statistical guarantees those estimators advertise.
//! Reports go to stdout (or `--out`) as JSON or CSV; identical invocations
//! render byte-identical reports. Set `CIDCOUNT_LOG=info` (or `trace`, which
//! also logs every accepted guess vector) for progress on stderr.

mod claims;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cidcount::coarse::{coarse_band, rough_estimation, RoughConfig, RoughEstimate};
use cidcount::exact::{exact_count, ExactVerdict};
use cidcount::hypergraph::{generate_random, generate_skewed, Hypergraph, PartedTuple, VertexSet};
use cidcount::oracle::{OracleHandle, QueryLedger, SimulationConfig};
use cidcount::pipeline::{estimate, EstimateReport, FallbackPolicy, PipelineConfig, StepKind};
use cidcount::{Error, Result};

use claims::ClaimClass;
use report::{
    emit, mean_stdev, render, Aggregate, Format, InstanceSummary, Report, TraceRow, TrialRow,
};

#[derive(Parser)]
#[command(
    name = "cidcount",
    version,
    about = "Count hyperedges through a colorful-independence decision oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it to disk.
    Gen(GenArgs),
    /// Run the coarse scale ladder and report per-trial estimates.
    Rough(RoughArgs),
    /// Certify whether a restriction holds at most `tau` ordered edges.
    Exact(ExactArgs),
    /// Estimate the edge count with the full pipeline.
    Estimate(EstimateArgs),
    /// Re-measure the statistical guarantees behind the estimators.
    VerifyClaims(VerifyClaimsArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Universe size.
    #[arg(long)]
    n: u32,
    /// Edge arity.
    #[arg(long)]
    d: usize,
    /// Number of edges to place.
    #[arg(long)]
    m: u64,
    /// Generator seed; required so instances stay reproducible.
    #[arg(long)]
    seed: u64,
    /// Skew exponent for a heavy-tailed degree profile; omit for uniform.
    #[arg(long)]
    skew: Option<f64>,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RoughArgs {
    /// Instance file to load.
    instance: PathBuf,
    /// Base seed; trial t runs with seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CliPreset::Desk)]
    preset: CliPreset,
    /// Independent ladder runs.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    #[arg(long, value_enum, default_value_t = CliOracle::Exact)]
    oracle: CliOracle,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    /// Instance file to load.
    instance: PathBuf,
    /// Restriction to count inside: "full" or groups like "2x0-3;1x4-6"
    /// (multiplicity x vertex ranges, disjoint across groups).
    #[arg(long, default_value = "full")]
    parts: String,
    /// Count threshold to certify against.
    #[arg(long)]
    tau: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CliOracle::Exact)]
    oracle: CliOracle,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Instance file to load.
    instance: PathBuf,
    /// Relative error target, strictly between 0 and 1.
    #[arg(long)]
    eps: f64,
    /// Base seed; trial t runs with seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CliPreset::Desk)]
    preset: CliPreset,
    /// Independent estimation runs.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    #[arg(long, value_enum, default_value_t = CliFallback::Auto)]
    fallback: CliFallback,
    #[arg(long, value_enum, default_value_t = CliOracle::Exact)]
    oracle: CliOracle,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyClaimsArgs {
    /// Which suite to run.
    #[arg(long, value_enum, default_value_t = ClaimClass::All)]
    class: ClaimClass,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override each suite's default trial count.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    trials: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliPreset {
    /// Bench-scale constants that exercise every pipeline step.
    Desk,
    /// The formally justified schedule; astronomically conservative.
    Paper,
}

impl CliPreset {
    fn name(self) -> &'static str {
        match self {
            CliPreset::Desk => "desk",
            CliPreset::Paper => "paper",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliOracle {
    /// Answer relaxed query flavors from the instance directly.
    Exact,
    /// Simulate relaxed flavors with base-oracle queries (one-sided error).
    Simulated,
}

impl CliOracle {
    fn name(self) -> &'static str {
        match self {
            CliOracle::Exact => "exact",
            CliOracle::Simulated => "simulated",
        }
    }

    fn config(self, d: usize, n: u32) -> SimulationConfig {
        match self {
            CliOracle::Exact => SimulationConfig::exact(),
            CliOracle::Simulated => SimulationConfig::simulated(d, n),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliFallback {
    /// Brute-force only when it is cheaper or the target is unattainable.
    Auto,
    /// Always run the pipeline.
    Pipeline,
    /// Always enumerate candidates with singleton queries.
    Brute,
}

impl CliFallback {
    fn name(self) -> &'static str {
        match self {
            CliFallback::Auto => "auto",
            CliFallback::Pipeline => "pipeline",
            CliFallback::Brute => "brute",
        }
    }

    fn policy(self) -> FallbackPolicy {
        match self {
            CliFallback::Auto => FallbackPolicy::Auto,
            CliFallback::Pipeline => FallbackPolicy::PipelineOnly,
            CliFallback::Brute => FallbackPolicy::BruteForceOnly,
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

/// Log level comes from `CIDCOUNT_LOG`: quiet (default), info, or trace.
fn init_logging() {
    let level = match std::env::var("CIDCOUNT_LOG").as_deref() {
        Ok("info") => log::LevelFilter::Info,
        Ok("trace") => log::LevelFilter::Trace,
        Ok("quiet") | Err(_) => log::LevelFilter::Off,
        Ok(other) => {
            eprintln!("warning: unknown CIDCOUNT_LOG level `{other}`, defaulting to quiet");
            log::LevelFilter::Off
        }
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Rough(args) => cmd_rough(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::VerifyClaims(args) => cmd_verify_claims(args),
    }
}

fn load(path: &Path) -> Result<Hypergraph> {
    let h = Hypergraph::load(path)?;
    log::info!(
        "loaded {}: arity {}, {} vertices, {} edges",
        path.display(),
        h.d(),
        h.n(),
        h.m()
    );
    Ok(h)
}

fn summarize(path: &Path, h: &Hypergraph) -> InstanceSummary {
    InstanceSummary {
        path: path.display().to_string(),
        d: h.d(),
        n: h.n(),
        m: h.m(),
        m_ordered: h.m_ordered(),
    }
}

fn cmd_gen(args: GenArgs) -> Result<bool> {
    let h = match args.skew {
        Some(skew) => generate_skewed(args.n, args.d, args.m, skew, args.seed)?,
        None => generate_random(args.n, args.d, args.m, args.seed)?,
    };
    h.store(&args.out)?;
    println!(
        "wrote {}: arity {}, {} vertices, {} edges",
        args.out.display(),
        h.d(),
        h.n(),
        h.m()
    );
    Ok(true)
}

#[derive(serde::Serialize)]
struct RoughSpec {
    command: &'static str,
    instance: String,
    seed: u64,
    preset: &'static str,
    trials: u32,
    oracle: &'static str,
}

fn cmd_rough(args: RoughArgs) -> Result<bool> {
    let h = load(&args.instance)?;
    let rough = match args.preset {
        CliPreset::Desk => RoughConfig::desk(h.d(), h.n())?,
        CliPreset::Paper => RoughConfig::paper(h.d(), h.n())?,
    };
    let (band_lo, band_hi) = coarse_band(h.d(), h.n(), h.m_ordered());
    let empty = h.m_ordered() == 0;

    let mut ledger = QueryLedger::default();
    let mut rows = Vec::with_capacity(args.trials as usize);
    let mut found = Vec::new();
    let mut hits = 0u32;
    for trial in 0..args.trials {
        let seed = args.seed.wrapping_add(trial as u64);
        let mut oracle = OracleHandle::new(&h, args.oracle.config(h.d(), h.n()), seed);
        let row = match rough_estimation(&mut oracle, &rough)? {
            RoughEstimate::Found { m_hat_o, r_hat } => {
                let hit = band_lo <= m_hat_o && m_hat_o <= band_hi;
                found.push(m_hat_o);
                hits += hit as u32;
                TrialRow {
                    trial,
                    trial_seed: seed,
                    outcome: "found".into(),
                    value: Some(m_hat_o),
                    rung_log2: Some(r_hat.ilog2()),
                    band_lo: Some(band_lo),
                    band_hi: Some(band_hi),
                    band_hit: Some(hit),
                    queries: oracle.ledger().total(),
                    ..Default::default()
                }
            }
            RoughEstimate::NotFound => {
                // the right answer on an empty instance, a miss otherwise
                hits += empty as u32;
                TrialRow {
                    trial,
                    trial_seed: seed,
                    outcome: "not_found".into(),
                    band_lo: Some(band_lo),
                    band_hi: Some(band_hi),
                    band_hit: Some(empty),
                    queries: oracle.ledger().total(),
                    ..Default::default()
                }
            }
        };
        rows.push(row);
        ledger.merge(oracle.ledger());
    }

    let (mean, stdev) = mean_stdev(&found);
    let report = Report {
        config: RoughSpec {
            command: "rough",
            instance: args.instance.display().to_string(),
            seed: args.seed,
            preset: args.preset.name(),
            trials: args.trials,
            oracle: args.oracle.name(),
        },
        instance_summary: Some(summarize(&args.instance, &h)),
        per_trial: rows,
        aggregate: Aggregate {
            mean,
            stdev,
            band_hit_rate: hits as f64 / args.trials as f64,
        },
        ledger: (&ledger).into(),
    };
    emit(&render(&report, args.format), args.out.as_deref())?;
    Ok(true)
}

#[derive(serde::Serialize)]
struct ExactSpec {
    command: &'static str,
    instance: String,
    parts: String,
    tau: u64,
    seed: u64,
    oracle: &'static str,
}

fn cmd_exact(args: ExactArgs) -> Result<bool> {
    let h = load(&args.instance)?;
    let tuple = parse_parts(&args.parts, h.d(), h.n())?;
    let mut oracle = OracleHandle::new(&h, args.oracle.config(h.d(), h.n()), args.seed);
    let result = exact_count(&mut oracle, &tuple, args.tau)?;
    let (outcome, value) = match result.verdict {
        ExactVerdict::AtMost(count) => ("at_most", Some(count as f64)),
        ExactVerdict::Exceeds => ("exceeds", None),
    };
    log::info!(
        "verdict {} after {} tree nodes, {} queries",
        outcome,
        result.nodes,
        oracle.ledger().total()
    );

    let row = TrialRow {
        trial: 0,
        trial_seed: args.seed,
        outcome: outcome.into(),
        value,
        nodes: Some(result.nodes),
        queries: oracle.ledger().total(),
        ..Default::default()
    };
    let report = Report {
        config: ExactSpec {
            command: "exact",
            instance: args.instance.display().to_string(),
            parts: args.parts.clone(),
            tau: args.tau,
            seed: args.seed,
            oracle: args.oracle.name(),
        },
        instance_summary: Some(summarize(&args.instance, &h)),
        per_trial: vec![row],
        aggregate: Aggregate {
            mean: value.unwrap_or(0.0),
            stdev: 0.0,
            band_hit_rate: value.is_some() as u32 as f64,
        },
        ledger: oracle.ledger().into(),
    };
    emit(&render(&report, args.format), args.out.as_deref())?;
    Ok(true)
}

#[derive(serde::Serialize)]
struct EstimateSpec {
    command: &'static str,
    instance: String,
    eps: f64,
    seed: u64,
    preset: &'static str,
    trials: u32,
    fallback: &'static str,
    oracle: &'static str,
}

fn cmd_estimate(args: EstimateArgs) -> Result<bool> {
    let h = load(&args.instance)?;
    let mut config = match args.preset {
        CliPreset::Desk => PipelineConfig::desk(h.d(), h.n(), args.eps)?,
        CliPreset::Paper => PipelineConfig::paper(h.d(), h.n(), args.eps)?,
    };
    config.fallback = args.fallback.policy();
    let truth = h.m() as f64;

    let mut ledger = QueryLedger::default();
    let mut rows = Vec::with_capacity(args.trials as usize);
    let mut values = Vec::new();
    let mut hits = 0u32;
    for trial in 0..args.trials {
        let seed = args.seed.wrapping_add(trial as u64);
        let mut oracle = OracleHandle::new(&h, args.oracle.config(h.d(), h.n()), seed);
        let row = match estimate(&mut oracle, &config) {
            Ok(run) => {
                // against an empty instance the error is reported absolutely
                let rel = (run.m_hat - truth).abs() / truth.max(1.0);
                let hit = rel <= args.eps;
                hits += hit as u32;
                values.push(run.m_hat);
                TrialRow {
                    trial,
                    trial_seed: seed,
                    outcome: "estimate".into(),
                    value: Some(run.m_hat),
                    relative_error: Some(rel),
                    band_hit: Some(hit),
                    iterations: Some(run.iterations),
                    fallback_used: Some(run.fallback_used),
                    queries: oracle.ledger().total(),
                    trace: Some(trace_rows(&run)),
                    ..Default::default()
                }
            }
            // a run that exhausts its iteration cap is reported as a miss
            Err(Error::IterationCap { .. }) => TrialRow {
                trial,
                trial_seed: seed,
                outcome: "iteration_cap".into(),
                band_hit: Some(false),
                queries: oracle.ledger().total(),
                trace: Some(Vec::new()),
                ..Default::default()
            },
            Err(other) => return Err(other),
        };
        rows.push(row);
        ledger.merge(oracle.ledger());
    }

    let (mean, stdev) = mean_stdev(&values);
    let report = Report {
        config: EstimateSpec {
            command: "estimate",
            instance: args.instance.display().to_string(),
            eps: args.eps,
            seed: args.seed,
            preset: args.preset.name(),
            trials: args.trials,
            fallback: args.fallback.name(),
            oracle: args.oracle.name(),
        },
        instance_summary: Some(summarize(&args.instance, &h)),
        per_trial: rows,
        aggregate: Aggregate {
            mean,
            stdev,
            band_hit_rate: hits as f64 / args.trials as f64,
        },
        ledger: (&ledger).into(),
    };
    emit(&render(&report, args.format), args.out.as_deref())?;
    Ok(true)
}

fn trace_rows(run: &EstimateReport) -> Vec<TraceRow> {
    run.trace
        .iter()
        .map(|record| TraceRow {
            step: match record.step {
                StepKind::Init => "init",
                StepKind::Drained => "drained",
                StepKind::Sparsified => "sparsified",
                StepKind::Subsampled => "subsampled",
            },
            psi: record.psi,
            population: record.population as u64,
            est_proxy: record.est_proxy,
            importance_scales: record.importance_scales.clone(),
        })
        .collect()
}

#[derive(serde::Serialize)]
struct ClaimsSpec {
    command: &'static str,
    class: &'static str,
    seed: u64,
    trials: Option<u32>,
}

fn cmd_verify_claims(args: VerifyClaimsArgs) -> Result<bool> {
    let outcome = claims::run_class(args.class, args.seed, args.trials)?;
    let passed = outcome.rows.iter().filter(|row| row.pass).count();
    let all_pass = passed == outcome.rows.len();
    let pass_rate = passed as f64 / outcome.rows.len().max(1) as f64;

    let report = Report {
        config: ClaimsSpec {
            command: "verify-claims",
            class: args.class.name(),
            seed: args.seed,
            trials: args.trials,
        },
        instance_summary: None,
        per_trial: outcome.rows,
        aggregate: Aggregate {
            mean: pass_rate,
            stdev: 0.0,
            band_hit_rate: pass_rate,
        },
        ledger: (&outcome.ledger).into(),
    };
    emit(&render(&report, args.format), args.out.as_deref())?;
    Ok(all_pass)
}

/// Parse a restriction such as "2x0-3;1x4-6" into a parted tuple over the
/// instance's universe: `;`-separated groups of `<multiplicity>x<ranges>`,
/// ranges being comma-separated vertices or inclusive `a-b` spans. The
/// special value "full" places the whole universe in one part of
/// multiplicity `d`.
fn parse_parts(spec: &str, d: usize, n: u32) -> Result<PartedTuple> {
    if spec == "full" {
        return Ok(PartedTuple::uniform(n, d));
    }
    let mut parts = Vec::new();
    for (i, group) in spec.split(';').enumerate() {
        let bad = |reason: String| Error::Parameter {
            name: "parts",
            reason: format!("group {}: {}", i + 1, reason),
        };
        let (mult, ranges) = group
            .split_once('x')
            .ok_or_else(|| bad("expected <multiplicity>x<ranges>".into()))?;
        let mult: u32 = mult
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad multiplicity `{}`", mult.trim())))?;
        let mut set = VertexSet::empty(n);
        for range in ranges.split(',') {
            let range = range.trim();
            let (lo, hi) = match range.split_once('-') {
                Some((lo, hi)) => (lo.trim(), hi.trim()),
                None => (range, range),
            };
            let lo: u32 = lo.parse().map_err(|_| bad(format!("bad vertex `{lo}`")))?;
            let hi: u32 = hi.parse().map_err(|_| bad(format!("bad vertex `{hi}`")))?;
            if lo > hi || hi >= n {
                return Err(bad(format!("range {lo}-{hi} outside the universe 0..{n}")));
            }
            for v in lo..=hi {
                set.insert(v);
            }
        }
        parts.push((set, mult));
    }
    let tuple = PartedTuple::new(parts)?;
    if tuple.arity() as usize != d {
        return Err(Error::Parameter {
            name: "parts",
            reason: format!(
                "multiplicities sum to {}, instance arity is {}",
                tuple.arity(),
                d
            ),
        });
    }
    Ok(tuple)
}
