//! Experiment harness: `simulate`, `histogram` and `query` subcommands.
//!
//! CSV schema for `simulate` (fixed column set):
//! `seed,scheme,n,sigma,budget_bytes,k,metric,value`: one row per
//! (seed, scheme, metric) plus one `mean` row per (scheme, metric),
//! averaged across seeds. Identical configuration and seeds produce
//! byte-identical output.

mod config;

pub use config::{DatasetKind, Overrides, RunSettings};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qdigest::oracle::FrequencyVector;
use qdigest::{DigestConfig, QDigest};

use crate::datasets;
use crate::netsim::{
    self, budget_to_compression_factor, residual_power, run_aggregation, tuple_bytes,
    ExperimentReport, RootSummary, Scheme,
};

#[derive(Parser)]
#[command(
    name = "qdsim",
    about = "Sensor-network aggregation experiments with q-digest summaries",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run aggregation experiments and emit per-seed metrics as CSV.
    Simulate(SimulateArgs),
    /// Compare an equi-width histogram from the root digest with the exact one.
    Histogram(HistogramArgs),
    /// Answer queries from a saved digest file, without the sensor data.
    Query(QueryArgs),
}

/// Flags shared by the experiment commands; any flag overrides the same key
/// in `--config`.
#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Key-value config file (`key = value` lines, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of sensors, base station included.
    #[arg(long)]
    nodes: Option<usize>,
    /// Maximum sensor value.
    #[arg(long)]
    sigma: Option<u64>,
    /// Per-message byte budget for the q-digest scheme.
    #[arg(long)]
    budget: Option<u64>,
    /// Compression factor; overrides the budget-derived value.
    #[arg(long)]
    k: Option<u64>,
    /// Reading source: uniform | grid.
    #[arg(long)]
    dataset: Option<String>,
    /// Elevation grid file (required for --dataset grid).
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Comma-separated topology seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Comma-separated schemes: qdigest, list.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Comma-separated quantile fractions to evaluate.
    #[arg(long, value_delimiter = ',')]
    quantiles: Option<Vec<f64>>,
    /// Sensor density in nodes per unit area.
    #[arg(long)]
    density: Option<f64>,
    /// Radio range in area units.
    #[arg(long)]
    radio_range: Option<f64>,
    /// Initial battery charge in power units.
    #[arg(long)]
    initial_power: Option<f64>,
    /// Power units drained per transmitted byte.
    #[arg(long)]
    power_per_byte: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Save the first q-digest run's root digest to this file.
    #[arg(long)]
    save_digest: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HistogramArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of equi-width value buckets.
    #[arg(long, default_value_t = 32)]
    buckets: u64,
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// Saved digest file.
    #[arg(long)]
    digest: PathBuf,
    /// Compression factor the digest was built with (not stored on the wire).
    #[arg(long)]
    k: u64,
    /// Quantile fractions to answer.
    #[arg(long = "quantile")]
    quantiles: Vec<f64>,
    /// Values whose rank to estimate.
    #[arg(long = "rank")]
    ranks: Vec<u64>,
    /// Value ranges `low:high` to count.
    #[arg(long = "range", value_parser = parse_range)]
    ranges: Vec<(u64, u64)>,
    /// Consensus fractions to answer.
    #[arg(long = "consensus")]
    consensus: Vec<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point for the `qdsim` binary.
pub fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
        Command::Histogram(args) => histogram(args),
        Command::Query(args) => query(args),
    }
}

fn resolve_settings(common: &CommonArgs) -> Result<RunSettings> {
    let file = match &common.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let flags = Overrides {
        nodes: common.nodes,
        sigma: common.sigma,
        budget: common.budget,
        k: common.k,
        dataset: common.dataset.clone(),
        grid: common.grid.clone(),
        seeds: common.seeds.clone(),
        schemes: common.schemes.clone(),
        quantiles: common.quantiles.clone(),
        density: common.density,
        radio_range: common.radio_range,
        initial_power: common.initial_power,
        power_per_byte: common.power_per_byte,
    };
    file.merged(flags).resolve()
}

/// Budget and compression factor actually used for a run: either can be
/// given, the other is derived.
fn resolve_budget(settings: &RunSettings) -> Result<(u64, u64)> {
    let per_tuple = tuple_bytes(settings.sigma, settings.nodes as u64);
    match (settings.k, settings.budget) {
        (Some(k), Some(budget)) => Ok((budget, k)),
        (Some(k), None) => Ok((3 * k * per_tuple, k)),
        (None, Some(budget)) => Ok((
            budget,
            budget_to_compression_factor(budget, settings.sigma, settings.nodes as u64)?,
        )),
        (None, None) => unreachable!("resolve() always sets a budget"),
    }
}

/// One seed's worth of inputs, shared by every scheme so the comparison is
/// like for like.
struct SeedRun {
    tree: netsim::RoutingTree,
    readings: Vec<u64>,
    regenerations: u32,
}

/// Readings get their own stream so they stay decoupled from placement.
const READINGS_SALT: u64 = 0x5EED_DA7A_0F00_D515;

fn prepare_seed(
    settings: &RunSettings,
    grid: Option<&datasets::ElevationGrid>,
    seed: u64,
) -> Result<SeedRun> {
    let topology =
        netsim::generate_topology(settings.nodes, settings.density, settings.radio_range, seed)?;
    let tree = netsim::bfs_tree(&topology, 0)?;
    let readings = match grid {
        None => datasets::uniform_readings(settings.nodes, settings.sigma, seed ^ READINGS_SALT),
        Some(grid) => datasets::terrain_readings(grid, &topology),
    };
    Ok(SeedRun {
        tree,
        readings,
        regenerations: topology.regenerations(),
    })
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let settings = resolve_settings(&args.common)?;
    let (budget, k) = resolve_budget(&settings)?;
    let config = DigestConfig::new(settings.sigma, k)?;
    let grid = load_grid_if_needed(&settings)?;

    let mut csv = String::from("seed,scheme,n,sigma,budget_bytes,k,metric,value\n");
    let mut means: Vec<((Scheme, String), f64)> = Vec::new();
    let mut saved_digest: Option<Vec<u8>> = None;

    for &seed in &settings.seeds {
        let run = prepare_seed(&settings, grid.as_ref(), seed)?;
        for &scheme in &settings.schemes {
            let report = run_aggregation(
                &run.tree,
                &run.readings,
                config,
                scheme,
                &settings.quantiles,
            )?;
            if scheme == Scheme::QDigest && saved_digest.is_none() {
                if let RootSummary::Digest(d) = &report.root_summary {
                    saved_digest = Some(d.encode());
                }
            }
            let metrics = collect_metrics(&settings, &report, run.regenerations);
            for (metric, value) in &metrics {
                writeln!(
                    csv,
                    "{seed},{},{},{},{budget},{k},{metric},{}",
                    scheme.name(),
                    settings.nodes,
                    settings.sigma,
                    format_metric(*value)
                )
                .expect("writing to a String");
                accumulate(&mut means, (scheme, metric.clone()), *value);
            }
        }
    }

    let seeds = settings.seeds.len() as f64;
    for ((scheme, metric), sum) in means {
        writeln!(
            csv,
            "mean,{},{},{},{budget},{k},{metric},{:.6}",
            scheme.name(),
            settings.nodes,
            settings.sigma,
            sum / seeds
        )
        .expect("writing to a String");
    }

    if let Some(path) = &args.save_digest {
        let bytes = saved_digest
            .ok_or_else(|| anyhow::anyhow!("--save-digest requires the qdigest scheme"))?;
        std::fs::write(path, bytes)
            .with_context(|| format!("writing digest to {}", path.display()))?;
    }

    write_output(args.common.out.as_deref(), &csv)
}

fn collect_metrics(
    settings: &RunSettings,
    report: &ExperimentReport,
    regenerations: u32,
) -> Vec<(String, f64)> {
    let mut metrics = Vec::new();
    for &(q, error) in &report.quantile_errors {
        let name = if q == 0.5 {
            "median_error".to_string()
        } else {
            format!("error_q{q}")
        };
        metrics.push((name, error));
    }
    if report.scheme == Scheme::QDigest {
        metrics.push(("theta".to_string(), report.theta));
    }
    metrics.push((
        "max_message_bytes".to_string(),
        report.max_message_bytes as f64,
    ));
    metrics.push(("total_bytes".to_string(), report.total_bytes as f64));

    let power = residual_power(report, settings.initial_power, settings.power_per_byte);
    metrics.push(("residual_min".to_string(), power[0]));
    metrics.push(("residual_p01".to_string(), percentile(&power, 0.01)));
    metrics.push(("residual_p05".to_string(), percentile(&power, 0.05)));
    metrics.push(("residual_median".to_string(), percentile(&power, 0.5)));
    metrics.push(("regenerations".to_string(), regenerations as f64));
    metrics
}

/// Integral metrics print as integers so byte counts stay readable.
fn format_metric(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value:.6}")
    }
}

fn accumulate(means: &mut Vec<((Scheme, String), f64)>, key: (Scheme, String), value: f64) {
    match means.iter_mut().find(|(k, _)| *k == key) {
        Some((_, sum)) => *sum += value,
        None => means.push((key, value)),
    }
}

/// Value at the `p`-th fraction of a sorted sample (lowest rank at least
/// `p * len`).
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((sorted.len() as f64 * p).ceil() as usize).max(1) - 1;
    sorted[idx.min(sorted.len() - 1)]
}

fn histogram(args: HistogramArgs) -> Result<()> {
    if args.buckets == 0 {
        bail!("--buckets must be at least 1");
    }
    let settings = resolve_settings(&args.common)?;
    let (_, k) = resolve_budget(&settings)?;
    let config = DigestConfig::new(settings.sigma, k)?;
    let grid = load_grid_if_needed(&settings)?;

    // one representative topology: the first seed
    let run = prepare_seed(&settings, grid.as_ref(), settings.seeds[0])?;
    let report = run_aggregation(&run.tree, &run.readings, config, Scheme::QDigest, &[])?;
    let RootSummary::Digest(digest) = &report.root_summary else {
        unreachable!("qdigest scheme produces a digest root");
    };

    let mut sensed = FrequencyVector::new();
    for (v, &r) in run.readings.iter().enumerate() {
        if v != run.tree.root() {
            sensed.add(r, 1);
        }
    }

    let width = settings.sigma.div_ceil(args.buckets);
    let mut csv = String::from("bucket,low,high,approx_count,exact_count\n");
    for bucket in 0..args.buckets {
        let low = 1 + bucket * width;
        if low > settings.sigma {
            break;
        }
        let high = (low + width - 1).min(settings.sigma);
        let approx = digest.range_count(low, high)?.rank;
        let exact = sensed.exact_rank(high + 1) - sensed.exact_rank(low);
        writeln!(csv, "{bucket},{low},{high},{approx},{exact}").expect("writing to a String");
    }
    write_output(args.common.out.as_deref(), &csv)
}

#[derive(Serialize)]
struct QueryOutput {
    sigma: u64,
    max_value: u64,
    n: u64,
    k: u64,
    buckets: usize,
    theta: f64,
    answers: Vec<Answer>,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Answer {
    Quantile {
        q: f64,
        value: u64,
        error_budget: u64,
    },
    Rank {
        x: u64,
        rank: u64,
        error_budget: u64,
    },
    Range {
        low: u64,
        high: u64,
        count: u64,
        /// Twice the single-rank budget: two rank estimates are subtracted.
        error_budget: u64,
    },
    Consensus {
        s: f64,
        values: Vec<(u64, u64)>,
    },
}

fn query(args: QueryArgs) -> Result<()> {
    let bytes = std::fs::read(&args.digest)
        .with_context(|| format!("reading digest file {}", args.digest.display()))?;
    let digest = QDigest::decode(&bytes, args.k)
        .with_context(|| format!("decoding {}", args.digest.display()))?;

    let mut answers = Vec::new();
    for &q in &args.quantiles {
        let a = digest.quantile(q)?;
        answers.push(Answer::Quantile {
            q,
            value: a.value,
            error_budget: a.error_budget,
        });
    }
    for &x in &args.ranks {
        let a = digest.inverse_quantile(x)?;
        answers.push(Answer::Rank {
            x,
            rank: a.rank,
            error_budget: a.error_budget,
        });
    }
    for &(low, high) in &args.ranges {
        let a = digest.range_count(low, high)?;
        answers.push(Answer::Range {
            low,
            high,
            count: a.rank,
            error_budget: 2 * a.error_budget,
        });
    }
    for &s in &args.consensus {
        answers.push(Answer::Consensus {
            s,
            values: digest.consensus(s),
        });
    }

    let output = QueryOutput {
        sigma: digest.config().sigma(),
        max_value: digest.config().max_value(),
        n: digest.total_count(),
        k: args.k,
        buckets: digest.bucket_count(),
        theta: digest.confidence_factor().theta,
        answers,
    };
    let mut json = serde_json::to_string_pretty(&output)?;
    json.push('\n');
    write_output(args.out.as_deref(), &json)
}

fn load_grid_if_needed(settings: &RunSettings) -> Result<Option<datasets::ElevationGrid>> {
    match settings.dataset {
        DatasetKind::Uniform => Ok(None),
        DatasetKind::Grid => {
            let path = settings.grid.as_ref().expect("validated in resolve()");
            Ok(Some(datasets::load_grid(path, settings.sigma)?))
        }
    }
}

fn parse_range(raw: &str) -> Result<(u64, u64), String> {
    let (low, high) = raw
        .split_once(':')
        .ok_or_else(|| format!("expected low:high, got `{raw}`"))?;
    let low = low
        .trim()
        .parse()
        .map_err(|e| format!("bad low bound: {e}"))?;
    let high = high
        .trim()
        .parse()
        .map_err(|e| format!("bad high bound: {e}"))?;
    Ok((low, high))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing output to {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
