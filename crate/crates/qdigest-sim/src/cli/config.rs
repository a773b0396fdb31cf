//! Experiment configuration: defaults, key-value config files and flag
//! overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::netsim::Scheme;

/// Which generator supplies the readings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Uniform,
    Grid,
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub nodes: usize,
    pub sigma: u64,
    /// Per-message byte budget; `k` is derived from it unless given.
    pub budget: Option<u64>,
    pub k: Option<u64>,
    pub dataset: DatasetKind,
    pub grid: Option<PathBuf>,
    pub seeds: Vec<u64>,
    pub schemes: Vec<Scheme>,
    pub quantiles: Vec<f64>,
    pub density: f64,
    pub radio_range: f64,
    pub initial_power: f64,
    pub power_per_byte: f64,
}

/// Partial settings from one source (config file or command line); later
/// sources override earlier ones field by field.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub nodes: Option<usize>,
    pub sigma: Option<u64>,
    pub budget: Option<u64>,
    pub k: Option<u64>,
    pub dataset: Option<String>,
    pub grid: Option<PathBuf>,
    pub seeds: Option<Vec<u64>>,
    pub schemes: Option<Vec<String>>,
    pub quantiles: Option<Vec<f64>>,
    pub density: Option<f64>,
    pub radio_range: Option<f64>,
    pub initial_power: Option<f64>,
    pub power_per_byte: Option<f64>,
}

impl Overrides {
    /// Parse a `key = value` config file. Blank lines and `#` comments are
    /// ignored; list values are comma separated.
    pub fn from_file(path: &Path) -> Result<Overrides> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let mut values: BTreeMap<String, String> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected `key = value`, found `{line}`",
                    path.display(),
                    idx + 1
                );
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }

        let mut o = Overrides::default();
        for (key, value) in values {
            let parse_ctx = || format!("config key `{key}` has invalid value `{value}`");
            match key.as_str() {
                "nodes" => o.nodes = Some(value.parse().with_context(parse_ctx)?),
                "sigma" => o.sigma = Some(value.parse().with_context(parse_ctx)?),
                "budget" => o.budget = Some(value.parse().with_context(parse_ctx)?),
                "k" => o.k = Some(value.parse().with_context(parse_ctx)?),
                "dataset" => o.dataset = Some(value),
                "grid" => o.grid = Some(PathBuf::from(value)),
                "seeds" => o.seeds = Some(parse_list(&value).with_context(parse_ctx)?),
                "schemes" => {
                    o.schemes = Some(value.split(',').map(|s| s.trim().to_string()).collect())
                }
                "quantiles" => o.quantiles = Some(parse_list(&value).with_context(parse_ctx)?),
                "density" => o.density = Some(value.parse().with_context(parse_ctx)?),
                "radio_range" => o.radio_range = Some(value.parse().with_context(parse_ctx)?),
                "initial_power" => o.initial_power = Some(value.parse().with_context(parse_ctx)?),
                "power_per_byte" => o.power_per_byte = Some(value.parse().with_context(parse_ctx)?),
                other => bail!("unknown config key `{other}`"),
            }
        }
        Ok(o)
    }

    /// Overlay `later` on top of `self`.
    pub fn merged(self, later: Overrides) -> Overrides {
        Overrides {
            nodes: later.nodes.or(self.nodes),
            sigma: later.sigma.or(self.sigma),
            budget: later.budget.or(self.budget),
            k: later.k.or(self.k),
            dataset: later.dataset.or(self.dataset),
            grid: later.grid.or(self.grid),
            seeds: later.seeds.or(self.seeds),
            schemes: later.schemes.or(self.schemes),
            quantiles: later.quantiles.or(self.quantiles),
            density: later.density.or(self.density),
            radio_range: later.radio_range.or(self.radio_range),
            initial_power: later.initial_power.or(self.initial_power),
            power_per_byte: later.power_per_byte.or(self.power_per_byte),
        }
    }

    /// Fill in defaults and validate.
    pub fn resolve(self) -> Result<RunSettings> {
        let dataset = match self.dataset.as_deref() {
            None | Some("uniform") => DatasetKind::Uniform,
            Some("grid") => DatasetKind::Grid,
            Some(other) => bail!("unknown dataset `{other}` (expected uniform or grid)"),
        };
        if dataset == DatasetKind::Grid && self.grid.is_none() {
            bail!("dataset `grid` requires --grid <file>");
        }

        let schemes = match self.schemes {
            None => vec![Scheme::QDigest, Scheme::List],
            Some(names) => {
                let mut schemes = Vec::new();
                for name in names {
                    schemes.push(match name.as_str() {
                        "qdigest" => Scheme::QDigest,
                        "list" => Scheme::List,
                        other => bail!("unknown scheme `{other}` (expected qdigest or list)"),
                    });
                }
                schemes
            }
        };
        if schemes.is_empty() {
            bail!("at least one scheme is required");
        }

        let seeds = self.seeds.unwrap_or_else(|| vec![1, 2, 3, 4, 5]);
        if seeds.is_empty() {
            bail!("at least one seed is required");
        }

        let quantiles = self.quantiles.unwrap_or_else(|| vec![0.5]);
        for &q in &quantiles {
            if !(q > 0.0 && q < 1.0) {
                bail!("quantile {q} outside (0, 1)");
            }
        }

        let budget = match (self.budget, self.k) {
            (None, None) => Some(400),
            (budget, _) => budget,
        };

        Ok(RunSettings {
            nodes: self.nodes.unwrap_or(2000),
            sigma: self.sigma.unwrap_or(65536),
            budget,
            k: self.k,
            dataset,
            grid: self.grid,
            seeds,
            schemes,
            quantiles,
            density: self.density.unwrap_or(0.001),
            radio_range: self.radio_range.unwrap_or(55.0),
            initial_power: self.initial_power.unwrap_or(40000.0),
            power_per_byte: self.power_per_byte.unwrap_or(1.0),
        })
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    value
        .split(',')
        .map(|item| item.trim().parse::<T>().map_err(Into::into))
        .collect()
}
