//! Bottom-up in-network aggregation over a routing tree, with message-size
//! and residual-power accounting.

use qdigest::oracle::FrequencyVector;
use qdigest::{DigestConfig, QDigest};

use crate::error::SimError;
use crate::netsim::RoutingTree;

/// Which summary the sensors forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Bounded-size q-digest messages.
    QDigest,
    /// Exact width-1 histogram of distinct values: zero error, unbounded
    /// message growth.
    List,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::QDigest => "qdigest",
            Scheme::List => "list",
        }
    }
}

/// Exact `(value, count)` list baseline summary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ListSummary {
    values: FrequencyVector,
}

impl ListSummary {
    pub fn frequencies(&self) -> &FrequencyVector {
        &self.values
    }

    /// Number of distinct values, i.e. tuples on the wire.
    pub fn distinct(&self) -> usize {
        self.values.distinct()
    }
}

/// Outcome of one aggregation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub scheme: Scheme,
    /// Bytes each node transmitted to its parent (0 for the base station).
    pub per_node_bytes: Vec<u64>,
    pub max_message_bytes: u64,
    pub total_bytes: u64,
    /// `(q, relative rank error)` for each requested quantile, measured
    /// against the exact multiset of sensed readings.
    pub quantile_errors: Vec<(f64, f64)>,
    /// Error certificate of the digest received at the base station
    /// (0 for the list scheme, whose answers are exact).
    pub theta: f64,
    /// Summary available at the base station for further queries.
    pub root_summary: RootSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RootSummary {
    Digest(QDigest),
    List(ListSummary),
}

/// Per-tuple wire cost in bytes: a node id plus a count, rounded up to
/// whole bytes. `n_bound` is the global sensor count, the a-priori bound on
/// any count field.
pub fn tuple_bytes(max_value: u64, n_bound: u64) -> u64 {
    let sigma = max_value.next_power_of_two().max(2);
    let id_bits = sigma.ilog2() as u64 + 1;
    let count_bits = (64 - n_bound.leading_zeros()) as u64;
    (id_bits + count_bits).div_ceil(8)
}

/// Translate a per-message byte budget into the compression factor `k`:
/// the budget holds `budget / tuple_bytes` tuples and a digest needs room
/// for `3k` of them.
pub fn budget_to_compression_factor(
    budget_bytes: u64,
    max_value: u64,
    n_bound: u64,
) -> Result<u64, SimError> {
    let per_tuple = tuple_bytes(max_value, n_bound);
    let k = budget_bytes / per_tuple / 3;
    if k == 0 {
        return Err(SimError::BudgetTooSmall {
            budget: budget_bytes,
            minimum: 3 * per_tuple,
        });
    }
    Ok(k)
}

/// Run one aggregation pass: leaves send their own reading as a summary,
/// interior nodes fold their children's summaries together with their own
/// reading and send the result, and the base station keeps the final
/// summary. Nodes are processed deepest level first, ascending id within a
/// level, so runs are deterministic.
///
/// The base station issues the query rather than sensing, so its reading is
/// excluded: the root summary covers `node_count - 1` readings.
///
/// Message bytes are the encoded digest length for the q-digest scheme and
/// `distinct values * tuple_bytes` for the list scheme (the same per-tuple
/// cost, so the baseline comparison is like for like).
pub fn run_aggregation(
    tree: &RoutingTree,
    readings: &[u64],
    config: DigestConfig,
    scheme: Scheme,
    quantiles: &[f64],
) -> Result<ExperimentReport, SimError> {
    if readings.len() != tree.node_count() {
        return Err(SimError::ReadingCountMismatch {
            got: readings.len(),
            expected: tree.node_count(),
        });
    }
    for &r in readings {
        if r == 0 || r > config.max_value() {
            return Err(SimError::Digest(qdigest::Error::ValueOutOfRange {
                value: r,
                max_value: config.max_value(),
            }));
        }
    }

    // ground truth: everything except the base station's unused reading
    let mut sensed = FrequencyVector::new();
    for (v, &r) in readings.iter().enumerate() {
        if v != tree.root() {
            sensed.add(r, 1);
        }
    }

    let n_bound = tree.node_count() as u64;
    let per_tuple = tuple_bytes(config.max_value(), n_bound);
    let mut per_node_bytes = vec![0u64; tree.node_count()];

    let root_summary = match scheme {
        Scheme::QDigest => {
            let mut acc: Vec<QDigest> = vec![QDigest::empty(config); tree.node_count()];
            for v in tree.bottom_up_order() {
                let mut summary = std::mem::replace(&mut acc[v], QDigest::empty(config));
                if v != tree.root() {
                    summary = summary.merge(&QDigest::from_value(readings[v], config)?)?;
                    per_node_bytes[v] = summary.encode().len() as u64;
                    let parent = tree.parent(v).expect("non-root has a parent");
                    acc[parent] = acc[parent].merge(&summary)?;
                } else {
                    acc[v] = summary;
                }
            }
            RootSummary::Digest(acc[tree.root()].clone())
        }
        Scheme::List => {
            let mut acc: Vec<ListSummary> = vec![ListSummary::default(); tree.node_count()];
            for v in tree.bottom_up_order() {
                let mut summary = std::mem::take(&mut acc[v]);
                if v != tree.root() {
                    summary.values.add(readings[v], 1);
                    per_node_bytes[v] = summary.distinct() as u64 * per_tuple;
                    let parent = tree.parent(v).expect("non-root has a parent");
                    for (value, freq) in summary.values.iter() {
                        acc[parent].values.add(value, freq);
                    }
                } else {
                    acc[v] = summary;
                }
            }
            RootSummary::List(acc[tree.root()].clone())
        }
    };

    let theta = match &root_summary {
        RootSummary::Digest(d) => d.confidence_factor().theta,
        RootSummary::List(_) => 0.0,
    };

    let mut quantile_errors = Vec::with_capacity(quantiles.len());
    if !sensed.is_empty() {
        for &q in quantiles {
            let answer = match &root_summary {
                RootSummary::Digest(d) => d.quantile(q)?.value,
                RootSummary::List(l) => l.values.exact_quantile(q)?,
            };
            let error = sensed.quantile_rank_error(q, answer) / sensed.total_count() as f64;
            quantile_errors.push((q, error));
        }
    }

    Ok(ExperimentReport {
        scheme,
        max_message_bytes: per_node_bytes.iter().copied().max().unwrap_or(0),
        total_bytes: per_node_bytes.iter().sum(),
        per_node_bytes,
        quantile_errors,
        theta,
        root_summary,
    })
}

/// Residual battery fraction per node after the run, sorted ascending (the
/// empirical cumulative distribution). Each transmitted byte costs
/// `cost_per_byte` units out of `initial`; fractions floor at 0.
pub fn residual_power(report: &ExperimentReport, initial: f64, cost_per_byte: f64) -> Vec<f64> {
    assert!(initial > 0.0, "initial power must be positive");
    let mut fractions: Vec<f64> = report
        .per_node_bytes
        .iter()
        .map(|&b| (1.0 - b as f64 * cost_per_byte / initial).max(0.0))
        .collect();
    fractions.sort_by(|a, b| a.partial_cmp(b).expect("fractions are finite"));
    fractions
}
