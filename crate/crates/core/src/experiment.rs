//! Seeded Monte Carlo experiments over many torus sizes.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]. Cells
//! `(n, seed index)` run in parallel; rows are aggregated in `(n, seed)`
//! order, so outputs are byte-identical across runs and thread counts.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{cycle_set_size_bound, detection_lower_bound, theoretical_eu_bound};
use crate::cycles::four_cycles_search;
use crate::error::{Error, Result};
use crate::labeling::{label_graph_detailed, MIN_LABELING_SIZE};
use crate::model::{generate_torus, generate_utsw, rng_from_seed, EdgeKind, UtswGraph, VertexId};
use crate::routing::{build_routing_tables, default_hop_limit, routing_stats};
use crate::torus::{normalizing_factor, z_lower_bound, z_upper_bound, TorusSize};

/// Version of the JSON envelope.
pub const JSON_FORMAT: u32 = 1;

pub const DEFAULT_SEEDS: u32 = 30;

/// Normal quantile for two-sided 95% intervals.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Detection,
    Cycles,
    Routing,
    Zbounds,
    Eu,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Detection,
        ExperimentKind::Cycles,
        ExperimentKind::Routing,
        ExperimentKind::Zbounds,
        ExperimentKind::Eu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Detection => "detection",
            ExperimentKind::Cycles => "cycles",
            ExperimentKind::Routing => "routing",
            ExperimentKind::Zbounds => "zbounds",
            ExperimentKind::Eu => "eu",
        }
    }

    /// Smallest torus side the experiment accepts.
    pub fn min_size(self) -> u32 {
        match self {
            ExperimentKind::Cycles | ExperimentKind::Zbounds => 3,
            ExperimentKind::Detection | ExperimentKind::Routing | ExperimentKind::Eu => MIN_LABELING_SIZE,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub sizes: Vec<TorusSize>,
    /// Graphs generated per size.
    pub seeds: u32,
    pub base_seed: u64,
    /// Routed pairs per graph (routing) or sampled roots per graph (eu).
    pub trials: usize,
    /// Hop limit for routing; `4n` when unset.
    pub hop_limit: Option<u32>,
}

impl ExperimentConfig {
    pub fn new(sizes: Vec<TorusSize>) -> Self {
        ExperimentConfig {
            sizes,
            seeds: DEFAULT_SEEDS,
            base_seed: 0,
            trials: 1000,
            hop_limit: None,
        }
    }

    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("empty size list".into()));
        }
        if self.seeds == 0 && kind != ExperimentKind::Zbounds {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if let Some(n) = self.sizes.iter().find(|n| n.get() < kind.min_size()) {
            return Err(Error::Config(format!(
                "size {n} is below {} for the {kind} experiment",
                kind.min_size()
            )));
        }
        if self.trials == 0 && matches!(kind, ExperimentKind::Routing | ExperimentKind::Eu) {
            return Err(Error::Config("trials must be positive".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th graph of size `n`; distinct streams per cell.
pub fn cell_seed(base: u64, n: TorusSize, index: u32) -> u64 {
    mix64(mix64(base ^ (u64::from(n.get()) << 32)) ^ u64::from(index))
}

/// Runs `f` on every `(n, seed index)` cell in parallel and groups the
/// results by size, in seed order.
fn per_cell<T: Send>(cfg: &ExperimentConfig, f: impl Fn(TorusSize, u64) -> Result<T> + Sync) -> Result<Vec<Vec<T>>> {
    let cells: Vec<(usize, TorusSize, u64)> = cfg
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| (0..cfg.seeds).map(move |s| (i, n, cell_seed(cfg.base_seed, n, s))))
        .collect();
    let results: Vec<(usize, T)> = cells
        .into_par_iter()
        .map(|(i, n, seed)| f(n, seed).map(|r| (i, r)))
        .collect::<Result<_>>()?;
    let mut grouped: Vec<Vec<T>> = cfg.sizes.iter().map(|_| Vec::new()).collect();
    for (i, r) in results {
        grouped[i].push(r);
    }
    Ok(grouped)
}

/// Sample mean and standard deviation (`n - 1` denominator).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

/// Wilson score interval for `hits` successes in `trials` at 95%.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let t = trials as f64;
    let p = hits as f64 / t;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / t;
    let centre = (p + z2 / (2.0 * t)) / denom;
    let half = Z95 * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionRow {
    pub n: u32,
    pub seeds: u32,
    pub detected_mean: f64,
    pub detected_sd: f64,
    pub labeled_mean: f64,
    pub labeled_sd: f64,
    /// Runs where no origin with an all-detected neighborhood was found.
    pub no_origin: u32,
    pub conflicts: u64,
    pub detection_lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclesRow {
    pub n: u32,
    pub seeds: u32,
    pub cycle_set_mean: f64,
    pub cycle_set_sd: f64,
    pub cycle_set_max: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingRow {
    pub n: u32,
    /// `utsw`, or `torus` for the control row.
    pub graph: &'static str,
    pub seeds: u32,
    pub pairs: usize,
    pub delivery_rate: f64,
    pub mean_hops: f64,
    pub p99_hops: u32,
    pub max_hops: u32,
    pub mean_distance: f64,
    pub mean_stretch: f64,
    pub over_distance: usize,
    pub mean_storage_bits: f64,
    /// `mean_hops / ln(n)^2`.
    pub hops_per_log2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZBoundsRow {
    pub n: u32,
    pub z: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub upper_over_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EuRow {
    pub n: u32,
    pub seeds: u32,
    pub roots: u64,
    pub hits: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: f64,
}

/// Output of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentTable {
    Detection(Vec<DetectionRow>),
    Cycles(Vec<CyclesRow>),
    Routing(Vec<RoutingRow>),
    ZBounds(Vec<ZBoundsRow>),
    Eu(Vec<EuRow>),
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format: u32,
    experiment: &'static str,
    rows: &'a [T],
}

fn write_csv_rows<T: Serialize, W: Write>(rows: &[T], out: W, header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json_rows<T: Serialize, W: Write>(kind: ExperimentKind, rows: &[T], mut out: W) -> Result<()> {
    let env = Envelope {
        format: JSON_FORMAT,
        experiment: kind.name(),
        rows,
    };
    serde_json::to_writer_pretty(&mut out, &env)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

macro_rules! dispatch {
    ($table:expr, $rows:ident => $body:expr) => {
        match $table {
            ExperimentTable::Detection($rows) => $body,
            ExperimentTable::Cycles($rows) => $body,
            ExperimentTable::Routing($rows) => $body,
            ExperimentTable::ZBounds($rows) => $body,
            ExperimentTable::Eu($rows) => $body,
        }
    };
}

impl ExperimentTable {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentTable::Detection(_) => ExperimentKind::Detection,
            ExperimentTable::Cycles(_) => ExperimentKind::Cycles,
            ExperimentTable::Routing(_) => ExperimentKind::Routing,
            ExperimentTable::ZBounds(_) => ExperimentKind::Zbounds,
            ExperimentTable::Eu(_) => ExperimentKind::Eu,
        }
    }

    pub fn len(&self) -> usize {
        dispatch!(self, rows => rows.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column names, in CSV order.
    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            ExperimentTable::Detection(_) => &[
                "n",
                "seeds",
                "detected_mean",
                "detected_sd",
                "labeled_mean",
                "labeled_sd",
                "no_origin",
                "conflicts",
                "detection_lower_bound",
            ],
            ExperimentTable::Cycles(_) => &["n", "seeds", "cycle_set_mean", "cycle_set_sd", "cycle_set_max", "bound"],
            ExperimentTable::Routing(_) => &[
                "n",
                "graph",
                "seeds",
                "pairs",
                "delivery_rate",
                "mean_hops",
                "p99_hops",
                "max_hops",
                "mean_distance",
                "mean_stretch",
                "over_distance",
                "mean_storage_bits",
                "hops_per_log2",
            ],
            ExperimentTable::ZBounds(_) => &[
                "n",
                "z",
                "lower",
                "upper",
                "lower_holds",
                "upper_holds",
                "upper_over_lower",
            ],
            ExperimentTable::Eu(_) => &["n", "seeds", "roots", "hits", "rate", "ci_low", "ci_high", "bound"],
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let header = self.columns();
        dispatch!(self, rows => write_csv_rows(rows, out, header))
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        let kind = self.kind();
        dispatch!(self, rows => write_json_rows(kind, rows, out))
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }

    pub fn to_string(&self, format: OutputFormat) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<ExperimentTable> {
    cfg.validate(kind)?;
    Ok(match kind {
        ExperimentKind::Detection => ExperimentTable::Detection(run_detection_experiment(cfg)?),
        ExperimentKind::Cycles => ExperimentTable::Cycles(run_cycle_size_experiment(cfg)?),
        ExperimentKind::Routing => ExperimentTable::Routing(run_routing_experiment(cfg)?),
        ExperimentKind::Zbounds => ExperimentTable::ZBounds(verify_z_bounds(&cfg.sizes)?),
        ExperimentKind::Eu => ExperimentTable::Eu(run_eu_experiment(cfg)?),
    })
}

struct DetectionCell {
    detected: f64,
    labeled: f64,
    no_origin: bool,
    conflicts: u64,
}

pub fn run_detection_experiment(cfg: &ExperimentConfig) -> Result<Vec<DetectionRow>> {
    cfg.validate(ExperimentKind::Detection)?;
    let cells = per_cell(cfg, |n, seed| {
        let g = generate_utsw(n, seed)?;
        let almost = crate::labeling::remove_long_range_edges(g.topology())?;
        let detected = almost.detected_fraction();
        match crate::labeling::label_almost_torus(almost, mix64(seed)) {
            Ok(run) => Ok(DetectionCell {
                detected,
                labeled: run.labeling.labeled_fraction(),
                no_origin: false,
                conflicts: run.labeling.conflicts(),
            }),
            Err(Error::NoOrigin(_)) => Ok(DetectionCell {
                detected,
                labeled: 0.0,
                no_origin: true,
                conflicts: 0,
            }),
            Err(e) => Err(e),
        }
    })?;
    Ok(cfg
        .sizes
        .iter()
        .zip(cells)
        .map(|(&n, cells)| {
            let (detected_mean, detected_sd) = mean_sd(&cells.iter().map(|c| c.detected).collect::<Vec<_>>());
            let (labeled_mean, labeled_sd) = mean_sd(&cells.iter().map(|c| c.labeled).collect::<Vec<_>>());
            DetectionRow {
                n: n.get(),
                seeds: cfg.seeds,
                detected_mean,
                detected_sd,
                labeled_mean,
                labeled_sd,
                no_origin: cells.iter().filter(|c| c.no_origin).count() as u32,
                conflicts: cells.iter().map(|c| c.conflicts).sum(),
                detection_lower_bound: detection_lower_bound(n),
            }
        })
        .collect())
}

/// Mean four-cycle count over all roots of one graph, and the largest.
pub fn cycle_set_sizes(g: &UtswGraph) -> (f64, usize) {
    let t = g.topology();
    let sizes: Vec<usize> = t.vertices().map(|u| four_cycles_search(t, u).len()).collect();
    let total: usize = sizes.iter().sum();
    (total as f64 / sizes.len() as f64, sizes.into_iter().max().unwrap_or(0))
}

pub fn run_cycle_size_experiment(cfg: &ExperimentConfig) -> Result<Vec<CyclesRow>> {
    cfg.validate(ExperimentKind::Cycles)?;
    let cells = per_cell(cfg, |n, seed| Ok(cycle_set_sizes(&generate_utsw(n, seed)?)))?;
    Ok(cfg
        .sizes
        .iter()
        .zip(cells)
        .map(|(&n, cells)| {
            let (mean, sd) = mean_sd(&cells.iter().map(|c| c.0).collect::<Vec<_>>());
            CyclesRow {
                n: n.get(),
                seeds: cfg.seeds,
                cycle_set_mean: mean,
                cycle_set_sd: sd,
                cycle_set_max: cells.iter().map(|c| c.1).max().unwrap_or(0),
                bound: cycle_set_size_bound(n),
            }
        })
        .collect())
}

struct RoutingCell {
    pairs: usize,
    delivered: usize,
    hops_sum: f64,
    stretch_sum: f64,
    distance_sum: f64,
    p99: u32,
    max: u32,
    over: usize,
    storage: f64,
}

fn route_cell(g: &UtswGraph, seed: u64, cfg: &ExperimentConfig) -> Result<RoutingCell> {
    let n = g.size();
    let run = label_graph_detailed(g.topology(), mix64(seed))?;
    let tables = build_routing_tables(g.topology(), &run.labeling);
    let mut rng = rng_from_seed(mix64(seed ^ 0x5eed));
    let hop_limit = cfg.hop_limit.unwrap_or_else(|| default_hop_limit(n));
    let s = routing_stats(g, &tables, &run.labeling, cfg.trials, hop_limit, &mut rng)?;
    Ok(RoutingCell {
        pairs: s.pairs,
        delivered: s.delivered,
        hops_sum: s.mean_hops * s.delivered as f64,
        stretch_sum: s.mean_stretch * s.delivered as f64,
        distance_sum: s.mean_distance * s.pairs as f64,
        p99: s.p99_hops,
        max: s.max_hops,
        over: s.over_distance,
        storage: tables.mean_storage_bits(),
    })
}

fn routing_row(n: TorusSize, graph: &'static str, seeds: u32, cells: &[RoutingCell]) -> RoutingRow {
    let pairs: usize = cells.iter().map(|c| c.pairs).sum();
    let delivered: usize = cells.iter().map(|c| c.delivered).sum();
    let per_delivered = |x: f64| if delivered == 0 { 0.0 } else { x / delivered as f64 };
    let mean_hops = per_delivered(cells.iter().map(|c| c.hops_sum).sum());
    let ln = (n.get() as f64).ln();
    RoutingRow {
        n: n.get(),
        graph,
        seeds,
        pairs,
        delivery_rate: delivered as f64 / pairs as f64,
        mean_hops,
        p99_hops: cells.iter().map(|c| c.p99).max().unwrap_or(0),
        max_hops: cells.iter().map(|c| c.max).max().unwrap_or(0),
        mean_distance: cells.iter().map(|c| c.distance_sum).sum::<f64>() / pairs as f64,
        mean_stretch: per_delivered(cells.iter().map(|c| c.stretch_sum).sum()),
        over_distance: cells.iter().map(|c| c.over).sum(),
        mean_storage_bits: cells.iter().map(|c| c.storage).sum::<f64>() / cells.len() as f64,
        hops_per_log2: mean_hops / (ln * ln),
    }
}

/// Per size: one UTSW row over all seeds, then a pure-torus control row.
pub fn run_routing_experiment(cfg: &ExperimentConfig) -> Result<Vec<RoutingRow>> {
    cfg.validate(ExperimentKind::Routing)?;
    let utsw = per_cell(cfg, |n, seed| route_cell(&generate_utsw(n, seed)?, seed, cfg))?;
    let torus = per_cell(cfg, |n, seed| route_cell(&generate_torus(n)?, seed, cfg))?;
    let mut rows = Vec::with_capacity(2 * cfg.sizes.len());
    for ((&n, u), t) in cfg.sizes.iter().zip(utsw).zip(torus) {
        rows.push(routing_row(n, "utsw", cfg.seeds, &u));
        rows.push(routing_row(n, "torus", cfg.seeds, &t));
    }
    Ok(rows)
}

pub fn verify_z_bounds(sizes: &[TorusSize]) -> Result<Vec<ZBoundsRow>> {
    sizes
        .iter()
        .map(|&n| {
            let z = normalizing_factor(n)?.value();
            let (lower, upper) = (z_lower_bound(n), z_upper_bound(n));
            Ok(ZBoundsRow {
                n: n.get(),
                z,
                lower,
                upper,
                lower_holds: lower < z,
                upper_holds: z < upper,
                upper_over_lower: upper / lower,
            })
        })
        .collect()
}

/// Whether some four-cycle rooted at `u` uses a long-range edge.
pub fn has_forbidden_cycle(g: &UtswGraph, u: VertexId) -> bool {
    four_cycles_search(g.topology(), u)
        .iter()
        .any(|c| (0..4).any(|i| g.edge_kind(c.0[i], c.0[(i + 1) % 4]) == Some(EdgeKind::LongRange)))
}

/// Monte Carlo estimate of the forbidden-cycle probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub roots: u64,
    pub hits: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateEstimate {
    fn from_counts(hits: u64, roots: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, roots);
        RateEstimate {
            roots,
            hits,
            rate: if roots == 0 { 0.0 } else { hits as f64 / roots as f64 },
            ci_low,
            ci_high,
        }
    }
}

/// Counts sampled roots with a forbidden cycle. When `sample_roots` covers
/// the whole graph, every root is checked once.
pub fn forbidden_cycle_hits(g: &UtswGraph, sample_roots: usize, seed: u64) -> (u64, u64) {
    let count = g.topology().vertex_count();
    if sample_roots >= count {
        let hits = g.topology().vertices().filter(|&u| has_forbidden_cycle(g, u)).count();
        return (hits as u64, count as u64);
    }
    let mut rng = rng_from_seed(seed);
    let hits = (0..sample_roots)
        .filter(|_| has_forbidden_cycle(g, rng.random_range(0..count as VertexId)))
        .count();
    (hits as u64, sample_roots as u64)
}

pub fn estimate_forbidden_cycle_rate(
    n: TorusSize,
    seeds: u32,
    sample_roots: usize,
    base_seed: u64,
) -> Result<RateEstimate> {
    let cfg = ExperimentConfig {
        sizes: vec![n],
        seeds,
        base_seed,
        trials: sample_roots,
        hop_limit: None,
    };
    Ok(run_eu_experiment(&cfg)?
        .first()
        .map(|r| RateEstimate::from_counts(r.hits, r.roots))
        .expect("one size"))
}

pub fn run_eu_experiment(cfg: &ExperimentConfig) -> Result<Vec<EuRow>> {
    cfg.validate(ExperimentKind::Eu)?;
    let cells = per_cell(cfg, |n, seed| {
        let g = generate_utsw(n, seed)?;
        Ok(forbidden_cycle_hits(&g, cfg.trials, mix64(seed)))
    })?;
    Ok(cfg
        .sizes
        .iter()
        .zip(cells)
        .map(|(&n, cells)| {
            let hits = cells.iter().map(|c| c.0).sum();
            let roots = cells.iter().map(|c| c.1).sum();
            let e = RateEstimate::from_counts(hits, roots);
            EuRow {
                n: n.get(),
                seeds: cfg.seeds,
                roots,
                hits,
                rate: e.rate,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
                bound: theoretical_eu_bound(n),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(ns: &[u32]) -> Vec<TorusSize> {
        ns.iter().map(|&n| TorusSize::new(n).unwrap()).collect()
    }

    fn cfg(ns: &[u32], seeds: u32) -> ExperimentConfig {
        ExperimentConfig {
            seeds,
            trials: 200,
            ..ExperimentConfig::new(sizes(ns))
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg(&[5], 1).validate(ExperimentKind::Detection).is_ok());
        assert!(cfg(&[4], 1).validate(ExperimentKind::Detection).is_err());
        assert!(cfg(&[3], 1).validate(ExperimentKind::Cycles).is_ok());
        assert!(cfg(&[5], 0).validate(ExperimentKind::Cycles).is_err());
        assert!(cfg(&[], 1).validate(ExperimentKind::Zbounds).is_err());
        let mut c = cfg(&[8], 1);
        c.trials = 0;
        assert!(c.validate(ExperimentKind::Routing).is_err());
        assert!(c.validate(ExperimentKind::Cycles).is_ok());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn cell_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for n in sizes(&[5, 6, 7, 100]) {
            for i in 0..50 {
                assert!(seen.insert(cell_seed(0, n, i)));
                assert!(seen.insert(cell_seed(1, n, i)));
            }
        }
    }

    #[test]
    fn mean_sd_examples() {
        assert_eq!(mean_sd(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).0, 5.0);
        let (_, sd) = mean_sd(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert!((sd - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(mean_sd(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn wilson_interval_examples() {
        // 50/100: centre 0.5, half-width 1.96*sqrt(0.0025+0.000096)/1.0384
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4, "{lo} {hi}");
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-4, "{hi}");
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn experiments_are_deterministic() {
        let c = cfg(&[6, 9], 3);
        for kind in ExperimentKind::ALL {
            let a = run_experiment(kind, &c).unwrap();
            let b = run_experiment(kind, &c).unwrap();
            assert_eq!(a.to_string(OutputFormat::Csv), b.to_string(OutputFormat::Csv), "{kind}");
            assert_eq!(
                a.to_string(OutputFormat::Json),
                b.to_string(OutputFormat::Json),
                "{kind}"
            );
        }
    }

    #[test]
    fn csv_header_matches_serialized_fields() {
        let c = cfg(&[6], 2);
        for kind in ExperimentKind::ALL {
            let table = run_experiment(kind, &c).unwrap();
            let json: serde_json::Value = serde_json::from_str(&table.to_string(OutputFormat::Json)).unwrap();
            assert_eq!(json["format"], 1);
            assert_eq!(json["experiment"], kind.name());
            let row = json["rows"][0].as_object().unwrap();
            let keys: Vec<&str> = row.keys().map(String::as_str).collect();
            let mut cols = table.columns().to_vec();
            let mut sorted = keys.clone();
            sorted.sort_unstable();
            cols.sort_unstable();
            assert_eq!(sorted, cols, "{kind}");
            let csv = table.to_string(OutputFormat::Csv);
            assert_eq!(csv.lines().next().unwrap(), table.columns().join(","));
            assert_eq!(csv.lines().count(), 1 + table.len());
        }
    }

    #[test]
    fn torus_control_row_has_unit_stretch() {
        let rows = run_routing_experiment(&cfg(&[8], 2)).unwrap();
        let control = rows.iter().find(|r| r.graph == "torus").unwrap();
        assert_eq!(control.mean_stretch, 1.0);
        assert_eq!(control.delivery_rate, 1.0);
        assert!(rows.iter().all(|r| r.over_distance == 0));
    }

    #[test]
    fn pure_torus_has_no_forbidden_cycles() {
        let g = generate_torus(TorusSize::new(9).unwrap()).unwrap();
        assert_eq!(forbidden_cycle_hits(&g, usize::MAX, 0), (0, 81));
        assert_eq!(forbidden_cycle_hits(&g, 20, 0), (0, 20));
    }

    #[test]
    fn cycle_means_are_at_least_four() {
        for row in run_cycle_size_experiment(&cfg(&[5, 8, 12], 3)).unwrap() {
            assert!(row.cycle_set_mean >= 4.0, "{row:?}");
            assert!(row.cycle_set_mean < row.bound);
        }
    }

    #[test]
    fn z_bounds_hold_for_small_sizes() {
        let rows = verify_z_bounds(&sizes(&[5, 6, 50, 512])).unwrap();
        assert!(rows.iter().all(|r| r.lower_holds && r.upper_holds));
        assert!((verify_z_bounds(&sizes(&[3])).unwrap()[0].z - 0.2).abs() < 1e-15);
    }
}
