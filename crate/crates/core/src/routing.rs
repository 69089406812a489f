//! Compact routing on top of a labeling.
//!
//! Each vertex stores its own label and one row `(neighbor label, port)` per
//! incident edge. Forwarding is myopic: take the port whose neighbor label is
//! strictly closer to the target label, preferring the lowest port on ties.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::model::{Topology, UtswGraph, VertexId};
use crate::torus::{label_distance, Position, TorusSize};

/// Port index into a vertex's adjacency list.
pub type Port = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub neighbor_label: Option<Position>,
    pub port: Port,
}

/// Routing tables of every vertex plus the port wiring used to move a
/// message along the chosen edge.
#[derive(Debug, Clone)]
pub struct RoutingTables {
    n: TorusSize,
    rows: Vec<Vec<TableRow>>,
    /// `links[u][p]` is the vertex at the far end of port `p` of `u`.
    links: Vec<Vec<VertexId>>,
}

impl RoutingTables {
    pub fn rows(&self, u: VertexId) -> &[TableRow] {
        &self.rows[u as usize]
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    /// Vertex reached through `port` of `u`.
    pub fn follow(&self, u: VertexId, port: Port) -> VertexId {
        self.links[u as usize][port as usize]
    }

    /// Bits per label: `2 * ceil(log2 n)`.
    pub fn label_bits(&self) -> u32 {
        2 * ceil_log2(self.n.get())
    }

    /// Bits of a port id at `u`: `ceil(log2 degree)`, at least one.
    pub fn port_bits(&self, u: VertexId) -> u32 {
        ceil_log2(self.rows[u as usize].len() as u32).max(1)
    }

    /// Storage of `u`: its own label plus one `(label, port)` row per edge.
    pub fn storage_bits(&self, u: VertexId) -> u64 {
        let rows = self.rows[u as usize].len() as u64;
        (1 + rows) * self.label_bits() as u64 + rows * self.port_bits(u) as u64
    }

    pub fn mean_storage_bits(&self) -> f64 {
        let total: u64 = (0..self.rows.len() as VertexId).map(|u| self.storage_bits(u)).sum();
        total as f64 / self.rows.len() as f64
    }
}

fn ceil_log2(x: u32) -> u32 {
    if x <= 1 {
        0
    } else {
        32 - (x - 1).leading_zeros()
    }
}

/// One row per incident edge of `g`, in adjacency order, so port `p` of `u`
/// is its `p`-th neighbor. Unlabeled neighbors get a `None` label.
pub fn build_routing_tables(g: &Topology, labeling: &Labeling) -> RoutingTables {
    let mut rows = Vec::with_capacity(g.vertex_count());
    let mut links = Vec::with_capacity(g.vertex_count());
    for u in g.vertices() {
        let nbrs = g.neighbors(u);
        rows.push(
            nbrs.iter()
                .enumerate()
                .map(|(p, &v)| TableRow {
                    neighbor_label: labeling.label(v),
                    port: p as Port,
                })
                .collect(),
        );
        links.push(nbrs.to_vec());
    }
    RoutingTables {
        n: g.size(),
        rows,
        links,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteStatus {
    Delivered,
    /// No labeled neighbor is strictly closer to the target.
    Stuck,
    HopLimit,
    /// Source or target has no label.
    Unroutable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteResult {
    pub status: RouteStatus,
    pub hops: u32,
    pub path: Vec<VertexId>,
    /// Port taken at each hop; one shorter than `path`.
    pub ports: Vec<Port>,
}

impl RouteResult {
    pub fn delivered(&self) -> bool {
        self.status == RouteStatus::Delivered
    }
}

/// Greedy forwarding from `source` to `target` using labels only.
pub fn myopic_route(
    tables: &RoutingTables,
    labeling: &Labeling,
    source: VertexId,
    target: VertexId,
    hop_limit: u32,
) -> RouteResult {
    let n = labeling.size();
    let (Some(mut here), Some(goal)) = (labeling.label(source), labeling.label(target)) else {
        return RouteResult {
            status: RouteStatus::Unroutable,
            hops: 0,
            path: vec![source],
            ports: Vec::new(),
        };
    };
    let mut current = source;
    let mut path = vec![source];
    let mut ports = Vec::new();
    let status = loop {
        if current == target {
            break RouteStatus::Delivered;
        }
        if ports.len() as u32 >= hop_limit {
            break RouteStatus::HopLimit;
        }
        let dist = label_distance(n, here, goal);
        let best = tables
            .rows(current)
            .iter()
            .filter_map(|row| row.neighbor_label.map(|l| (label_distance(n, l, goal), row.port, l)))
            .min_by_key(|&(d, port, _)| (d, port));
        match best {
            Some((d, port, label)) if d < dist => {
                current = tables.follow(current, port);
                here = label;
                path.push(current);
                ports.push(port);
            }
            _ => break RouteStatus::Stuck,
        }
    };
    RouteResult {
        status,
        hops: ports.len() as u32,
        path,
        ports,
    }
}

/// Default hop limit, `4n`.
pub fn default_hop_limit(n: TorusSize) -> u32 {
    4 * n.get()
}

/// Aggregate statistics over sampled routes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingSummary {
    pub pairs: usize,
    pub delivered: usize,
    pub delivery_rate: f64,
    /// Means over delivered routes.
    pub mean_hops: f64,
    pub p50_hops: u32,
    pub p90_hops: u32,
    pub p99_hops: u32,
    pub max_hops: u32,
    /// Ground-truth distance averaged over all sampled pairs.
    pub mean_distance: f64,
    /// Mean of `hops / distance` over delivered routes.
    pub mean_stretch: f64,
    /// Delivered routes that took more hops than the torus distance.
    pub over_distance: usize,
}

/// Routes `pairs` uniformly drawn ordered pairs of distinct labeled vertices.
pub fn routing_stats<R: Rng + ?Sized>(
    g: &UtswGraph,
    tables: &RoutingTables,
    labeling: &Labeling,
    pairs: usize,
    hop_limit: u32,
    rng: &mut R,
) -> Result<RoutingSummary> {
    let labeled: Vec<VertexId> = labeling.labeled_vertices().collect();
    if labeled.len() < 2 || pairs == 0 {
        return Err(Error::NoLabeledPairs);
    }
    let mut hops = Vec::with_capacity(pairs);
    let mut distance_sum = 0u64;
    let mut stretch_sum = 0.0;
    let mut over_distance = 0;
    for _ in 0..pairs {
        let s = labeled[rng.random_range(0..labeled.len())];
        let t = loop {
            let t = labeled[rng.random_range(0..labeled.len())];
            if t != s {
                break t;
            }
        };
        let d = g.truth_distance(s, t);
        distance_sum += d as u64;
        let route = myopic_route(tables, labeling, s, t, hop_limit);
        if route.delivered() {
            hops.push(route.hops);
            stretch_sum += route.hops as f64 / d as f64;
            if route.hops > d {
                over_distance += 1;
            }
        }
    }
    hops.sort_unstable();
    let delivered = hops.len();
    let pct = |q: f64| -> u32 {
        if hops.is_empty() {
            0
        } else {
            hops[((q * (delivered - 1) as f64).round() as usize).min(delivered - 1)]
        }
    };
    let mean = |sum: f64| if delivered == 0 { 0.0 } else { sum / delivered as f64 };
    Ok(RoutingSummary {
        pairs,
        delivered,
        delivery_rate: delivered as f64 / pairs as f64,
        mean_hops: mean(hops.iter().map(|&h| h as f64).sum()),
        p50_hops: pct(0.5),
        p90_hops: pct(0.9),
        p99_hops: pct(0.99),
        max_hops: hops.last().copied().unwrap_or(0),
        mean_distance: distance_sum as f64 / pairs as f64,
        mean_stretch: mean(stretch_sum),
        over_distance,
    })
}
