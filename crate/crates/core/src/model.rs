//! Undirected toroidal small-world graphs.
//!
//! A graph is the `n x n` torus (local edges) plus, for every vertex in
//! ascending id order, one long-range edge to a target drawn with
//! probability `Z * d^-2`. A draw that duplicates an existing edge is
//! dropped, never redrawn.
//!
//! [`UtswGraph`] keeps the generator's ground truth (edge kinds and vertex
//! positions) for verification. Algorithms that recover positions only ever
//! see a [`Topology`], which carries adjacency and nothing else.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{normalizing_factor, ring_offsets, torus_distance, NormalizingFactor, Position, TorusSize};

/// Vertex id, canonically `x * n + y` for generator position `(x, y)`.
pub type VertexId = u32;

/// Deterministic generator used for every random choice in the crate
/// (ChaCha with 8 rounds, seeded through `SeedableRng::seed_from_u64`).
pub type GraphRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GraphRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Local,
    LongRange,
}

impl EdgeKind {
    pub fn code(self) -> char {
        match self {
            EdgeKind::Local => 'L',
            EdgeKind::LongRange => 'R',
        }
    }
}

/// Adjacency-only view of a graph on the `n x n` vertex set.
///
/// Neighbor lists are sorted ascending, so every traversal that iterates
/// neighbors is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n: TorusSize,
    adj: Vec<Vec<VertexId>>,
}

impl Topology {
    /// Builds a simple undirected graph from an edge list; loops and repeated
    /// edges are rejected.
    pub fn from_edges(n: TorusSize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let count = n.vertex_count();
        let mut adj = vec![Vec::new(); count];
        for (u, v) in edges {
            check_vertex(u, count)?;
            check_vertex(v, count)?;
            if u == v {
                return Err(Error::InvalidEdge { u, v, reason: "loop" });
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidEdge {
                    u: u as VertexId,
                    v: w[0],
                    reason: "parallel edge",
                });
            }
        }
        Ok(Topology { n, adj })
    }

    pub(crate) fn from_sorted_adjacency(n: TorusSize, adj: Vec<Vec<VertexId>>) -> Self {
        debug_assert_eq!(adj.len(), n.vertex_count());
        Topology { n, adj }
    }

    #[inline]
    pub fn size(&self) -> TorusSize {
        self.n
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.adj.len() as VertexId
    }

    #[inline]
    pub fn neighbors(&self, u: VertexId) -> &[VertexId] {
        &self.adj[u as usize]
    }

    pub fn degree(&self, u: VertexId) -> Result<usize> {
        check_vertex(u, self.adj.len())?;
        Ok(self.adj[u as usize].len())
    }

    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Every edge once as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as VertexId;
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }
}

fn check_vertex(u: VertexId, count: usize) -> Result<()> {
    if (u as usize) < count {
        Ok(())
    } else {
        Err(Error::InvalidVertex { vertex: u, count })
    }
}

/// A generated graph together with its ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtswGraph {
    topology: Topology,
    /// Edge kinds, parallel to the topology's neighbor lists.
    kinds: Vec<Vec<EdgeKind>>,
    seed: u64,
    suppressed: u32,
}

impl UtswGraph {
    /// Assembles a graph from typed edges and checks the model invariants:
    /// the local edges are exactly the `2n^2` torus edges and long-range
    /// edges join vertices at distance at least 2.
    pub fn from_edges(
        n: TorusSize,
        seed: u64,
        edges: impl IntoIterator<Item = (VertexId, VertexId, EdgeKind)>,
    ) -> Result<Self> {
        if n.get() < 3 {
            return Err(Error::SizeTooSmall { n: n.get(), min: 3 });
        }
        let mut typed = Vec::new();
        let mut local = 0usize;
        for (u, v, kind) in edges {
            check_vertex(u, n.vertex_count())?;
            check_vertex(v, n.vertex_count())?;
            let d = torus_distance(n, n.position_of(u), n.position_of(v));
            match kind {
                EdgeKind::Local if d != 1 => {
                    return Err(Error::InvalidEdge {
                        u,
                        v,
                        reason: "local edge between non-adjacent positions",
                    })
                }
                EdgeKind::LongRange if d < 2 => {
                    return Err(Error::InvalidEdge {
                        u,
                        v,
                        reason: "long-range edge shorter than 2",
                    })
                }
                EdgeKind::Local => local += 1,
                EdgeKind::LongRange => {}
            }
            typed.push((u, v, kind));
        }
        if local != 2 * n.vertex_count() {
            return Err(Error::InvalidEdge {
                u: 0,
                v: 0,
                reason: "local edges do not form the full torus",
            });
        }
        let topology = Topology::from_edges(n, typed.iter().map(|&(u, v, _)| (u, v)))?;
        let mut kinds: Vec<Vec<EdgeKind>> = topology
            .adj
            .iter()
            .map(|list| vec![EdgeKind::Local; list.len()])
            .collect();
        for &(u, v, kind) in &typed {
            for (a, b) in [(u, v), (v, u)] {
                let idx = topology.adj[a as usize].binary_search(&b).expect("edge present");
                kinds[a as usize][idx] = kind;
            }
        }
        Ok(UtswGraph {
            topology,
            kinds,
            seed,
            suppressed: 0,
        })
    }

    #[inline]
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    #[inline]
    pub fn size(&self) -> TorusSize {
        self.topology.n
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.topology.vertex_count()
    }

    pub fn degree(&self, u: VertexId) -> Result<usize> {
        self.topology.degree(u)
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edge_count()
    }

    /// Number of long-range draws skipped because the edge already existed.
    pub fn suppressed_collisions(&self) -> u32 {
        self.suppressed
    }

    pub fn long_range_count(&self) -> usize {
        self.kinds
            .iter()
            .flatten()
            .filter(|&&k| k == EdgeKind::LongRange)
            .count()
            / 2
    }

    /// Ground-truth generator position of `u`.
    #[inline]
    pub fn truth_position(&self, u: VertexId) -> Position {
        self.topology.n.position_of(u)
    }

    /// Ground-truth torus distance between two vertices.
    #[inline]
    pub fn truth_distance(&self, u: VertexId, v: VertexId) -> u32 {
        torus_distance(self.size(), self.truth_position(u), self.truth_position(v))
    }

    pub fn edge_kind(&self, u: VertexId, v: VertexId) -> Option<EdgeKind> {
        let idx = self.topology.adj[u as usize].binary_search(&v).ok()?;
        Some(self.kinds[u as usize][idx])
    }

    /// Neighbors of `u` with their edge kinds.
    pub fn typed_neighbors(&self, u: VertexId) -> impl Iterator<Item = (VertexId, EdgeKind)> + '_ {
        self.topology.adj[u as usize]
            .iter()
            .copied()
            .zip(self.kinds[u as usize].iter().copied())
    }

    /// Every edge once as `(u, v, kind)` with `u < v`, lexicographically.
    pub fn typed_edges(&self) -> impl Iterator<Item = (VertexId, VertexId, EdgeKind)> + '_ {
        (0..self.vertex_count() as VertexId).flat_map(move |u| {
            self.typed_neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, k)| (u, v, k))
        })
    }
}

/// Local edges of the torus, each once with `u < v`.
fn torus_edges(n: TorusSize) -> impl Iterator<Item = (VertexId, VertexId)> {
    let side = n.get();
    (0..side).flat_map(move |x| {
        (0..side).flat_map(move |y| {
            let u = n.vertex_of(Position::new(x, y));
            let right = n.vertex_of(Position::new(x, (y + 1) % side));
            let down = n.vertex_of(Position::new((x + 1) % side, y));
            [(u.min(right), u.max(right)), (u.min(down), u.max(down))]
        })
    })
}

/// The bare torus: `2n^2` local edges, every vertex of degree 4.
pub fn generate_torus(n: TorusSize) -> Result<UtswGraph> {
    if n.get() < 3 {
        return Err(Error::SizeTooSmall { n: n.get(), min: 3 });
    }
    UtswGraph::from_edges(n, 0, torus_edges(n).map(|(u, v)| (u, v, EdgeKind::Local)))
}

/// Exact sampler for long-range targets.
///
/// A draw first picks a distance ring `i` with probability
/// `Z * |ring_i| * i^-2` from a double-precision cumulative table, then a
/// uniform member of that ring. Ring offsets are tabulated once per size.
#[derive(Debug, Clone)]
pub struct LongRangeSampler {
    n: TorusSize,
    z: NormalizingFactor,
    rings: WeightedIndex<f64>,
    offsets: Vec<(i32, i32)>,
    /// `ring_start[k]..ring_start[k + 1]` indexes ring `k + 1` in `offsets`.
    ring_start: Vec<usize>,
}

impl LongRangeSampler {
    pub fn new(n: TorusSize) -> Result<Self> {
        let z = normalizing_factor(n)?;
        let mut offsets = Vec::with_capacity(n.vertex_count() - 1);
        let mut ring_start = vec![0];
        let mut weights = Vec::with_capacity(n.max_distance() as usize);
        for i in 1..=n.max_distance() {
            let ring = ring_offsets(n, i);
            weights.push(ring.len() as f64 / (i as f64 * i as f64));
            offsets.extend(ring);
            ring_start.push(offsets.len());
        }
        let rings = WeightedIndex::new(weights).expect("ring weights are positive");
        Ok(LongRangeSampler {
            n,
            z,
            rings,
            offsets,
            ring_start,
        })
    }

    pub fn normalizing_factor(&self) -> NormalizingFactor {
        self.z
    }

    pub fn sample<R: Rng + ?Sized>(&self, u: VertexId, rng: &mut R) -> VertexId {
        let ring = self.rings.sample(rng);
        let start = self.ring_start[ring];
        let end = self.ring_start[ring + 1];
        let (dx, dy) = self.offsets[rng.random_range(start..end)];
        let p = self.n.position_of(u);
        self.n
            .vertex_of(self.n.wrap(p.x as i64 + dx as i64, p.y as i64 + dy as i64))
    }
}

/// One long-range draw for `u`. Builds a fresh sampler; use
/// [`LongRangeSampler`] directly for repeated draws.
pub fn sample_long_range_target<R: Rng + ?Sized>(n: TorusSize, u: VertexId, rng: &mut R) -> Result<VertexId> {
    check_vertex(u, n.vertex_count())?;
    Ok(LongRangeSampler::new(n)?.sample(u, rng))
}

/// Generates a UTSW graph; identical `(n, seed)` gives an identical graph.
pub fn generate_utsw(n: TorusSize, seed: u64) -> Result<UtswGraph> {
    let sampler = LongRangeSampler::new(n)?;
    let torus = generate_torus(n)?;
    let mut rng = rng_from_seed(seed);

    let mut adj: Vec<Vec<(VertexId, EdgeKind)>> = (0..torus.vertex_count() as VertexId)
        .map(|u| torus.typed_neighbors(u).collect())
        .collect();
    let mut suppressed = 0u32;
    for u in 0..adj.len() as VertexId {
        let v = sampler.sample(u, &mut rng);
        if adj[u as usize].iter().any(|&(w, _)| w == v) {
            suppressed += 1;
            continue;
        }
        adj[u as usize].push((v, EdgeKind::LongRange));
        adj[v as usize].push((u, EdgeKind::LongRange));
    }

    let mut neighbors = Vec::with_capacity(adj.len());
    let mut kinds = Vec::with_capacity(adj.len());
    for mut list in adj {
        list.sort_unstable_by_key(|&(v, _)| v);
        neighbors.push(list.iter().map(|&(v, _)| v).collect());
        kinds.push(list.iter().map(|&(_, k)| k).collect());
    }
    Ok(UtswGraph {
        topology: Topology::from_sorted_adjacency(n, neighbors),
        kinds,
        seed,
        suppressed,
    })
}
