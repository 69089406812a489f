//! Rooted four-cycle search and lattice-pattern recognition.
//!
//! The search is a depth-limited DFS from the root; each undirected cycle
//! is found once per direction and the duplicate direction is removed
//! afterwards. A lattice pattern is the set of four squares around a vertex
//! of a two-dimensional grid: four rooted cycles that can be arranged so that
//! consecutive cycles share an edge at the root, with nine distinct vertices
//! in total.

use crate::error::{Error, Result};
use crate::model::{Topology, VertexId};

/// A rooted cycle `(c1, c2, c3, c4)` on four distinct vertices, `c1` the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FourCycle(pub [VertexId; 4]);

impl FourCycle {
    #[inline]
    pub fn root(&self) -> VertexId {
        self.0[0]
    }

    /// The same cycle traversed the other way round from the same root.
    #[inline]
    pub fn reversed(&self) -> FourCycle {
        let [a, b, c, d] = self.0;
        FourCycle([a, d, c, b])
    }

    /// The two vertices adjacent to the root on this cycle, `(c2, c4)`.
    #[inline]
    pub fn root_neighbors(&self) -> (VertexId, VertexId) {
        (self.0[1], self.0[3])
    }

    /// The vertex opposite the root, `c3`.
    #[inline]
    pub fn opposite(&self) -> VertexId {
        self.0[2]
    }

    pub fn has_distinct_vertices(&self) -> bool {
        let v = self.0;
        (0..4).all(|i| (i + 1..4).all(|j| v[i] != v[j]))
    }

    /// Whether every consecutive pair (including `c4 c1`) is an edge of `g`.
    pub fn is_closed_in(&self, g: &Topology) -> bool {
        (0..4).all(|i| g.has_edge(self.0[i], self.0[(i + 1) % 4]))
    }
}

/// Four-cycles rooted at one vertex, one direction per cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSet {
    root: VertexId,
    cycles: Vec<FourCycle>,
}

impl CycleSet {
    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn cycles(&self) -> &[FourCycle] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FourCycle> {
        self.cycles.iter()
    }
}

impl<'a> IntoIterator for &'a CycleSet {
    type Item = &'a FourCycle;
    type IntoIter = std::slice::Iter<'a, FourCycle>;

    fn into_iter(self) -> Self::IntoIter {
        self.cycles.iter()
    }
}

/// Counters from one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// DFS nodes expanded, root included.
    pub visited: u64,
}

/// Every closed walk `u v2 v3 v4 u` on distinct vertices, in both directions,
/// in DFS order with neighbors visited ascending.
pub fn raw_four_cycles(g: &Topology, u: VertexId) -> Vec<FourCycle> {
    raw_four_cycles_counted(g, u).0
}

fn raw_four_cycles_counted(g: &Topology, u: VertexId) -> (Vec<FourCycle>, SearchStats) {
    let mut out = Vec::new();
    let mut visited = 1u64;
    for &a in g.neighbors(u) {
        visited += 1;
        for &b in g.neighbors(a) {
            if b == u {
                continue;
            }
            visited += 1;
            for &c in g.neighbors(b) {
                if c == u || c == a {
                    continue;
                }
                visited += 1;
                if g.has_edge(c, u) {
                    out.push(FourCycle([u, a, b, c]));
                }
            }
        }
    }
    (out, SearchStats { visited })
}

/// Keeps the first-seen direction of every cycle.
pub fn remove_duplicates(cycles: &[FourCycle]) -> Vec<FourCycle> {
    let mut kept: Vec<FourCycle> = Vec::with_capacity(cycles.len() / 2);
    for c in cycles {
        let rev = c.reversed();
        if !kept.contains(&rev) && !kept.contains(c) {
            kept.push(*c);
        }
    }
    kept
}

/// All four-cycles through `u` on distinct vertices, each reported once and
/// starting at `u`.
pub fn four_cycles_search(g: &Topology, u: VertexId) -> CycleSet {
    four_cycles_search_with_stats(g, u).0
}

pub fn four_cycles_search_with_stats(g: &Topology, u: VertexId) -> (CycleSet, SearchStats) {
    let (raw, stats) = raw_four_cycles_counted(g, u);
    (
        CycleSet {
            root: u,
            cycles: remove_duplicates(&raw),
        },
        stats,
    )
}

/// Whether four cycles sharing a root form a lattice pattern.
///
/// Chains the cycles through shared root edges starting from the first one,
/// tracking every vertex seen so far; the chain must close back on the first
/// cycle after visiting all four. Both handednesses of the first cycle are
/// tried.
pub fn is_lattice_pattern(cycles: &[FourCycle]) -> Result<bool> {
    let quad: &[FourCycle; 4] = cycles
        .try_into()
        .map_err(|_| Error::InvalidQuadruple("expected exactly four cycles"))?;
    let root = quad[0].root();
    if quad.iter().any(|c| c.root() != root) {
        return Err(Error::InvalidQuadruple("cycles do not share a root"));
    }
    if quad.iter().any(|c| !c.has_distinct_vertices()) {
        return Err(Error::InvalidQuadruple("cycle with repeated vertex"));
    }
    Ok(lattice_order(quad).is_some())
}

/// The cyclic order `(a0, a1, a2, a3)` of root neighbors of a lattice
/// pattern, or `None` if the cycles do not form one. Inputs are assumed
/// valid (common root, distinct vertices per cycle).
pub(crate) fn lattice_order(quad: &[FourCycle; 4]) -> Option<[VertexId; 4]> {
    chain(quad, true).or_else(|| chain(quad, false))
}

fn chain(quad: &[FourCycle; 4], start_at_fourth: bool) -> Option<[VertexId; 4]> {
    let first = quad[0].0;
    let (closing, a0) = if start_at_fourth {
        (first[1], first[3])
    } else {
        (first[3], first[1])
    };
    let mut seen: Vec<VertexId> = Vec::with_capacity(9);
    seen.extend([first[0], first[2], a0]);
    let mut used = [true, false, false, false];
    let mut order = [a0, 0, 0, 0];
    let mut prev = a0;
    for slot in order.iter_mut().skip(1) {
        let k = (1..4).find(|&k| {
            let c = quad[k].0;
            !used[k] && (c[1] == prev || c[3] == prev)
        })?;
        let c = quad[k].0;
        if c[1..].iter().any(|&v| v != prev && seen.contains(&v)) {
            return None;
        }
        used[k] = true;
        seen.extend_from_slice(&c[1..]);
        prev = if c[1] == prev { c[3] } else { c[1] };
        *slot = prev;
    }
    (prev == closing).then_some(order)
}
