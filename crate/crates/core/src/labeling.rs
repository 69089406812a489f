//! Recovery of torus coordinates from the bare adjacency of a UTSW graph.
//!
//! The pipeline has four stages:
//!
//! 1. [`remove_long_range_edges`]: every vertex whose lattice patterns touch
//!    exactly four incident edges is *detected*; its other incident edges are
//!    long-range and are dropped. The result is an "almost torus".
//! 2. [`label_reference_system`]: a random vertex whose closed neighborhood
//!    is entirely detected becomes the origin `(0, 0)`, and its four
//!    neighbors get the unit positions.
//! 3. [`label_cross`]: for a labeled, detected vertex, a lattice pattern
//!    containing two labeled perpendicular local edges fixes the orientation,
//!    and the remaining neighbors are labeled by vector arithmetic mod `n`.
//! 4. [`label_graph`]: a breadth-first search over detected vertices that
//!    labels one cross per dequeued vertex.
//!
//! Labels agree with the generator positions up to a torus automorphism;
//! what is guaranteed is that label distances equal torus distances.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;

use crate::cycles::{four_cycles_search, lattice_order, FourCycle};
use crate::error::{Error, Result};
use crate::model::{rng_from_seed, Topology, VertexId};
use crate::torus::{label_add, label_sub, Position, TorusSize};

/// Roots with more four-cycles than this are left undetected.
pub const MAX_CYCLES_PER_ROOT: usize = 64;

/// Smallest torus the labeling pipeline supports.
pub const MIN_LABELING_SIZE: u32 = 5;

/// Origin draws allowed per vertex before giving up.
pub const ORIGIN_ATTEMPTS_PER_VERTEX: u64 = 64;

fn check_size(n: TorusSize) -> Result<()> {
    if n.get() < MIN_LABELING_SIZE {
        Err(Error::UnsupportedSize(n.get()))
    } else {
        Ok(())
    }
}

/// The graph left after dropping the long-range edges of detected vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlmostTorus {
    topology: Topology,
    detected: Vec<bool>,
    capped: usize,
}

impl AlmostTorus {
    /// Wraps an already-reduced graph and its detection flags.
    pub fn new(topology: Topology, detected: Vec<bool>) -> Result<Self> {
        if detected.len() != topology.vertex_count() {
            return Err(Error::Config(format!(
                "{} detection flags for {} vertices",
                detected.len(),
                topology.vertex_count()
            )));
        }
        Ok(AlmostTorus {
            topology,
            detected,
            capped: 0,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn size(&self) -> TorusSize {
        self.topology.size()
    }

    #[inline]
    pub fn is_detected(&self, u: VertexId) -> bool {
        self.detected[u as usize]
    }

    pub fn detected(&self) -> &[bool] {
        &self.detected
    }

    pub fn detected_count(&self) -> usize {
        self.detected.iter().filter(|&&d| d).count()
    }

    pub fn detected_fraction(&self) -> f64 {
        self.detected_count() as f64 / self.detected.len() as f64
    }

    /// Roots skipped because their cycle set exceeded [`MAX_CYCLES_PER_ROOT`].
    pub fn capped_roots(&self) -> usize {
        self.capped
    }
}

/// Root neighbors incident to the lattice patterns at `u`, if exactly four.
fn detect(g: &Topology, u: VertexId) -> Detection {
    let set = four_cycles_search(g, u);
    let cycles = set.cycles();
    if cycles.len() > MAX_CYCLES_PER_ROOT {
        return Detection::Capped;
    }
    let mut incident: Vec<VertexId> = Vec::with_capacity(8);
    for_each_lattice_pattern(cycles, |quad| {
        for c in quad {
            let (a, b) = c.root_neighbors();
            for v in [a, b] {
                if !incident.contains(&v) {
                    incident.push(v);
                }
            }
        }
        false
    });
    if incident.len() == 4 {
        incident.sort_unstable();
        Detection::Detected([incident[0], incident[1], incident[2], incident[3]])
    } else {
        Detection::Undetected
    }
}

#[derive(Debug, Clone, Copy)]
enum Detection {
    Detected([VertexId; 4]),
    Undetected,
    Capped,
}

/// Calls `f` on every 4-subset of `cycles` (in lexicographic index order)
/// that forms a lattice pattern; stops early when `f` returns `true`.
fn for_each_lattice_pattern(cycles: &[FourCycle], mut f: impl FnMut(&[FourCycle; 4]) -> bool) {
    let k = cycles.len();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                for m in l + 1..k {
                    let quad = [cycles[i], cycles[j], cycles[l], cycles[m]];
                    if lattice_order(&quad).is_some() && f(&quad) {
                        return;
                    }
                }
            }
        }
    }
}

fn assemble(g: &Topology, detections: Vec<Detection>) -> AlmostTorus {
    let keeps = |u: VertexId, v: VertexId| match &detections[u as usize] {
        Detection::Detected(local) => local.contains(&v),
        _ => true,
    };
    let adj: Vec<Vec<VertexId>> = g
        .vertices()
        .map(|u| {
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| keeps(u, v) && keeps(v, u))
                .collect()
        })
        .collect();
    AlmostTorus {
        topology: Topology::from_sorted_adjacency(g.size(), adj),
        detected: detections.iter().map(|d| matches!(d, Detection::Detected(_))).collect(),
        capped: detections.iter().filter(|d| matches!(d, Detection::Capped)).count(),
    }
}

/// Detects vertices and drops every edge flagged by at least one detected
/// endpoint.
pub fn remove_long_range_edges(g: &Topology) -> Result<AlmostTorus> {
    check_size(g.size())?;
    let detections = g.vertices().map(|u| detect(g, u)).collect();
    Ok(assemble(g, detections))
}

/// Same result as [`remove_long_range_edges`], with the per-vertex detection
/// sweep spread over the rayon pool.
pub fn remove_long_range_edges_par(g: &Topology) -> Result<AlmostTorus> {
    check_size(g.size())?;
    let detections = (0..g.vertex_count() as VertexId)
        .into_par_iter()
        .map(|u| detect(g, u))
        .collect();
    Ok(assemble(g, detections))
}

/// A partial labeling of the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    n: TorusSize,
    labels: Vec<Option<Position>>,
    origin: Option<VertexId>,
    conflicts: u64,
    uncertain: u64,
}

impl Labeling {
    /// Wraps externally produced labels. The origin is the vertex labeled
    /// `(0, 0)`, if any.
    pub fn from_labels(n: TorusSize, labels: Vec<Option<Position>>) -> Result<Self> {
        if labels.len() != n.vertex_count() {
            return Err(Error::Config(format!(
                "{} labels for {} vertices",
                labels.len(),
                n.vertex_count()
            )));
        }
        if let Some(p) = labels.iter().flatten().find(|p| !n.contains(**p)) {
            return Err(Error::Config(format!("label {p} outside the {n}x{n} torus")));
        }
        let origin = labels
            .iter()
            .position(|l| *l == Some(Position::ORIGIN))
            .map(|v| v as VertexId);
        Ok(Labeling {
            n,
            labels,
            origin,
            conflicts: 0,
            uncertain: 0,
        })
    }

    pub fn size(&self) -> TorusSize {
        self.n
    }

    #[inline]
    pub fn label(&self, u: VertexId) -> Option<Position> {
        self.labels[u as usize]
    }

    pub fn labels(&self) -> &[Option<Position>] {
        &self.labels
    }

    pub fn origin(&self) -> Option<VertexId> {
        self.origin
    }

    /// Assignments that tried to overwrite a label with a different value.
    /// The first label is always kept.
    pub fn conflicts(&self) -> u64 {
        self.conflicts
    }

    /// Crosses whose last two arms were left unlabeled because their order
    /// could not be certified.
    pub fn uncertain_crosses(&self) -> u64 {
        self.uncertain
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    pub fn labeled_fraction(&self) -> f64 {
        self.labeled_count() as f64 / self.labels.len() as f64
    }

    pub fn is_complete(&self) -> bool {
        self.labels.iter().all(Option::is_some)
    }

    pub fn labeled_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_some())
            .map(|(v, _)| v as VertexId)
    }
}

/// Mutable state of the breadth-first labeling: labels, enqueued flags and
/// the queue itself.
#[derive(Debug, Clone)]
pub struct LabelingState {
    n: TorusSize,
    labels: Vec<Option<Position>>,
    enqueued: Vec<bool>,
    queue: VecDeque<VertexId>,
    origin: VertexId,
    conflicts: u64,
    uncertain: u64,
}

impl LabelingState {
    fn new(n: TorusSize, origin: VertexId) -> Self {
        LabelingState {
            n,
            labels: vec![None; n.vertex_count()],
            enqueued: vec![false; n.vertex_count()],
            queue: VecDeque::new(),
            origin,
            conflicts: 0,
            uncertain: 0,
        }
    }

    pub fn origin(&self) -> VertexId {
        self.origin
    }

    pub fn queue(&self) -> &VecDeque<VertexId> {
        &self.queue
    }

    pub fn pop(&mut self) -> Option<VertexId> {
        self.queue.pop_front()
    }

    #[inline]
    pub fn label(&self, u: VertexId) -> Option<Position> {
        self.labels[u as usize]
    }

    pub fn is_enqueued(&self, u: VertexId) -> bool {
        self.enqueued[u as usize]
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    pub fn conflicts(&self) -> u64 {
        self.conflicts
    }

    pub fn uncertain_crosses(&self) -> u64 {
        self.uncertain
    }

    fn assign(&mut self, v: VertexId, p: Position) {
        match self.labels[v as usize] {
            None => self.labels[v as usize] = Some(p),
            Some(q) if q != p => self.conflicts += 1,
            Some(_) => {}
        }
    }

    fn enqueue(&mut self, v: VertexId) {
        self.enqueued[v as usize] = true;
        self.queue.push_back(v);
    }

    pub fn into_labeling(self) -> Labeling {
        Labeling {
            n: self.n,
            labels: self.labels,
            origin: Some(self.origin),
            conflicts: self.conflicts,
            uncertain: self.uncertain,
        }
    }
}

/// Walks a lattice pattern around `root` starting from the perpendicular pair
/// `(first, second)`: returns the neighbor after `second` (opposite `first`)
/// and the one after that (opposite `second`).
fn complete_cross(quad: &[FourCycle], first: VertexId, second: VertexId) -> Option<(VertexId, VertexId)> {
    let step = |prev2: VertexId, prev: VertexId| {
        quad.iter().find_map(|c| {
            let (c2, c4) = c.root_neighbors();
            if c2 == prev && c4 != prev2 {
                Some(c4)
            } else if c4 == prev && c2 != prev2 {
                Some(c2)
            } else {
                None
            }
        })
    };
    let third = step(first, second)?;
    let fourth = step(second, third)?;
    Some((third, fourth))
}

/// Axis (0 for x, 1 for y) along which `to` is a unit step from `from`.
fn unit_axis(n: TorusSize, from: Position, to: Position) -> Option<u8> {
    let d = label_sub(n, to, from);
    let unit = |c: u32| c == 1 || c == n.get() - 1;
    match (d.x, d.y) {
        (x, 0) if unit(x) => Some(0),
        (0, y) if unit(y) => Some(1),
        _ => None,
    }
}

/// Whether two labeled edges are unit steps along different axes.
fn perpendicular(n: TorusSize, a: (Position, Position), b: (Position, Position)) -> bool {
    match (unit_axis(n, a.0, a.1), unit_axis(n, b.0, b.1)) {
        (Some(x), Some(y)) => x != y,
        _ => false,
    }
}

/// Picks an origin and labels its cross.
///
/// Origins are drawn uniformly from `rng` until one is found whose closed
/// neighborhood is all detected; at most `64 n^2` draws are made.
pub fn label_reference_system<R: Rng + ?Sized>(t: &AlmostTorus, rng: &mut R) -> Result<LabelingState> {
    let n = t.size();
    check_size(n)?;
    let g = t.topology();
    let count = g.vertex_count() as VertexId;
    let attempts = ORIGIN_ATTEMPTS_PER_VERTEX * count as u64;
    let origin = (0..attempts)
        .map(|_| rng.random_range(0..count))
        .find(|&o| t.is_detected(o) && g.neighbors(o).iter().all(|&v| t.is_detected(v)))
        .ok_or(Error::NoOrigin(attempts))?;

    let cycles = four_cycles_search(g, origin);
    let first = cycles.cycles().first().ok_or(Error::MalformedReference(origin))?;
    let (o1, o2) = first.root_neighbors();
    let (o3, o4) = complete_cross(cycles.cycles(), o1, o2).ok_or(Error::MalformedReference(origin))?;

    let side = n.get();
    let mut state = LabelingState::new(n, origin);
    state.assign(origin, Position::ORIGIN);
    state.assign(o1, Position::new(0, 1));
    state.assign(o2, Position::new(1, 0));
    state.assign(o3, Position::new(0, side - 1));
    state.assign(o4, Position::new(side - 1, 0));
    state.enqueued[origin as usize] = true;
    for v in [o1, o2, o3, o4] {
        state.enqueue(v);
    }
    Ok(state)
}

/// An edge kept in the reduced graph is local when one endpoint is detected.
fn certified(t: &AlmostTorus, x: VertexId, y: VertexId) -> bool {
    t.is_detected(x) || t.is_detected(y)
}

/// Whether `x` and `y` have a common neighbor other than `root`; with
/// `strict`, both edges through it must be certified local.
fn share_corner(t: &AlmostTorus, root: VertexId, x: VertexId, y: VertexId, strict: bool) -> bool {
    let g = t.topology();
    g.neighbors(x)
        .iter()
        .any(|&w| w != root && g.has_edge(w, y) && (!strict || (certified(t, x, w) && certified(t, w, y))))
}

/// Whether `arm` is the neighbor of `root`, other than `other`, sitting next
/// to `corner`: either their edge is certified local or `arm` is the only
/// such neighbor.
fn arm_at_corner(t: &AlmostTorus, root: VertexId, other: VertexId, corner: VertexId, arm: VertexId) -> bool {
    if certified(t, corner, arm) {
        return true;
    }
    let g = t.topology();
    let mut hits = g
        .neighbors(root)
        .iter()
        .filter(|&&v| v != other && g.has_edge(v, corner));
    matches!((hits.next(), hits.next()), (Some(&v), None) if v == arm)
}

/// Orders the two neighbors of `root` outside the perpendicular pair
/// `(u1, u2)` as `(u3, u4)`, with `u3` opposite `u1`. In a torus of side at
/// least 5 adjacent cross arms share a corner and opposite arms share none
/// through local edges. Certified corners decide first; otherwise the order
/// is accepted only when exactly one of the two candidates has corners.
fn order_remaining(t: &AlmostTorus, root: VertexId, u1: VertexId, u2: VertexId) -> Option<(VertexId, VertexId)> {
    let rest: Vec<VertexId> = t
        .topology()
        .neighbors(root)
        .iter()
        .copied()
        .filter(|&v| v != u1 && v != u2)
        .collect();
    let &[a, b] = rest.as_slice() else {
        return None;
    };
    let fits = |third: VertexId, fourth: VertexId, strict: bool| {
        share_corner(t, root, u2, third, strict) || share_corner(t, root, fourth, u1, strict)
    };
    match (fits(a, b, true), fits(b, a, true)) {
        (true, false) => return Some((a, b)),
        (false, true) => return Some((b, a)),
        _ => {}
    }
    let fits = |third: VertexId, fourth: VertexId| {
        share_corner(t, root, u2, third, false) && share_corner(t, root, fourth, u1, false)
    };
    match (fits(a, b), fits(b, a)) {
        (true, false) => Some((a, b)),
        (false, true) => Some((b, a)),
        _ => None,
    }
}

type Assignment = (VertexId, Position);

/// Labels the cross rooted at the detected, labeled vertex `u` and enqueues
/// its detected members that were not enqueued before.
///
/// A reference is a cycle of a lattice pattern at `u` holding two labeled
/// edges whose labels are unit steps along different axes, with the
/// non-root edge kept by a detected endpoint. The vertex labeled from a
/// corner must provably be the arm next to that corner. Arms whose
/// order cannot be certified are left for another cross.
pub fn label_cross(t: &AlmostTorus, u: VertexId, state: &mut LabelingState) -> Result<()> {
    let n = t.size();
    let g = t.topology();
    let here = state.label(u).ok_or(Error::UnlabelableCross(u))?;
    let set = four_cycles_search(g, u);
    if set.len() > MAX_CYCLES_PER_ROOT {
        return Err(Error::UnlabelableCross(u));
    }

    // (u1, u2, label to write)
    let mut found: Option<(VertexId, VertexId, Option<Assignment>)> = None;
    for_each_lattice_pattern(set.cycles(), |quad| {
        for c in quad {
            let [_, c2, c3, c4] = c.0;
            let (l2, l3, l4) = (state.label(c2), state.label(c3), state.label(c4));
            let write = match (l2, l3, l4) {
                (Some(p2), _, Some(p4)) if perpendicular(n, (here, p2), (here, p4)) => None,
                (Some(p2), Some(p3), _)
                    if (t.is_detected(c2) || t.is_detected(c3))
                        && perpendicular(n, (here, p2), (p2, p3))
                        && arm_at_corner(t, u, c2, c3, c4) =>
                {
                    Some((c4, label_sub(n, label_add(n, here, p3), p2)))
                }
                (_, Some(p3), Some(p4))
                    if (t.is_detected(c3) || t.is_detected(c4))
                        && perpendicular(n, (here, p4), (p4, p3))
                        && arm_at_corner(t, u, c4, c3, c2) =>
                {
                    Some((c2, label_sub(n, label_add(n, here, p3), p4)))
                }
                _ => continue,
            };
            found = Some((c2, c4, write));
            return true;
        }
        false
    });
    let (u1, u2, write) = found.ok_or(Error::UnlabelableCross(u))?;
    if let Some((v, p)) = write {
        state.assign(v, p);
    }
    let mut arms = vec![u1, u2];
    if let Some((u3, u4)) = order_remaining(t, u, u1, u2) {
        let twice = label_add(n, here, here);
        let p1 = state.label(u1).expect("u1 labeled above");
        let p2 = state.label(u2).expect("u2 labeled above");
        state.assign(u3, label_sub(n, twice, p1));
        state.assign(u4, label_sub(n, twice, p2));
        arms.extend([u3, u4]);
    } else {
        state.uncertain += 1;
    }

    for v in arms {
        if !state.is_enqueued(v) && t.is_detected(v) {
            state.enqueue(v);
        }
    }
    Ok(())
}

/// Everything produced by one labeling run.
#[derive(Debug, Clone)]
pub struct LabelingRun {
    pub almost_torus: AlmostTorus,
    pub labeling: Labeling,
    /// Crosses labeled by the breadth-first search (origin cross excluded).
    pub crosses: usize,
    /// Dequeued vertices that never got a certifiable reference.
    pub skipped: usize,
}

/// Labels a UTSW graph from its adjacency alone. `seed` drives the origin
/// choice.
pub fn label_graph(g: &Topology, seed: u64) -> Result<Labeling> {
    Ok(label_graph_detailed(g, seed)?.labeling)
}

pub fn label_graph_detailed(g: &Topology, seed: u64) -> Result<LabelingRun> {
    let almost_torus = remove_long_range_edges(g)?;
    label_almost_torus(almost_torus, seed)
}

/// Runs the reference system and breadth-first stages on a reduced graph.
///
/// A vertex without a usable reference is deferred; deferred vertices are
/// retried in order whenever the queue drains, until a pass labels nothing.
pub fn label_almost_torus(almost_torus: AlmostTorus, seed: u64) -> Result<LabelingRun> {
    let mut rng = rng_from_seed(seed);
    let mut state = label_reference_system(&almost_torus, &mut rng)?;
    let mut crosses = 0;
    let mut deferred: Vec<VertexId> = Vec::new();
    loop {
        while let Some(u) = state.pop() {
            match label_cross(&almost_torus, u, &mut state) {
                Ok(()) => crosses += 1,
                Err(Error::UnlabelableCross(_)) => deferred.push(u),
                Err(e) => return Err(e),
            }
        }
        let before = deferred.len();
        let mut still = Vec::with_capacity(before);
        for u in deferred {
            match label_cross(&almost_torus, u, &mut state) {
                Ok(()) => crosses += 1,
                Err(Error::UnlabelableCross(_)) => still.push(u),
                Err(e) => return Err(e),
            }
        }
        deferred = still;
        if deferred.len() == before {
            break;
        }
    }
    Ok(LabelingRun {
        almost_torus,
        labeling: state.into_labeling(),
        crosses,
        skipped: deferred.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_torus, generate_utsw, EdgeKind, UtswGraph};
    use crate::torus::{label_distance, torus_distance};

    fn size(n: u32) -> TorusSize {
        TorusSize::new(n).unwrap()
    }

    fn assert_distance_preserving(g: &UtswGraph, l: &Labeling) {
        let labeled: Vec<VertexId> = l.labeled_vertices().collect();
        for (i, &u) in labeled.iter().enumerate() {
            for &v in &labeled[i + 1..] {
                assert_eq!(
                    label_distance(g.size(), l.label(u).unwrap(), l.label(v).unwrap()),
                    g.truth_distance(u, v),
                    "pair {u} {v}"
                );
            }
        }
    }

    #[test]
    fn pure_torus_is_left_intact_and_fully_detected() {
        for n in [5u32, 6, 8] {
            let g = generate_torus(size(n)).unwrap();
            let t = remove_long_range_edges(g.topology()).unwrap();
            assert_eq!(t.topology(), g.topology());
            assert_eq!(t.detected_count(), g.vertex_count());
        }
    }

    #[test]
    fn small_sizes_are_rejected() {
        for n in [3u32, 4] {
            let g = generate_utsw(size(n), 1).unwrap();
            assert!(matches!(label_graph(g.topology(), 1), Err(Error::UnsupportedSize(_))));
            assert!(matches!(
                remove_long_range_edges(g.topology()),
                Err(Error::UnsupportedSize(_))
            ));
        }
    }

    #[test]
    fn detection_never_drops_local_edges() {
        for n in [5u32, 7, 10, 20] {
            for seed in 0..10 {
                let g = generate_utsw(size(n), seed).unwrap();
                let t = remove_long_range_edges(g.topology()).unwrap();
                for (u, v, kind) in g.typed_edges() {
                    if kind == EdgeKind::Local {
                        assert!(t.topology().has_edge(u, v), "local edge {u}-{v} dropped");
                    }
                }
                for u in t.topology().vertices() {
                    if t.is_detected(u) {
                        assert_eq!(t.topology().degree(u).unwrap(), 4);
                        assert!(t
                            .topology()
                            .neighbors(u)
                            .iter()
                            .all(|&v| g.edge_kind(u, v) == Some(EdgeKind::Local)));
                    }
                }
            }
        }
    }

    #[test]
    fn parallel_sweep_matches_sequential() {
        for seed in 0..4 {
            let g = generate_utsw(size(30), seed).unwrap();
            assert_eq!(
                remove_long_range_edges(g.topology()).unwrap(),
                remove_long_range_edges_par(g.topology()).unwrap()
            );
        }
    }

    #[test]
    fn reference_system_on_torus() {
        let g = generate_torus(size(5)).unwrap();
        let t = remove_long_range_edges(g.topology()).unwrap();
        let mut rng = rng_from_seed(5);
        let state = label_reference_system(&t, &mut rng).unwrap();
        assert_eq!(state.queue().len(), 4);
        assert_eq!(state.labeled_count(), 5);
        let o = state.origin();
        assert_eq!(state.label(o), Some(Position::ORIGIN));
        let mut around: Vec<Position> = state.queue().iter().map(|&v| state.label(v).unwrap()).collect();
        around.sort();
        assert_eq!(
            around,
            vec![
                Position::new(0, 1),
                Position::new(0, 4),
                Position::new(1, 0),
                Position::new(4, 0)
            ]
        );
        assert!(state.queue().iter().all(|&v| state.is_enqueued(v)));
        assert!(state.is_enqueued(o));
        for &v in state.queue() {
            assert_eq!(g.truth_distance(o, v), 1);
        }
    }

    #[test]
    fn reference_system_without_detected_vertices_fails() {
        let g = generate_torus(size(5)).unwrap();
        let t = AlmostTorus::new(g.topology().clone(), vec![false; 25]).unwrap();
        let mut rng = rng_from_seed(1);
        assert!(matches!(
            label_reference_system(&t, &mut rng),
            Err(Error::NoOrigin(1600))
        ));
    }

    #[test]
    fn first_cross_after_reference_system() {
        let g = generate_torus(size(7)).unwrap();
        let t = remove_long_range_edges(g.topology()).unwrap();
        let mut rng = rng_from_seed(2);
        let mut state = label_reference_system(&t, &mut rng).unwrap();
        let o1 = state.pop().unwrap();
        label_cross(&t, o1, &mut state).unwrap();
        let p = state.label(o1).unwrap();
        for &v in t.topology().neighbors(o1) {
            let q = state.label(v).expect("neighbor labeled");
            assert_eq!(label_distance(size(7), p, q), 1);
        }
        assert_eq!(state.conflicts(), 0);
    }

    #[test]
    fn cross_labels_wrap_around() {
        // hand-built state: u labeled (0, n-1) with one labeled perpendicular
        // pair; its +y neighbour must come out as (0, 0)
        let n = size(7);
        let g = generate_torus(n).unwrap();
        let t = remove_long_range_edges(g.topology()).unwrap();
        let at = |x, y| n.vertex_of(Position::new(x, y));
        let u = at(3, 3);
        let mut state = LabelingState::new(n, u);
        state.assign(u, Position::new(0, 6));
        state.assign(at(3, 4), Position::new(0, 0));
        state.assign(at(4, 3), Position::new(1, 6));
        label_cross(&t, u, &mut state).unwrap();
        assert_eq!(state.label(at(3, 2)), Some(Position::new(0, 5)));
        assert_eq!(state.label(at(2, 3)), Some(Position::new(6, 6)));
        assert_eq!(state.conflicts(), 0);
        // only the cross was touched; all four are detected and enqueued
        assert_eq!(state.labeled_count(), 5);
        assert_eq!(state.queue().len(), 4);
    }

    #[test]
    fn unlabeled_root_is_an_error() {
        let g = generate_torus(size(6)).unwrap();
        let t = remove_long_range_edges(g.topology()).unwrap();
        let mut state = LabelingState::new(size(6), 0);
        assert!(matches!(
            label_cross(&t, 3, &mut state),
            Err(Error::UnlabelableCross(3))
        ));
        state.assign(3, Position::new(2, 2));
        assert!(matches!(
            label_cross(&t, 3, &mut state),
            Err(Error::UnlabelableCross(3))
        ));
    }

    #[test]
    fn pure_torus_fully_labeled() {
        for n in 5..=9u32 {
            let g = generate_torus(size(n)).unwrap();
            let l = label_graph(g.topology(), 77).unwrap();
            assert!(l.is_complete());
            assert_eq!(l.conflicts(), 0);
            assert_distance_preserving(&g, &l);
        }
    }

    #[test]
    fn utsw_labels_preserve_distances() {
        for n in 5..=12u32 {
            for seed in 0..12 {
                let g = generate_utsw(size(n), seed).unwrap();
                let run = match label_graph_detailed(g.topology(), seed + 100) {
                    Err(Error::NoOrigin(_)) if n < 7 => continue,
                    other => other.unwrap(),
                };
                assert_eq!(run.labeling.conflicts(), 0, "n={n} seed={seed}");
                assert_distance_preserving(&g, &run.labeling);
            }
        }
    }

    #[test]
    fn perpendicular_needs_unit_steps_on_distinct_axes() {
        let n = size(7);
        let p = |x, y| Position::new(x, y);
        assert!(perpendicular(n, (p(3, 3), p(3, 4)), (p(3, 4), p(4, 4))));
        assert!(!perpendicular(n, (p(3, 3), p(3, 4)), (p(3, 4), p(3, 5))));
        assert!(perpendicular(n, (p(0, 0), p(6, 0)), (p(0, 0), p(0, 6))));
        assert!(!perpendicular(n, (p(0, 0), p(2, 0)), (p(0, 0), p(0, 1))));
        assert!(!perpendicular(n, (p(0, 0), p(1, 1)), (p(0, 0), p(0, 1))));
    }

    /// Torus of side 7 plus `extra` edges, with only `detected` marked.
    fn almost(extra: &[(Position, Position)], detected: &[Position]) -> AlmostTorus {
        let n = size(7);
        let torus = generate_torus(n).unwrap();
        let mut edges: Vec<_> = torus.topology().edges().collect();
        edges.extend(extra.iter().map(|&(a, b)| (n.vertex_of(a), n.vertex_of(b))));
        let g = Topology::from_edges(n, edges).unwrap();
        let mut flags = vec![false; n.vertex_count()];
        for &p in detected {
            flags[n.vertex_of(p) as usize] = true;
        }
        AlmostTorus::new(g, flags).unwrap()
    }

    #[test]
    fn arm_order_ignores_one_spurious_corner() {
        let n = size(7);
        let v = |x, y| n.vertex_of(Position::new(x, y));
        let (u, north, south, east, west) = (v(3, 3), v(3, 4), v(3, 2), v(4, 3), v(2, 3));
        // corner (4, 4) also reaches the west arm through a long-range edge
        let t = almost(&[(Position::new(4, 4), Position::new(2, 3))], &[Position::new(3, 3)]);
        assert_eq!(order_remaining(&t, u, north, east), Some((south, west)));
    }

    #[test]
    fn arm_order_needs_certified_corner_when_ambiguous() {
        let n = size(7);
        let v = |x, y| n.vertex_of(Position::new(x, y));
        let (u, north, south, east, west) = (v(3, 3), v(3, 4), v(3, 2), v(4, 3), v(2, 3));
        // both opposite pairs get a spurious shared corner
        let extra = [
            (Position::new(4, 4), Position::new(2, 3)),
            (Position::new(3, 2), Position::new(2, 4)),
        ];
        let t = almost(&extra, &[Position::new(3, 3)]);
        assert_eq!(order_remaining(&t, u, north, east), None);
        let t = almost(&extra, &[Position::new(3, 3), Position::new(4, 2)]);
        assert_eq!(order_remaining(&t, u, north, east), Some((south, west)));
    }

    #[test]
    fn arm_at_corner_rejects_ambiguous_uncertified_arms() {
        let n = size(7);
        let v = |x, y| n.vertex_of(Position::new(x, y));
        let (u, north, east, west, corner) = (v(3, 3), v(3, 4), v(4, 3), v(2, 3), v(4, 4));
        let extra = [(Position::new(4, 4), Position::new(2, 3))];
        let t = almost(&extra, &[Position::new(3, 3)]);
        assert!(!arm_at_corner(&t, u, north, corner, east));
        assert!(!arm_at_corner(&t, u, north, corner, west));
        let t = almost(&extra, &[Position::new(3, 3), Position::new(4, 3)]);
        assert!(arm_at_corner(&t, u, north, corner, east));
        let t = almost(&[], &[Position::new(3, 3)]);
        assert!(arm_at_corner(&t, u, north, corner, east));
    }

    #[test]
    fn labels_are_torus_automorphism_of_truth() {
        // the pure torus labeling is an isometry, so it maps the truth
        // position of the origin's neighbours onto unit offsets
        let n = size(9);
        let g = generate_torus(n).unwrap();
        let l = label_graph(g.topology(), 3).unwrap();
        let o = l.origin().unwrap();
        for v in g.topology().vertices() {
            let d_truth = torus_distance(n, g.truth_position(o), g.truth_position(v));
            assert_eq!(label_distance(n, Position::ORIGIN, l.label(v).unwrap()), d_truth);
        }
    }
}
