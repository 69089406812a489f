//! Brute-force oracles and graph builders shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use utsw_core::model::EdgeKind;
use utsw_core::{
    four_cycles_search, generate_torus, generate_utsw, rng_from_seed, FourCycle, Labeling, Topology, TorusSize,
    UtswGraph, VertexId,
};

pub fn size(n: u32) -> TorusSize {
    TorusSize::new(n).unwrap()
}

/// Dense adjacency matrix built from the edge list only.
pub struct Matrix {
    count: usize,
    bits: Vec<bool>,
}

impl Matrix {
    pub fn new(g: &Topology) -> Self {
        let count = g.vertex_count();
        let mut bits = vec![false; count * count];
        for (u, v) in g.edges() {
            bits[u as usize * count + v as usize] = true;
            bits[v as usize * count + u as usize] = true;
        }
        Matrix { count, bits }
    }

    pub fn edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.count + v]
    }
}

/// Every 4-cycle through `u` as the lexicographically smaller of its two
/// rooted directions, from all ordered vertex tuples.
pub fn brute_four_cycles(m: &Matrix, u: usize) -> BTreeSet<[usize; 4]> {
    let mut out = BTreeSet::new();
    for a in 0..m.count {
        if a == u || !m.edge(u, a) {
            continue;
        }
        for b in 0..m.count {
            if b == u || b == a || !m.edge(a, b) {
                continue;
            }
            for c in 0..m.count {
                if c == u || c == a || c == b || !m.edge(b, c) || !m.edge(c, u) {
                    continue;
                }
                out.insert([u, a, b, c].min([u, c, b, a]));
            }
        }
    }
    out
}

/// Compares the search against the brute-force set at every root.
/// Returns the number of roots that disagree.
pub fn cycle_mismatches(g: &Topology) -> usize {
    let m = Matrix::new(g);
    g.vertices()
        .filter(|&u| {
            let found = four_cycles_search(g, u);
            let canon: BTreeSet<[usize; 4]> = found
                .iter()
                .map(|c| {
                    let v = c.0.map(|x| x as usize);
                    v.min([v[0], v[3], v[2], v[1]])
                })
                .collect();
            let rooted = found.iter().all(|c| c.root() == u && c.has_distinct_vertices());
            !rooted || canon.len() != found.len() || canon != brute_four_cycles(&m, u as usize)
        })
        .count()
}

/// Torus plus `extra` random edges between distinct non-adjacent vertices.
pub fn augmented_torus(n: u32, extra: usize, seed: u64) -> Topology {
    let g = generate_torus(size(n)).unwrap();
    let mut edges: BTreeSet<(VertexId, VertexId)> = g.topology().edges().collect();
    let count = g.vertex_count() as VertexId;
    let mut rng = rng_from_seed(seed);
    let target = edges.len() + extra;
    let mut attempts = 0;
    while edges.len() < target && attempts < 100 * extra {
        attempts += 1;
        let (u, v) = (rng.random_range(0..count), rng.random_range(0..count));
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Topology::from_edges(size(n), edges).unwrap()
}

/// Lattice pattern checked straight from the definition: some ordering
/// `C0..C3` and root neighbors `a0..a3` with `ak` shared by `Ck` and
/// `Ck+1`, all `ak` distinct, `Ck` spanning `a(k-1)`, `ak` and an opposite
/// vertex `bk`, and the nine vertices `u, a*, b*` distinct.
pub fn lattice_by_definition(quad: &[FourCycle; 4]) -> bool {
    let u = quad[0].root();
    let arms = |c: &FourCycle| [c.0[1], c.0[3]];
    for perm in permutations() {
        let cs: Vec<FourCycle> = perm.iter().map(|&i| quad[i]).collect();
        let shared: Vec<Vec<VertexId>> = (0..4)
            .map(|k| {
                let next = arms(&cs[(k + 1) % 4]);
                arms(&cs[k]).into_iter().filter(|a| next.contains(a)).collect()
            })
            .collect();
        if shared.iter().any(Vec::is_empty) {
            continue;
        }
        let total: usize = shared.iter().map(Vec::len).product();
        for mut code in 0..total {
            let a: Vec<VertexId> = shared
                .iter()
                .map(|s| {
                    let x = s[code % s.len()];
                    code /= s.len();
                    x
                })
                .collect();
            let mut ok = (0..4).all(|i| (i + 1..4).all(|j| a[i] != a[j]));
            let mut nine = vec![u];
            nine.extend_from_slice(&a);
            for k in 0..4 {
                let want = [a[(k + 3) % 4], a[k]];
                let have = arms(&cs[k]);
                ok &= want.contains(&have[0]) && want.contains(&have[1]);
                nine.push(cs[k].opposite());
            }
            nine.sort_unstable();
            nine.dedup();
            if ok && nine.len() == 9 {
                return true;
            }
        }
    }
    false
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Random valid quadruples: subsets of real cycle sets, and lattice
/// patterns presented in random order and direction with one vertex
/// sometimes replaced.
pub fn random_quadruples(count: usize, seed: u64) -> Vec<[FourCycle; 4]> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    let graphs: Vec<Topology> = (0..20)
        .map(|s| augmented_torus(5 + (s % 3) as u32, 12 + s as usize, seed ^ s))
        .collect();
    while out.len() < count {
        if rng.random_bool(0.5) {
            let g = &graphs[rng.random_range(0..graphs.len())];
            let u = rng.random_range(0..g.vertex_count() as VertexId);
            let mut cycles = four_cycles_search(g, u).cycles().to_vec();
            if cycles.len() < 4 {
                continue;
            }
            cycles.shuffle(&mut rng);
            let mut quad = [cycles[0], cycles[1], cycles[2], cycles[3]];
            for c in &mut quad {
                if rng.random_bool(0.5) {
                    *c = c.reversed();
                }
            }
            out.push(quad);
        } else {
            let g = generate_torus(size(7)).unwrap();
            let u = rng.random_range(0..49);
            let mut quad: [FourCycle; 4] = four_cycles_search(g.topology(), u).cycles().try_into().unwrap();
            quad.shuffle(&mut rng);
            for c in &mut quad {
                if rng.random_bool(0.5) {
                    *c = c.reversed();
                }
            }
            if rng.random_bool(0.6) {
                let k = rng.random_range(0..4);
                let slot = rng.random_range(1..4);
                let v = rng.random_range(0..49);
                let mut c = quad[k];
                c.0[slot] = v;
                if !c.has_distinct_vertices() {
                    continue;
                }
                quad[k] = c;
            }
            out.push(quad);
        }
    }
    out
}

/// The generator's own positions as a complete labeling.
pub fn truth_labeling(g: &UtswGraph) -> Labeling {
    Labeling::from_labels(
        g.size(),
        g.topology().vertices().map(|u| Some(g.truth_position(u))).collect(),
    )
    .unwrap()
}

/// Local edges missing from the reduced graph, and detected vertices whose
/// reduced degree is not 4.
pub fn detection_faults(g: &UtswGraph, reduced: &utsw_core::AlmostTorus) -> (usize, usize) {
    let t = reduced.topology();
    let removed_local = g
        .typed_edges()
        .filter(|&(u, v, k)| k == EdgeKind::Local && !t.has_edge(u, v))
        .count();
    let bad_degree = t
        .vertices()
        .filter(|&u| reduced.is_detected(u) && t.neighbors(u).len() != 4)
        .count();
    (removed_local, bad_degree)
}

pub fn utsw(n: u32, seed: u64) -> UtswGraph {
    generate_utsw(size(n), seed).unwrap()
}
