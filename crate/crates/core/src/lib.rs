//! Undirected toroidal small-world (UTSW) graphs: seeded generation,
//! recovery of torus coordinates from adjacency alone, and compact greedy
//! routing over the recovered labels.
//!
//! The usual flow is [`generate_utsw`] → [`label_graph`] →
//! [`build_routing_tables`] → [`myopic_route`]. The [`experiment`] module
//! runs the same pipeline over many seeds and sizes.

pub mod bounds;
pub mod cycles;
pub mod error;
pub mod experiment;
pub mod io;
pub mod labeling;
pub mod model;
pub mod routing;
pub mod torus;

pub use cycles::{four_cycles_search, is_lattice_pattern, remove_duplicates, CycleSet, FourCycle};
pub use error::{Error, Result};
pub use labeling::{
    label_cross, label_graph, label_graph_detailed, label_reference_system, remove_long_range_edges, AlmostTorus,
    Labeling, LabelingRun, LabelingState,
};
pub use model::{
    generate_torus, generate_utsw, rng_from_seed, sample_long_range_target, EdgeKind, GraphRng, LongRangeSampler,
    Topology, UtswGraph, VertexId,
};
pub use routing::{build_routing_tables, myopic_route, routing_stats, RouteResult, RouteStatus, RoutingTables};
pub use torus::{
    label_add, label_distance, label_sub, normalizing_factor, ring_members, ring_size, torus_distance,
    NormalizingFactor, Position, TorusSize,
};
