//! Planning engine for high-density automated valet parking.
//!
//! Given a rectangular lot, an entrance set and identical vehicles, the
//! crate:
//!
//! - packs the maximum number of stalls into the lot and reduces the optima
//!   to topologically unique layouts ([`layout`]),
//! - builds a stall/entrance adjacency graph per layout ([`adjacency`]),
//! - derives, per stall, the minimal DNF condition over stall-vacancy
//!   variables under which a relocation-free exit maneuver exists, using a
//!   Hybrid A* kinematic planner as the feasibility oracle ([`access`],
//!   [`planner`]),
//! - enumerates every relocation-free exit sequence and the matching
//!   parking sequences ([`sequencing`]), and
//! - filters parking/exit sequence pairs against a prescribed operation
//!   order ([`sequencing::filter_pairs`]).
//!
//! The `examples/` directory has one runnable example per capability; the
//! `parkplan` binary wraps the same entry points as subcommands. Brute-force
//! reference oracles for auditing the search live in [`oracle`].

pub mod access;
pub mod adjacency;
pub mod config;
pub mod error;
pub mod geometry;
pub mod layout;
pub mod oracle;
pub mod pipeline;
pub mod planner;
pub mod render;
pub mod sequencing;

pub use access::{
    derive_layout_conditions, get_access_cond, or_merge, AccessCondition, LayoutConditions,
};
pub use adjacency::{build_adjacency, restrict_to_entrance, AdjacencyGraph, AdjacencyParams};
pub use config::{InstanceConfig, OrdersSpec};
pub use error::{Error, Result};
pub use geometry::{
    footprint, pose_collision_free, rects_intersect, EntranceSegment, LotSpec, OrientedRect, Pose,
    Side, VehicleSpec,
};
pub use layout::{canonicalize_unique, solve_max_packing, Layout, Stall, StallDims, StallOrient};
pub use pipeline::{run_solution1, run_solution2, InstanceRun, Solution1Output, Solution2Output};
pub use planner::{plan, stall_exit_query, Gear, GoalRegion, LayoutPlanner, Path, PlannerParams};
pub use sequencing::{
    apply_order, cyclic_orders, enumerate_exit_sequences, filter_pairs, park_sequences_from_exit,
    OperationOrder, SequencePair,
};
