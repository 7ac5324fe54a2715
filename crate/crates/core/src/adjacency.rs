//! Undirected stall/entrance adjacency graph used to seed and prune the
//! accessibility search. The graph is a pruning structure, not the
//! feasibility oracle: feasibility is always confirmed by the planner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{footprint, LotSpec, Pose, Side, VehicleSpec};
use crate::layout::{Layout, StallDims, StallOrient};

const TOL: f64 = 1e-9;

/// Geometric adjacency thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdjacencyParams {
    /// Two stalls within this gap are candidates for adjacency.
    pub gap_tolerance: f64,
    /// Minimum shared boundary overlap for an edge.
    pub min_overlap: f64,
}

impl Default for AdjacencyParams {
    fn default() -> Self {
        AdjacencyParams {
            gap_tolerance: 0.5,
            min_overlap: 1.0,
        }
    }
}

/// Node indices `0..n_stalls` are stalls; entrance nodes follow in
/// `entrance_ids` order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyGraph {
    pub n_stalls: usize,
    /// Entrance indices (into `lot.entrances`) present in this graph.
    pub entrance_ids: Vec<usize>,
    adj: Vec<u64>,
}

impl AdjacencyGraph {
    pub fn node_count(&self) -> usize {
        self.n_stalls + self.entrance_ids.len()
    }

    /// Graph node id of an entrance, if present.
    pub fn entrance_node(&self, entrance: usize) -> Option<usize> {
        self.entrance_ids
            .iter()
            .position(|&e| e == entrance)
            .map(|pos| self.n_stalls + pos)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && v < self.node_count() && self.adj[u] & (1 << v) != 0
    }

    /// Neighbor bitmask of node `u` over all graph nodes.
    pub fn neighbors(&self, u: usize) -> u64 {
        self.adj[u]
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u] |= 1 << v;
            self.adj[v] |= 1 << u;
        }
    }

    /// Sorted edge list (u < v).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.node_count() {
            for v in (u + 1)..self.node_count() {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Human-readable node label: `s<i>` for stalls, `e<i>` for entrances.
    pub fn node_label(&self, node: usize) -> String {
        if node < self.n_stalls {
            format!("s{node}")
        } else {
            format!("e{}", self.entrance_ids[node - self.n_stalls])
        }
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            nodes: (0..self.node_count()).map(|n| self.node_label(n)).collect(),
            edges: self
                .edges()
                .iter()
                .map(|&(u, v)| [self.node_label(u), self.node_label(v)])
                .collect(),
        }
    }
}

/// Serialized graph form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

/// Build the adjacency graph of a layout.
///
/// Stall-stall edge: the two stall rectangles, each inflated by half the gap
/// tolerance, overlap and share a boundary overlap of at least
/// `min_overlap`. Stall-entrance edge: the inflated stall meets the entrance
/// span with at least `min_overlap`, or the straight corridor swept by the
/// stall's parked vehicle toward the entrance is clear of every other parked
/// vehicle (boundary-facing stalls).
pub fn build_adjacency(
    layout: &Layout,
    lot: &LotSpec,
    dims: StallDims,
    vehicle: &VehicleSpec,
    params: &AdjacencyParams,
) -> AdjacencyGraph {
    let n = layout.stalls.len();
    let m = lot.entrances.len();
    assert!(n + m <= 64, "adjacency graph limited to 64 nodes");
    let mut g = AdjacencyGraph {
        n_stalls: n,
        entrance_ids: (0..m).collect(),
        adj: vec![0; n + m],
    };
    let half_gap = 0.5 * params.gap_tolerance;
    for i in 0..n {
        let a = layout.stalls[i].bounds(dims);
        for j in (i + 1)..n {
            let b = layout.stalls[j].bounds(dims);
            let ox = (a.2 + half_gap).min(b.2 + half_gap) - (a.0 - half_gap).max(b.0 - half_gap);
            let oy = (a.3 + half_gap).min(b.3 + half_gap) - (a.1 - half_gap).max(b.1 - half_gap);
            if ox >= -TOL && oy >= -TOL && ox.max(oy) >= params.min_overlap - TOL {
                g.add_edge(i, j);
            }
        }
    }
    for (ei, entrance) in lot.entrances.iter().enumerate() {
        for (si, stall) in layout.stalls.iter().enumerate() {
            if stall_meets_entrance(
                stall.bounds(dims),
                entrance,
                lot,
                half_gap,
                params.min_overlap,
            ) || corridor_clear(layout, si, entrance, lot, dims, vehicle)
            {
                g.add_edge(si, n + ei);
            }
        }
    }
    g
}

fn stall_meets_entrance(
    bounds: (f64, f64, f64, f64),
    entrance: &crate::geometry::EntranceSegment,
    lot: &LotSpec,
    half_gap: f64,
    min_overlap: f64,
) -> bool {
    let (x0, y0, x1, y1) = bounds;
    let (reaches, cross) = match entrance.side {
        Side::Left => (x0 - half_gap <= TOL, [y0 - half_gap, y1 + half_gap]),
        Side::Right => (
            x1 + half_gap >= lot.length - TOL,
            [y0 - half_gap, y1 + half_gap],
        ),
        Side::Bottom => (y0 - half_gap <= TOL, [x0 - half_gap, x1 + half_gap]),
        Side::Top => (
            y1 + half_gap >= lot.width - TOL,
            [x0 - half_gap, x1 + half_gap],
        ),
    };
    let overlap = cross[1].min(entrance.span[1]) - cross[0].max(entrance.span[0]);
    reaches && overlap >= min_overlap - TOL
}

/// Axis-aligned rectangle of the vehicle parked centered in a stall.
pub fn parked_vehicle_bounds(
    stall: &crate::layout::Stall,
    dims: StallDims,
    vehicle: &VehicleSpec,
) -> (f64, f64, f64, f64) {
    let (cx, cy) = stall.center(dims);
    let (hx, hy) = match stall.orient {
        StallOrient::AlongWidth => (0.5 * vehicle.width, 0.5 * vehicle.length),
        StallOrient::AlongLength => (0.5 * vehicle.length, 0.5 * vehicle.width),
    };
    (cx - hx, cy - hy, cx + hx, cy + hy)
}

/// Rear-axle poses (both headings along the stall's long axis) of a vehicle
/// parked centered in a stall.
pub fn parked_poses(
    stall: &crate::layout::Stall,
    dims: StallDims,
    vehicle: &VehicleSpec,
) -> [Pose; 2] {
    let (cx, cy) = stall.center(dims);
    let headings = match stall.orient {
        StallOrient::AlongWidth => [std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2],
        StallOrient::AlongLength => [0.0, std::f64::consts::PI],
    };
    headings.map(|theta| {
        let ahead = vehicle.wheelbase + vehicle.front_overhang;
        let offset = 0.5 * (ahead - vehicle.rear_overhang);
        let (s, c) = theta.sin_cos();
        Pose::new(cx - offset * c, cy - offset * s, theta)
    })
}

/// Parked vehicle footprint as an oriented rectangle (for planner obstacles).
pub fn parked_vehicle_rect(
    stall: &crate::layout::Stall,
    dims: StallDims,
    vehicle: &VehicleSpec,
) -> crate::geometry::OrientedRect {
    footprint(&parked_poses(stall, dims, vehicle)[0], vehicle)
}

/// True if the straight corridor from `si`'s parked vehicle to the entrance
/// crosses no other stall's parked vehicle (strict interior overlap) and the
/// vehicle's cross extent lies within the entrance span.
fn corridor_clear(
    layout: &Layout,
    si: usize,
    entrance: &crate::geometry::EntranceSegment,
    lot: &LotSpec,
    dims: StallDims,
    vehicle: &VehicleSpec,
) -> bool {
    let v = parked_vehicle_bounds(&layout.stalls[si], dims, vehicle);
    // Corridor from the vehicle's near face to the boundary, spanning the
    // vehicle's cross extent.
    let (corridor, cross) = match entrance.side {
        Side::Left => ((0.0, v.1, v.0, v.3), [v.1, v.3]),
        Side::Right => ((v.2, v.1, lot.length, v.3), [v.1, v.3]),
        Side::Bottom => ((v.0, 0.0, v.2, v.1), [v.0, v.2]),
        Side::Top => ((v.0, v.3, v.2, lot.width), [v.0, v.2]),
    };
    if cross[0] < entrance.span[0] - TOL || cross[1] > entrance.span[1] + TOL {
        return false;
    }
    for (sj, other) in layout.stalls.iter().enumerate() {
        if sj == si {
            continue;
        }
        let o = parked_vehicle_bounds(other, dims, vehicle);
        let strict = corridor.0 < o.2 - TOL
            && o.0 < corridor.2 - TOL
            && corridor.1 < o.3 - TOL
            && o.1 < corridor.3 - TOL;
        if strict {
            return false;
        }
    }
    true
}

/// Remove all entrance nodes except `entrance` (an index into
/// `lot.entrances`), with their incident edges.
pub fn restrict_to_entrance(g: &AdjacencyGraph, entrance: usize) -> Result<AdjacencyGraph> {
    let keep_node = g
        .entrance_node(entrance)
        .ok_or(Error::UnknownEntrance(entrance))?;
    let n = g.n_stalls;
    let mut out = AdjacencyGraph {
        n_stalls: n,
        entrance_ids: vec![entrance],
        adj: vec![0; n + 1],
    };
    for u in 0..n {
        for v in (u + 1)..n {
            if g.has_edge(u, v) {
                out.add_edge(u, v);
            }
        }
        if g.has_edge(u, keep_node) {
            out.add_edge(u, n);
        }
    }
    Ok(out)
}
