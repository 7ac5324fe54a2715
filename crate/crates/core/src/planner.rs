//! Hybrid A* kinematic planner. Decides whether a relocation-free maneuver
//! exists between a stall and an entrance given a set of occupied stalls,
//! and returns waypoints when it does.
//!
//! Search states are continuous rear-axle poses expanded with bicycle-model
//! motion primitives and deduplicated on a (xy, angle, gear) grid. Collision
//! is checked by sampling footprints along each primitive.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Mutex;

use crate::adjacency::{parked_poses, parked_vehicle_rect};
use crate::error::{Error, Result};
use crate::geometry::{
    footprint, footprint_clear, normalize_angle, rects_intersect, LotSpec, OrientedRect, Pose,
    VehicleSpec, APRON_DEPTH_FACTOR,
};
use crate::layout::{Layout, StallDims};

/// Maximum spacing of collision samples along a primitive, meters of arc.
pub const COLLISION_SAMPLE_STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    pub max_iterations: usize,
    pub step_sizes: Vec<f64>,
    pub angle_resolution: f64,
    pub xy_resolution: f64,
    pub steer_samples: usize,
    /// Extra cost ratio for reverse travel (0.1 = 10% surcharge).
    pub reverse_surcharge: f64,
    pub gear_switch_penalty: f64,
    pub heading_weight_near: f64,
    pub heading_weight_far: f64,
    pub near_radius: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            max_iterations: 100_000,
            step_sizes: vec![0.5, 1.0, 2.0],
            angle_resolution: std::f64::consts::PI / 36.0,
            xy_resolution: 0.25,
            steer_samples: 7,
            reverse_surcharge: 0.1,
            gear_switch_penalty: 0.5,
            heading_weight_near: 2.5,
            heading_weight_far: 0.3,
            near_radius: 5.0,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0
            || self.step_sizes.is_empty()
            || self.step_sizes.iter().any(|&s| s <= 0.0)
            || self.angle_resolution <= 0.0
            || self.xy_resolution <= 0.0
            || self.reverse_surcharge < 0.0
            || self.gear_switch_penalty < 0.0
            || self.heading_weight_near <= 0.0
            || self.heading_weight_far <= 0.0
            || self.near_radius <= 0.0
        {
            return Err(Error::ConfigInvalid(
                "planner parameters must be positive".into(),
            ));
        }
        if self.steer_samples < 3 || self.steer_samples.is_multiple_of(2) {
            return Err(Error::ConfigInvalid(
                "steer_samples must be an odd count >= 3 so 0 and both steering limits are sampled"
                    .into(),
            ));
        }
        Ok(())
    }

    fn steer_angles(&self, max_steer: f64) -> Vec<f64> {
        let k = self.steer_samples;
        (0..k)
            .map(|i| -max_steer + 2.0 * max_steer * i as f64 / (k - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gear {
    #[serde(rename = "F")]
    Forward,
    #[serde(rename = "R")]
    Reverse,
}

impl Gear {
    fn sign(&self) -> f64 {
        match self {
            Gear::Forward => 1.0,
            Gear::Reverse => -1.0,
        }
    }

    fn code(&self) -> u64 {
        match self {
            Gear::Forward => 1,
            Gear::Reverse => 2,
        }
    }
}

/// A pose on the path plus the gear used to reach it. The first waypoint
/// carries the gear of the first segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub gear: Gear,
}

impl Waypoint {
    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.theta)
    }
}

/// Motion primitive connecting two consecutive waypoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub gear: Gear,
    pub steer: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub cost: f64,
    pub waypoints: Vec<Waypoint>,
    #[serde(skip)]
    pub segments: Vec<Segment>,
}

/// Exit goal: any pose whose footprint has fully crossed the given entrance
/// out of the lot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoalRegion {
    pub entrance: usize,
}

/// Static collision world for one lot/vehicle pair: boundary walls, entrance
/// aprons, and per-entrance heuristic targets.
#[derive(Debug, Clone)]
pub struct World {
    pub lot_rect: OrientedRect,
    pub walls: Vec<OrientedRect>,
    pub aprons: Vec<OrientedRect>,
    goal_centers: Vec<[f64; 2]>,
    goal_headings: Vec<f64>,
}

impl World {
    pub fn new(lot: &LotSpec, vehicle: &VehicleSpec) -> Self {
        let depth = APRON_DEPTH_FACTOR * vehicle.length;
        let aprons = (0..lot.entrances.len())
            .map(|e| lot.apron(e, depth).expect("entrance index in range"))
            .collect();
        let goal_centers = (0..lot.entrances.len())
            .map(|e| {
                let mid = lot.entrance_midpoint(e).expect("entrance index in range");
                let n = lot.entrances[e].side.outward_normal();
                [
                    mid[0] + 0.5 * vehicle.length * n[0],
                    mid[1] + 0.5 * vehicle.length * n[1],
                ]
            })
            .collect();
        let goal_headings = lot
            .entrances
            .iter()
            .map(|e| {
                let n = e.side.outward_normal();
                n[1].atan2(n[0])
            })
            .collect();
        World {
            lot_rect: lot.rect(),
            walls: lot.walls(depth),
            aprons,
            goal_centers,
            goal_headings,
        }
    }

    /// Footprint has fully left the lot through the given entrance.
    pub fn is_exit_goal(&self, fp: &OrientedRect, entrance: usize) -> bool {
        !rects_intersect(fp, &self.lot_rect) && rects_intersect(fp, &self.aprons[entrance])
    }
}

/// Integrate a constant-steer primitive over signed arc length.
fn integrate(pose: &Pose, gear: Gear, steer: f64, arc: f64, wheelbase: f64) -> Pose {
    let s = gear.sign() * arc;
    if steer.abs() < 1e-12 {
        let (sin_t, cos_t) = pose.theta.sin_cos();
        Pose::new(pose.x + s * cos_t, pose.y + s * sin_t, pose.theta)
    } else {
        let kappa = steer.tan() / wheelbase;
        let radius = 1.0 / kappa;
        let theta1 = pose.theta + s * kappa;
        let (sin0, cos0) = pose.theta.sin_cos();
        let (sin1, cos1) = theta1.sin_cos();
        Pose::new(
            pose.x + radius * (sin1 - sin0),
            pose.y - radius * (cos1 - cos0),
            theta1,
        )
    }
}

struct Node {
    pose: Pose,
    gear: Option<Gear>,
    g: f64,
    parent: i32,
    segment: Option<Segment>,
}

struct HeapEntry {
    f: f64,
    seq: u64,
    node: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f && self.seq == other.seq
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // Max-heap: order so the smallest (f, seq) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    vehicle: &'a VehicleSpec,
    obstacles: &'a [OrientedRect],
    world: &'a World,
    params: &'a PlannerParams,
    goal: GoalRegion,
    n_angle: usize,
}

impl<'a> Search<'a> {
    fn cell_key(&self, pose: &Pose, gear_code: u64) -> u64 {
        let ix = (pose.x / self.params.xy_resolution).floor() as i64 + 8192;
        let iy = (pose.y / self.params.xy_resolution).floor() as i64 + 8192;
        let mut ith =
            ((pose.theta + std::f64::consts::PI) / self.params.angle_resolution).floor() as i64;
        if ith < 0 {
            ith = 0;
        }
        if ith >= self.n_angle as i64 {
            ith = self.n_angle as i64 - 1;
        }
        ((ix as u64) << 32) | ((iy as u64) << 12) | ((ith as u64) << 2) | gear_code
    }

    fn heuristic(&self, pose: &Pose) -> f64 {
        let [gx, gy] = self.world.goal_centers[self.goal.entrance];
        let dist = (pose.x - gx).hypot(pose.y - gy);
        let w = if dist < self.params.near_radius {
            self.params.heading_weight_near
        } else {
            self.params.heading_weight_far
        };
        let dtheta = normalize_angle(pose.theta - self.world.goal_headings[self.goal.entrance]);
        dist + w * dtheta.abs()
    }

    fn pose_clear(&self, pose: &Pose) -> bool {
        let fp = footprint(pose, self.vehicle);
        footprint_clear(&fp, self.obstacles, &self.world.walls)
    }

    /// Collision-check the interior and endpoint of a primitive. The start
    /// pose is assumed already validated.
    fn primitive_clear(&self, from: &Pose, gear: Gear, steer: f64, step: f64) -> bool {
        let n = (step / COLLISION_SAMPLE_STEP).ceil() as usize;
        for k in 1..=n {
            let arc = step * k as f64 / n as f64;
            let pose = integrate(from, gear, steer, arc, self.vehicle.wheelbase);
            if !self.pose_clear(&pose) {
                return false;
            }
        }
        true
    }
}

/// Kinematically feasible, collision-free path from `start` into the goal
/// region, or `None` after `max_iterations` expansions (or exhaustion).
pub fn plan(
    start: &Pose,
    goal: GoalRegion,
    vehicle: &VehicleSpec,
    obstacles: &[OrientedRect],
    lot: &LotSpec,
    params: &PlannerParams,
) -> Option<Path> {
    let world = World::new(lot, vehicle);
    plan_in_world(&[*start], goal, vehicle, obstacles, &world, params)
}

/// Like [`plan`] but tries several start poses in one search (all pushed as
/// roots); used for the two possible parked headings.
pub fn plan_from_any(
    starts: &[Pose],
    goal: GoalRegion,
    vehicle: &VehicleSpec,
    obstacles: &[OrientedRect],
    lot: &LotSpec,
    params: &PlannerParams,
) -> Option<Path> {
    let world = World::new(lot, vehicle);
    plan_in_world(starts, goal, vehicle, obstacles, &world, params)
}

pub fn plan_in_world(
    starts: &[Pose],
    goal: GoalRegion,
    vehicle: &VehicleSpec,
    obstacles: &[OrientedRect],
    world: &World,
    params: &PlannerParams,
) -> Option<Path> {
    let n_angle = (2.0 * std::f64::consts::PI / params.angle_resolution).round() as usize;
    let search = Search {
        vehicle,
        obstacles,
        world,
        params,
        goal,
        n_angle: n_angle.max(1),
    };
    let steers = params.steer_angles(vehicle.max_steer);
    let mut steps = params.step_sizes.clone();
    steps.sort_by(|a, b| b.total_cmp(a));

    let mut nodes: Vec<Node> = Vec::new();
    let mut open: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut best: HashMap<u64, (f64, u32)> = HashMap::new();
    let mut seq: u64 = 0;

    for pose in starts {
        if !search.pose_clear(pose) {
            continue;
        }
        let key = search.cell_key(pose, 0);
        let idx = nodes.len() as u32;
        nodes.push(Node {
            pose: *pose,
            gear: None,
            g: 0.0,
            parent: -1,
            segment: None,
        });
        if best.get(&key).is_none_or(|&(g, _)| g > 0.0) {
            best.insert(key, (0.0, idx));
        }
        open.push(HeapEntry {
            f: search.heuristic(pose),
            seq,
            node: idx,
        });
        seq += 1;
    }

    let mut expansions = 0usize;
    while let Some(entry) = open.pop() {
        let node_idx = entry.node;
        let (pose, gear, g) = {
            let n = &nodes[node_idx as usize];
            (n.pose, n.gear, n.g)
        };
        let key = search.cell_key(&pose, gear.map_or(0, |gr| gr.code()));
        match best.get(&key) {
            Some(&(_, idx)) if idx == node_idx => {}
            _ => continue, // superseded by a cheaper node in the same cell
        }
        let fp = footprint(&pose, vehicle);
        if world.is_exit_goal(&fp, goal.entrance) {
            return Some(reconstruct(&nodes, node_idx));
        }
        expansions += 1;
        if expansions > params.max_iterations {
            return None;
        }
        for &new_gear in &[Gear::Forward, Gear::Reverse] {
            let switch = match gear {
                Some(prev) if prev != new_gear => params.gear_switch_penalty,
                _ => 0.0,
            };
            let rate = match new_gear {
                Gear::Forward => 1.0,
                Gear::Reverse => 1.0 + params.reverse_surcharge,
            };
            for &steer in &steers {
                // Adaptive step selection: take the largest step whose whole
                // primitive is collision-free, so open space is crossed in
                // long strides and tight pockets fall back to fine moves.
                let mut step = None;
                for &cand in &steps {
                    if search.primitive_clear(&pose, new_gear, steer, cand) {
                        step = Some(cand);
                        break;
                    }
                }
                let Some(step) = step else { continue };
                let next = integrate(&pose, new_gear, steer, step, vehicle.wheelbase);
                let ng = g + switch + rate * step;
                let nkey = search.cell_key(&next, new_gear.code());
                if let Some(&(bg, _)) = best.get(&nkey) {
                    if bg <= ng + 1e-9 {
                        continue;
                    }
                }
                let idx = nodes.len() as u32;
                nodes.push(Node {
                    pose: next,
                    gear: Some(new_gear),
                    g: ng,
                    parent: node_idx as i32,
                    segment: Some(Segment {
                        gear: new_gear,
                        steer,
                        step,
                    }),
                });
                best.insert(nkey, (ng, idx));
                open.push(HeapEntry {
                    f: ng + search.heuristic(&next),
                    seq,
                    node: idx,
                });
                seq += 1;
            }
        }
    }
    None
}

fn reconstruct(nodes: &[Node], goal_idx: u32) -> Path {
    let mut rev: Vec<(Pose, Option<Segment>)> = Vec::new();
    let mut cur = goal_idx as i32;
    while cur >= 0 {
        let n = &nodes[cur as usize];
        rev.push((n.pose, n.segment));
        cur = n.parent;
    }
    rev.reverse();
    let segments: Vec<Segment> = rev.iter().filter_map(|(_, s)| *s).collect();
    let first_gear = segments.first().map_or(Gear::Forward, |s| s.gear);
    let waypoints: Vec<Waypoint> = rev
        .iter()
        .map(|(pose, seg)| Waypoint {
            x: pose.x,
            y: pose.y,
            theta: pose.theta,
            gear: seg.map_or(first_gear, |s| s.gear),
        })
        .collect();
    Path {
        cost: nodes[goal_idx as usize].g,
        waypoints,
        segments,
    }
}

/// Re-check a returned path independently of the search: every sampled pose
/// along every primitive must be collision-free.
pub fn path_collision_free(
    path: &Path,
    vehicle: &VehicleSpec,
    obstacles: &[OrientedRect],
    world: &World,
) -> bool {
    if path.waypoints.len() != path.segments.len() + 1 {
        return false;
    }
    let start = path.waypoints[0].pose();
    let fp = footprint(&start, vehicle);
    if !footprint_clear(&fp, obstacles, &world.walls) {
        return false;
    }
    let mut pose = start;
    for (seg, wp) in path.segments.iter().zip(path.waypoints.iter().skip(1)) {
        let n = (seg.step / COLLISION_SAMPLE_STEP).ceil() as usize;
        let mut end = pose;
        for k in 1..=n {
            let arc = seg.step * k as f64 / n as f64;
            end = integrate(&pose, seg.gear, seg.steer, arc, vehicle.wheelbase);
            let fp = footprint(&end, vehicle);
            if !footprint_clear(&fp, obstacles, &world.walls) {
                return false;
            }
        }
        // Endpoint must match the recorded waypoint.
        if (end.x - wp.x).abs() > 1e-6
            || (end.y - wp.y).abs() > 1e-6
            || normalize_angle(end.theta - wp.theta).abs() > 1e-6
        {
            return false;
        }
        pose = wp.pose();
    }
    true
}

/// Plan an exit for stall `p` through entrance `e` while the `occupied`
/// stalls hold parked vehicles. The start pose is the vehicle centered in
/// its stall (both headings tried); the goal is any pose whose footprint has
/// fully crossed the entrance out of the lot.
#[allow(clippy::too_many_arguments)]
pub fn stall_exit_query(
    p: usize,
    e: usize,
    occupied: &[usize],
    layout: &Layout,
    lot: &LotSpec,
    dims: StallDims,
    vehicle: &VehicleSpec,
    params: &PlannerParams,
) -> Result<Option<Path>> {
    let engine = LayoutPlanner::new(layout.clone(), lot.clone(), dims, *vehicle, params.clone());
    let mut mask = 0u64;
    for &s in occupied {
        if s >= layout.stalls.len() {
            return Err(Error::UnknownStall(s));
        }
        mask |= 1 << s;
    }
    engine.exit_query(p, e, mask)
}

/// Planner bound to one layout, with precomputed obstacles and a query
/// cache. Queries are pure, so caching is safe under any parallel schedule.
pub struct LayoutPlanner {
    pub layout: Layout,
    pub lot: LotSpec,
    pub dims: StallDims,
    pub vehicle: VehicleSpec,
    pub params: PlannerParams,
    pub world: World,
    vehicle_rects: Vec<OrientedRect>,
    cache: Mutex<HashMap<(usize, usize, u64), Option<Path>>>,
}

impl LayoutPlanner {
    pub fn new(
        layout: Layout,
        lot: LotSpec,
        dims: StallDims,
        vehicle: VehicleSpec,
        params: PlannerParams,
    ) -> Self {
        let world = World::new(&lot, &vehicle);
        let vehicle_rects = layout
            .stalls
            .iter()
            .map(|s| parked_vehicle_rect(s, dims, &vehicle))
            .collect();
        LayoutPlanner {
            layout,
            lot,
            dims,
            vehicle,
            params,
            world,
            vehicle_rects,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn n_stalls(&self) -> usize {
        self.layout.stalls.len()
    }

    /// Obstacle rectangles for a given occupied-stall bitmask.
    pub fn obstacles_for(&self, occupied: u64) -> Vec<OrientedRect> {
        (0..self.n_stalls())
            .filter(|&s| occupied & (1 << s) != 0)
            .map(|s| self.vehicle_rects[s])
            .collect()
    }

    /// Cached exit query: stall `p` to entrance `e` with `occupied` a bitmask
    /// of stalls holding parked vehicles.
    pub fn exit_query(&self, p: usize, e: usize, occupied: u64) -> Result<Option<Path>> {
        if p >= self.n_stalls() {
            return Err(Error::UnknownStall(p));
        }
        if e >= self.lot.entrances.len() {
            return Err(Error::UnknownEntrance(e));
        }
        if occupied & (1 << p) != 0 {
            return Err(Error::OccupiedStart(p));
        }
        let key = (p, e, occupied);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let starts = parked_poses(&self.layout.stalls[p], self.dims, &self.vehicle);
        let obstacles = self.obstacles_for(occupied);
        let result = plan_in_world(
            &starts,
            GoalRegion { entrance: e },
            &self.vehicle,
            &obstacles,
            &self.world,
            &self.params,
        );
        self.cache.lock().unwrap().insert(key, result.clone());
        Ok(result)
    }

    /// True if a relocation-free exit exists for `p` via `e` with the given
    /// vacancy mask (vacant = bit set). Everything not vacant and not `p`
    /// counts as occupied.
    pub fn exit_feasible(&self, p: usize, e: usize, vacant: u64) -> Result<bool> {
        let all = if self.n_stalls() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n_stalls()) - 1
        };
        let occupied = all & !vacant & !(1 << p);
        Ok(self.exit_query(p, e, occupied)?.is_some())
    }
}
