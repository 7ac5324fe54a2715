//! Poses, oriented rectangles, vehicle footprints and exact collision tests.
//!
//! Conventions: the lot occupies `[0, length] x [0, width]` with x along the
//! lot length and y along the lot width. Headings are CCW radians from +x,
//! normalized to `[-pi, pi)`. A pose refers to the rear axle center of the
//! vehicle (bicycle model reference point).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerance applied to separating-axis projections: rectangles closer than
/// this (including exact touching) count as intersecting.
pub const COLLISION_TOL: f64 = 1e-9;

/// Normalize an angle to `[-pi, pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can land exactly on +pi through rounding
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Rear-axle-referenced vehicle pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading, CCW from +x, in `[-pi, pi)`.
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }
}

/// Rectangle with arbitrary orientation, given by center, half extents and
/// rotation. `half_length` is the half extent along the rectangle's own
/// heading, `half_width` across it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect {
    pub cx: f64,
    pub cy: f64,
    pub half_width: f64,
    pub half_length: f64,
    pub theta: f64,
}

impl OrientedRect {
    pub fn new(cx: f64, cy: f64, half_width: f64, half_length: f64, theta: f64) -> Self {
        debug_assert!(half_width > 0.0 && half_length > 0.0);
        OrientedRect {
            cx,
            cy,
            half_width,
            half_length,
            theta,
        }
    }

    /// Axis-aligned rectangle from corner-to-corner bounds.
    pub fn from_bounds(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        OrientedRect::new(
            0.5 * (x0 + x1),
            0.5 * (y0 + y1),
            0.5 * (y1 - y0),
            0.5 * (x1 - x0),
            0.0,
        )
    }

    /// Radius of the bounding circle around the center.
    pub fn bounding_radius(&self) -> f64 {
        self.half_width.hypot(self.half_length)
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        let (s, c) = self.theta.sin_cos();
        let lx = self.half_length * c;
        let ly = self.half_length * s;
        let wx = -self.half_width * s;
        let wy = self.half_width * c;
        [
            [self.cx + lx + wx, self.cy + ly + wy],
            [self.cx + lx - wx, self.cy + ly - wy],
            [self.cx - lx - wx, self.cy - ly - wy],
            [self.cx - lx + wx, self.cy - ly + wy],
        ]
    }

    /// True if the point lies inside or on the rectangle (within `tol`).
    pub fn contains_point(&self, px: f64, py: f64, tol: f64) -> bool {
        let (s, c) = self.theta.sin_cos();
        let dx = px - self.cx;
        let dy = py - self.cy;
        let along = dx * c + dy * s;
        let across = -dx * s + dy * c;
        along.abs() <= self.half_length + tol && across.abs() <= self.half_width + tol
    }
}

/// Separating-axis test over the 4 candidate axes. Closed rectangles that
/// merely touch count as intersecting; a gap larger than [`COLLISION_TOL`]
/// on any axis separates them.
pub fn rects_intersect(r1: &OrientedRect, r2: &OrientedRect) -> bool {
    sat_margin(r1, r2) >= -COLLISION_TOL
}

/// Minimum over the 4 separating axes of (extent sum - center distance).
/// Negative values mean the rectangles are separated by that gap; positive
/// values bound the penetration depth.
pub fn sat_margin(r1: &OrientedRect, r2: &OrientedRect) -> f64 {
    let (s1, c1) = r1.theta.sin_cos();
    let (s2, c2) = r2.theta.sin_cos();
    let dx = r2.cx - r1.cx;
    let dy = r2.cy - r1.cy;
    // Each rectangle contributes its long axis and its cross axis.
    let axes = [[c1, s1], [-s1, c1], [c2, s2], [-s2, c2]];
    let mut min_margin = f64::INFINITY;
    for [ax, ay] in axes {
        let dist = (dx * ax + dy * ay).abs();
        let e1 =
            r1.half_length * (ax * c1 + ay * s1).abs() + r1.half_width * (-ax * s1 + ay * c1).abs();
        let e2 =
            r2.half_length * (ax * c2 + ay * s2).abs() + r2.half_width * (-ax * s2 + ay * c2).abs();
        let margin = e1 + e2 - dist;
        if margin < min_margin {
            min_margin = margin;
        }
    }
    min_margin
}

/// Vehicle geometry. `wheelbase + front_overhang + rear_overhang` must equal
/// `length` to within 1e-9 m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleSpec {
    pub width: f64,
    pub length: f64,
    pub wheelbase: f64,
    pub front_overhang: f64,
    pub rear_overhang: f64,
    /// Maximum steering angle magnitude, radians.
    pub max_steer: f64,
}

impl Default for VehicleSpec {
    /// 2.5 m x 9.0 m community bus with 4.240 m wheelbase, 1.885 m front and
    /// 2.875 m rear overhang, steering limited to +-pi/6.
    fn default() -> Self {
        VehicleSpec {
            width: 2.5,
            length: 9.0,
            wheelbase: 4.240,
            front_overhang: 1.885,
            rear_overhang: 2.875,
            max_steer: PI / 6.0,
        }
    }
}

impl VehicleSpec {
    pub fn new(
        width: f64,
        length: f64,
        wheelbase: f64,
        front_overhang: f64,
        rear_overhang: f64,
        max_steer: f64,
    ) -> Result<Self> {
        let spec = VehicleSpec {
            width,
            length,
            wheelbase,
            front_overhang,
            rear_overhang,
            max_steer,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width <= 0.0 || self.length <= 0.0 || self.wheelbase <= 0.0 {
            return Err(Error::ConfigInvalid(
                "vehicle dimensions must be positive".into(),
            ));
        }
        let sum = self.wheelbase + self.front_overhang + self.rear_overhang;
        if (sum - self.length).abs() > 1e-9 {
            return Err(Error::ConfigInvalid(format!(
                "wheelbase + overhangs = {sum} does not match length {}",
                self.length
            )));
        }
        if self.max_steer <= 0.0 {
            return Err(Error::ConfigInvalid("max_steer must be positive".into()));
        }
        Ok(())
    }

    /// Minimum turning radius of the rear axle.
    pub fn min_turn_radius(&self) -> f64 {
        self.wheelbase / self.max_steer.tan()
    }
}

/// Body rectangle of the vehicle at the given rear-axle pose. The body
/// extends `front_overhang + wheelbase` ahead of the rear axle and
/// `rear_overhang` behind it.
pub fn footprint(pose: &Pose, spec: &VehicleSpec) -> OrientedRect {
    let ahead = spec.wheelbase + spec.front_overhang;
    let center_offset = 0.5 * (ahead - spec.rear_overhang);
    let (s, c) = pose.theta.sin_cos();
    OrientedRect {
        cx: pose.x + center_offset * c,
        cy: pose.y + center_offset * s,
        half_width: 0.5 * spec.width,
        half_length: 0.5 * spec.length,
        theta: pose.theta,
    }
}

/// Which lot boundary an entrance lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Top,
    Bottom,
}

impl Side {
    /// Outward unit normal of this boundary side.
    pub fn outward_normal(&self) -> [f64; 2] {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Top => [0.0, 1.0],
            Side::Bottom => [0.0, -1.0],
        }
    }
}

/// An opening in the lot boundary through which vehicles may drive.
/// `span` is measured along the side: y for left/right, x for top/bottom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntranceSegment {
    pub side: Side,
    pub span: [f64; 2],
}

impl EntranceSegment {
    pub fn span_len(&self) -> f64 {
        self.span[1] - self.span[0]
    }
}

/// Rectangular lot: `length` along x, `width` along y, with one or more
/// entrance openings on its boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LotSpec {
    pub length: f64,
    pub width: f64,
    pub entrances: Vec<EntranceSegment>,
}

impl LotSpec {
    pub fn new(length: f64, width: f64, entrances: Vec<EntranceSegment>) -> Result<Self> {
        let lot = LotSpec {
            length,
            width,
            entrances,
        };
        lot.validate()?;
        Ok(lot)
    }

    /// Lot with the entire left boundary open.
    pub fn with_full_left_entrance(length: f64, width: f64) -> Result<Self> {
        LotSpec::new(
            length,
            width,
            vec![EntranceSegment {
                side: Side::Left,
                span: [0.0, width],
            }],
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.length <= 0.0 || self.width <= 0.0 {
            return Err(Error::ConfigInvalid(
                "lot dimensions must be positive".into(),
            ));
        }
        if self.entrances.is_empty() {
            return Err(Error::ConfigInvalid(
                "lot needs at least one entrance".into(),
            ));
        }
        for e in &self.entrances {
            let side_len = self.side_length(e.side);
            if e.span[0] < -1e-9 || e.span[1] > side_len + 1e-9 || e.span_len() <= 0.0 {
                return Err(Error::ConfigInvalid(format!(
                    "entrance span {:?} outside side of length {side_len}",
                    e.span
                )));
            }
        }
        // Entrance spans on the same side must not overlap.
        for (i, a) in self.entrances.iter().enumerate() {
            for b in self.entrances.iter().skip(i + 1) {
                if a.side == b.side && a.span[0] < b.span[1] && b.span[0] < a.span[1] {
                    return Err(Error::ConfigInvalid("entrance spans overlap".into()));
                }
            }
        }
        Ok(())
    }

    pub fn side_length(&self, side: Side) -> f64 {
        match side {
            Side::Left | Side::Right => self.width,
            Side::Top | Side::Bottom => self.length,
        }
    }

    /// The lot interior as a rectangle.
    pub fn rect(&self) -> OrientedRect {
        OrientedRect::from_bounds(0.0, 0.0, self.length, self.width)
    }

    /// Midpoint of an entrance segment on the boundary.
    pub fn entrance_midpoint(&self, idx: usize) -> Result<[f64; 2]> {
        let e = self.entrances.get(idx).ok_or(Error::UnknownEntrance(idx))?;
        let m = 0.5 * (e.span[0] + e.span[1]);
        Ok(match e.side {
            Side::Left => [0.0, m],
            Side::Right => [self.length, m],
            Side::Bottom => [m, 0.0],
            Side::Top => [m, self.width],
        })
    }

    /// Free rectangle extending outward from an entrance, `depth` meters deep.
    pub fn apron(&self, idx: usize, depth: f64) -> Result<OrientedRect> {
        let e = self.entrances.get(idx).ok_or(Error::UnknownEntrance(idx))?;
        let [a, b] = e.span;
        Ok(match e.side {
            Side::Left => OrientedRect::from_bounds(-depth, a, 0.0, b),
            Side::Right => OrientedRect::from_bounds(self.length, a, self.length + depth, b),
            Side::Bottom => OrientedRect::from_bounds(a, -depth, b, 0.0),
            Side::Top => OrientedRect::from_bounds(a, self.width, b, self.width + depth),
        })
    }

    /// Solid wall rectangles sealing the lot boundary (except entrance
    /// openings) and the sides of each entrance apron. `apron_depth` is how
    /// far the free world extends beyond an entrance.
    pub fn walls(&self, apron_depth: f64) -> Vec<OrientedRect> {
        let t = WALL_THICKNESS;
        let mut walls = Vec::new();
        for side in [Side::Left, Side::Right, Side::Bottom, Side::Top] {
            let side_len = self.side_length(side);
            let mut spans: Vec<[f64; 2]> = self
                .entrances
                .iter()
                .filter(|e| e.side == side)
                .map(|e| e.span)
                .collect();
            spans.sort_by(|a, b| a[0].total_cmp(&b[0]));
            // Complement of the entrance spans, extended past the corners.
            let mut cursor = -t;
            let mut segs: Vec<[f64; 2]> = Vec::new();
            for sp in &spans {
                if sp[0] > cursor {
                    segs.push([cursor, sp[0]]);
                }
                cursor = sp[1];
            }
            if side_len + t > cursor {
                segs.push([cursor, side_len + t]);
            }
            for [a, b] in segs {
                walls.push(self.boundary_wall(side, a, b, t));
            }
            // Apron side walls and end cap per entrance on this side.
            for sp in &spans {
                walls.extend(self.apron_walls(side, *sp, apron_depth, t));
            }
        }
        walls
    }

    fn boundary_wall(&self, side: Side, a: f64, b: f64, t: f64) -> OrientedRect {
        match side {
            Side::Left => OrientedRect::from_bounds(-t, a, 0.0, b),
            Side::Right => OrientedRect::from_bounds(self.length, a, self.length + t, b),
            Side::Bottom => OrientedRect::from_bounds(a, -t, b, 0.0),
            Side::Top => OrientedRect::from_bounds(a, self.width, b, self.width + t),
        }
    }

    fn apron_walls(&self, side: Side, span: [f64; 2], depth: f64, t: f64) -> Vec<OrientedRect> {
        let [a, b] = span;
        let d = depth;
        match side {
            Side::Left => vec![
                OrientedRect::from_bounds(-d - t, a - t, 0.0, a),
                OrientedRect::from_bounds(-d - t, b, 0.0, b + t),
                OrientedRect::from_bounds(-d - t, a - t, -d, b + t),
            ],
            Side::Right => vec![
                OrientedRect::from_bounds(self.length, a - t, self.length + d + t, a),
                OrientedRect::from_bounds(self.length, b, self.length + d + t, b + t),
                OrientedRect::from_bounds(self.length + d, a - t, self.length + d + t, b + t),
            ],
            Side::Bottom => vec![
                OrientedRect::from_bounds(a - t, -d - t, a, 0.0),
                OrientedRect::from_bounds(b, -d - t, b + t, 0.0),
                OrientedRect::from_bounds(a - t, -d - t, b + t, -d),
            ],
            Side::Top => vec![
                OrientedRect::from_bounds(a - t, self.width, a, self.width + d + t),
                OrientedRect::from_bounds(b, self.width, b + t, self.width + d + t),
                OrientedRect::from_bounds(a - t, self.width + d, b + t, self.width + d + t),
            ],
        }
    }
}

/// Thickness of wall rectangles. Thicker than any footprint displacement
/// between consecutive collision samples, so paths cannot tunnel through.
pub const WALL_THICKNESS: f64 = 1.0;

/// Depth of the free world beyond an entrance, as a multiple of vehicle length.
pub const APRON_DEPTH_FACTOR: f64 = 1.5;

/// True iff the footprint at `pose` intersects no obstacle and does not
/// cross any non-entrance lot boundary. Protruding through an entrance
/// opening (into its apron) is permitted.
pub fn pose_collision_free(
    pose: &Pose,
    spec: &VehicleSpec,
    obstacles: &[OrientedRect],
    lot: &LotSpec,
) -> bool {
    let fp = footprint(pose, spec);
    let walls = lot.walls(APRON_DEPTH_FACTOR * spec.length);
    footprint_clear(&fp, obstacles, &walls)
}

/// Collision test for a precomputed footprint against obstacle and wall
/// rectangles, with a bounding-circle broad phase.
pub fn footprint_clear(
    fp: &OrientedRect,
    obstacles: &[OrientedRect],
    walls: &[OrientedRect],
) -> bool {
    let r = fp.bounding_radius();
    for obs in obstacles.iter().chain(walls.iter()) {
        let dx = obs.cx - fp.cx;
        let dy = obs.cy - fp.cy;
        let reach = r + obs.bounding_radius() + COLLISION_TOL;
        if dx * dx + dy * dy > reach * reach {
            continue;
        }
        if rects_intersect(fp, obs) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn default_vehicle() -> VehicleSpec {
        VehicleSpec::new(2.5, 9.0, 4.240, 1.885, 2.875, PI / 6.0).unwrap()
    }

    fn aabb_of(rect: &OrientedRect) -> (f64, f64, f64, f64) {
        let cs = rect.corners();
        let xs: Vec<f64> = cs.iter().map(|c| c[0]).collect();
        let ys: Vec<f64> = cs.iter().map(|c| c[1]).collect();
        (
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    #[test]
    fn footprint_at_origin_spans_expected_bounds() {
        let fp = footprint(&Pose::new(0.0, 0.0, 0.0), &default_vehicle());
        let (x0, y0, x1, y1) = aabb_of(&fp);
        assert!((x0 - (-2.875)).abs() < 1e-12);
        assert!((x1 - 6.125).abs() < 1e-12);
        assert!((y0 - (-1.25)).abs() < 1e-12);
        assert!((y1 - 1.25).abs() < 1e-12);
        assert!((2.0 * fp.half_length - 9.0).abs() < 1e-12);
    }

    #[test]
    fn footprint_degenerate_spec_spans_wheelbase() {
        let spec = VehicleSpec::new(2.0, 5.0, 5.0, 0.0, 0.0, 0.4).unwrap();
        let fp = footprint(&Pose::new(0.0, 0.0, 0.0), &spec);
        let (x0, _, x1, _) = aabb_of(&fp);
        assert!(x0.abs() < 1e-12);
        assert!((x1 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn footprint_rotated_matches_hand_computation() {
        let fp = footprint(&Pose::new(1.0, 2.0, PI / 2.0), &default_vehicle());
        let (x0, y0, x1, y1) = aabb_of(&fp);
        assert!((y0 - (-0.875)).abs() < 1e-9);
        assert!((y1 - 8.125).abs() < 1e-9);
        assert!((x0 - (-0.25)).abs() < 1e-9);
        assert!((x1 - 2.25).abs() < 1e-9);
    }

    #[test]
    fn vehicle_spec_rejects_mismatched_overhangs() {
        assert!(VehicleSpec::new(2.5, 9.0, 4.0, 2.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn identical_rects_intersect() {
        let r = OrientedRect::new(1.0, 1.0, 0.5, 0.5, 0.3);
        assert!(rects_intersect(&r, &r));
    }

    #[test]
    fn distant_unit_squares_do_not_intersect() {
        let a = OrientedRect::new(0.0, 0.0, 0.5, 0.5, 0.0);
        let b = OrientedRect::new(3.0, 0.0, 0.5, 0.5, 0.0);
        assert!(!rects_intersect(&a, &b));
    }

    #[test]
    fn vehicle_rects_with_small_gap_do_not_intersect() {
        // Two 2.5 x 9.0 bodies side by side with 0.1 m between them.
        let a = OrientedRect::new(0.0, 0.0, 1.25, 4.5, PI / 2.0);
        let b = OrientedRect::new(2.6, 0.0, 1.25, 4.5, PI / 2.0);
        assert!(!rects_intersect(&a, &b));
        assert!(rects_intersect(
            &a,
            &OrientedRect::new(2.4, 0.0, 1.25, 4.5, PI / 2.0)
        ));
    }

    #[test]
    fn touching_rects_intersect() {
        let a = OrientedRect::new(0.0, 0.0, 0.5, 0.5, 0.0);
        let b = OrientedRect::new(1.0, 0.0, 0.5, 0.5, 0.0);
        assert!(rects_intersect(&a, &b));
    }

    #[test]
    fn pose_in_empty_lot_is_collision_free() {
        let lot = LotSpec::with_full_left_entrance(15.0, 12.0).unwrap();
        assert!(pose_collision_free(
            &Pose::new(7.0, 6.0, 0.3),
            &default_vehicle(),
            &[],
            &lot
        ));
    }

    #[test]
    fn pose_overlapping_obstacle_collides() {
        let lot = LotSpec::with_full_left_entrance(15.0, 12.0).unwrap();
        let parked = footprint(&Pose::new(7.0, 6.0, 0.0), &default_vehicle());
        assert!(!pose_collision_free(
            &Pose::new(7.5, 6.5, 0.1),
            &default_vehicle(),
            &[parked],
            &lot
        ));
    }

    #[test]
    fn pose_protruding_through_entrance_is_free() {
        let lot = LotSpec::with_full_left_entrance(15.0, 12.0).unwrap();
        // Rear axle on the boundary, heading out: body straddles x = 0.
        assert!(pose_collision_free(
            &Pose::new(0.0, 6.0, PI),
            &default_vehicle(),
            &[],
            &lot
        ));
        // Same pose against a solid (non-entrance) boundary collides.
        let lot_right_entrance = LotSpec::new(
            15.0,
            12.0,
            vec![EntranceSegment {
                side: Side::Right,
                span: [0.0, 12.0],
            }],
        )
        .unwrap();
        assert!(!pose_collision_free(
            &Pose::new(0.0, 6.0, PI),
            &default_vehicle(),
            &[],
            &lot_right_entrance
        ));
    }

    #[test]
    fn angle_normalization_half_open_range() {
        assert!((normalize_angle(3.0 * PI) - (-PI)).abs() < 1e-12);
        assert!((normalize_angle(PI) - (-PI)).abs() < 1e-12);
        assert!((normalize_angle(-PI) - (-PI)).abs() < 1e-12);
        assert_eq!(normalize_angle(0.25), 0.25);
    }
}
