//! Exact maximum-capacity placement of identical stalls in the lot and
//! deduplication into topologically unique layouts.
//!
//! The solver enumerates placements on the canonical coordinate grid (all
//! subset sums of the two stall side lengths, clipped to the lot). For
//! identical-rectangle packing an optimal solution always exists on this
//! grid, and branch-and-bound over it returns *every* optimal layout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LotSpec;

const GRID_TOL: f64 = 1e-9;

/// Stall side lengths: `width` is the short side, `length` the long side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StallDims {
    pub width: f64,
    pub length: f64,
}

impl Default for StallDims {
    /// 3.0 m x 9.5 m stall: the default vehicle plus a tight safety margin.
    fn default() -> Self {
        StallDims {
            width: 3.0,
            length: 9.5,
        }
    }
}

/// Orientation of a stall's long side relative to the lot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StallOrient {
    /// Long side parallel to the lot width (y axis).
    #[serde(rename = "W")]
    AlongWidth,
    /// Long side parallel to the lot length (x axis).
    #[serde(rename = "L")]
    AlongLength,
}

impl StallOrient {
    /// Stall extents (dx, dy) in this orientation.
    pub fn extents(&self, dims: StallDims) -> (f64, f64) {
        match self {
            StallOrient::AlongWidth => (dims.width, dims.length),
            StallOrient::AlongLength => (dims.length, dims.width),
        }
    }
}

/// A placed stall: lower-left corner plus orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stall {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub orient: StallOrient,
}

impl Stall {
    /// (x0, y0, x1, y1) bounds of the stall rectangle.
    pub fn bounds(&self, dims: StallDims) -> (f64, f64, f64, f64) {
        let (dx, dy) = self.orient.extents(dims);
        (self.x, self.y, self.x + dx, self.y + dy)
    }

    pub fn center(&self, dims: StallDims) -> (f64, f64) {
        let (dx, dy) = self.orient.extents(dims);
        (self.x + 0.5 * dx, self.y + 0.5 * dy)
    }
}

/// A maximal stall placement. Stalls are index-ordered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub capacity: usize,
    pub stalls: Vec<Stall>,
}

impl Layout {
    pub fn new(mut stalls: Vec<Stall>) -> Self {
        stalls.sort_by_key(|s| s.index);
        Layout {
            capacity: stalls.len(),
            stalls,
        }
    }

    /// Check pairwise interior-disjointness and containment in the lot.
    pub fn validate(&self, lot: &LotSpec, dims: StallDims) -> Result<()> {
        if self.capacity != self.stalls.len() {
            return Err(Error::ConfigInvalid("capacity != |stalls|".into()));
        }
        for s in &self.stalls {
            let (x0, y0, x1, y1) = s.bounds(dims);
            if x0 < -GRID_TOL
                || y0 < -GRID_TOL
                || x1 > lot.length + GRID_TOL
                || y1 > lot.width + GRID_TOL
            {
                return Err(Error::ConfigInvalid(format!(
                    "stall {} extends outside the lot",
                    s.index
                )));
            }
        }
        for (i, a) in self.stalls.iter().enumerate() {
            for b in self.stalls.iter().skip(i + 1) {
                if interiors_overlap(a.bounds(dims), b.bounds(dims)) {
                    return Err(Error::ConfigInvalid(format!(
                        "stalls {} and {} overlap",
                        a.index, b.index
                    )));
                }
            }
        }
        Ok(())
    }
}

fn interiors_overlap(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> bool {
    a.0 < b.2 - GRID_TOL && b.0 < a.2 - GRID_TOL && a.1 < b.3 - GRID_TOL && b.1 < a.3 - GRID_TOL
}

/// All subset sums of {w, l} in `[0, limit]`, ascending.
fn subset_sums(w: f64, l: f64, limit: f64) -> Vec<f64> {
    let mut sums = Vec::new();
    let mut a = 0;
    loop {
        let base = a as f64 * w;
        if base > limit + GRID_TOL {
            break;
        }
        let mut b = 0;
        loop {
            let v = base + b as f64 * l;
            if v > limit + GRID_TOL {
                break;
            }
            sums.push(v);
            b += 1;
        }
        a += 1;
    }
    sums.sort_by(|p, q| p.total_cmp(q));
    sums.dedup_by(|p, q| (*p - *q).abs() < GRID_TOL);
    sums
}

/// Candidate placements on the canonical grid, in a fixed canonical order.
pub fn candidate_placements(lot: &LotSpec, dims: StallDims) -> Vec<Stall> {
    let xs = subset_sums(dims.width, dims.length, lot.length);
    let ys = subset_sums(dims.width, dims.length, lot.width);
    let mut out = Vec::new();
    for orient in [StallOrient::AlongWidth, StallOrient::AlongLength] {
        let (dx, dy) = orient.extents(dims);
        for &y in &ys {
            if y + dy > lot.width + GRID_TOL {
                continue;
            }
            for &x in &xs {
                if x + dx > lot.length + GRID_TOL {
                    continue;
                }
                out.push(Stall {
                    index: 0,
                    x,
                    y,
                    orient,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        a.y.total_cmp(&b.y)
            .then(a.x.total_cmp(&b.x))
            .then(a.orient.cmp(&b.orient))
    });
    out
}

struct PackSearch {
    candidates: Vec<Stall>,
    conflicts: Vec<u128>,
    stall_area: f64,
    lot_area: f64,
}

impl PackSearch {
    fn new(lot: &LotSpec, dims: StallDims) -> Result<Self> {
        let candidates = candidate_placements(lot, dims);
        if candidates.is_empty() {
            return Err(Error::NoFit {
                w: dims.width,
                l: dims.length,
            });
        }
        assert!(
            candidates.len() <= 128,
            "candidate grid too large ({}); lots this size are out of scope",
            candidates.len()
        );
        let n = candidates.len();
        let mut conflicts = vec![0u128; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if interiors_overlap(candidates[i].bounds(dims), candidates[j].bounds(dims)) {
                    conflicts[i] |= 1 << j;
                    conflicts[j] |= 1 << i;
                }
            }
        }
        Ok(PackSearch {
            candidates,
            conflicts,
            stall_area: dims.width * dims.length,
            lot_area: lot.length * lot.width,
        })
    }

    fn area_bound(&self) -> usize {
        (self.lot_area / self.stall_area + GRID_TOL).floor() as usize
    }

    /// Maximum number of compatible placements (branch and bound).
    fn best_count(&self) -> usize {
        let mut best = 0;
        let all = if self.candidates.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.candidates.len()) - 1
        };
        self.search_best(0, all, 0, &mut best);
        best
    }

    fn search_best(&self, idx: usize, avail: u128, placed: usize, best: &mut usize) {
        if placed > *best {
            *best = placed;
        }
        let remaining = (avail >> idx).count_ones() as usize;
        if placed + remaining <= *best || self.area_bound() <= *best {
            return;
        }
        for i in idx..self.candidates.len() {
            if avail & (1 << i) == 0 {
                continue;
            }
            let rest = (avail >> i).count_ones() as usize;
            if placed + rest <= *best {
                break;
            }
            self.search_best(
                i + 1,
                avail & !self.conflicts[i] & !(1 << i),
                placed + 1,
                best,
            );
        }
    }

    /// Every placement subset of the target size, in canonical order.
    fn enumerate_exact(&self, target: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        let all = if self.candidates.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.candidates.len()) - 1
        };
        self.enumerate_rec(0, all, &mut chosen, target, &mut out);
        out
    }

    fn enumerate_rec(
        &self,
        idx: usize,
        avail: u128,
        chosen: &mut Vec<usize>,
        target: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == target {
            out.push(chosen.clone());
            return;
        }
        let need = target - chosen.len();
        for i in idx..self.candidates.len() {
            if avail & (1 << i) == 0 {
                continue;
            }
            if ((avail >> i).count_ones() as usize) < need {
                break;
            }
            chosen.push(i);
            self.enumerate_rec(
                i + 1,
                avail & !self.conflicts[i] & !(1 << i),
                chosen,
                target,
                out,
            );
            chosen.pop();
        }
    }
}

/// All layouts achieving the maximum number of non-overlapping stalls on the
/// canonical grid, both orientations allowed. Every returned layout has the
/// same capacity; the set is nonempty.
pub fn solve_max_packing(lot: &LotSpec, dims: StallDims) -> Result<Vec<Layout>> {
    let search = PackSearch::new(lot, dims)?;
    let best = search.best_count();
    let layouts = search
        .enumerate_exact(best)
        .into_iter()
        .map(|sel| {
            Layout::new(
                sel.iter()
                    .enumerate()
                    .map(|(k, &ci)| Stall {
                        index: k,
                        ..search.candidates[ci]
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(layouts)
}

/// One pass of gravity compaction: translate every stall maximally down,
/// then maximally left. Returns true if anything moved.
fn compact_pass(stalls: &mut [Stall], dims: StallDims) -> bool {
    let mut moved = false;
    // Down, bottom-most stalls first.
    let mut order: Vec<usize> = (0..stalls.len()).collect();
    order.sort_by(|&a, &b| {
        stalls[a]
            .y
            .total_cmp(&stalls[b].y)
            .then(stalls[a].x.total_cmp(&stalls[b].x))
    });
    for &i in &order {
        let (x0, _, x1, _) = stalls[i].bounds(dims);
        let mut floor = 0.0f64;
        for (j, other) in stalls.iter().enumerate() {
            if j == i {
                continue;
            }
            let (ox0, _, ox1, oy1) = other.bounds(dims);
            if ox0 < x1 - GRID_TOL && x0 < ox1 - GRID_TOL && oy1 <= stalls[i].y + GRID_TOL {
                floor = floor.max(oy1);
            }
        }
        if stalls[i].y > floor + GRID_TOL {
            stalls[i].y = floor;
            moved = true;
        }
    }
    // Left, left-most stalls first.
    order.sort_by(|&a, &b| {
        stalls[a]
            .x
            .total_cmp(&stalls[b].x)
            .then(stalls[a].y.total_cmp(&stalls[b].y))
    });
    for &i in &order {
        let (_, y0, _, y1) = stalls[i].bounds(dims);
        let mut wall = 0.0f64;
        for (j, other) in stalls.iter().enumerate() {
            if j == i {
                continue;
            }
            let (_, oy0, ox1, oy1) = other.bounds(dims);
            if oy0 < y1 - GRID_TOL && y0 < oy1 - GRID_TOL && ox1 <= stalls[i].x + GRID_TOL {
                wall = wall.max(ox1);
            }
        }
        if stalls[i].x > wall + GRID_TOL {
            stalls[i].x = wall;
            moved = true;
        }
    }
    moved
}

/// Gravity-compact a layout to its bottom-left fixed point and reassign
/// stall indices sorted by (y, x) of the compacted origins.
pub fn compact(layout: &Layout, dims: StallDims) -> Layout {
    let mut stalls = layout.stalls.clone();
    while compact_pass(&mut stalls, dims) {}
    stalls.sort_by(|a, b| {
        a.y.total_cmp(&b.y)
            .then(a.x.total_cmp(&b.x))
            .then(a.orient.cmp(&b.orient))
    });
    for (k, s) in stalls.iter_mut().enumerate() {
        s.index = k;
    }
    Layout {
        capacity: stalls.len(),
        stalls,
    }
}

/// Canonical identity key of a compacted layout: the lexicographically
/// sorted list of (orientation, origin) rounded to 1e-6 m.
fn canonical_key(layout: &Layout) -> Vec<(u8, i64, i64)> {
    let mut key: Vec<(u8, i64, i64)> = layout
        .stalls
        .iter()
        .map(|s| {
            let orient = match s.orient {
                StallOrient::AlongWidth => 0u8,
                StallOrient::AlongLength => 1u8,
            };
            (
                orient,
                (s.x * 1e6).round() as i64,
                (s.y * 1e6).round() as i64,
            )
        })
        .collect();
    key.sort();
    key
}

/// Reduce a set of equal-capacity layouts to topologically unique ones:
/// compact each to its bottom-left fixed point and keep one representative
/// per canonical key. Output is ordered by canonical key.
pub fn canonicalize_unique(layouts: &[Layout], dims: StallDims) -> Vec<Layout> {
    let mut by_key: std::collections::BTreeMap<Vec<(u8, i64, i64)>, Layout> =
        std::collections::BTreeMap::new();
    for layout in layouts {
        let compacted = compact(layout, dims);
        by_key.entry(canonical_key(&compacted)).or_insert(compacted);
    }
    by_key.into_values().collect()
}
