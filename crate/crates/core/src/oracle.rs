//! Brute-force reference oracles. These deliberately avoid the search
//! shortcuts used by the main implementations so they can audit them on
//! small instances: the condition oracle enumerates every vacancy subset,
//! the sequence oracle filters every permutation, and the capacity oracle
//! re-derives the packing maximum without the solver's bounds.

use rayon::prelude::*;

use crate::access::{vacant_set_connected, AccessCondition, LayoutConditions};
use crate::adjacency::AdjacencyGraph;
use crate::error::Result;
use crate::geometry::LotSpec;
use crate::layout::StallDims;
use crate::planner::LayoutPlanner;
use crate::sequencing::OperationOrder;

/// Condition oracle: for every stall, test all `2^(n-1)` vacancy subsets
/// against the accessibility definition (the vacant set together with the
/// stall and an entrance must be connected in the adjacency graph, and the
/// planner must find a maneuver), then keep the inclusion-minimal ones.
pub fn brute_force_conditions(
    planner: &LayoutPlanner,
    graph: &AdjacencyGraph,
) -> Result<LayoutConditions> {
    brute_force_with(planner, |p, vacant| {
        for e in 0..planner.lot.entrances.len() {
            if vacant_set_connected(graph, p, e, vacant)? && planner.exit_feasible(p, e, vacant)? {
                return Ok(true);
            }
        }
        Ok(false)
    })
}

/// Kinematics-only variant: ignores graph connectivity and accepts any
/// vacancy subset the planner can drive through. Differences against
/// [`brute_force_conditions`] flag vacancy sets that are drivable but
/// excluded by the connectivity half of the definition; they are reported
/// as diagnostics, not failures.
pub fn brute_force_conditions_kinematic(planner: &LayoutPlanner) -> Result<LayoutConditions> {
    brute_force_with(planner, |p, vacant| {
        for e in 0..planner.lot.entrances.len() {
            if planner.exit_feasible(p, e, vacant)? {
                return Ok(true);
            }
        }
        Ok(false)
    })
}

fn brute_force_with(
    planner: &LayoutPlanner,
    accessible: impl Fn(usize, u64) -> Result<bool> + Sync,
) -> Result<LayoutConditions> {
    let n = planner.n_stalls();
    assert!(n <= 16, "brute-force condition oracle is for small layouts");
    let per_stall = (0..n)
        .map(|p| {
            let others: Vec<usize> = (0..n).filter(|&s| s != p).collect();
            // Ascending popcount so minimal sets arrive first and absorb
            // their supersets for free.
            let mut subsets: Vec<u64> = (0u64..(1 << others.len()))
                .map(|bits| {
                    others
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| bits & (1 << i) != 0)
                        .fold(0u64, |m, (_, &s)| m | (1 << s))
                })
                .collect();
            subsets.sort_by_key(|m| (m.count_ones(), *m));
            let feasible: Vec<(u64, bool)> = subsets
                .par_iter()
                .map(|&vacant| Ok((vacant, accessible(p, vacant)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut cond = AccessCondition::bottom();
            for (vacant, ok) in feasible {
                if ok && !cond.any_clause_subset_of(vacant) {
                    cond.insert_clause(vacant);
                }
            }
            Ok(cond)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LayoutConditions { per_stall })
}

/// Sequence oracle: filter all permutations by prefix feasibility.
pub fn brute_force_exit_sequences(conds: &LayoutConditions) -> Vec<Vec<usize>> {
    let n = conds.n_stalls();
    assert!(n <= 8, "brute-force sequence oracle is for small layouts");
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |candidate| {
        let mut vacant = 0u64;
        for &p in candidate {
            if !conds.per_stall[p].evaluate(vacant) {
                return;
            }
            vacant |= 1 << p;
        }
        out.push(candidate.to_vec());
    });
    out.sort();
    out
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Pair filtering by explicit Cartesian product, as a cross-check for the
/// hashed implementation.
pub fn brute_force_filter_pairs(
    park_seqs: &[Vec<usize>],
    exit_seqs: &[Vec<usize>],
    pi: &OperationOrder,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let mut out = Vec::new();
    for park in park_seqs {
        for exit in exit_seqs {
            if crate::sequencing::apply_order(pi, park)? == *exit {
                out.push((park.clone(), exit.clone()));
            }
        }
    }
    Ok(out)
}

/// Capacity oracle: independent of the packing solver. Regenerates the
/// candidate grid from scratch and runs a plain include/exclude search over
/// rectangles kept available in a list (no conflict bitmasks, no area
/// bound).
pub fn brute_force_max_capacity(lot: &LotSpec, dims: StallDims) -> usize {
    let coords = |limit: f64| -> Vec<f64> {
        let mut vals = vec![];
        let mut a = 0.0;
        while a <= limit + 1e-9 {
            let mut v = a;
            while v <= limit + 1e-9 {
                if !vals.iter().any(|&x: &f64| (x - v).abs() < 1e-9) {
                    vals.push(v);
                }
                v += dims.length;
            }
            a += dims.width;
        }
        vals.sort_by(|p, q| p.total_cmp(q));
        vals
    };
    let xs = coords(lot.length);
    let ys = coords(lot.width);
    let mut rects: Vec<(f64, f64, f64, f64)> = Vec::new();
    for &(dx, dy) in &[(dims.width, dims.length), (dims.length, dims.width)] {
        for &x in &xs {
            for &y in &ys {
                if x + dx <= lot.length + 1e-9 && y + dy <= lot.width + 1e-9 {
                    rects.push((x, y, x + dx, y + dy));
                }
            }
        }
    }
    fn overlaps(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> bool {
        a.0 < b.2 - 1e-9 && b.0 < a.2 - 1e-9 && a.1 < b.3 - 1e-9 && b.1 < a.3 - 1e-9
    }
    fn recurse(avail: &[(f64, f64, f64, f64)], placed: usize, best: &mut usize) {
        if placed > *best {
            *best = placed;
        }
        if placed + avail.len() <= *best {
            return;
        }
        for (i, &r) in avail.iter().enumerate() {
            if placed + (avail.len() - i) <= *best {
                break;
            }
            let rest: Vec<(f64, f64, f64, f64)> = avail[i + 1..]
                .iter()
                .copied()
                .filter(|&o| !overlaps(r, o))
                .collect();
            recurse(&rest, placed + 1, best);
        }
    }
    let mut best = 0;
    recurse(&rects, 0, &mut best);
    best
}

/// Result of auditing one derived clause against the planner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseAudit {
    pub stall: usize,
    pub clause: Vec<usize>,
    /// Planner finds a path with exactly the clause vacant.
    pub sound: bool,
    /// Planner fails when any single clause member is re-occupied.
    pub minimal: bool,
}

/// Check soundness and minimality of every clause of every stall condition:
/// with exactly clause `N` vacant an exit must exist (through an entrance
/// the vacant set is connected to), and no single-element reduction of `N`
/// may be accessible.
pub fn audit_clauses(
    planner: &LayoutPlanner,
    graph: &AdjacencyGraph,
    conds: &LayoutConditions,
) -> Result<Vec<ClauseAudit>> {
    let jobs: Vec<(usize, u64)> = conds
        .per_stall
        .iter()
        .enumerate()
        .flat_map(|(p, cond)| cond.clause_masks().iter().map(move |&m| (p, m)))
        .collect();
    jobs.par_iter()
        .map(|&(p, mask)| {
            let accessible = |vacant: u64| -> Result<bool> {
                for e in 0..planner.lot.entrances.len() {
                    if vacant_set_connected(graph, p, e, vacant)?
                        && planner.exit_feasible(p, e, vacant)?
                    {
                        return Ok(true);
                    }
                }
                Ok(false)
            };
            let sound = accessible(mask)?;
            let mut minimal = true;
            let mut bits = mask;
            while bits != 0 {
                let s = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if accessible(mask & !(1 << s))? {
                    minimal = false;
                    break;
                }
            }
            Ok(ClauseAudit {
                stall: p,
                clause: (0..64).filter(|&i| mask & (1 << i) != 0).collect(),
                sound,
                minimal,
            })
        })
        .collect()
}

/// Replay an exit sequence step by step: at step k, stall `seq[k]` must have
/// a collision-free exit path while stalls `seq[k+1..]` are still parked.
pub fn replay_exit_sequence(planner: &LayoutPlanner, seq: &[usize]) -> Result<bool> {
    let n = planner.n_stalls();
    for (k, &p) in seq.iter().enumerate() {
        let occupied = seq[k + 1..].iter().fold(0u64, |m, &s| m | (1 << s));
        let mut found = false;
        for e in 0..planner.lot.entrances.len() {
            if let Some(path) = planner.exit_query(p, e, occupied)? {
                let obstacles = planner.obstacles_for(occupied);
                if crate::planner::path_collision_free(
                    &path,
                    &planner.vehicle,
                    &obstacles,
                    &planner.world,
                ) {
                    found = true;
                    break;
                }
            }
        }
        if !found {
            return Ok(false);
        }
        debug_assert!(seq.len() == n);
    }
    Ok(true)
}
