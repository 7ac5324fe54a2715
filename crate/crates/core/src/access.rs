//! Per-stall accessibility conditions: minimal DNF formulas over
//! stall-vacancy variables, derived by a graph-guided recursive search that
//! tests candidate vacant-stall sets with the kinematic planner.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{HashSet, VecDeque};

use crate::adjacency::{restrict_to_entrance, AdjacencyGraph};
use crate::error::{Error, Result};
use crate::planner::LayoutPlanner;

/// A DNF formula over stall-vacancy variables. Each clause is a set of stall
/// indices (as a bitmask) whose joint vacancy suffices for access. The
/// clause set is kept an antichain: no clause is a subset of another.
///
/// TOP (always true) is the set containing the empty clause; BOTTOM (always
/// false) is the empty clause set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessCondition {
    clauses: Vec<u64>,
}

impl AccessCondition {
    pub fn bottom() -> Self {
        AccessCondition { clauses: vec![] }
    }

    pub fn top() -> Self {
        AccessCondition { clauses: vec![0] }
    }

    pub fn is_bottom(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.clauses == [0]
    }

    pub fn from_clause_masks(masks: impl IntoIterator<Item = u64>) -> Self {
        let mut cond = AccessCondition::bottom();
        for m in masks {
            cond.insert_clause(m);
        }
        cond
    }

    pub fn from_clause_sets(sets: &[Vec<usize>]) -> Self {
        AccessCondition::from_clause_masks(
            sets.iter()
                .map(|c| c.iter().fold(0u64, |m, &s| m | (1 << s))),
        )
    }

    /// Sorted clause bitmasks.
    pub fn clause_masks(&self) -> &[u64] {
        &self.clauses
    }

    /// Clauses as sorted stall-index lists.
    pub fn clause_sets(&self) -> Vec<Vec<usize>> {
        self.clauses.iter().map(|&m| mask_to_indices(m)).collect()
    }

    /// True if some existing clause is a subset of `mask`.
    pub fn any_clause_subset_of(&self, mask: u64) -> bool {
        self.clauses.iter().any(|&c| c & !mask == 0)
    }

    /// Add a clause, keeping the antichain property: drop the new clause if
    /// a subset is already present, and drop existing supersets of it.
    pub fn insert_clause(&mut self, mask: u64) {
        if self.any_clause_subset_of(mask) {
            return;
        }
        self.clauses.retain(|&c| mask & !c != 0);
        self.clauses.push(mask);
        self.clauses.sort_unstable();
    }

    /// Evaluate under a vacancy assignment (bit set = stall vacant).
    pub fn evaluate(&self, vacant: u64) -> bool {
        self.any_clause_subset_of(vacant)
    }
}

fn mask_to_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

impl Serialize for AccessCondition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_top() {
            serializer.serialize_str("TOP")
        } else if self.is_bottom() {
            serializer.serialize_str("BOTTOM")
        } else {
            self.clause_sets().serialize(serializer)
        }
    }
}

impl<'de> Deserialize<'de> for AccessCondition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Tag(String),
            Clauses(Vec<Vec<usize>>),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Tag(t) if t == "TOP" => Ok(AccessCondition::top()),
            Repr::Tag(t) if t == "BOTTOM" => Ok(AccessCondition::bottom()),
            Repr::Tag(t) => Err(D::Error::custom(format!("unknown condition tag {t}"))),
            Repr::Clauses(sets) => Ok(AccessCondition::from_clause_sets(&sets)),
        }
    }
}

/// Disjunction of two conditions: clause-set union followed by antichain
/// reduction.
pub fn or_merge(a: &AccessCondition, b: &AccessCondition) -> AccessCondition {
    let mut out = a.clone();
    for &c in b.clause_masks() {
        out.insert_clause(c);
    }
    out
}

/// Accessibility conditions for every stall of one layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutConditions {
    pub per_stall: Vec<AccessCondition>,
}

impl LayoutConditions {
    pub fn n_stalls(&self) -> usize {
        self.per_stall.len()
    }
}

/// BFS shortest path from `from` to `to` ignoring `removed` nodes, with a
/// deterministic smallest-index tie-break on predecessors. Node ids are
/// graph node ids (stalls then entrance).
fn shortest_path(g: &AdjacencyGraph, from: usize, to: usize, removed: u64) -> Option<Vec<usize>> {
    let n = g.node_count();
    if removed & (1 << from) != 0 || removed & (1 << to) != 0 {
        return None;
    }
    let mut dist = vec![usize::MAX; n];
    dist[from] = 0;
    let mut frontier = vec![from];
    let mut d = 0;
    while !frontier.is_empty() && dist[to] == usize::MAX {
        let mut next = Vec::new();
        for &u in &frontier {
            let mut nbrs = g.neighbors(u) & !removed;
            while nbrs != 0 {
                let v = nbrs.trailing_zeros() as usize;
                nbrs &= nbrs - 1;
                if dist[v] == usize::MAX {
                    dist[v] = d + 1;
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
        d += 1;
    }
    if dist[to] == usize::MAX {
        return None;
    }
    // Walk back choosing the smallest-index predecessor at each hop.
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        let want = dist[cur] - 1;
        let mut nbrs = g.neighbors(cur) & !removed;
        let mut pick = None;
        while nbrs != 0 {
            let u = nbrs.trailing_zeros() as usize;
            nbrs &= nbrs - 1;
            if dist[u] == want {
                pick = Some(u);
                break;
            }
        }
        cur = pick.expect("predecessor exists on a shortest path");
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// True if `vacant | {p}` together with the entrance forms one connected
/// component of the restricted graph (the connectivity half of the
/// accessibility definition; the planner is the kinematic half).
pub fn vacant_set_connected(g: &AdjacencyGraph, p: usize, e: usize, vacant: u64) -> Result<bool> {
    let g = restrict_to_entrance(g, e)?;
    let e_node = g.n_stalls;
    let members: u64 = vacant | (1 << p) | (1 << e_node);
    let mut seen = 1u64 << p;
    let mut frontier = 1u64 << p;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let nbrs = g.neighbors(u) & members & !seen;
        seen |= nbrs;
        frontier |= nbrs;
    }
    Ok(seen == members)
}

struct CondSearch<'a> {
    g: &'a AdjacencyGraph,
    planner: &'a LayoutPlanner,
    p: usize,
    entrance: usize,
    e_node: usize,
    stall_mask: u64,
    visited: HashSet<u64>,
    phi: AccessCondition,
}

impl<'a> CondSearch<'a> {
    /// BFS over connected vacant-set candidates seeded from a path's stall
    /// set, in increasing cardinality order (deque), pruning visited sets
    /// and supersets of accepted clauses. `removed` is the detour-removal
    /// mask of the graph this expansion runs in.
    fn expand_connected_set(&mut self, removed: u64, seed: u64) -> Result<()> {
        let mut deque: VecDeque<u64> = VecDeque::new();
        deque.push_back(seed);
        while let Some(set) = deque.pop_front() {
            if !self.visited.insert(set) {
                continue;
            }
            if self.phi.any_clause_subset_of(set) {
                continue;
            }
            if self.planner.exit_feasible(self.p, self.entrance, set)? {
                self.phi.insert_clause(set);
                continue;
            }
            let obstacles = self.stall_mask & !set & !(1 << self.p);
            if obstacles == 0 {
                continue;
            }
            // Grow by nodes adjacent to the candidate set (or to p itself
            // for the empty seed), staying within the current graph.
            let base = if set == 0 { 1 << self.p } else { set };
            let mut nbrs = 0u64;
            let mut bits = base;
            while bits != 0 {
                let u = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                nbrs |= self.g.neighbors(u);
            }
            nbrs &= self.stall_mask & !set & !(1 << self.p) & !removed;
            while nbrs != 0 {
                let i = nbrs.trailing_zeros() as usize;
                nbrs &= nbrs - 1;
                deque.push_back(set | (1 << i));
            }
        }
        Ok(())
    }

    /// For each intermediate node of the current path, remove it, recompute
    /// a shortest path in the reduced graph, and continue the minimal-clause
    /// search from that detour.
    fn search_detour_path(&mut self, removed: u64, path_stalls: u64) -> Result<()> {
        let mut bits = path_stalls;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let removed_i = removed | (1 << i);
            if let Some(q) = shortest_path(self.g, self.p, self.e_node, removed_i) {
                let q_stalls = path_stall_mask(&q, self.p, self.e_node);
                self.expand_connected_set(removed, q_stalls)?;
                self.search_detour_path(removed_i, q_stalls)?;
            }
        }
        Ok(())
    }
}

fn path_stall_mask(path: &[usize], p: usize, e_node: usize) -> u64 {
    path.iter()
        .filter(|&&v| v != p && v != e_node)
        .fold(0u64, |m, &v| m | (1 << v))
}

/// Derive the accessibility condition of stall `p` with respect to entrance
/// `e`: the antichain of minimal vacant-stall sets under which an exit
/// maneuver exists. Returns BOTTOM when `p` has no path to the entrance in
/// the adjacency graph.
pub fn get_access_cond(
    p: usize,
    e: usize,
    g: &AdjacencyGraph,
    planner: &LayoutPlanner,
) -> Result<AccessCondition> {
    let g = restrict_to_entrance(g, e)?;
    let n = g.n_stalls;
    if p >= n {
        return Err(Error::UnknownNode(format!("s{p}")));
    }
    let e_node = n;
    let stall_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = CondSearch {
        g: &g,
        planner,
        p,
        entrance: e,
        e_node,
        stall_mask,
        visited: HashSet::new(),
        phi: AccessCondition::bottom(),
    };
    if let Some(q) = shortest_path(&g, p, e_node, 0) {
        let seed = path_stall_mask(&q, p, e_node);
        search.expand_connected_set(0, seed)?;
        search.search_detour_path(0, seed)?;
    }
    Ok(search.phi)
}

/// A layout is feasible iff every stall can reach some entrance when all
/// other stalls are vacant; a stall unreachable even then makes the layout
/// infeasible.
pub fn screen_feasible(planner: &LayoutPlanner) -> Result<bool> {
    for p in 0..planner.n_stalls() {
        let mut ok = false;
        for e in 0..planner.lot.entrances.len() {
            if planner.exit_query(p, e, 0)?.is_some() {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Stall (if any) that cannot exit even with every other stall vacant.
pub fn first_infeasible_stall(planner: &LayoutPlanner) -> Result<Option<usize>> {
    for p in 0..planner.n_stalls() {
        let mut ok = false;
        for e in 0..planner.lot.entrances.len() {
            if planner.exit_query(p, e, 0)?.is_some() {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Conditions for every stall: OR-merge of the per-entrance conditions.
/// Fails with `InfeasibleLayout` when the feasibility screen rejects the
/// layout. Stall evaluation may run on the current rayon pool; results are
/// identical to single-threaded execution.
pub fn derive_layout_conditions(
    layout_id: usize,
    g: &AdjacencyGraph,
    planner: &LayoutPlanner,
) -> Result<LayoutConditions> {
    if let Some(p) = first_infeasible_stall(planner)? {
        return Err(Error::InfeasibleLayout(
            layout_id,
            format!("stall {p} cannot reach any entrance even with all other stalls vacant"),
        ));
    }
    use rayon::prelude::*;
    let per_stall: Vec<Result<AccessCondition>> = (0..planner.n_stalls())
        .into_par_iter()
        .map(|p| {
            let mut phi = AccessCondition::bottom();
            for e in 0..planner.lot.entrances.len() {
                let cond = get_access_cond(p, e, g, planner)?;
                phi = or_merge(&phi, &cond);
            }
            Ok(phi)
        })
        .collect();
    let per_stall = per_stall.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(LayoutConditions { per_stall })
}
