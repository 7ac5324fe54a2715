//! Enumeration of relocation-free exit sequences by DFS over accessibility
//! conditions, parking sequences by reversal, and filtering of parking/exit
//! pairs against a prescribed operation order.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::access::LayoutConditions;
use crate::error::{Error, Result};

/// Permutation mapping departure rank to arrival index: `pi[k] = i` means
/// the vehicle that arrived i-th departs k-th.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperationOrder(pub Vec<usize>);

impl OperationOrder {
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        let n = pi.len();
        let mut seen = vec![false; n];
        for &v in &pi {
            if v >= n || seen[v] {
                return Err(Error::ConfigInvalid(format!(
                    "operation order {pi:?} is not a permutation"
                )));
            }
            seen[v] = true;
        }
        Ok(OperationOrder(pi))
    }

    pub fn identity(n: usize) -> Self {
        OperationOrder((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All circular shifts of the identity order on `n` vehicles.
pub fn cyclic_orders(n: usize) -> Vec<OperationOrder> {
    (0..n)
        .map(|k| OperationOrder((0..n).map(|i| (i + k) % n).collect()))
        .collect()
}

/// A parking/exit sequence pair consistent with some operation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePair {
    pub park: Vec<usize>,
    pub exit: Vec<usize>,
}

/// Incremental clause bookkeeping for DFS condition evaluation: per clause
/// a count of still-occupied literals, per stall a count of satisfied
/// clauses. Behaviorally identical to re-substituting `y_p = true` after
/// each exit.
struct CondState {
    /// (stall, literal mask) per clause.
    clause_owner: Vec<usize>,
    remaining: Vec<u32>,
    /// Clause indices containing a given stall.
    member_of: Vec<Vec<usize>>,
    /// Number of fully satisfied clauses per stall.
    satisfied: Vec<u32>,
}

impl CondState {
    fn new(conds: &LayoutConditions) -> Self {
        let n = conds.n_stalls();
        let mut clause_owner = Vec::new();
        let mut remaining = Vec::new();
        let mut member_of = vec![Vec::new(); n];
        let mut satisfied = vec![0u32; n];
        for (p, cond) in conds.per_stall.iter().enumerate() {
            for &mask in cond.clause_masks() {
                let idx = clause_owner.len();
                clause_owner.push(p);
                remaining.push(mask.count_ones());
                if mask == 0 {
                    satisfied[p] += 1;
                }
                let mut bits = mask;
                while bits != 0 {
                    let s = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    member_of[s].push(idx);
                }
            }
        }
        CondState {
            clause_owner,
            remaining,
            member_of,
            satisfied,
        }
    }

    fn enabled(&self, p: usize) -> bool {
        self.satisfied[p] > 0
    }

    fn mark_vacant(&mut self, s: usize) {
        for &ci in &self.member_of[s] {
            self.remaining[ci] -= 1;
            if self.remaining[ci] == 0 {
                self.satisfied[self.clause_owner[ci]] += 1;
            }
        }
    }

    fn mark_occupied(&mut self, s: usize) {
        for &ci in &self.member_of[s] {
            if self.remaining[ci] == 0 {
                self.satisfied[self.clause_owner[ci]] -= 1;
            }
            self.remaining[ci] += 1;
        }
    }
}

/// Exactly the permutations of the stall set that are prefix-feasible: each
/// stall's condition holds when all earlier stalls are vacant. Candidates
/// are explored in ascending stall index, so the result is in lexicographic
/// order. The empty result is legal.
pub fn enumerate_exit_sequences(conds: &LayoutConditions) -> Vec<Vec<usize>> {
    let n = conds.n_stalls();
    let mut state = CondState::new(conds);
    let mut out = Vec::new();
    let mut seq = Vec::with_capacity(n);
    let mut exited = vec![false; n];
    dfs(n, &mut state, &mut seq, &mut exited, &mut out);
    out
}

fn dfs(
    n: usize,
    state: &mut CondState,
    seq: &mut Vec<usize>,
    exited: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    if seq.len() == n {
        out.push(seq.clone());
        return;
    }
    for p in 0..n {
        if exited[p] || !state.enabled(p) {
            continue;
        }
        seq.push(p);
        exited[p] = true;
        state.mark_vacant(p);
        dfs(n, state, seq, exited, out);
        state.mark_occupied(p);
        exited[p] = false;
        seq.pop();
    }
}

/// Parking sequences are elementwise reversals of exit sequences
/// (cardinality preserved, order aligned with the input).
pub fn park_sequences_from_exit(exit_seqs: &[Vec<usize>]) -> Vec<Vec<usize>> {
    exit_seqs
        .iter()
        .map(|s| s.iter().rev().cloned().collect())
        .collect()
}

/// `result[k] = park[pi[k]]`: the exit sequence a parking sequence must pair
/// with under operation order `pi`.
pub fn apply_order(pi: &OperationOrder, park: &[usize]) -> Result<Vec<usize>> {
    if pi.len() != park.len() {
        return Err(Error::LengthMismatch(pi.len(), park.len()));
    }
    Ok(pi.0.iter().map(|&k| park[k]).collect())
}

/// All (park, exit) pairs where `exit = pi(park)` and both sides are valid
/// relocation-free sequences. Equivalent to filtering the full Cartesian
/// product, evaluated in O(|parkSeqs|).
pub fn filter_pairs(
    park_seqs: &[Vec<usize>],
    exit_seqs: &[Vec<usize>],
    pi: &OperationOrder,
) -> Result<Vec<SequencePair>> {
    for s in park_seqs.iter().chain(exit_seqs.iter()) {
        if s.len() != pi.len() {
            return Err(Error::LengthMismatch(pi.len(), s.len()));
        }
    }
    let exit_set: HashSet<&[usize]> = exit_seqs.iter().map(|s| s.as_slice()).collect();
    let mut out = Vec::new();
    for park in park_seqs {
        let exit = apply_order(pi, park)?;
        if exit_set.contains(exit.as_slice()) {
            out.push(SequencePair {
                park: park.clone(),
                exit,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::AccessCondition;

    fn conds_from(sets: &[Vec<Vec<usize>>]) -> LayoutConditions {
        LayoutConditions {
            per_stall: sets
                .iter()
                .map(|clauses| {
                    if clauses.is_empty() {
                        AccessCondition::top()
                    } else {
                        AccessCondition::from_clause_sets(clauses)
                    }
                })
                .collect(),
        }
    }

    /// Reference conditions for layout 2 of the 15x12 instance.
    fn layout2_conds() -> LayoutConditions {
        conds_from(&[
            vec![],                       // stall 0: TOP
            vec![vec![0], vec![2, 3, 4]], // stall 1
            vec![vec![0], vec![3, 4]],    // stall 2
            vec![vec![0], vec![4]],       // stall 3
            vec![],                       // stall 4: TOP
        ])
    }

    /// Conditions for layout 1 of the same instance: four free stalls and a
    /// dependent stall needing either the two bottom or the two top rows.
    fn layout1_conds() -> LayoutConditions {
        conds_from(&[vec![], vec![vec![0, 2], vec![3, 4]], vec![], vec![], vec![]])
    }

    fn layout3_conds() -> LayoutConditions {
        conds_from(&[
            vec![],
            vec![vec![0]],
            vec![vec![0, 1]],
            vec![vec![0, 1, 2]],
            vec![vec![0, 1, 2, 3]],
        ])
    }

    #[test]
    fn layout2_conditions_give_34_sequences() {
        let seqs = enumerate_exit_sequences(&layout2_conds());
        assert_eq!(seqs.len(), 34);
        assert!(seqs.contains(&vec![0, 4, 2, 3, 1]));
        // Lexicographic output order.
        let mut sorted = seqs.clone();
        sorted.sort();
        assert_eq!(seqs, sorted);
    }

    #[test]
    fn layout1_conditions_give_56_sequences() {
        assert_eq!(enumerate_exit_sequences(&layout1_conds()).len(), 56);
    }

    #[test]
    fn layout3_conditions_give_single_sequence() {
        assert_eq!(
            enumerate_exit_sequences(&layout3_conds()),
            vec![vec![0, 1, 2, 3, 4]]
        );
    }

    #[test]
    fn all_top_gives_all_permutations() {
        let conds = conds_from(&[vec![], vec![], vec![], vec![]]);
        assert_eq!(enumerate_exit_sequences(&conds).len(), 24);
    }

    #[test]
    fn bottom_condition_gives_empty_result() {
        let conds = LayoutConditions {
            per_stall: vec![AccessCondition::top(), AccessCondition::bottom()],
        };
        assert!(enumerate_exit_sequences(&conds).is_empty());
    }

    #[test]
    fn reversal_preserves_cardinality() {
        let exits = vec![vec![0, 4, 2, 3, 1]];
        assert_eq!(park_sequences_from_exit(&exits), vec![vec![1, 3, 2, 4, 0]]);
        assert!(park_sequences_from_exit(&[]).is_empty());
    }

    #[test]
    fn apply_order_examples() {
        let pi = OperationOrder::new(vec![4, 0, 1, 2, 3]).unwrap();
        assert_eq!(
            apply_order(&pi, &[4, 2, 3, 1, 0]).unwrap(),
            vec![0, 4, 2, 3, 1]
        );
        let id = OperationOrder::identity(3);
        assert_eq!(apply_order(&id, &[2, 0, 1]).unwrap(), vec![2, 0, 1]);
        let swap = OperationOrder::new(vec![1, 0]).unwrap();
        assert_eq!(apply_order(&swap, &[7, 3]).unwrap(), vec![3, 7]);
        assert!(apply_order(&swap, &[1, 2, 3]).is_err());
    }

    #[test]
    fn operation_order_rejects_non_permutations() {
        assert!(OperationOrder::new(vec![0, 0, 1]).is_err());
        assert!(OperationOrder::new(vec![0, 3]).is_err());
    }

    #[test]
    fn cyclic_orders_match_expected_shifts() {
        let orders = cyclic_orders(5);
        assert_eq!(orders.len(), 5);
        assert_eq!(orders[0].0, vec![0, 1, 2, 3, 4]);
        assert_eq!(orders[1].0, vec![1, 2, 3, 4, 0]);
        assert_eq!(orders[4].0, vec![4, 0, 1, 2, 3]);
    }

    /// Pair counts for all cyclic orders match the reference matrix for the
    /// 15x12 instance, computed here purely from the conditions.
    #[test]
    fn pair_count_matrix_from_conditions() {
        let expected: [[usize; 3]; 5] =
            [[8, 2, 0], [24, 2, 0], [48, 4, 0], [40, 12, 0], [16, 26, 0]];
        let all_conds = [layout1_conds(), layout2_conds(), layout3_conds()];
        for (li, conds) in all_conds.iter().enumerate() {
            let exits = enumerate_exit_sequences(conds);
            let parks = park_sequences_from_exit(&exits);
            for (oi, pi) in cyclic_orders(5).iter().enumerate() {
                let pairs = filter_pairs(&parks, &exits, pi).unwrap();
                assert_eq!(
                    pairs.len(),
                    expected[oi][li],
                    "layout {} order {:?}",
                    li + 1,
                    pi.0
                );
            }
        }
    }

    #[test]
    fn worked_pair_is_member_for_shifted_order() {
        let exits = enumerate_exit_sequences(&layout2_conds());
        let parks = park_sequences_from_exit(&exits);
        let pi = OperationOrder::new(vec![4, 0, 1, 2, 3]).unwrap();
        let pairs = filter_pairs(&parks, &exits, &pi).unwrap();
        assert!(pairs.contains(&SequencePair {
            park: vec![4, 2, 3, 1, 0],
            exit: vec![0, 4, 2, 3, 1],
        }));
    }

    #[test]
    fn identity_order_pairs_self_reverse_closed_sequences() {
        let exits = enumerate_exit_sequences(&layout1_conds());
        let parks = park_sequences_from_exit(&exits);
        let id = OperationOrder::identity(5);
        let pairs = filter_pairs(&parks, &exits, &id).unwrap();
        let self_closed = exits
            .iter()
            .filter(|s| {
                let rev: Vec<usize> = s.iter().rev().cloned().collect();
                exits.contains(&rev)
            })
            .count();
        assert_eq!(pairs.len(), self_closed);
        assert_eq!(pairs.len(), 8);
    }

    #[test]
    fn prefix_feasibility_holds_for_every_enumerated_sequence() {
        let conds = layout2_conds();
        for seq in enumerate_exit_sequences(&conds) {
            let mut vacant = 0u64;
            for &p in &seq {
                assert!(conds.per_stall[p].evaluate(vacant));
                vacant |= 1 << p;
            }
        }
    }
}
