//! Pipeline orchestration: packing, canonicalization, per-layout adjacency,
//! feasibility screening, condition derivation and sequence enumeration,
//! then operation-order filtering. Also owns the persistent JSON artifacts.
//!
//! All merges are order-canonicalized, so outputs are byte-identical across
//! runs and worker counts.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::access::{derive_layout_conditions, first_infeasible_stall, LayoutConditions};
use crate::adjacency::{build_adjacency, AdjacencyGraph, GraphJson};
use crate::config::InstanceConfig;
use crate::error::{Error, Result};
use crate::layout::{canonicalize_unique, solve_max_packing, Layout};
use crate::planner::LayoutPlanner;
use crate::sequencing::{
    enumerate_exit_sequences, filter_pairs, park_sequences_from_exit, OperationOrder, SequencePair,
};

/// Per-layout results of the first solution stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutReport {
    pub id: usize,
    pub layout: Layout,
    pub graph: GraphJson,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub infeasible_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conditions: Option<LayoutConditions>,
    pub exit_seqs: Vec<Vec<usize>>,
    pub park_seqs: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution1Output {
    pub capacity: usize,
    pub layouts: Vec<LayoutReport>,
}

/// Pair sets for one (layout, order) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSet {
    pub layout: usize,
    pub pi: OperationOrder,
    pub pairs: Vec<SequencePair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution2Output {
    pub orders: Vec<OperationOrder>,
    pub pair_sets: Vec<PairSet>,
}

impl Solution2Output {
    /// Count matrix indexed `[order][layout]`.
    pub fn count_matrix(&self, n_layouts: usize) -> Vec<Vec<usize>> {
        let mut m = vec![vec![0; n_layouts]; self.orders.len()];
        for ps in &self.pair_sets {
            let oi = self
                .orders
                .iter()
                .position(|o| *o == ps.pi)
                .expect("pair set order is listed");
            m[oi][ps.layout] = ps.pairs.len();
        }
        m
    }
}

/// A full solution-1 run with the live planner state kept around for
/// downstream queries (rendering, verification, replay).
pub struct InstanceRun {
    pub config: InstanceConfig,
    pub sol1: Solution1Output,
    pub graphs: Vec<AdjacencyGraph>,
    pub planners: Vec<Arc<LayoutPlanner>>,
}

/// Run the full first stage: packing, canonicalization, and per-layout
/// postprocessing. Infeasible layouts are reported with a reason and carry
/// no conditions or sequences.
pub fn run_solution1(config: &InstanceConfig) -> Result<InstanceRun> {
    config.validate()?;
    let raw = solve_max_packing(&config.lot, config.stall)?;
    let unique = canonicalize_unique(&raw, config.stall);
    let capacity = unique.first().map_or(0, |l| l.capacity);

    // Layout-level fan-out; stall-level fan-out happens inside
    // derive_layout_conditions. Results collect in layout order, so output
    // is independent of scheduling.
    use rayon::prelude::*;
    let per_layout: Vec<Result<(AdjacencyGraph, Arc<LayoutPlanner>, LayoutReport)>> = unique
        .into_par_iter()
        .enumerate()
        .map(|(id, layout)| {
            let graph = build_adjacency(
                &layout,
                &config.lot,
                config.stall,
                &config.vehicle,
                &config.adjacency,
            );
            let planner = Arc::new(LayoutPlanner::new(
                layout.clone(),
                config.lot.clone(),
                config.stall,
                config.vehicle,
                config.planner.clone(),
            ));
            let report = match first_infeasible_stall(&planner)? {
                Some(p) => LayoutReport {
                    id,
                    layout,
                    graph: graph.to_json(),
                    feasible: false,
                    infeasible_reason: Some(format!(
                        "stall {p} cannot reach any entrance even with all other stalls vacant"
                    )),
                    conditions: None,
                    exit_seqs: vec![],
                    park_seqs: vec![],
                },
                None => {
                    let conditions = derive_layout_conditions(id, &graph, &planner)?;
                    let exit_seqs = enumerate_exit_sequences(&conditions);
                    let park_seqs = park_sequences_from_exit(&exit_seqs);
                    LayoutReport {
                        id,
                        layout,
                        graph: graph.to_json(),
                        feasible: true,
                        infeasible_reason: None,
                        conditions: Some(conditions),
                        exit_seqs,
                        park_seqs,
                    }
                }
            };
            Ok((graph, planner, report))
        })
        .collect();
    let mut graphs = Vec::new();
    let mut planners = Vec::new();
    let mut reports = Vec::new();
    for item in per_layout {
        let (graph, planner, report) = item?;
        graphs.push(graph);
        planners.push(planner);
        reports.push(report);
    }
    Ok(InstanceRun {
        config: config.clone(),
        sol1: Solution1Output {
            capacity,
            layouts: reports,
        },
        graphs,
        planners,
    })
}

/// Filter parking/exit pairs of every feasible layout against each order.
pub fn run_solution2(sol1: &Solution1Output, orders: &[OperationOrder]) -> Result<Solution2Output> {
    let mut pair_sets = Vec::new();
    for pi in orders {
        for report in &sol1.layouts {
            if !report.feasible {
                continue;
            }
            let pairs = filter_pairs(&report.park_seqs, &report.exit_seqs, pi)?;
            pair_sets.push(PairSet {
                layout: report.id,
                pi: pi.clone(),
                pairs,
            });
        }
    }
    Ok(Solution2Output {
        orders: orders.to_vec(),
        pair_sets,
    })
}

/// Run a closure on a rayon pool with the given thread count (None = rayon
/// default). Outputs must not depend on the count; tests enforce this.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("worker pool")
            .install(f),
    }
}

/// Content-addressed run directory for a config under `out_dir`.
pub fn run_dir(out_dir: &Path, config: &InstanceConfig) -> PathBuf {
    out_dir.join(config.fingerprint())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Persist solution-1 artifacts into the content-addressed run directory.
/// Returns the directory written.
pub fn write_solution1(run: &InstanceRun, out_dir: &Path) -> Result<PathBuf> {
    let dir = run_dir(out_dir, &run.config);
    std::fs::create_dir_all(&dir)?;
    write_json(&dir.join("config.json"), &run.config)?;
    write_json(
        &dir.join("layouts.json"),
        &LayoutsFile {
            capacity: run.sol1.capacity,
            layouts: run.sol1.layouts.iter().map(|r| r.layout.clone()).collect(),
        },
    )?;
    for report in &run.sol1.layouts {
        write_json(
            &dir.join(format!("adjacency_{}.json", report.id)),
            &report.graph,
        )?;
        if let Some(conds) = &report.conditions {
            write_json(
                &dir.join(format!("conditions_{}.json", report.id)),
                &ConditionsFile::new(report.id, conds),
            )?;
            std::fs::write(
                dir.join(format!("precedence_{}.dot", report.id)),
                crate::render::precedence_dot(conds),
            )?;
            write_json(
                &dir.join(format!("precedence_{}.json", report.id)),
                &crate::render::precedence_graph_json(conds),
            )?;
        }
        write_json(
            &dir.join(format!("sequences_{}.json", report.id)),
            &SequencesFile {
                layout: report.id,
                exit_seqs: report.exit_seqs.clone(),
                park_seqs: report.park_seqs.clone(),
            },
        )?;
    }
    write_json(&dir.join("solution1.json"), &run.sol1)?;
    Ok(dir)
}

/// Reload a previously persisted solution-1 output, if present.
pub fn load_solution1(dir: &Path) -> Result<Option<Solution1Output>> {
    let path = dir.join("solution1.json");
    if !path.exists() {
        return Ok(None);
    }
    let bytes = std::fs::read(&path)?;
    Ok(Some(serde_json::from_slice(&bytes)?))
}

/// Persist solution-2 artifacts (pair sets and the count matrix).
pub fn write_solution2(sol2: &Solution2Output, n_layouts: usize, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_json(&dir.join("pairs.json"), &sol2.pair_sets)?;
    write_json(
        &dir.join("pair_counts.json"),
        &PairCountsFile {
            orders: sol2.orders.clone(),
            counts: sol2.count_matrix(n_layouts),
        },
    )?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LayoutsFile {
    capacity: usize,
    layouts: Vec<Layout>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConditionsFile {
    layout: usize,
    conditions: Vec<ConditionEntry>,
}

impl ConditionsFile {
    fn new(layout: usize, conds: &LayoutConditions) -> Self {
        ConditionsFile {
            layout,
            conditions: conds
                .per_stall
                .iter()
                .enumerate()
                .map(|(stall, cond)| ConditionEntry {
                    stall,
                    cond: cond.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConditionEntry {
    stall: usize,
    cond: crate::access::AccessCondition,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SequencesFile {
    layout: usize,
    #[serde(rename = "exitSeqs")]
    exit_seqs: Vec<Vec<usize>>,
    #[serde(rename = "parkSeqs")]
    park_seqs: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PairCountsFile {
    orders: Vec<OperationOrder>,
    counts: Vec<Vec<usize>>,
}

/// Errors rendered as machine-readable JSON on stderr by the CLI.
pub fn error_json(err: &Error) -> String {
    serde_json::json!({ "error": err.to_string() }).to_string()
}
