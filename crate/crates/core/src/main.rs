//! Thin CLI over the parkplan library: each subcommand runs one pipeline
//! stage and persists JSON/SVG artifacts into a content-addressed run
//! directory (hash of the resolved config), so later stages reuse earlier
//! outputs. Exit code 0 iff all requested outputs were produced.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use parkplan::config::InstanceConfig;
use parkplan::error::{Error, Result};
use parkplan::oracle;
use parkplan::pipeline::{self, error_json, with_workers, InstanceRun};
use parkplan::sequencing::{OperationOrder, SequencePair};

#[derive(Parser)]
#[command(
    name = "parkplan",
    version,
    about = "High-density parking layout and sequence planner"
)]
struct Cli {
    /// Instance configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts (env: PARKPLAN_OUT_DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (env: PARKPLAN_WORKERS). Output bytes do not depend
    /// on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the packing problem and print the unique layouts.
    Layouts,
    /// Derive per-stall accessibility conditions for every feasible layout.
    Access,
    /// Enumerate relocation-free exit and parking sequences.
    Sequences,
    /// Filter sequence pairs against operation orders (all cyclic shifts by
    /// default, or orders from the config / --order).
    Schedule {
        /// Explicit order like "4,0,1,2,3"; repeatable.
        #[arg(long)]
        order: Vec<String>,
        /// Stop after the first pair per (layout, order).
        #[arg(long)]
        first: bool,
    },
    /// Render SVG artifacts.
    Render {
        #[arg(long, value_parser = ["layouts", "precedence", "pair"])]
        target: String,
        /// Layout id (for precedence/pair targets).
        #[arg(long, default_value_t = 0)]
        layout: usize,
        /// Parking sequence of the pair to draw, like "4,2,3,1,0".
        #[arg(long)]
        park: Option<String>,
        /// Operation order used to derive the exit side of the pair.
        #[arg(long)]
        pi: Option<String>,
    },
    /// Run the brute-force oracles and clause/replay audits.
    Verify {
        /// Skip brute-force condition checks for layouts above this size.
        #[arg(long, default_value_t = 6)]
        max_stalls: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::FAILURE
        }
    }
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::ConfigInvalid(format!("bad index list {s:?}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    let config_path = cli
        .config
        .ok_or_else(|| Error::ConfigInvalid("--config is required".into()))?;
    let config = InstanceConfig::from_path(&config_path)?;
    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("PARKPLAN_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    let workers = cli.workers.or_else(|| {
        std::env::var("PARKPLAN_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });

    match cli.command {
        Command::Layouts => {
            let raw = parkplan::solve_max_packing(&config.lot, config.stall)?;
            let unique = parkplan::canonicalize_unique(&raw, config.stall);
            let dir = pipeline::run_dir(&out_dir, &config);
            std::fs::create_dir_all(&dir)?;
            let file = serde_json::json!({
                "capacity": unique.first().map_or(0, |l| l.capacity),
                "layouts": unique,
            });
            std::fs::write(dir.join("layouts.json"), serde_json::to_vec_pretty(&file)?)?;
            println!(
                "capacity {} with {} unique layouts ({} raw optima) -> {}",
                unique.first().map_or(0, |l| l.capacity),
                unique.len(),
                raw.len(),
                dir.join("layouts.json").display()
            );
            Ok(())
        }
        Command::Access => {
            let (sol1, dir) = load_or_compute(&config, &out_dir, workers)?;
            for report in &sol1.layouts {
                if !report.feasible {
                    println!(
                        "layout {}: infeasible ({})",
                        report.id,
                        report.infeasible_reason.as_deref().unwrap_or("unknown")
                    );
                    continue;
                }
                let conds = report.conditions.as_ref().expect("feasible layout");
                println!("layout {}:", report.id);
                for (p, cond) in conds.per_stall.iter().enumerate() {
                    println!("  stall {p}: {}", format_condition(cond));
                }
            }
            println!("artifacts -> {}", dir.display());
            Ok(())
        }
        Command::Sequences => {
            let (sol1, dir) = load_or_compute(&config, &out_dir, workers)?;
            for report in &sol1.layouts {
                if !report.feasible {
                    println!("layout {}: infeasible, no sequences", report.id);
                    continue;
                }
                println!(
                    "layout {}: exit sequences: {}  parking sequences: {}",
                    report.id,
                    report.exit_seqs.len(),
                    report.park_seqs.len()
                );
                if let Some(exit) = report.exit_seqs.first() {
                    let park: Vec<usize> = exit.iter().rev().cloned().collect();
                    println!("  e.g. exit {exit:?} with parking order {park:?}");
                }
            }
            println!("artifacts -> {}", dir.display());
            Ok(())
        }
        Command::Schedule { order, first } => {
            let (sol1, dir) = load_or_compute(&config, &out_dir, workers)?;
            let orders: Vec<OperationOrder> = if order.is_empty() {
                config.orders.resolve(sol1.capacity)?
            } else {
                order
                    .iter()
                    .map(|s| OperationOrder::new(parse_usize_list(s)?))
                    .collect::<Result<Vec<_>>>()?
            };
            let mut sol2 = pipeline::run_solution2(&sol1, &orders)?;
            if first {
                for ps in &mut sol2.pair_sets {
                    ps.pairs.truncate(1);
                }
            }
            pipeline::write_solution2(&sol2, sol1.layouts.len(), &dir)?;
            let matrix = sol2.count_matrix(sol1.layouts.len());
            println!("pairs per (order, layout):");
            for (oi, pi) in sol2.orders.iter().enumerate() {
                let cells: Vec<String> = matrix[oi].iter().map(|c| c.to_string()).collect();
                println!("  pi={:?}: {}", pi.0, cells.join(" / "));
            }
            println!("artifacts -> {}", dir.display());
            Ok(())
        }
        Command::Render {
            target,
            layout,
            park,
            pi,
        } => {
            let dir = pipeline::run_dir(&out_dir, &config);
            std::fs::create_dir_all(&dir)?;
            match target.as_str() {
                "layouts" => {
                    let raw = parkplan::solve_max_packing(&config.lot, config.stall)?;
                    let unique = parkplan::canonicalize_unique(&raw, config.stall);
                    for (i, l) in unique.iter().enumerate() {
                        let svg = parkplan::render::render_layout_svg(l, &config.lot, config.stall);
                        let path = dir.join(format!("layout_{i}.svg"));
                        std::fs::write(&path, svg)?;
                        println!("wrote {}", path.display());
                    }
                }
                "precedence" => {
                    let run = compute_solution1(&config, workers)?;
                    let report = run
                        .sol1
                        .layouts
                        .get(layout)
                        .ok_or(Error::UnknownStall(layout))?;
                    let conds = report.conditions.as_ref().ok_or_else(|| {
                        Error::InfeasibleLayout(
                            layout,
                            "no conditions for infeasible layout".into(),
                        )
                    })?;
                    let path = dir.join(format!("precedence_{layout}.svg"));
                    std::fs::write(&path, parkplan::render::render_precedence_svg(conds))?;
                    println!("wrote {}", path.display());
                }
                "pair" => {
                    let run = compute_solution1(&config, workers)?;
                    let report = run
                        .sol1
                        .layouts
                        .get(layout)
                        .ok_or(Error::UnknownStall(layout))?;
                    let park_seq = match park {
                        Some(s) => parse_usize_list(&s)?,
                        None => report.park_seqs.first().cloned().ok_or_else(|| {
                            Error::ConfigInvalid("layout has no sequences".into())
                        })?,
                    };
                    let exit_seq = match pi {
                        Some(s) => parkplan::apply_order(
                            &OperationOrder::new(parse_usize_list(&s)?)?,
                            &park_seq,
                        )?,
                        None => park_seq.iter().rev().cloned().collect(),
                    };
                    if !report.park_seqs.contains(&park_seq)
                        || !report.exit_seqs.contains(&exit_seq)
                    {
                        return Err(Error::ConfigInvalid(
                            "requested pair is not relocation-free for this layout".into(),
                        ));
                    }
                    let pair = SequencePair {
                        park: park_seq,
                        exit: exit_seq,
                    };
                    let svg = parkplan::render::render_pair_svg(&run.planners[layout], &pair)?;
                    let path = dir.join(format!("pair_{layout}.svg"));
                    std::fs::write(&path, svg)?;
                    println!("wrote {}", path.display());
                }
                _ => unreachable!("clap validated"),
            }
            Ok(())
        }
        Command::Verify { max_stalls } => {
            let run = compute_solution1(&config, workers)?;
            let mut failures = 0;
            for ((report, planner), graph) in
                run.sol1.layouts.iter().zip(&run.planners).zip(&run.graphs)
            {
                if !report.feasible {
                    println!("layout {}: skipped (infeasible)", report.id);
                    continue;
                }
                let conds = report.conditions.as_ref().unwrap();
                if report.layout.capacity <= max_stalls {
                    let brute =
                        with_workers(workers, || oracle::brute_force_conditions(planner, graph))?;
                    let ok = brute == *conds;
                    println!(
                        "layout {}: condition oracle {}",
                        report.id,
                        if ok { "match" } else { "MISMATCH" }
                    );
                    if !ok {
                        failures += 1;
                    }
                    let kinematic = with_workers(workers, || {
                        oracle::brute_force_conditions_kinematic(planner)
                    })?;
                    if kinematic != brute {
                        let extra: usize = (0..conds.n_stalls())
                            .map(|p| {
                                kinematic.per_stall[p]
                                    .clause_masks()
                                    .iter()
                                    .filter(|m| !brute.per_stall[p].clause_masks().contains(m))
                                    .count()
                            })
                            .sum();
                        println!(
                            "layout {}: note: {extra} drivable vacancy set(s) excluded by graph connectivity",
                            report.id
                        );
                    }
                } else {
                    println!(
                        "layout {}: condition oracle skipped ({} stalls > {max_stalls})",
                        report.id, report.layout.capacity
                    );
                }
                let brute_seqs = oracle::brute_force_exit_sequences(conds);
                let ok = brute_seqs == report.exit_seqs;
                println!(
                    "layout {}: sequence oracle {}",
                    report.id,
                    if ok { "match" } else { "MISMATCH" }
                );
                if !ok {
                    failures += 1;
                }
                let audits =
                    with_workers(workers, || oracle::audit_clauses(planner, graph, conds))?;
                let bad = audits.iter().filter(|a| !a.sound || !a.minimal).count();
                println!(
                    "layout {}: {}/{} clauses sound and minimal",
                    report.id,
                    audits.len() - bad,
                    audits.len()
                );
                failures += bad;
                let mut replay_ok = 0;
                for seq in &report.exit_seqs {
                    if oracle::replay_exit_sequence(planner, seq)? {
                        replay_ok += 1;
                    }
                }
                println!(
                    "layout {}: {}/{} sequences replay collision-free",
                    report.id,
                    replay_ok,
                    report.exit_seqs.len()
                );
                failures += report.exit_seqs.len() - replay_ok;
            }
            if failures > 0 {
                return Err(Error::ConfigInvalid(format!(
                    "{failures} verification check(s) failed"
                )));
            }
            println!("all verification checks passed");
            Ok(())
        }
    }
}

fn compute_solution1(config: &InstanceConfig, workers: Option<usize>) -> Result<InstanceRun> {
    with_workers(workers, || pipeline::run_solution1(config))
}

/// Reuse persisted solution-1 outputs when the content-addressed run
/// directory already has them; otherwise compute and persist.
fn load_or_compute(
    config: &InstanceConfig,
    out_dir: &std::path::Path,
    workers: Option<usize>,
) -> Result<(pipeline::Solution1Output, PathBuf)> {
    let dir = pipeline::run_dir(out_dir, config);
    match pipeline::load_solution1(&dir)? {
        Some(sol1) => {
            println!("reusing solution-1 artifacts in {}", dir.display());
            Ok((sol1, dir))
        }
        None => {
            let run = compute_solution1(config, workers)?;
            let dir = pipeline::write_solution1(&run, out_dir)?;
            Ok((run.sol1, dir))
        }
    }
}

fn format_condition(cond: &parkplan::AccessCondition) -> String {
    if cond.is_top() {
        return "TRUE".into();
    }
    if cond.is_bottom() {
        return "FALSE".into();
    }
    cond.clause_sets()
        .iter()
        .map(|clause| {
            let lits: Vec<String> = clause.iter().map(|s| format!("y{s}")).collect();
            if lits.len() == 1 {
                lits[0].clone()
            } else {
                format!("({})", lits.join(" & "))
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}
