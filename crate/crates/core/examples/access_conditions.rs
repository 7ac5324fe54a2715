//! Derive the per-stall accessibility conditions (minimal DNF over
//! stall-vacancy variables) for every feasible unique layout of an
//! instance.
//!
//! ```sh
//! cargo run --release --example access_conditions
//! ```

use parkplan::{pipeline, AccessCondition, InstanceConfig};

fn format_condition(cond: &AccessCondition) -> String {
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

fn main() {
    let config = InstanceConfig::standard(15.0, 12.0).unwrap();
    let run = pipeline::run_solution1(&config).unwrap();
    for report in &run.sol1.layouts {
        match &report.conditions {
            None => println!(
                "layout {}: infeasible ({})",
                report.id,
                report.infeasible_reason.as_deref().unwrap_or("unknown")
            ),
            Some(conds) => {
                println!("layout {}:", report.id);
                for (p, cond) in conds.per_stall.iter().enumerate() {
                    println!("  stall {p} accessible iff {}", format_condition(cond));
                }
            }
        }
    }
}
