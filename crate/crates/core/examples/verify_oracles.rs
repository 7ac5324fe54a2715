//! Audit the recursive condition search against the shipped brute-force
//! oracles on a small instance: subset enumeration for conditions,
//! permutation filtering for sequences, and per-clause soundness and
//! minimality probes.
//!
//! ```sh
//! cargo run --release --example verify_oracles
//! ```

use parkplan::{oracle, pipeline, InstanceConfig};

fn main() {
    let config = InstanceConfig::standard(12.0, 9.6).unwrap();
    let run = pipeline::run_solution1(&config).unwrap();
    println!(
        "lot 12.0x9.6: capacity {}, {} unique layouts",
        run.sol1.capacity,
        run.sol1.layouts.len()
    );
    for ((report, planner), graph) in run.sol1.layouts.iter().zip(&run.planners).zip(&run.graphs) {
        let Some(conds) = &report.conditions else {
            println!("layout {}: infeasible, skipped", report.id);
            continue;
        };
        let brute = oracle::brute_force_conditions(planner, graph).unwrap();
        println!(
            "layout {}: conditions {} the 2^(n-1)-subset oracle",
            report.id,
            if brute == *conds {
                "match"
            } else {
                "DIFFER FROM"
            }
        );
        let seqs = oracle::brute_force_exit_sequences(conds);
        println!(
            "layout {}: DFS sequences {} permutation filtering ({} sequences)",
            report.id,
            if seqs == report.exit_seqs {
                "match"
            } else {
                "DIFFER FROM"
            },
            seqs.len()
        );
        let audits = oracle::audit_clauses(planner, graph, conds).unwrap();
        let ok = audits.iter().filter(|a| a.sound && a.minimal).count();
        println!(
            "layout {}: {ok}/{} clauses sound and minimal",
            report.id,
            audits.len()
        );
    }
}
