//! Enumerate all relocation-free exit sequences per layout and show the
//! parking sequences obtained by reversal.
//!
//! ```sh
//! cargo run --release --example exit_sequences
//! ```

use parkplan::{pipeline, InstanceConfig};

fn main() {
    let config = InstanceConfig::standard(15.0, 12.0).unwrap();
    let run = pipeline::run_solution1(&config).unwrap();
    for report in &run.sol1.layouts {
        if !report.feasible {
            println!("layout {}: infeasible, no sequences", report.id);
            continue;
        }
        println!(
            "layout {}: {} relocation-free exit sequences",
            report.id,
            report.exit_seqs.len()
        );
        for (exit, park) in report.exit_seqs.iter().zip(&report.park_seqs).take(3) {
            println!("  exit {exit:?}  <->  park {park:?}");
        }
        if report.exit_seqs.len() > 3 {
            println!("  ... and {} more", report.exit_seqs.len() - 3);
        }
    }
}
