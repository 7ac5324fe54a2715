//! Render SVG artifacts: the unique layouts, a precedence graph of the
//! accessibility conditions, and per-step maneuver frames for one
//! parking/exit sequence pair.
//!
//! ```sh
//! cargo run --release --example render_artifacts
//! ```
//!
//! Files are written to `parkplan-svg/` in the working directory.

use parkplan::render::{render_layout_svg, render_pair_svg, render_precedence_svg};
use parkplan::sequencing::{OperationOrder, SequencePair};
use parkplan::{apply_order, pipeline, InstanceConfig};

fn main() {
    let out = std::path::Path::new("parkplan-svg");
    std::fs::create_dir_all(out).unwrap();
    let config = InstanceConfig::standard(15.0, 12.0).unwrap();
    let run = pipeline::run_solution1(&config).unwrap();
    for report in &run.sol1.layouts {
        let path = out.join(format!("layout_{}.svg", report.id));
        std::fs::write(
            &path,
            render_layout_svg(&report.layout, &config.lot, config.stall),
        )
        .unwrap();
        println!("wrote {}", path.display());
        if let Some(conds) = &report.conditions {
            let path = out.join(format!("precedence_{}.svg", report.id));
            std::fs::write(&path, render_precedence_svg(conds)).unwrap();
            println!("wrote {}", path.display());
        }
    }
    // Maneuver frames for the worked pair on the layout whose width-aligned
    // stall sits at the entrance.
    let (idx, report) = run
        .sol1
        .layouts
        .iter()
        .enumerate()
        .find(|(_, r)| r.park_seqs.contains(&vec![4, 2, 3, 1, 0]))
        .expect("reference pair layout");
    let pi = OperationOrder::new(vec![4, 0, 1, 2, 3]).unwrap();
    let park = vec![4, 2, 3, 1, 0];
    let pair = SequencePair {
        exit: apply_order(&pi, &park).unwrap(),
        park,
    };
    let svg = render_pair_svg(&run.planners[idx], &pair).unwrap();
    let path = out.join(format!("pair_layout_{}.svg", report.id));
    std::fs::write(&path, svg).unwrap();
    println!("wrote {}", path.display());
}
