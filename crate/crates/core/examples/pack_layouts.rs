//! Pack the maximum number of stalls into a lot and reduce the optima to
//! topologically unique layouts.
//!
//! ```sh
//! cargo run --release --example pack_layouts
//! ```

use parkplan::{canonicalize_unique, solve_max_packing, InstanceConfig};

fn main() {
    let config = InstanceConfig::standard(15.0, 12.0).unwrap();
    let raw = solve_max_packing(&config.lot, config.stall).unwrap();
    let unique = canonicalize_unique(&raw, config.stall);
    println!(
        "lot {}x{} m, stall {}x{} m",
        config.lot.length, config.lot.width, config.stall.width, config.stall.length
    );
    println!(
        "capacity {} vehicles, {} optimal placements, {} unique layouts after bottom-left compaction",
        raw[0].capacity,
        raw.len(),
        unique.len()
    );
    for (i, layout) in unique.iter().enumerate() {
        println!("layout {i}:");
        for stall in &layout.stalls {
            println!(
                "  stall {} at ({:>4.1}, {:>4.1}) long side along lot {}",
                stall.index,
                stall.x,
                stall.y,
                match stall.orient {
                    parkplan::StallOrient::AlongWidth => "width",
                    parkplan::StallOrient::AlongLength => "length",
                }
            );
        }
    }
}
