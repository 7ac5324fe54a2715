//! Plan a single relocation-free exit maneuver with the kinematic planner
//! and print its waypoints.
//!
//! ```sh
//! cargo run --release --example plan_exit_path
//! ```

use parkplan::{canonicalize_unique, solve_max_packing, InstanceConfig, LayoutPlanner};

fn main() {
    let config = InstanceConfig::standard(15.0, 12.0).unwrap();
    let raw = solve_max_packing(&config.lot, config.stall).unwrap();
    let unique = canonicalize_unique(&raw, config.stall);
    // Five width-aligned stalls in a row; exit the leftmost while the other
    // four stay parked.
    let layout = unique
        .iter()
        .find(|l| {
            l.stalls
                .iter()
                .all(|s| s.orient == parkplan::StallOrient::AlongWidth)
        })
        .expect("all-width layout exists")
        .clone();
    let planner = LayoutPlanner::new(
        layout,
        config.lot.clone(),
        config.stall,
        config.vehicle,
        config.planner.clone(),
    );
    let occupied = 0b11110; // stalls 1..4 parked
    let path = planner
        .exit_query(0, 0, occupied)
        .unwrap()
        .expect("stall 0 is accessible with the others parked");
    println!(
        "exit path for stall 0: cost {:.2}, {} waypoints, {} gear segments",
        path.cost,
        path.waypoints.len(),
        path.segments.len()
    );
    for wp in &path.waypoints {
        println!(
            "  ({:>6.2}, {:>6.2}) heading {:>7.1} deg  gear {:?}",
            wp.x,
            wp.y,
            wp.theta.to_degrees(),
            wp.gear
        );
    }
}
