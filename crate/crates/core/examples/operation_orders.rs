//! Filter parking/exit sequence pairs against prescribed operation orders:
//! for every cyclic shift of the identity, count the pairs (park, exit)
//! with exit = pi(park) that are relocation-free on both sides.
//!
//! ```sh
//! cargo run --release --example operation_orders
//! ```

use parkplan::{pipeline, InstanceConfig};

fn main() {
    let config = InstanceConfig::standard(15.0, 12.0).unwrap();
    let run = pipeline::run_solution1(&config).unwrap();
    let orders = config.orders.resolve(run.sol1.capacity).unwrap();
    let sol2 = pipeline::run_solution2(&run.sol1, &orders).unwrap();
    let matrix = sol2.count_matrix(run.sol1.layouts.len());
    println!("pairs per (operation order, layout):");
    print!("{:<18}", "order \\ layout");
    for report in &run.sol1.layouts {
        print!("{:>10}", format!("layout {}", report.id));
    }
    println!();
    for (oi, pi) in sol2.orders.iter().enumerate() {
        print!("{:<18}", format!("{:?}", pi.0));
        for cell in &matrix[oi] {
            print!("{cell:>10}");
        }
        println!();
    }
    // Show one concrete pair.
    if let Some(ps) = sol2.pair_sets.iter().find(|ps| !ps.pairs.is_empty()) {
        let pair = &ps.pairs[0];
        println!(
            "\nexample: layout {} order {:?}: park {:?} then exit {:?}",
            ps.layout, ps.pi.0, pair.park, pair.exit
        );
    }
}
