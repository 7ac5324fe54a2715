//! Build the stall/entrance adjacency graph for each unique layout of an
//! instance.
//!
//! ```sh
//! cargo run --release --example adjacency_graph
//! ```

use parkplan::{build_adjacency, canonicalize_unique, solve_max_packing, InstanceConfig};

fn main() {
    let config = InstanceConfig::standard(15.0, 12.0).unwrap();
    let raw = solve_max_packing(&config.lot, config.stall).unwrap();
    for (i, layout) in canonicalize_unique(&raw, config.stall).iter().enumerate() {
        let g = build_adjacency(
            layout,
            &config.lot,
            config.stall,
            &config.vehicle,
            &config.adjacency,
        );
        let edges: Vec<String> = g
            .edges()
            .iter()
            .map(|&(u, v)| format!("{}-{}", g.node_label(u), g.node_label(v)))
            .collect();
        println!(
            "layout {i}: {} nodes, edges: {}",
            g.node_count(),
            edges.join(" ")
        );
    }
}
