//! Pipeline-level behavior: artifact round-trips, content-addressed reuse,
//! error reporting, and the feasibility screen on a lot whose entrance is
//! narrower than the vehicle.

use parkplan::access::{derive_layout_conditions, screen_feasible};
use parkplan::adjacency::build_adjacency;
use parkplan::geometry::{EntranceSegment, Side};
use parkplan::pipeline;
use parkplan::planner::LayoutPlanner;
use parkplan::{Error, InstanceConfig, LotSpec};

fn tiny_config() -> InstanceConfig {
    // One stall filling the whole lot.
    InstanceConfig::standard(9.5, 3.0).unwrap()
}

#[test]
fn solution1_round_trips_through_json() {
    let run = pipeline::run_solution1(&tiny_config()).unwrap();
    let bytes = serde_json::to_vec(&run.sol1).unwrap();
    let back: pipeline::Solution1Output = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(run.sol1, back);
}

#[test]
fn artifacts_are_reusable_and_stable() {
    let config = tiny_config();
    let dir = tempfile::tempdir().unwrap();
    let run = pipeline::run_solution1(&config).unwrap();
    let out1 = pipeline::write_solution1(&run, dir.path()).unwrap();
    let loaded = pipeline::load_solution1(&out1).unwrap().unwrap();
    assert_eq!(loaded, run.sol1);
    // Re-writing produces identical bytes.
    let before = std::fs::read(out1.join("solution1.json")).unwrap();
    let out2 = pipeline::write_solution1(&run, dir.path()).unwrap();
    assert_eq!(out1, out2);
    let after = std::fs::read(out2.join("solution1.json")).unwrap();
    assert_eq!(before, after);
    // Unknown run dir loads nothing.
    assert!(pipeline::load_solution1(dir.path()).unwrap().is_none());
}

#[test]
fn lot_smaller_than_stall_reports_no_fit() {
    let config = InstanceConfig {
        lot: LotSpec::with_full_left_entrance(2.9, 2.9).unwrap(),
        ..tiny_config()
    };
    match pipeline::run_solution1(&config) {
        Err(Error::NoFit { .. }) => {}
        Err(other) => panic!("expected NoFit, got {other:?}"),
        Ok(_) => panic!("expected NoFit, got a successful run"),
    }
}

#[test]
fn entrance_narrower_than_vehicle_makes_layout_infeasible() {
    // Same single-stall lot, but the only opening is 2.4 m wide while the
    // vehicle is 2.5 m wide.
    let narrow = InstanceConfig {
        lot: LotSpec::new(
            9.5,
            3.0,
            vec![EntranceSegment {
                side: Side::Left,
                span: [0.3, 2.7],
            }],
        )
        .unwrap(),
        ..tiny_config()
    };
    let run = pipeline::run_solution1(&narrow).unwrap();
    assert_eq!(run.sol1.layouts.len(), 1);
    let report = &run.sol1.layouts[0];
    assert!(!report.feasible);
    assert!(report.infeasible_reason.is_some());
    assert!(report.exit_seqs.is_empty());

    let planner = LayoutPlanner::new(
        report.layout.clone(),
        narrow.lot.clone(),
        narrow.stall,
        narrow.vehicle,
        narrow.planner.clone(),
    );
    assert!(!screen_feasible(&planner).unwrap());
    let graph = build_adjacency(
        &report.layout,
        &narrow.lot,
        narrow.stall,
        &narrow.vehicle,
        &narrow.adjacency,
    );
    assert!(matches!(
        derive_layout_conditions(0, &graph, &planner),
        Err(Error::InfeasibleLayout(0, _))
    ));

    // Control: the full-width entrance version is feasible.
    let run = pipeline::run_solution1(&tiny_config()).unwrap();
    assert!(run.sol1.layouts[0].feasible);
    assert_eq!(run.sol1.layouts[0].exit_seqs, vec![vec![0]]);
}

#[test]
fn screening_guarantee_empty_lot_query_succeeds_on_feasible_layouts() {
    // Every stall of a feasible layout can exit when all others are vacant.
    let config = InstanceConfig::standard(12.0, 9.6).unwrap();
    let run = pipeline::run_solution1(&config).unwrap();
    for (report, planner) in run.sol1.layouts.iter().zip(&run.planners) {
        if !report.feasible {
            continue;
        }
        for p in 0..planner.n_stalls() {
            let found = (0..config.lot.entrances.len())
                .any(|e| planner.exit_query(p, e, 0).unwrap().is_some());
            assert!(found, "layout {} stall {p}", report.id);
        }
    }
}

#[test]
fn empty_order_list_gives_empty_schedule() {
    let run = pipeline::run_solution1(&tiny_config()).unwrap();
    let sol2 = pipeline::run_solution2(&run.sol1, &[]).unwrap();
    assert!(sol2.pair_sets.is_empty());
    assert!(sol2.orders.is_empty());
}

#[test]
fn pair_filter_matches_cartesian_product_definition() {
    use parkplan::access::{AccessCondition, LayoutConditions};
    use parkplan::sequencing::OperationOrder;
    let conds = LayoutConditions {
        per_stall: vec![
            AccessCondition::top(),
            AccessCondition::from_clause_sets(&[vec![0], vec![2, 3, 4]]),
            AccessCondition::from_clause_sets(&[vec![0], vec![3, 4]]),
            AccessCondition::from_clause_sets(&[vec![0], vec![4]]),
            AccessCondition::top(),
        ],
    };
    let exits = parkplan::enumerate_exit_sequences(&conds);
    let parks = parkplan::park_sequences_from_exit(&exits);
    for pi in parkplan::cyclic_orders(5) {
        let fast = parkplan::filter_pairs(&parks, &exits, &pi).unwrap();
        let slow = parkplan::oracle::brute_force_filter_pairs(&parks, &exits, &pi).unwrap();
        let fast_pairs: Vec<(Vec<usize>, Vec<usize>)> =
            fast.into_iter().map(|p| (p.park, p.exit)).collect();
        assert_eq!(fast_pairs, slow, "pi {:?}", pi.0);
    }
    let bad = OperationOrder::new(vec![0, 1]).unwrap();
    assert!(parkplan::filter_pairs(&parks, &exits, &bad).is_err());
}

#[test]
fn shipped_instance_files_parse_to_standard_configs() {
    for (name, l, w) in [
        ("15x12.toml", 15.0, 12.0),
        ("20x16.toml", 20.0, 16.0),
        ("20x20.toml", 20.0, 20.0),
    ] {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../instances")
            .join(name);
        let parsed = InstanceConfig::from_path(&path).unwrap();
        assert_eq!(parsed, InstanceConfig::standard(l, w).unwrap(), "{name}");
    }
}
