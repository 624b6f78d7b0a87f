mod common;

use std::f64::consts::PI;

use ezplan::dubins::{shortest_path, DubinsPath};
use ezplan::planner::{plan, PlannerParams};
use ezplan::scenario::{generate_scenario, GeneratorConfig};
use ezplan::verify::{snapshot, state_at, verify_edges, verify_plan, write_snapshots_csv, DEFAULT_TIME_STEP};
use ezplan::{Configuration, Domain, EngagementZone, PlanResult, Scenario, VehicleParams};

fn solved(seed: u64, n: usize) -> (Scenario, PlanResult) {
    for attempt in 0.. {
        let scenario = generate_scenario(n, seed * 1000 + attempt, &GeneratorConfig::default()).unwrap();
        let r = plan(&scenario, PlannerParams::for_turn_radius(0.1).with_iterations(8000).with_seed(seed)).unwrap();
        if r.is_solved() {
            return (scenario, r);
        }
    }
    unreachable!()
}

/// Move every edge by `(dx, dy)`.
pub fn shifted(edges: &[DubinsPath], dx: f64, dy: f64) -> Vec<DubinsPath> {
    edges
        .iter()
        .map(|e| {
            let s = Configuration::new(e.start.x + dx, e.start.y + dy, e.start.psi);
            DubinsPath::from_params(s, e.word, e.params, e.turn_radius)
        })
        .collect()
}

#[test]
fn planner_output_passes() {
    for seed in 0..5 {
        let (scenario, r) = solved(seed, 8);
        let report = verify_plan(&r, &scenario, DEFAULT_TIME_STEP);
        assert!(report.passed, "{report:?}");
        assert!((report.duration - r.cost.unwrap()).abs() < 1e-9);
        assert!(report.min_ez_slack > 0.0);
    }
}

#[test]
fn shifting_into_a_zone_is_caught() {
    let (scenario, r) = solved(1, 8);
    let z = scenario.zones[0];
    let total = r.path_length();
    let mid = state_at(&r.edges, 1.0, 0.5 * total).unwrap();
    let moved = shifted(&r.edges, z.x - mid.x, z.y - mid.y);
    let report = verify_edges(&moved, &scenario, DEFAULT_TIME_STEP);
    assert!(!report.ez_ok, "{report:?}");
    assert!(!report.passed);
}

#[test]
fn clipped_endpoint_is_caught() {
    let (scenario, r) = solved(2, 8);
    let mut edges = r.edges.clone();
    let last = edges.pop().unwrap();
    if last.total_length > 0.05 {
        edges.push(last.truncated(last.total_length - 0.05));
    }
    let report = verify_edges(&edges, &scenario, DEFAULT_TIME_STEP);
    assert!(!report.boundary_ok, "{report:?}");
    assert!(!report.passed);
}

#[test]
fn tighter_turns_than_the_vehicle_allows_are_caught() {
    let (scenario, r) = solved(3, 8);
    let tight: Vec<DubinsPath> = r
        .edges
        .iter()
        .map(|e| shortest_path(e.start, e.endpoint(), 0.5 * e.turn_radius))
        .collect();
    let report = verify_edges(&tight, &scenario, DEFAULT_TIME_STEP);
    assert!(!report.dynamics_ok, "{report:?}");
    assert!(report.max_required_turn_rate > scenario.vehicle.u_max);
}

#[test]
fn gaps_between_edges_are_caught() {
    let domain = Domain::new(0.0, -0.5, 1.0, 0.5).unwrap();
    let vehicle = VehicleParams::from_turn_radius(1.0, 0.1).unwrap();
    let scenario = Scenario::new(
        domain,
        vehicle,
        Vec::new(),
        Configuration::new(0.0, 0.0, 0.0),
        Configuration::new(1.0, 0.0, 0.0),
        0,
    )
    .unwrap();
    let a = shortest_path(scenario.start, Configuration::new(0.5, 0.0, 0.0), 0.1);
    let b = shortest_path(Configuration::new(0.5, 0.05, 0.0), scenario.goal, 0.1);
    let report = verify_edges(&[a, b], &scenario, DEFAULT_TIME_STEP);
    assert!(!report.dynamics_ok);
    assert!(report.max_position_defect > 0.01);
}

#[test]
fn leaving_the_domain_is_caught() {
    let domain = Domain::new(0.0, -0.05, 1.0, 0.05).unwrap();
    let vehicle = VehicleParams::from_turn_radius(1.0, 0.1).unwrap();
    let scenario = Scenario::new(
        domain,
        vehicle,
        Vec::new(),
        Configuration::new(0.0, 0.0, 0.0),
        Configuration::new(1.0, 0.0, 0.0),
        0,
    )
    .unwrap();
    // a loop of radius 0.1 cannot fit in a corridor 0.1 wide
    let looped = DubinsPath::from_params(scenario.start, ezplan::Word::Lsl, [2.0 * PI - 1e-3, 1.0, 1e-3], 0.1);
    let report = verify_edges(&[looped], &scenario, DEFAULT_TIME_STEP);
    assert!(!report.domain_ok);
}

#[test]
fn entering_head_on_reach_fails_ez() {
    let domain = Domain::unit();
    let vehicle = VehicleParams::from_turn_radius(1.0, 0.1).unwrap();
    let zone = EngagementZone::new(0.5, 0.5, 0.15).unwrap();
    let scenario = Scenario::new(
        domain,
        vehicle,
        vec![zone],
        Configuration::new(0.0, 0.5, 0.0),
        Configuration::new(0.2, 0.5, 0.0),
        0,
    )
    .unwrap();
    // head-on, the reach is the full r_max = 0.15
    let short = shortest_path(scenario.start, Configuration::new(0.34, 0.5, 0.0), 0.1);
    let report = verify_edges(&[short], &scenario, DEFAULT_TIME_STEP);
    assert!(report.ez_ok && (report.min_ez_slack - 0.01).abs() < 1e-9, "{report:?}");
    let long = shortest_path(scenario.start, Configuration::new(0.36, 0.5, 0.0), 0.1);
    let report = verify_edges(&[long], &scenario, DEFAULT_TIME_STEP);
    assert!(!report.ez_ok && (report.min_ez_slack + 0.01).abs() < 1e-9, "{report:?}");
}

#[test]
fn snapshot_shapes_touch_at_the_aircraft_bearing() {
    let (scenario, r) = solved(4, 4);
    let t = 0.3 * r.path_length();
    let snap = snapshot(&r, &scenario, t, 1.0).unwrap();
    assert_eq!(snap.zones.len(), scenario.zones.len());
    for z in &snap.zones {
        // closed polyline
        assert_eq!(z.points.len(), 361);
        assert!((z.points[0].1 - z.points[360].1).abs() < 1e-12);
        assert!((z.points[0].2 - z.points[360].2).abs() < 1e-12);
        let zone = scenario.zones[z.zone_id];
        let (_, x, y) = z.points[0];
        let reach = zone.distance(x, y);
        assert!((reach - z.rho_max).abs() < 1e-12);
    }
    let mut buf = Vec::new();
    write_snapshots_csv(&mut buf, &[snap]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,zone_id,theta,x,y\n"));
    assert_eq!(text.lines().count(), 1 + 1 + 361 * scenario.zones.len());
}
