//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with `cargo test --release -p ezplan --test acceptance`; pass
//! criterion numbers after `--` to run a subset.

mod common;

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{rk4_fly, shooting_shortest_length};
use ezplan::dubins::shortest_path;
use ezplan::geometry::{
    cardioid_radius, cardioid_radius_zero_min, engaged_dynamic, in_engagement, max_range, obstacle_cross_section,
};
use ezplan::montecarlo::{run_experiment, ExperimentConfig};
use ezplan::planner::{plan, PlannerParams};
use ezplan::scenario::{generate_scenario, GeneratorConfig};
use ezplan::verify::{state_at, verify_edges, verify_plan, DEFAULT_TIME_STEP};
use ezplan::{Configuration, Domain, DubinsPath, EngagementZone, PlanStatus, Scenario, VehicleParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_ezplan");
const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example16.json");
const FIXTURE_PLANNER_SEED: u64 = 2;
const FIXTURE_ITERATIONS: u64 = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn empty_scenario() -> Scenario {
    Scenario::new(
        Domain::unit(),
        VehicleParams::from_turn_radius(1.0, 0.1).unwrap(),
        Vec::new(),
        Configuration::new(0.0, 0.0, 0.0),
        Configuration::new(1.0, 1.0, 0.0),
        0,
    )
    .unwrap()
}

fn geometry_identities() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_section, mut worst_reduce, mut worst_oracle) = (0.0f64, 0.0f64, 0.0f64);
    let mut out_of_range = 0usize;
    for _ in 0..1_000_000 {
        let lambda = rng.random_range(0.0..TAU);
        let psi = rng.random_range(0.0..TAU);
        let theta = rng.random_range(0.0..TAU);
        let r = rng.random_range(0.01..1.0);
        let zone = EngagementZone::new(0.0, 0.0, r).unwrap();
        let xi = psi - lambda - PI;
        let section = obstacle_cross_section(lambda, psi, &zone).unwrap();
        let reach = max_range(xi, &zone).unwrap();
        let oracle = 0.5 * r * (1.0 + xi.cos());
        worst_section = worst_section.max((section - reach).abs());
        worst_oracle = worst_oracle.max((section - oracle).abs());
        let general = cardioid_radius(theta, lambda, xi, &zone);
        let reduced = cardioid_radius_zero_min(theta, lambda, xi, r);
        worst_reduce = worst_reduce.max((general - reduced).abs());
        if !(0.0..=r).contains(&reach) {
            out_of_range += 1;
        }
    }
    let elapsed = started.elapsed();
    let pass = worst_section <= 1e-12
        && worst_oracle <= 1e-12
        && worst_reduce <= 1e-12
        && out_of_range == 0
        && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "max |section - reach| {worst_section:.1e}, vs formula {worst_oracle:.1e}, \
             max |general - reduced| {worst_reduce:.1e}, out of [0, r_max] {out_of_range}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn dual_view_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut mismatches, mut engaged, mut total) = (0usize, 0usize, 0usize);
    for s in 0..20u64 {
        let n = [4, 8, 16, 24][s as usize % 4];
        let scenario = generate_scenario(n, 100 + s, &GeneratorConfig::default()).unwrap();
        for _ in 0..100_000 {
            let q = Configuration::new(rng.random_range(-0.2..1.2), rng.random_range(-0.2..1.2), rng.random_range(0.0..TAU));
            for zone in &scenario.zones {
                let lifted = in_engagement(&q, zone);
                if lifted != engaged_dynamic(&q, zone) {
                    mismatches += 1;
                }
                engaged += lifted as usize;
                total += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && engaged > 0,
        format!("{mismatches} mismatches over {total} (config, zone) checks, {engaged} engaged"),
    )
}

fn dubins_correctness() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let vehicle = VehicleParams::from_turn_radius(1.0, 0.1).unwrap();
    let (mut worst_len, mut worst_end) = (0.0f64, 0.0f64);
    for k in 0..10_000 {
        // every fourth pair is a short hop where the curve-curve-curve words win
        let hi = if k % 4 == 0 { 0.15 } else { 1.0 };
        let a = common::random_config(&mut rng, 0.0, hi);
        let b = common::random_config(&mut rng, 0.0, hi);
        let path = shortest_path(a, b, 0.1);
        worst_len = worst_len.max((path.total_length - shooting_shortest_length(&a, &b, 0.1)).abs());
        let end = rk4_fly(&a, vehicle.v, &path.control_profile(&vehicle), 2000.0);
        worst_end = worst_end.max((end.x - b.x).hypot(end.y - b.y));
    }
    let elapsed = started.elapsed();
    outcome(
        worst_len <= 1e-4 && worst_end <= 1e-6 && elapsed < Duration::from_secs(60),
        format!(
            "max length error {worst_len:.1e} LU, max RK4 endpoint error {worst_end:.1e} LU, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn empty_domain_sanity() -> Outcome {
    let scenario = empty_scenario();
    let optimum = shortest_path(scenario.start, scenario.goal, 0.1).total_length;
    let oracle = shooting_shortest_length(&scenario.start, &scenario.goal, 0.1);
    let mut costs = Vec::new();
    let mut monotone = true;
    for seed in 0..20 {
        let r = plan(&scenario, PlannerParams::for_turn_radius(0.1).with_iterations(50_000).with_seed(seed)).unwrap();
        monotone &= r.cost_history.windows(2).all(|w| w[1].1 <= w[0].1);
        costs.push(r.cost.unwrap_or(f64::INFINITY));
    }
    costs.sort_by(f64::total_cmp);
    let median = 0.5 * (costs[9] + costs[10]);
    let rel = (median - optimum) / optimum;
    outcome(
        rel.abs() <= 0.05 && monotone && (optimum - oracle).abs() < 1e-6,
        format!(
            "optimum {optimum:.5}, median {median:.5} ({:+.2}%), worst {:.5}, histories monotone {monotone}",
            100.0 * rel,
            costs[19]
        ),
    )
}

fn fixture_reproduction() -> Outcome {
    let scenario = Scenario::load(FIXTURE).unwrap();
    let params = PlannerParams::for_turn_radius(scenario.vehicle.turn_radius())
        .with_iterations(FIXTURE_ITERATIONS)
        .with_seed(FIXTURE_PLANNER_SEED);
    let r = plan(&scenario, params).unwrap();
    if !r.is_solved() {
        return outcome(false, format!("unsolved after {FIXTURE_ITERATIONS} iterations"));
    }
    let report = verify_plan(&r, &scenario, DEFAULT_TIME_STEP);
    let samples: Vec<Configuration> = r.edges.iter().flat_map(|e| e.sample(0.001).unwrap()).collect();
    let inside_discs = samples
        .iter()
        .filter(|c| scenario.zones.iter().any(|z| z.distance(c.x, c.y) < z.r_max))
        .count();
    let engaged = samples
        .iter()
        .filter(|c| scenario.zones.iter().any(|z| in_engagement(c, z)))
        .count();
    outcome(
        report.passed && inside_discs > 0 && engaged == 0,
        format!(
            "N = {}, cost {:.4}, verify passed {}, {inside_discs}/{} samples inside an r_max disc, {engaged} engaged",
            scenario.zones.len(),
            r.cost.unwrap(),
            report.passed,
            samples.len()
        ),
    )
}

fn monte_carlo_trends() -> Outcome {
    let started = Instant::now();
    let mut config = ExperimentConfig::desk();
    config.parallel_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let results = run_experiment(&config).unwrap();
    let budgets: Vec<f64> = [2_000.0, 5_000.0, 10_000.0, 20_000.0, 50_000.0].to_vec();
    let (mut a, mut b, mut c_budget, mut c_zones) = (true, true, true, true);
    let mut table = String::new();
    for &n in &config.zone_counts {
        let aggs: Vec<_> = budgets.iter().map(|&bud| results.aggregate(n, bud).unwrap()).collect();
        a &= aggs.last().unwrap().success_rate == 1.0;
        b &= aggs.windows(2).all(|w| w[0].success_rate <= w[1].success_rate);
        let means: Vec<f64> = aggs.iter().map(|x| x.mean_cost.unwrap_or(f64::NAN)).collect();
        c_budget &= means.windows(2).all(|w| w[1] <= w[0]);
        table += &format!("\n    N={n:>2} rate {:?}", aggs.iter().map(|x| x.success_rate).collect::<Vec<_>>());
        table += &format!(" mean {:?}", means.iter().map(|m| (m * 1e4).round() / 1e4).collect::<Vec<_>>());
    }
    for &bud in &budgets {
        let means: Vec<f64> = config
            .zone_counts
            .iter()
            .map(|&n| results.aggregate(n, bud).unwrap().mean_cost.unwrap_or(f64::NAN))
            .collect();
        c_zones &= means.windows(2).all(|w| w[0] <= w[1]);
    }
    let replaced: usize = results.replaced.iter().map(|r| r.1).sum();
    outcome(
        a && b && c_budget && c_zones,
        format!(
            "(a) {a} (b) {b} (c) budget {c_budget} zones {c_zones}; {replaced} replaced, {:.0}s{table}",
            started.elapsed().as_secs_f64()
        ),
    )
}

fn shifted(edges: &[DubinsPath], dx: f64, dy: f64) -> Vec<DubinsPath> {
    edges
        .iter()
        .map(|e| {
            let s = Configuration::new(e.start.x + dx, e.start.y + dy, e.start.psi);
            DubinsPath::from_params(s, e.word, e.params, e.turn_radius)
        })
        .collect()
}

fn verifier_independence() -> Outcome {
    let (mut solved, mut passed) = (0usize, 0usize);
    let (mut shift_caught, mut clip_caught, mut turn_caught) = (0usize, 0usize, 0usize);
    let mut seed = 0u64;
    while solved < 100 {
        seed += 1;
        let n = [4, 8, 16][seed as usize % 3];
        let scenario = generate_scenario(n, 5000 + seed, &GeneratorConfig::default()).unwrap();
        let r = plan(&scenario, PlannerParams::for_turn_radius(0.1).with_iterations(5000).with_seed(seed)).unwrap();
        if r.status != PlanStatus::Solved {
            continue;
        }
        solved += 1;
        passed += verify_plan(&r, &scenario, DEFAULT_TIME_STEP).passed as usize;

        let zone = scenario.zones[seed as usize % n];
        let mid = state_at(&r.edges, 1.0, 0.5 * r.path_length()).unwrap();
        let moved = shifted(&r.edges, zone.x - mid.x, zone.y - mid.y);
        shift_caught += !verify_edges(&moved, &scenario, DEFAULT_TIME_STEP).ez_ok as usize;

        let mut clipped = r.edges.clone();
        let last = clipped.pop().unwrap();
        clipped.push(last.truncated(last.total_length - (0.05f64).min(0.5 * last.total_length)));
        clip_caught += !verify_edges(&clipped, &scenario, DEFAULT_TIME_STEP).boundary_ok as usize;

        let tight: Vec<DubinsPath> = r
            .edges
            .iter()
            .map(|e| shortest_path(e.start, e.endpoint(), 0.5 * e.turn_radius))
            .collect();
        turn_caught += !verify_edges(&tight, &scenario, DEFAULT_TIME_STEP).dynamics_ok as usize;
    }
    outcome(
        passed == 100 && shift_caught == 100 && clip_caught == 100 && turn_caught == 100,
        format!(
            "{passed}/100 solved plans pass; caught: shift into zone {shift_caught}/100, \
             clipped endpoint {clip_caught}/100, turn rate over limit {turn_caught}/100"
        ),
    )
}

fn cli(args: &[&str]) -> i32 {
    Command::new(BIN).args(args).output().expect("binary runs").status.code().unwrap_or(-1)
}

fn read_all(dir: &Path, names: &[&str]) -> Vec<Vec<u8>> {
    names.iter().map(|n| std::fs::read(dir.join(n)).unwrap_or_default()).collect()
}

fn cli_reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let files = ["s.json", "p.json", "t.csv", "v.json", "snap.csv", "cs.csv"];
    let mut runs = Vec::new();
    let mut codes = Vec::new();
    for k in 0..2 {
        let dir = tmp.path().join(format!("run{k}"));
        std::fs::create_dir_all(&dir).unwrap();
        let p = |n: &str| dir.join(n).to_str().unwrap().to_string();
        codes.push(cli(&["scenario", "--zones", "16", "--seed", "7", "--out", &p("s.json")]));
        codes.push(cli(&[
            "plan", "--scenario", &p("s.json"), "--budget-iters", "20000", "--seed", "7",
            "--out", &p("p.json"), "--trajectory", &p("t.csv"),
        ]));
        codes.push(cli(&["verify", "--scenario", &p("s.json"), "--plan", &p("p.json"), "--out", &p("v.json")]));
        codes.push(cli(&[
            "snapshot", "--scenario", &p("s.json"), "--plan", &p("p.json"), "--times", "0,0.25,0.5",
            "--out", &p("snap.csv"),
        ]));
        codes.push(cli(&["cross-section", "--zone", "0.5,0.5,0.15", "--psi", "0,1,2", "--out", &p("cs.csv")]));
        runs.push(read_all(&dir, &files));
    }
    let single_identical = runs[0] == runs[1] && runs[0].iter().all(|f| !f.is_empty());

    let mc_files = ["results.csv", "trials.jsonl", "summary.txt"];
    let mut mc_runs = Vec::new();
    for (k, workers) in ["1", "2", "1"].iter().enumerate() {
        let dir = tmp.path().join(format!("mc{k}"));
        let d = dir.to_str().unwrap();
        codes.push(cli(&["mc", "--preset", "desk", "--trials", "4", "--zone-counts", "4,8", "--seed", "5", "--workers", workers, "--out-dir", d]));
        mc_runs.push(read_all(&dir, &mc_files));
    }
    let mc_identical = mc_runs[0] == mc_runs[1] && mc_runs[0] == mc_runs[2] && mc_runs[0].iter().all(|f| !f.is_empty());
    let codes_ok = codes.iter().all(|&c| c == 0);
    outcome(
        single_identical && mc_identical && codes_ok,
        format!("single runs identical {single_identical}, mc across 1/2 workers identical {mc_identical}, exit codes {codes:?}"),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "geometry identities", geometry_identities),
        (2, "dual-view equivalence", dual_view_equivalence),
        (3, "dubins correctness", dubins_correctness),
        (4, "empty-domain planner sanity", empty_domain_sanity),
        (5, "N=16 fixture passes through r_max discs", fixture_reproduction),
        (6, "desk Monte Carlo trends", monte_carlo_trends),
        (7, "verifier independence", verifier_independence),
        (8, "CLI reproducibility", cli_reproducibility),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let result = check();
        println!("{} {id}: {name}: {}", if result.pass { "PASS" } else { "FAIL" }, result.detail);
        failures += !result.pass as usize;
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
