//! `ezplan` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 no solution within the
//! budget (or a plan that fails verification).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dubins::{shortest_path, Configuration, VehicleParams};
use crate::geometry::{write_cross_sections, EngagementZone};
use crate::montecarlo::{run_experiment, summarize, ExperimentConfig};
use crate::planner::{plan, PlanResult, PlannerParams};
use crate::scenario::{generate_scenario, screen_feasible, GeneratorConfig, Scenario};
use crate::verify::{
    snapshot, verify_plan, write_snapshots_csv, write_trajectory_csv, DEFAULT_SNAPSHOT_RESOLUTION_DEG,
    DEFAULT_TIME_STEP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_SOLUTION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ezplan", version, about = "Dubins path planning around heading-dependent engagement zones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan a path through a scenario file.
    Plan(PlanArgs),
    /// Generate a random scenario.
    Scenario(ScenarioArgs),
    /// Verify a plan against its scenario by forward integration.
    Verify(VerifyArgs),
    /// Export dynamic engagement-zone shapes along a plan.
    Snapshot(SnapshotArgs),
    /// Run a Monte Carlo experiment.
    Mc(McArgs),
    /// Print the shortest Dubins path between two configurations.
    Dubins(DubinsArgs),
    /// Export lifted-obstacle cross-sections of one zone.
    CrossSection(CrossSectionArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("budget").required(true).multiple(true))]
pub struct PlanArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, group = "budget")]
    pub budget_iters: Option<u64>,
    #[arg(long, group = "budget")]
    pub budget_secs: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Optional sampled trajectory CSV (t, x, y, psi, u).
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    #[arg(long)]
    pub steer_step: Option<f64>,
    #[arg(long)]
    pub goal_bias: Option<f64>,
    #[arg(long)]
    pub check_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub zones: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.15)]
    pub r_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub turn_radius: f64,
    /// Also screen for feasibility with this many planner iterations.
    #[arg(long)]
    pub screen_iters: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TIME_STEP)]
    pub time_step: f64,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SnapshotArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    /// Comma-separated times (TU).
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SNAPSHOT_RESOLUTION_DEG)]
    pub resolution_deg: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Desk,
    Full,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, value_enum, conflicts_with = "config")]
    pub preset: Option<Preset>,
    /// Experiment config JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub zone_counts: Option<Vec<usize>>,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Triple(pub [f64; 3]);

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated numbers, got '{s}'"));
        }
        let mut out = [0.0; 3];
        for (o, p) in out.iter_mut().zip(&parts) {
            *o = p.parse().map_err(|_| format!("'{p}' is not a number"))?;
        }
        Ok(Triple(out))
    }
}

#[derive(Debug, Args)]
pub struct DubinsArgs {
    /// Start as x,y,psi.
    #[arg(long, allow_hyphen_values = true)]
    pub from: Triple,
    /// Goal as x,y,psi.
    #[arg(long, allow_hyphen_values = true)]
    pub to: Triple,
    #[arg(long, default_value_t = 0.1)]
    pub radius: f64,
    /// Print the full path as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CrossSectionArgs {
    /// Zone as x,y,r_max.
    #[arg(long)]
    pub zone: Triple,
    /// Comma-separated heading planes (rad).
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub psi: Vec<f64>,
    #[arg(long, default_value_t = 360)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_plan(path: &Path) -> Result<PlanResult> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing plan {}", path.display()))
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    Ok(Scenario::load(path)?)
}

fn cmd_plan(args: PlanArgs) -> Result<i32> {
    let scenario = load_scenario(&args.scenario)?;
    let mut params = PlannerParams::for_turn_radius(scenario.vehicle.turn_radius()).with_seed(args.seed);
    params.max_iterations = args.budget_iters.unwrap_or(u64::MAX);
    params.time_budget = args.budget_secs;
    if let Some(v) = args.steer_step {
        params.steer_step = v;
    }
    if let Some(v) = args.goal_bias {
        params.goal_bias = v;
    }
    if let Some(v) = args.check_step {
        params.check_step = v;
    }
    let result = plan(&scenario, params)?;
    write_json(&args.out, &result)?;
    if let Some(path) = &args.trajectory {
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &result.edges, scenario.vehicle.v, 0.01)?;
        fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    }
    match result.cost {
        Some(c) => {
            eprintln!("solved: cost {c:.6} TU, {} iterations, {} nodes", result.iterations, result.nodes);
            Ok(EXIT_OK)
        }
        None => {
            eprintln!("no solution within budget ({} iterations)", result.iterations);
            Ok(EXIT_NO_SOLUTION)
        }
    }
}

fn cmd_scenario(args: ScenarioArgs) -> Result<i32> {
    let config = GeneratorConfig {
        r_max: args.r_max,
        vehicle: VehicleParams::from_turn_radius(1.0, args.turn_radius)?,
        ..GeneratorConfig::default()
    };
    let scenario = generate_scenario(args.zones, args.seed, &config)?;
    scenario.save(&args.out)?;
    if let Some(iters) = args.screen_iters {
        let params = PlannerParams::for_turn_radius(args.turn_radius)
            .with_iterations(iters)
            .with_seed(args.seed);
        if !screen_feasible(&scenario, params) {
            eprintln!("scenario not solved within {iters} screening iterations");
            return Ok(EXIT_NO_SOLUTION);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let scenario = load_scenario(&args.scenario)?;
    let plan = read_plan(&args.plan)?;
    if !(args.time_step > 0.0) {
        bail!("--time-step must be positive");
    }
    let report = verify_plan(&plan, &scenario, args.time_step);
    match &args.out {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_NO_SOLUTION })
}

fn cmd_snapshot(args: SnapshotArgs) -> Result<i32> {
    let scenario = load_scenario(&args.scenario)?;
    let plan = read_plan(&args.plan)?;
    if !(args.resolution_deg > 0.0) {
        bail!("--resolution-deg must be positive");
    }
    let snaps = args
        .times
        .iter()
        .map(|&t| snapshot(&plan, &scenario, t, args.resolution_deg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut buf = Vec::new();
    write_snapshots_csv(&mut buf, &snaps)?;
    fs::write(&args.out, buf).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(EXIT_OK)
}

fn cmd_mc(args: McArgs) -> Result<i32> {
    let mut config = match (&args.config, args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        (None, Some(Preset::Full)) => ExperimentConfig::full(),
        (None, _) => ExperimentConfig::desk(),
    };
    if let Some(w) = args.workers {
        config.parallel_workers = w;
    }
    if let Some(s) = args.seed {
        config.base_seed = s;
    }
    if let Some(m) = args.trials {
        config.trials_per_count = m;
    }
    if let Some(n) = args.zone_counts {
        config.zone_counts = n;
    }
    if args.dump_config {
        println!("{}", serde_json::to_string_pretty(&config)?);
        return Ok(EXIT_OK);
    }
    let out_dir = args.out_dir.ok_or_else(|| anyhow!("--out-dir is required"))?;
    let results = run_experiment(&config)?;
    summarize(&results, &out_dir)?;
    eprint!("{}", crate::montecarlo::summary_text(&results));
    Ok(EXIT_OK)
}

fn cmd_dubins(args: DubinsArgs) -> Result<i32> {
    if !(args.radius > 0.0) {
        bail!("--radius must be positive");
    }
    let [x0, y0, p0] = args.from.0;
    let [x1, y1, p1] = args.to.0;
    let path = shortest_path(Configuration::new(x0, y0, p0), Configuration::new(x1, y1, p1), args.radius);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&path)?);
    } else {
        println!(
            "{} {} [{}, {}, {}]",
            path.word, path.total_length, path.params[0], path.params[1], path.params[2]
        );
    }
    Ok(EXIT_OK)
}

fn cmd_cross_section(args: CrossSectionArgs) -> Result<i32> {
    let [x, y, r_max] = args.zone.0;
    let zone = EngagementZone::new(x, y, r_max)?;
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    let mut buf = Vec::new();
    write_cross_sections(&mut buf, &zone, &args.psi, args.samples).map_err(|e| anyhow!("{e}"))?;
    fs::write(&args.out, buf).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(EXIT_OK)
}

pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Scenario(a) => cmd_scenario(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Snapshot(a) => cmd_snapshot(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Dubins(a) => cmd_dubins(a),
        Command::CrossSection(a) => cmd_cross_section(a),
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}
