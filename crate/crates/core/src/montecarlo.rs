//! Batch experiments: success rate and mean cost over zone counts and
//! planner budgets.
//!
//! Each trial draws a scenario, runs the planner once up to the largest
//! budget, and reads off the best solution at every smaller budget on the
//! way. A run stopped at budget `b` is exactly the prefix of the longer run,
//! so smaller budgets share the same random stream. Scenarios the planner
//! cannot solve at the largest budget are replaced, which makes the top
//! budget's success rate 1 by construction.

use std::fs;
use std::io::{BufRead, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::{PlanError, PlanStatus, Planner, PlannerParams};
use crate::scenario::{generate_scenario, GeneratorConfig, ScenarioError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("no solvable scenario for N = {n_zones}, trial {trial} after {attempts} attempts")]
    ScreeningExhausted { n_zones: usize, trial: usize, attempts: usize },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {message}")]
    Format { context: String, message: String },
}

/// Planner budgets, all in one unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budgets {
    Iterations(Vec<u64>),
    /// Wall clock; results depend on the machine.
    Seconds(Vec<f64>),
}

impl Budgets {
    pub fn len(&self) -> usize {
        match self {
            Budgets::Iterations(v) => v.len(),
            Budgets::Seconds(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Budgets::Iterations(v) => v.iter().map(|&b| b as f64).collect(),
            Budgets::Seconds(v) => v.clone(),
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            Budgets::Iterations(_) => "iterations",
            Budgets::Seconds(_) => "seconds",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub zone_counts: Vec<usize>,
    pub trials_per_count: usize,
    pub budgets: Budgets,
    pub base_seed: u64,
    #[serde(default)]
    pub planner: PlannerParams,
    #[serde(default)]
    pub generator: GeneratorConfig,
    #[serde(default = "default_workers")]
    pub parallel_workers: usize,
    /// Scenario draws per trial before giving up.
    #[serde(default = "default_attempts")]
    pub max_attempts: usize,
}

fn default_workers() -> usize {
    1
}

fn default_attempts() -> usize {
    100
}

impl ExperimentConfig {
    /// `N in {4, 8, 16}`, 50 trials, iteration budgets 2k..50k.
    pub fn desk() -> Self {
        Self {
            zone_counts: vec![4, 8, 16],
            trials_per_count: 50,
            budgets: Budgets::Iterations(vec![2_000, 5_000, 10_000, 20_000, 50_000]),
            base_seed: 2024,
            planner: PlannerParams::for_turn_radius(0.1),
            generator: GeneratorConfig::default(),
            parallel_workers: default_workers(),
            max_attempts: default_attempts(),
        }
    }

    /// `N in {4, 8, 20, 24}`, 500 trials, wall-clock budgets 5..160 s.
    pub fn full() -> Self {
        Self {
            zone_counts: vec![4, 8, 20, 24],
            trials_per_count: 500,
            budgets: Budgets::Seconds(vec![5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0, 120.0, 140.0, 160.0]),
            ..Self::desk()
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidConfig(m.to_string()));
        if self.trials_per_count == 0 {
            return bad("trials_per_count must be at least 1");
        }
        if self.budgets.is_empty() {
            return bad("at least one budget is required");
        }
        let values = self.budgets.values();
        if values.windows(2).any(|w| w[0] >= w[1]) || values[0] <= 0.0 {
            return bad("budgets must be positive and strictly ascending");
        }
        if self.parallel_workers == 0 {
            return bad("parallel_workers must be at least 1");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1");
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one scenario draw, reproducible in isolation.
pub fn trial_seed(base_seed: u64, n_zones: usize, trial: usize, attempt: usize) -> u64 {
    [n_zones as u64, trial as u64, attempt as u64]
        .into_iter()
        .fold(splitmix64(base_seed), |acc, v| splitmix64(acc ^ splitmix64(v)))
}

/// Outcome of one trial at one budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n_zones: usize,
    pub trial: usize,
    /// Scenario seed; the planner seed is derived from it.
    pub seed: u64,
    pub budget: f64,
    pub status: PlanStatus,
    pub cost: Option<f64>,
    pub first_solution_time: Option<f64>,
    /// Scenario draws rejected before this one.
    pub replaced: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n_zones: usize,
    pub budget: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_cost: Option<f64>,
    pub cost_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub budget_unit: String,
    pub aggregates: Vec<Aggregate>,
    pub records: Vec<TrialRecord>,
    /// Scenario replacements per zone count, in `zone_counts` order.
    pub replaced: Vec<(usize, usize)>,
}

impl ExperimentResults {
    pub fn aggregate(&self, n_zones: usize, budget: f64) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.n_zones == n_zones && a.budget == budget)
    }
}

fn planner_seed(scenario_seed: u64) -> u64 {
    splitmix64(scenario_seed ^ 0x005E_ED0F_7EE5)
}

fn run_trial(config: &ExperimentConfig, n_zones: usize, trial: usize) -> Result<Vec<TrialRecord>, ExperimentError> {
    let budgets = config.budgets.values();
    let top = *budgets.last().expect("validated non-empty");
    for attempt in 0..config.max_attempts {
        let seed = trial_seed(config.base_seed, n_zones, trial, attempt);
        let scenario = match generate_scenario(n_zones, seed, &config.generator) {
            Ok(s) => s,
            Err(ScenarioError::ResampleCapExceeded { .. }) => continue,
            Err(e) => return Err(ExperimentError::InvalidConfig(e.to_string())),
        };
        let mut params = config.planner;
        params.rng_seed = planner_seed(seed);
        match config.budgets {
            Budgets::Iterations(_) => {
                params.max_iterations = top as u64;
                params.time_budget = None;
            }
            Budgets::Seconds(_) => {
                params.max_iterations = u64::MAX;
                params.time_budget = Some(top);
            }
        }
        let mut planner = Planner::new(&scenario, params)?;
        let mut records = Vec::with_capacity(budgets.len());
        for &b in &budgets {
            let reached = |p: &Planner<'_>| match config.budgets {
                Budgets::Iterations(_) => p.iterations() as f64 >= b,
                Budgets::Seconds(_) => p.elapsed_secs() >= b,
            };
            while !reached(&planner) {
                planner.step()?;
            }
            let r = planner.result();
            records.push(TrialRecord {
                n_zones,
                trial,
                seed,
                budget: b,
                status: r.status,
                cost: r.cost,
                first_solution_time: r.first_solution.map(|f| f.time),
                replaced: attempt,
            });
        }
        if records.last().is_some_and(|r| r.status == PlanStatus::Solved) {
            return Ok(records);
        }
    }
    Err(ExperimentError::ScreeningExhausted {
        n_zones,
        trial,
        attempts: config.max_attempts,
    })
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(std))
}

/// Per-`(N, budget)` aggregates, ordered by zone count then budget as they
/// first appear in `records`.
pub fn aggregate(records: &[TrialRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(usize, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|&(n, b)| n == r.n_zones && b == r.budget) {
            keys.push((r.n_zones, r.budget));
        }
    }
    keys.into_iter()
        .map(|(n, b)| {
            let group: Vec<&TrialRecord> = records.iter().filter(|r| r.n_zones == n && r.budget == b).collect();
            let costs: Vec<f64> = group
                .iter()
                .filter(|r| r.status == PlanStatus::Solved)
                .filter_map(|r| r.cost)
                .collect();
            let (mean_cost, cost_std) = mean_std(&costs);
            Aggregate {
                n_zones: n,
                budget: b,
                trials: group.len(),
                successes: costs.len(),
                success_rate: costs.len() as f64 / group.len() as f64,
                mean_cost,
                cost_std,
            }
        })
        .collect()
}

/// Run every trial of `config` and aggregate. Output does not depend on
/// `parallel_workers` when budgets are in iterations.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults, ExperimentError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .zone_counts
        .iter()
        .flat_map(|&n| (0..config.trials_per_count).map(move |t| (n, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallel_workers)
        .build()
        .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
    let per_trial: Vec<Vec<TrialRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, t)| run_trial(config, n, t))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let replaced = config
        .zone_counts
        .iter()
        .map(|&n| {
            let total = records
                .iter()
                .filter(|r| r.n_zones == n && r.budget == records[0].budget)
                .map(|r| r.replaced)
                .sum();
            (n, total)
        })
        .collect();
    Ok(ExperimentResults {
        budget_unit: config.budgets.unit().to_string(),
        aggregates: aggregate(&records),
        records,
        replaced,
    })
}

const CSV_HEADER: [&str; 7] = ["n_zones", "budget", "trials", "successes", "success_rate", "mean_cost", "cost_std"];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Aggregates as CSV.
pub fn write_summary_csv<W: Write>(out: W, aggregates: &[Aggregate]) -> Result<(), ExperimentError> {
    let fmt = |e: csv::Error| ExperimentError::Format {
        context: "summary csv".into(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(fmt)?;
    for a in aggregates {
        w.write_record([
            a.n_zones.to_string(),
            a.budget.to_string(),
            a.trials.to_string(),
            a.successes.to_string(),
            a.success_rate.to_string(),
            opt(a.mean_cost),
            opt(a.cost_std),
        ])
        .map_err(fmt)?;
    }
    w.flush().map_err(|e| ExperimentError::Format {
        context: "summary csv".into(),
        message: e.to_string(),
    })
}

/// Inverse of [`write_summary_csv`].
pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<Aggregate>, ExperimentError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| ExperimentError::Format {
            context: format!("summary csv row {}", line + 2),
            message: e.to_string(),
        })?;
        let field = |i: usize| -> Result<&str, ExperimentError> {
            row.get(i).ok_or_else(|| ExperimentError::Format {
                context: format!("summary csv row {}", line + 2),
                message: format!("missing column {}", CSV_HEADER[i]),
            })
        };
        let parse_f = |i: usize| -> Result<f64, ExperimentError> {
            field(i)?.parse().map_err(|e: std::num::ParseFloatError| ExperimentError::Format {
                context: format!("summary csv row {} column {}", line + 2, CSV_HEADER[i]),
                message: e.to_string(),
            })
        };
        let parse_u = |i: usize| -> Result<usize, ExperimentError> {
            field(i)?.parse().map_err(|e: std::num::ParseIntError| ExperimentError::Format {
                context: format!("summary csv row {} column {}", line + 2, CSV_HEADER[i]),
                message: e.to_string(),
            })
        };
        let parse_opt = |i: usize| -> Result<Option<f64>, ExperimentError> {
            if field(i)?.is_empty() {
                Ok(None)
            } else {
                parse_f(i).map(Some)
            }
        };
        out.push(Aggregate {
            n_zones: parse_u(0)?,
            budget: parse_f(1)?,
            trials: parse_u(2)?,
            successes: parse_u(3)?,
            success_rate: parse_f(4)?,
            mean_cost: parse_opt(5)?,
            cost_std: parse_opt(6)?,
        });
    }
    Ok(out)
}

/// One JSON object per line per trial record.
pub fn write_trials_jsonl<W: Write>(mut out: W, records: &[TrialRecord]) -> Result<(), ExperimentError> {
    for r in records {
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(out, "{line}").map_err(|e| ExperimentError::Format {
            context: "trial log".into(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}

pub fn read_trials_jsonl<R: BufRead>(input: R) -> Result<Vec<TrialRecord>, ExperimentError> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(i, l)| {
            let l = l.map_err(|e| ExperimentError::Format {
                context: format!("trial log line {}", i + 1),
                message: e.to_string(),
            })?;
            serde_json::from_str(&l).map_err(|e| ExperimentError::Format {
                context: format!("trial log line {}", i + 1),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Human-readable table of the aggregates.
pub fn summary_text(results: &ExperimentResults) -> String {
    let mut s = format!(
        "{:>8} {:>12} {:>7} {:>10} {:>9} {:>10}\n",
        "n_zones",
        format!("budget[{}]", if results.budget_unit == "seconds" { "s" } else { "it" }),
        "trials",
        "successes",
        "rate",
        "mean_cost"
    );
    for a in &results.aggregates {
        s += &format!(
            "{:>8} {:>12} {:>7} {:>10} {:>9.3} {:>10}\n",
            a.n_zones,
            a.budget,
            a.trials,
            a.successes,
            a.success_rate,
            a.mean_cost.map_or("-".to_string(), |c| format!("{c:.4}"))
        );
    }
    for (n, r) in &results.replaced {
        s += &format!("N = {n}: {r} scenario(s) replaced by screening\n");
    }
    s
}

/// Write `results.csv`, `trials.jsonl`, and `summary.txt` into `dir`.
pub fn summarize(results: &ExperimentResults, dir: impl AsRef<Path>) -> Result<(), ExperimentError> {
    let dir = dir.as_ref();
    let io = |path: PathBuf| move |source: std::io::Error| ExperimentError::Io { path, source };
    fs::create_dir_all(dir).map_err(io(dir.to_owned()))?;

    let csv_path = dir.join("results.csv");
    let mut buf = Vec::new();
    write_summary_csv(&mut buf, &results.aggregates)?;
    fs::write(&csv_path, buf).map_err(io(csv_path.clone()))?;

    let log_path = dir.join("trials.jsonl");
    let mut buf = Vec::new();
    write_trials_jsonl(&mut buf, &results.records)?;
    fs::write(&log_path, buf).map_err(io(log_path.clone()))?;

    let txt_path = dir.join("summary.txt");
    fs::write(&txt_path, summary_text(results)).map_err(io(txt_path.clone()))?;
    Ok(())
}
