//! Planning scenarios: construction, randomized generation, screening, and
//! the JSON file format.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dubins::{Configuration, VehicleParams};
use crate::geometry::{config_free, in_engagement, Domain, EngagementZone};
use crate::planner::{plan, PlannerParams};

/// Draws allowed per zone before generation gives up.
pub const ZONE_RESAMPLE_CAP: usize = 10_000;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("could not place zone {zone} within {attempts} draws")]
    ResampleCapExceeded { zone: usize, attempts: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Everything the planner needs to know about one problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile", into = "ScenarioFile")]
pub struct Scenario {
    pub domain: Domain,
    pub vehicle: VehicleParams,
    pub zones: Vec<EngagementZone>,
    pub start: Configuration,
    pub goal: Configuration,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default = "schema_default")]
    schema: u32,
    domain: Domain,
    vehicle: VehicleParams,
    zones: Vec<EngagementZone>,
    start: Configuration,
    goal: Configuration,
    #[serde(default)]
    seed: u64,
}

fn schema_default() -> u32 {
    crate::SCHEMA_VERSION
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = ScenarioError;

    fn try_from(f: ScenarioFile) -> Result<Self, Self::Error> {
        if f.schema != crate::SCHEMA_VERSION {
            return Err(ScenarioError::Invalid(format!("unsupported schema version {}", f.schema)));
        }
        Scenario::new(f.domain, f.vehicle, f.zones, f.start, f.goal, f.seed)
    }
}

impl From<Scenario> for ScenarioFile {
    fn from(s: Scenario) -> Self {
        ScenarioFile {
            schema: crate::SCHEMA_VERSION,
            domain: s.domain,
            vehicle: s.vehicle,
            zones: s.zones,
            start: s.start,
            goal: s.goal,
            seed: s.seed,
        }
    }
}

impl Scenario {
    /// Validating constructor: zone centers inside the domain, `r_min = 0`,
    /// start and goal collision-free.
    pub fn new(
        domain: Domain,
        vehicle: VehicleParams,
        zones: Vec<EngagementZone>,
        start: Configuration,
        goal: Configuration,
        seed: u64,
    ) -> Result<Self, ScenarioError> {
        for (i, z) in zones.iter().enumerate() {
            if !domain.contains(z.x, z.y) {
                return Err(ScenarioError::Invalid(format!(
                    "zone {i} center ({}, {}) lies outside the domain",
                    z.x, z.y
                )));
            }
            if z.r_min != 0.0 {
                return Err(ScenarioError::Invalid(format!("zone {i} has r_min = {}, planning needs 0", z.r_min)));
            }
        }
        if !config_free(&start, &zones, &domain) {
            return Err(ScenarioError::Invalid(format!("start {start} is not collision-free")));
        }
        if !config_free(&goal, &zones, &domain) {
            return Err(ScenarioError::Invalid(format!("goal {goal} is not collision-free")));
        }
        Ok(Self {
            domain,
            vehicle,
            zones,
            start,
            goal,
            seed,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| ScenarioError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|source| ScenarioError::Io {
            path: path.to_owned(),
            source,
        })
    }
}

/// Fixed inputs for [`generate_scenario`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub domain: Domain,
    pub vehicle: VehicleParams,
    pub r_max: f64,
    pub start: Configuration,
    pub goal: Configuration,
    /// Standard deviation of the clustered half, as a fraction of the
    /// domain size.
    pub gaussian_sigma: f64,
}

impl Default for GeneratorConfig {
    /// Unit square, `v = 1`, `R = 0.1`, `r_max = 0.15`, corner to corner.
    fn default() -> Self {
        Self {
            domain: Domain::unit(),
            vehicle: VehicleParams { v: 1.0, u_max: 10.0 },
            r_max: 0.15,
            start: Configuration::new(0.0, 0.0, 0.0),
            goal: Configuration::new(1.0, 1.0, 0.0),
            gaussian_sigma: 0.2,
        }
    }
}

/// Random scenario with `n_zones` zones: the first `ceil(n/2)` centers are
/// uniform over the domain, the remaining `floor(n/2)` come from an isotropic
/// Gaussian around the domain center (redrawn until inside the domain).
/// Zones that would engage the start or goal are redrawn.
pub fn generate_scenario(n_zones: usize, seed: u64, config: &GeneratorConfig) -> Result<Scenario, ScenarioError> {
    let domain = config.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = domain.center();
    let sx = Normal::new(cx, config.gaussian_sigma * domain.width())
        .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let sy = Normal::new(cy, config.gaussian_sigma * domain.height())
        .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let n_uniform = n_zones.div_ceil(2);
    let mut zones = Vec::with_capacity(n_zones);
    for i in 0..n_zones {
        let mut placed = None;
        for _ in 0..ZONE_RESAMPLE_CAP {
            let (x, y) = if i < n_uniform {
                (
                    rng.random_range(domain.xmin..=domain.xmax),
                    rng.random_range(domain.ymin..=domain.ymax),
                )
            } else {
                (sx.sample(&mut rng), sy.sample(&mut rng))
            };
            if !domain.contains(x, y) {
                continue;
            }
            let zone = EngagementZone::new(x, y, config.r_max).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
            if in_engagement(&config.start, &zone) || in_engagement(&config.goal, &zone) {
                continue;
            }
            placed = Some(zone);
            break;
        }
        zones.push(placed.ok_or(ScenarioError::ResampleCapExceeded {
            zone: i,
            attempts: ZONE_RESAMPLE_CAP,
        })?);
    }
    Scenario::new(domain, config.vehicle, zones, config.start, config.goal, seed)
}

/// Whether the planner solves `scenario` under `screening` params.
pub fn screen_feasible(scenario: &Scenario, screening: PlannerParams) -> bool {
    plan(scenario, screening).map(|r| r.is_solved()).unwrap_or(false)
}
