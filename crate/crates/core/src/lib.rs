//! Risk-aware path planning for a constant-speed, turn-rate-limited vehicle
//! flying through a field of heading-dependent (cardioid) engagement zones.
//!
//! The engagement zones change shape as the vehicle turns, but in the lifted
//! `(x, y, psi)` configuration space they are static obstacles. The planner
//! in [`planner`] is an anytime RRT* over that space with Dubins steering.
//!
//! Module map:
//!
//! * [`dubins`]: closed-form Dubins shortest paths, sampling, turn-rate schedules
//! * [`geometry`]: cardioid engagement zones and collision predicates
//! * [`planner`]: the anytime RRT* planner
//! * [`scenario`]: randomized scenarios and their JSON form
//! * [`verify`]: independent plan verification by forward integration
//! * [`montecarlo`]: batch experiments over zone counts and budgets
//! * [`cli`]: the `ezplan` command-line front end

pub mod angle;
pub mod cli;
pub mod dubins;
pub mod geometry;
pub mod montecarlo;
pub mod planner;
pub mod scenario;
pub mod verify;

pub use dubins::{Configuration, DubinsPath, VehicleParams, Word};
pub use geometry::{Domain, EngagementZone};
pub use planner::{PlanResult, PlanStatus, PlannerParams};
pub use scenario::Scenario;
pub use verify::VerificationReport;

/// Version tag written into every JSON document this crate produces.
pub const SCHEMA_VERSION: u32 = 1;
