//! Independent plan verification.
//!
//! The plan's turn-rate schedule is flown through the vehicle kinematics
//! `x' = v cos psi, y' = v sin psi, psi' = u` with a fixed-step RK4
//! integrator, and every integrated state is checked against the dynamic
//! engagement constraint `rho_max(xi) - d < 0` directly. Nothing here goes
//! through the planner's sampled lifted-space predicate.

use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{wrap_pi, wrap_two_pi};
use crate::dubins::{Configuration, DubinsPath};
use crate::geometry::{
    cardioid_radius, constraint_value, line_of_sight, relative_bearing, EngagementZone, BOUNDARY_SLACK,
};
use crate::planner::{GoalTolerance, PlanResult};
use crate::scenario::Scenario;

pub const DEFAULT_TIME_STEP: f64 = 0.001;
pub const DEFAULT_SNAPSHOT_RESOLUTION_DEG: f64 = 1.0;
/// Largest gap (LU) allowed between the integrated trajectory and the
/// plan's own geometry.
pub const DYNAMICS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("time {t} outside plan duration [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("plan has no edges")]
    EmptyPlan,
    #[error("{0}")]
    Output(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub passed: bool,
    pub dynamics_ok: bool,
    /// Largest distance between integrated and planned positions (LU).
    pub max_position_defect: f64,
    /// Largest turn rate the geometry asks for (rad/TU).
    pub max_required_turn_rate: f64,
    pub boundary_ok: bool,
    pub start_error: f64,
    pub goal_position_error: f64,
    pub goal_heading_error: f64,
    pub domain_ok: bool,
    pub ez_ok: bool,
    /// Smallest `-g` over all zones and integration steps; positive is safe.
    pub min_ez_slack: f64,
    pub time_step: f64,
    pub duration: f64,
}

/// Kinematic state `(x, y, psi)` with unwrapped heading.
pub type State = [f64; 3];

#[inline]
fn deriv(s: &State, v: f64, u: f64) -> State {
    [v * s[2].cos(), v * s[2].sin(), u]
}

/// One classical RK4 step of the unicycle kinematics under constant `u`.
pub fn rk4_step(s: &State, v: f64, u: f64, dt: f64) -> State {
    let k1 = deriv(s, v, u);
    let s2 = [s[0] + 0.5 * dt * k1[0], s[1] + 0.5 * dt * k1[1], s[2] + 0.5 * dt * k1[2]];
    let k2 = deriv(&s2, v, u);
    let s3 = [s[0] + 0.5 * dt * k2[0], s[1] + 0.5 * dt * k2[1], s[2] + 0.5 * dt * k2[2]];
    let k3 = deriv(&s3, v, u);
    let s4 = [s[0] + dt * k3[0], s[1] + dt * k3[1], s[2] + dt * k3[2]];
    let k4 = deriv(&s4, v, u);
    let mut out = *s;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate over `duration` under constant `u`, calling `visit(elapsed, state)`
/// after every step. The final step is shortened to land on `duration`.
pub fn integrate_interval(
    start: State,
    v: f64,
    u: f64,
    duration: f64,
    dt: f64,
    mut visit: impl FnMut(f64, &State),
) -> State {
    let steps = (duration / dt).ceil().max(1.0) as usize;
    let mut s = start;
    let mut elapsed = 0.0;
    for k in 0..steps {
        let h = if k + 1 == steps { duration - elapsed } else { dt };
        s = rk4_step(&s, v, u, h);
        elapsed = if k + 1 == steps { duration } else { elapsed + h };
        visit(elapsed, &s);
    }
    s
}

fn to_config(s: &State) -> Configuration {
    Configuration::new(s[0], s[1], s[2])
}

struct Checker<'a> {
    scenario: &'a Scenario,
    domain_ok: bool,
    min_slack: f64,
    max_defect: f64,
}

impl Checker<'_> {
    fn visit(&mut self, s: &State, reference: &Configuration) {
        let c = to_config(s);
        if !self.scenario.domain.contains_within(c.x, c.y, BOUNDARY_SLACK) {
            self.domain_ok = false;
        }
        for ez in &self.scenario.zones {
            self.min_slack = self.min_slack.min(-constraint_value(&c, ez));
        }
        self.max_defect = self.max_defect.max((c.x - reference.x).hypot(c.y - reference.y));
    }
}

/// Fly `plan` through the kinematics and check the dynamics, boundary
/// conditions, domain containment, and engagement constraints.
pub fn verify_plan(plan: &PlanResult, scenario: &Scenario, time_step: f64) -> VerificationReport {
    verify_edges(&plan.edges, scenario, time_step)
}

/// [`verify_plan`] on a bare edge sequence.
pub fn verify_edges(edges: &[DubinsPath], scenario: &Scenario, time_step: f64) -> VerificationReport {
    assert!(time_step > 0.0, "time_step must be positive");
    let vehicle = scenario.vehicle;
    let tolerance = GoalTolerance::default();
    let first = edges.first().map_or(scenario.start, |e| e.start);
    let mut state: State = [first.x, first.y, first.psi];
    let mut checker = Checker {
        scenario,
        domain_ok: true,
        min_slack: f64::INFINITY,
        max_defect: 0.0,
    };
    checker.visit(&state, &first);
    let mut max_rate: f64 = 0.0;
    let mut duration = 0.0;

    for edge in edges {
        let mut s_offset = 0.0;
        for (kind, len) in edge.word.segments().into_iter().zip(edge.segment_lengths()) {
            if len <= 0.0 {
                continue;
            }
            let required = kind.turn_sign() * vehicle.v / edge.turn_radius;
            max_rate = max_rate.max(required.abs());
            // the vehicle cannot turn harder than u_max
            let u = required.clamp(-vehicle.u_max, vehicle.u_max);
            state = integrate_interval(state, vehicle.v, u, len / vehicle.v, time_step, |t, s| {
                let arc = (s_offset + t * vehicle.v).min(edge.total_length);
                let reference = edge.point_at(arc).expect("arc within edge");
                checker.visit(s, &reference);
            });
            s_offset += len;
            duration += len / vehicle.v;
        }
    }

    let end = to_config(&state);
    let start_error = first.planar_distance(&scenario.start).max(wrap_pi(first.psi - scenario.start.psi).abs());
    let goal_position_error = end.planar_distance(&scenario.goal);
    let goal_heading_error = wrap_pi(end.psi - scenario.goal.psi).abs();
    let boundary_ok = start_error <= 1e-9
        && goal_position_error <= tolerance.position
        && goal_heading_error <= tolerance.heading;
    let dynamics_ok = checker.max_defect <= DYNAMICS_TOLERANCE && max_rate <= vehicle.u_max * (1.0 + 1e-9);
    let min_ez_slack = checker.min_slack;
    let ez_ok = min_ez_slack > 0.0;
    VerificationReport {
        schema: crate::SCHEMA_VERSION,
        passed: dynamics_ok && boundary_ok && checker.domain_ok && ez_ok,
        dynamics_ok,
        max_position_defect: checker.max_defect,
        max_required_turn_rate: max_rate,
        boundary_ok,
        start_error,
        goal_position_error,
        goal_heading_error,
        domain_ok: checker.domain_ok,
        ez_ok,
        min_ez_slack,
        time_step,
        duration,
    }
}

/// Planned configuration at time `t` along a chain of edges.
pub fn state_at(edges: &[DubinsPath], v: f64, t: f64) -> Result<Configuration, VerifyError> {
    let first = edges.first().ok_or(VerifyError::EmptyPlan)?;
    let duration: f64 = edges.iter().map(|e| e.duration(v)).sum();
    if !(t >= 0.0 && t <= duration * (1.0 + 1e-12)) {
        return Err(VerifyError::TimeOutOfRange { t, duration });
    }
    let mut remaining = t * v;
    for e in edges {
        if remaining <= e.total_length {
            return Ok(e.point_at(remaining).expect("arc within edge"));
        }
        remaining -= e.total_length;
    }
    Ok(edges.last().map_or(first.start, |e| e.endpoint()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneSnapshot {
    pub zone_id: usize,
    pub lambda: f64,
    pub xi: f64,
    pub rho_max: f64,
    /// Closed polyline `(theta, x, y)`, starting at `theta = lambda`.
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub aircraft: Configuration,
    pub zones: Vec<ZoneSnapshot>,
}

fn zone_shape(zone_id: usize, ez: &EngagementZone, aircraft: &Configuration, samples: usize) -> ZoneSnapshot {
    let lambda = line_of_sight(aircraft.x, aircraft.y, ez);
    let xi = relative_bearing(aircraft, ez);
    let points = (0..=samples)
        .map(|k| {
            let theta = lambda + TAU * k as f64 / samples as f64;
            let rho = cardioid_radius(theta, lambda, xi, ez);
            (wrap_two_pi(theta), ez.x + rho * theta.cos(), ez.y + rho * theta.sin())
        })
        .collect();
    ZoneSnapshot {
        zone_id,
        lambda,
        xi,
        rho_max: cardioid_radius(lambda, lambda, xi, ez),
        points,
    }
}

/// Dynamic engagement-zone shapes as seen from the aircraft at time `t`.
pub fn snapshot(plan: &PlanResult, scenario: &Scenario, t: f64, resolution_deg: f64) -> Result<Snapshot, VerifyError> {
    let aircraft = state_at(&plan.edges, scenario.vehicle.v, t)?;
    let samples = (360.0 / resolution_deg).round().max(3.0) as usize;
    Ok(Snapshot {
        t,
        aircraft,
        zones: scenario
            .zones
            .iter()
            .enumerate()
            .map(|(i, ez)| zone_shape(i, ez, &aircraft, samples))
            .collect(),
    })
}

/// CSV rows `(t, zone_id, theta, x, y)`; the aircraft row uses
/// `zone_id = aircraft` and its heading in the `theta` column.
pub fn write_snapshots_csv<W: Write>(out: W, snapshots: &[Snapshot]) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| VerifyError::Output(e.to_string());
    w.write_record(["t", "zone_id", "theta", "x", "y"]).map_err(err)?;
    for snap in snapshots {
        let t = snap.t.to_string();
        w.write_record([
            t.as_str(),
            "aircraft",
            &snap.aircraft.psi.to_string(),
            &snap.aircraft.x.to_string(),
            &snap.aircraft.y.to_string(),
        ])
        .map_err(err)?;
        for z in &snap.zones {
            let id = z.zone_id.to_string();
            for (theta, x, y) in &z.points {
                w.write_record([t.as_str(), id.as_str(), &theta.to_string(), &x.to_string(), &y.to_string()])
                    .map_err(err)?;
            }
        }
    }
    w.flush().map_err(|e| VerifyError::Output(e.to_string()))
}

/// Sampled trajectory rows `(t, x, y, psi, u)` at spacing `dt`.
pub fn write_trajectory_csv<W: Write>(out: W, edges: &[DubinsPath], v: f64, dt: f64) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| VerifyError::Output(e.to_string());
    w.write_record(["t", "x", "y", "psi", "u"]).map_err(err)?;
    let mut t0 = 0.0;
    for edge in edges {
        let lengths = edge.segment_lengths();
        let kinds = edge.word.segments();
        let dur = edge.duration(v);
        let steps = (dur / dt).ceil() as usize;
        for k in 0..steps.max(1) {
            let local = (k as f64 * dt).min(dur);
            let s = local * v;
            let q = edge.point_at(s).expect("arc within edge");
            let mut seg = 0;
            let mut acc = lengths[0];
            while seg < 2 && s >= acc {
                seg += 1;
                acc += lengths[seg];
            }
            let u = kinds[seg].turn_sign() * v / edge.turn_radius;
            w.write_record([
                (t0 + local).to_string(),
                q.x.to_string(),
                q.y.to_string(),
                q.psi.to_string(),
                u.to_string(),
            ])
            .map_err(err)?;
        }
        t0 += dur;
    }
    if let Some(last) = edges.last() {
        let q = last.endpoint();
        w.write_record([t0.to_string(), q.x.to_string(), q.y.to_string(), q.psi.to_string(), "0".to_string()])
            .map_err(err)?;
    }
    w.flush().map_err(|e| VerifyError::Output(e.to_string()))
}
