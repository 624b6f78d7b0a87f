//! C ABI for the `ezplan` planner.
//!
//! Scenarios and plans cross the boundary as opaque handles. Every function
//! returns an [`EzpStatus`]; on failure a message is available from
//! [`ezp_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use ezplan::geometry::{in_engagement, EngagementZone};
use ezplan::planner::{plan, PlanResult, PlannerParams};
use ezplan::scenario::{generate_scenario, GeneratorConfig, Scenario, ScenarioError};
use ezplan::verify::verify_plan;
use ezplan::{Configuration, Word};

/// Result code of every `ezp_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EzpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    /// Planning finished without a solution; the plan handle is still set.
    Infeasible = 5,
    Panic = 6,
}

/// Opaque scenario handle.
pub struct EzpScenario(Scenario);

/// Opaque plan handle.
pub struct EzpPlan(PlanResult);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EzpConfiguration {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EzpZone {
    pub x: f64,
    pub y: f64,
    pub r_max: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EzpWord {
    Lsl = 0,
    Rsr = 1,
    Lsr = 2,
    Rsl = 3,
    Rlr = 4,
    Lrl = 5,
}

impl From<Word> for EzpWord {
    fn from(w: Word) -> Self {
        match w {
            Word::Lsl => EzpWord::Lsl,
            Word::Rsr => EzpWord::Rsr,
            Word::Lsr => EzpWord::Lsr,
            Word::Rsl => EzpWord::Rsl,
            Word::Rlr => EzpWord::Rlr,
            Word::Lrl => EzpWord::Lrl,
        }
    }
}

/// Shortest Dubins path summary. Turn parameters are angles in radians,
/// the straight parameter is a length.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EzpDubinsPath {
    pub word: EzpWord,
    pub params: [f64; 3],
    pub length: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EzpVerifyReport {
    pub passed: bool,
    pub dynamics_ok: bool,
    pub boundary_ok: bool,
    pub domain_ok: bool,
    pub ez_ok: bool,
    pub max_position_defect: f64,
    pub min_ez_slack: f64,
    pub duration: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(EzpStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(EzpStatus::NullPointer, format!("{what} is null"))
    }

    fn invalid(msg: impl ToString) -> Self {
        Failure(EzpStatus::InvalidArgument, msg.to_string())
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let status = match e {
            ScenarioError::Io { .. } => EzpStatus::Io,
            ScenarioError::Parse { .. } => EzpStatus::Parse,
            _ => EzpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<EzpStatus, Failure>) -> EzpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            EzpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    out.write(value);
    Ok(())
}

fn to_config(c: &EzpConfiguration) -> Configuration {
    Configuration::new(c.x, c.y, c.psi)
}

/// Message for the last failing call on this thread. Owned by the library.
#[no_mangle]
pub extern "C" fn ezp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Load a scenario JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_scenario_load(path: *const c_char, out: *mut *mut EzpScenario) -> EzpStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let scenario = Scenario::load(path)?;
        write_out(out, Box::into_raw(Box::new(EzpScenario(scenario))), "out")?;
        Ok(EzpStatus::Ok)
    })
}

/// Parse a scenario from a JSON string.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_scenario_from_json(json: *const c_char, out: *mut *mut EzpScenario) -> EzpStatus {
    guard(|| {
        let json = str_arg(json, "json")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let scenario = Scenario::from_json(json).map_err(|e| Failure(EzpStatus::Parse, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(EzpScenario(scenario))), "out")?;
        Ok(EzpStatus::Ok)
    })
}

/// Random scenario on the unit square with the default generator settings
/// and the given zone radius.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_scenario_generate(
    n_zones: usize,
    seed: u64,
    r_max: f64,
    out: *mut *mut EzpScenario,
) -> EzpStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let config = GeneratorConfig {
            r_max,
            ..GeneratorConfig::default()
        };
        let scenario = generate_scenario(n_zones, seed, &config)?;
        write_out(out, Box::into_raw(Box::new(EzpScenario(scenario))), "out")?;
        Ok(EzpStatus::Ok)
    })
}

/// # Safety
/// `scenario` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ezp_scenario_free(scenario: *mut EzpScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of zones, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ezp_scenario_zone_count(scenario: *const EzpScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.0.zones.len())
}

/// Run the planner for `max_iterations` iterations. The plan handle is
/// written on both `Ok` and `Infeasible`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_plan(
    scenario: *const EzpScenario,
    max_iterations: u64,
    seed: u64,
    out: *mut *mut EzpPlan,
) -> EzpStatus {
    guard(|| {
        let scenario = &ref_arg(scenario, "scenario")?.0;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let params = PlannerParams::for_turn_radius(scenario.vehicle.turn_radius())
            .with_iterations(max_iterations)
            .with_seed(seed);
        let result = plan(scenario, params).map_err(Failure::invalid)?;
        let solved = result.is_solved();
        write_out(out, Box::into_raw(Box::new(EzpPlan(result))), "out")?;
        Ok(if solved { EzpStatus::Ok } else { EzpStatus::Infeasible })
    })
}

/// # Safety
/// `plan` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ezp_plan_free(plan: *mut EzpPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// # Safety
/// `plan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ezp_plan_solved(plan: *const EzpPlan) -> bool {
    plan.as_ref().is_some_and(|p| p.0.is_solved())
}

/// Transit time of the solution; `Infeasible` when unsolved.
///
/// # Safety
/// `plan` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_plan_cost(plan: *const EzpPlan, out: *mut f64) -> EzpStatus {
    guard(|| {
        let plan = &ref_arg(plan, "plan")?.0;
        match plan.cost {
            Some(c) => {
                write_out(out, c, "out")?;
                Ok(EzpStatus::Ok)
            }
            None => Err(Failure(EzpStatus::Infeasible, "plan has no solution".into())),
        }
    })
}

/// Plan as a JSON string; release it with [`ezp_string_free`].
///
/// # Safety
/// `plan` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_plan_to_json(plan: *const EzpPlan, out: *mut *mut c_char) -> EzpStatus {
    guard(|| {
        let plan = &ref_arg(plan, "plan")?.0;
        let text = serde_json::to_string_pretty(plan).map_err(Failure::invalid)?;
        let text = CString::new(text).map_err(Failure::invalid)?;
        write_out(out, text.into_raw(), "out")?;
        Ok(EzpStatus::Ok)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ezp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Integrate `plan` and check it against `scenario`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_verify(
    plan: *const EzpPlan,
    scenario: *const EzpScenario,
    time_step: f64,
    out: *mut EzpVerifyReport,
) -> EzpStatus {
    guard(|| {
        let plan = &ref_arg(plan, "plan")?.0;
        let scenario = &ref_arg(scenario, "scenario")?.0;
        if !(time_step > 0.0) {
            return Err(Failure::invalid("time_step must be positive"));
        }
        let r = verify_plan(plan, scenario, time_step);
        let report = EzpVerifyReport {
            passed: r.passed,
            dynamics_ok: r.dynamics_ok,
            boundary_ok: r.boundary_ok,
            domain_ok: r.domain_ok,
            ez_ok: r.ez_ok,
            max_position_defect: r.max_position_defect,
            min_ez_slack: r.min_ez_slack,
            duration: r.duration,
        };
        write_out(out, report, "out")?;
        Ok(EzpStatus::Ok)
    })
}

/// Shortest Dubins path between two configurations.
///
/// # Safety
/// `from` and `to` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_dubins_shortest(
    from: *const EzpConfiguration,
    to: *const EzpConfiguration,
    turn_radius: f64,
    out: *mut EzpDubinsPath,
) -> EzpStatus {
    guard(|| {
        let from = to_config(ref_arg(from, "from")?);
        let to = to_config(ref_arg(to, "to")?);
        if !(turn_radius > 0.0 && turn_radius.is_finite()) {
            return Err(Failure::invalid("turn_radius must be positive and finite"));
        }
        let path = ezplan::dubins::shortest_path(from, to, turn_radius);
        let summary = EzpDubinsPath {
            word: path.word.into(),
            params: path.params,
            length: path.total_length,
        };
        write_out(out, summary, "out")?;
        Ok(EzpStatus::Ok)
    })
}

/// Whether `config` lies inside the obstacle of `zone`.
///
/// # Safety
/// `config` and `zone` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ezp_in_engagement(
    config: *const EzpConfiguration,
    zone: *const EzpZone,
    out: *mut bool,
) -> EzpStatus {
    guard(|| {
        let config = to_config(ref_arg(config, "config")?);
        let z = ref_arg(zone, "zone")?;
        let zone = EngagementZone::new(z.x, z.y, z.r_max).map_err(Failure::invalid)?;
        write_out(out, in_engagement(&config, &zone), "out")?;
        Ok(EzpStatus::Ok)
    })
}
