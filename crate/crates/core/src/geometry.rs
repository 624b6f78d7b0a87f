//! Cardioid engagement zones.
//!
//! An engagement zone (EZ) centered at `(x_i, y_i)` reaches out toward the
//! aircraft by a distance that depends on the aircraft's relative bearing.
//! Two equivalent views are implemented here:
//!
//! * the dynamic view: [`constraint_value`] evaluates
//!   `g = rho_max(xi) - d` from the relative bearing `xi = psi - lambda - pi`;
//! * the lifted view: [`in_engagement`] tests `d <= rho(lambda; psi)` against
//!   the static obstacle cross-section at the aircraft's heading plane.
//!
//! The planner uses the lifted view. The verifier uses the dynamic one.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{wrap_pi, wrap_two_pi};
use crate::dubins::{Configuration, DubinsPath};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid engagement zone: {0}")]
    InvalidZone(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("maximum-range envelope requires r_min = 0, zone has r_min = {0}")]
    NonzeroMinRange(f64),
}

/// A cardioid engagement zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawZone")]
pub struct EngagementZone {
    pub x: f64,
    pub y: f64,
    pub r_max: f64,
    #[serde(default)]
    pub r_min: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZone {
    x: f64,
    y: f64,
    r_max: f64,
    #[serde(default)]
    r_min: f64,
}

impl TryFrom<RawZone> for EngagementZone {
    type Error = GeometryError;

    fn try_from(raw: RawZone) -> Result<Self, Self::Error> {
        EngagementZone::with_min_range(raw.x, raw.y, raw.r_max, raw.r_min)
    }
}

impl EngagementZone {
    /// Zone with `r_min = 0`, the form the planner works with.
    pub fn new(x: f64, y: f64, r_max: f64) -> Result<Self, GeometryError> {
        Self::with_min_range(x, y, r_max, 0.0)
    }

    pub fn with_min_range(x: f64, y: f64, r_max: f64, r_min: f64) -> Result<Self, GeometryError> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(GeometryError::InvalidZone(format!("center ({x}, {y}) is not finite")));
        }
        if !(r_max.is_finite() && r_min.is_finite() && 0.0 <= r_min && r_min <= r_max) {
            return Err(GeometryError::InvalidZone(format!(
                "need 0 <= r_min <= r_max, got r_min = {r_min}, r_max = {r_max}"
            )));
        }
        Ok(Self { x, y, r_max, r_min })
    }

    /// Distance `d_i` from the zone center to `(x, y)`.
    #[inline]
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        (x - self.x).hypot(y - self.y)
    }
}

/// Axis-aligned operating region, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct Domain {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    xmin: f64,
    ymin: f64,
    xmax: f64,
    ymax: f64,
}

impl TryFrom<RawDomain> for Domain {
    type Error = GeometryError;

    fn try_from(raw: RawDomain) -> Result<Self, Self::Error> {
        Domain::new(raw.xmin, raw.ymin, raw.xmax, raw.ymax)
    }
}

impl Default for Domain {
    fn default() -> Self {
        Self::unit()
    }
}

impl Domain {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self, GeometryError> {
        if !(xmin < xmax && ymin < ymax) || ![xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::InvalidDomain(format!(
                "[{xmin}, {xmax}] x [{ymin}, {ymax}] is empty or not finite"
            )));
        }
        Ok(Self { xmin, ymin, xmax, ymax })
    }

    /// `[0, 1] x [0, 1]`
    pub fn unit() -> Self {
        Self {
            xmin: 0.0,
            ymin: 0.0,
            xmax: 1.0,
            ymax: 1.0,
        }
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.contains_within(x, y, 0.0)
    }

    /// Containment in the domain grown by `slack` on every side.
    #[inline]
    pub fn contains_within(&self, x: f64, y: f64, slack: f64) -> bool {
        self.xmin - slack <= x && x <= self.xmax + slack && self.ymin - slack <= y && y <= self.ymax + slack
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }
}

/// Line-of-sight angle `lambda` from the zone center to `(x, y)`, in
/// `[0, 2pi)`. Quadrant-resolved. Returns 0 at the center itself.
#[inline]
pub fn line_of_sight(x: f64, y: f64, ez: &EngagementZone) -> f64 {
    wrap_two_pi((y - ez.y).atan2(x - ez.x))
}

/// Relative bearing `xi = psi - lambda - pi`, wrapped to `(-pi, pi]`.
/// Zero when the aircraft points straight at the zone center.
#[inline]
pub fn relative_bearing(config: &Configuration, ez: &EngagementZone) -> f64 {
    wrap_pi(config.psi - line_of_sight(config.x, config.y, ez) - PI)
}

/// Cardioid radius at polar angle `theta` for the general `r_min` form:
///
/// `rho = ((cos xi + 1)/2 (r_max - r_min) + r_min) * (1 + sin(pi/2 - lambda + theta)) / 2`
pub fn cardioid_radius(theta: f64, lambda: f64, xi: f64, ez: &EngagementZone) -> f64 {
    let range = 0.5 * (xi.cos() + 1.0) * (ez.r_max - ez.r_min) + ez.r_min;
    range * 0.5 * (1.0 + (FRAC_PI_2 - lambda + theta).sin())
}

/// Cardioid radius with `r_min = 0`:
/// `rho = r_max/4 (cos xi + 1)(1 + sin(pi/2 - lambda + theta))`.
pub fn cardioid_radius_zero_min(theta: f64, lambda: f64, xi: f64, r_max: f64) -> f64 {
    0.25 * r_max * (xi.cos() + 1.0) * (1.0 + (FRAC_PI_2 - lambda + theta).sin())
}

/// Worst-case reach `rho_max(xi) = r_max/2 (cos xi + 1)`, the cardioid radius
/// along the line of sight.
pub fn max_range(xi: f64, ez: &EngagementZone) -> Result<f64, GeometryError> {
    if ez.r_min != 0.0 {
        return Err(GeometryError::NonzeroMinRange(ez.r_min));
    }
    Ok(max_range_unchecked(xi, ez.r_max))
}

#[inline]
pub(crate) fn max_range_unchecked(xi: f64, r_max: f64) -> f64 {
    0.5 * r_max * (xi.cos() + 1.0)
}

/// Cross-section of the lifted obstacle on the heading plane `psi`:
/// `rho(lambda; psi) = r_max/2 (1 - cos(psi - lambda))`.
pub fn obstacle_cross_section(lambda: f64, psi: f64, ez: &EngagementZone) -> Result<f64, GeometryError> {
    if ez.r_min != 0.0 {
        return Err(GeometryError::NonzeroMinRange(ez.r_min));
    }
    Ok(cross_section_unchecked(lambda, psi, ez.r_max))
}

#[inline]
fn cross_section_unchecked(lambda: f64, psi: f64, r_max: f64) -> f64 {
    0.5 * r_max * (1.0 - (psi - lambda).cos())
}

/// Whether `config` lies in the static lifted-space obstacle of `ez`,
/// `d <= rho(lambda; psi)`. Contact counts as engaged, as does sitting on
/// the center. Zones are assumed to have `r_min = 0`.
#[inline]
pub fn in_engagement(config: &Configuration, ez: &EngagementZone) -> bool {
    let dx = config.x - ez.x;
    let dy = config.y - ez.y;
    let d_sq = dx * dx + dy * dy;
    if d_sq > ez.r_max * ez.r_max {
        return false;
    }
    if d_sq == 0.0 {
        return true;
    }
    let lambda = dy.atan2(dx);
    d_sq.sqrt() <= cross_section_unchecked(lambda, config.psi, ez.r_max)
}

/// Dynamic-view constraint `g = rho_max(xi) - d`. The aircraft is engaged
/// when `g >= 0`.
pub fn constraint_value(config: &Configuration, ez: &EngagementZone) -> f64 {
    let d = ez.distance(config.x, config.y);
    if d == 0.0 {
        // line of sight undefined; any reach covers the center
        return max_range_unchecked(0.0, ez.r_max);
    }
    max_range_unchecked(relative_bearing(config, ez), ez.r_max) - d
}

/// Engagement test through the dynamic constraint.
pub fn engaged_dynamic(config: &Configuration, ez: &EngagementZone) -> bool {
    constraint_value(config, ez) >= 0.0
}

/// Inside the domain and outside every zone's lifted obstacle.
pub fn config_free(config: &Configuration, zones: &[EngagementZone], domain: &Domain) -> bool {
    domain.contains(config.x, config.y) && !zones.iter().any(|ez| in_engagement(config, ez))
}

/// Rounding allowance (LU) on the domain edge for points computed along a
/// path, so that arcs ending exactly on the boundary are not rejected.
pub const BOUNDARY_SLACK: f64 = 1e-9;

/// Bisection depth below a sample interval before an unresolved interval is
/// reported as a collision.
pub const MAX_REFINE_DEPTH: u32 = 24;

/// Lifted-obstacle margin `rho(lambda; psi) - d`; non-negative is engaged.
fn lifted_margin(config: &Configuration, ez: &EngagementZone, d: f64) -> f64 {
    let lambda = (config.y - ez.y).atan2(config.x - ez.x);
    cross_section_unchecked(lambda, config.psi, ez.r_max) - d
}

struct EdgeCheck<'a> {
    path: &'a DubinsPath,
    zones: &'a [EngagementZone],
    domain: &'a Domain,
    curvature: f64,
}

impl EdgeCheck<'_> {
    fn point_free(&self, c: &Configuration) -> bool {
        self.domain.contains_within(c.x, c.y, BOUNDARY_SLACK) && !self.zones.iter().any(|ez| in_engagement(c, ez))
    }

    /// Bound on how far the path between two samples can stray. Along the
    /// path `d` is 1-Lipschitz in arc length and the margin is Lipschitz with
    /// constant `1 + r_max / 2 * (curvature + 1 / d)`; the curve also stays
    /// within a sagitta of the chord.
    fn interval_certified(&self, c0: &Configuration, c1: &Configuration, half: f64) -> bool {
        if self.curvature * 2.0 * half >= PI {
            return false;
        }
        let bulge = 0.5 * self.curvature * half * half;
        let d = self.domain;
        let inside = c0.x.min(c1.x) - bulge >= d.xmin - BOUNDARY_SLACK
            && c0.x.max(c1.x) + bulge <= d.xmax + BOUNDARY_SLACK
            && c0.y.min(c1.y) - bulge >= d.ymin - BOUNDARY_SLACK
            && c0.y.max(c1.y) + bulge <= d.ymax + BOUNDARY_SLACK;
        inside
            && self.zones.iter().all(|ez| {
                let d0 = ez.distance(c0.x, c0.y);
                let d1 = ez.distance(c1.x, c1.y);
                let d_low = 0.5 * (d0 + d1) - half;
                if d_low > ez.r_max {
                    return true;
                }
                if d_low <= 0.0 {
                    return false;
                }
                let lipschitz = 1.0 + 0.5 * ez.r_max * (self.curvature + 1.0 / d_low);
                0.5 * (lifted_margin(c0, ez, d0) + lifted_margin(c1, ez, d1)) + lipschitz * half < 0.0
            })
    }

    fn interval_free(&self, s0: f64, c0: &Configuration, s1: f64, c1: &Configuration, depth: u32) -> bool {
        let half = 0.5 * (s1 - s0);
        if self.interval_certified(c0, c1, half) {
            return true;
        }
        if depth >= MAX_REFINE_DEPTH {
            return false;
        }
        let sm = s0 + half;
        let (x, y, psi) = self.path.raw_point_at(sm);
        let cm = Configuration::new(x, y, psi);
        self.point_free(&cm)
            && self.interval_free(s0, c0, sm, &cm, depth + 1)
            && self.interval_free(sm, &cm, s1, c1, depth + 1)
    }
}

/// Collision check of a whole Dubins path. Samples at spacing `check_step`
/// (the endpoint included) must be free, and every interval between them is
/// either certified free by a Lipschitz bound or bisected further. Contacts
/// closer than the bisection floor count as collisions.
pub fn segment_free(path: &DubinsPath, zones: &[EngagementZone], domain: &Domain, check_step: f64) -> bool {
    assert!(check_step > 0.0, "check_step must be positive");
    // cheap rejection of zones the path cannot reach
    let reach = path.total_length;
    let nearby: Vec<EngagementZone> = zones
        .iter()
        .filter(|ez| ez.distance(path.start.x, path.start.y) <= reach + ez.r_max)
        .copied()
        .collect();
    let check = EdgeCheck {
        path,
        zones: &nearby,
        domain,
        curvature: 1.0 / path.turn_radius,
    };
    let mut prev: Option<(f64, Configuration)> = None;
    path.for_each_sample(check_step, |s, c| {
        let ok = check.point_free(&c) && prev.is_none_or(|(s0, c0)| check.interval_free(s0, &c0, s, &c, 0));
        prev = Some((s, c));
        ok
    })
}

/// Write `(psi_plane, lambda, rho)` rows for the obstacle cross-section of a
/// zone on each heading plane in `psi_planes`, sweeping `lambda` over
/// `[0, 2pi)` in `samples` steps.
pub fn write_cross_sections<W: Write>(
    out: W,
    ez: &EngagementZone,
    psi_planes: &[f64],
    samples: usize,
) -> Result<(), Box<dyn std::error::Error>> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["psi_plane", "lambda", "rho"])?;
    for &psi in psi_planes {
        for k in 0..samples {
            let lambda = TAU * k as f64 / samples as f64;
            let rho = obstacle_cross_section(lambda, psi, ez)?;
            writer.write_record([psi.to_string(), lambda.to_string(), rho.to_string()])?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn ez() -> EngagementZone {
        EngagementZone::new(0.5, 0.5, 0.15).unwrap()
    }

    #[test]
    fn line_of_sight_quadrants() {
        let z = ez();
        assert_eq!(line_of_sight(1.5, 0.5, &z), 0.0);
        assert!((line_of_sight(0.5, 1.5, &z) - FRAC_PI_2).abs() < 1e-15);
        assert!((line_of_sight(-0.5, -0.5, &z) - 5.0 * FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn relative_bearing_head_on_and_away() {
        let z = ez();
        assert!(relative_bearing(&Configuration::new(0.6, 0.5, PI), &z).abs() < 1e-15);
        assert!((relative_bearing(&Configuration::new(0.6, 0.5, 0.0), &z) - PI).abs() < 1e-15);
        // psi = pi/4, lambda = pi/2
        let xi = relative_bearing(&Configuration::new(0.5, 0.6, FRAC_PI_4), &z);
        assert!((xi - 0.75 * PI).abs() < 1e-12);
    }

    #[test]
    fn cardioid_special_cases() {
        let z = EngagementZone::with_min_range(0.0, 0.0, 0.2, 0.2).unwrap();
        for xi in [0.0, 1.0, 2.5] {
            let rho = cardioid_radius(0.3, 1.1, xi, &z);
            let expected = 0.2 * 0.5 * (1.0 + (FRAC_PI_2 - 1.1 + 0.3).sin());
            assert!((rho - expected).abs() < 1e-15);
        }
        let z0 = EngagementZone::new(0.0, 0.0, 0.15).unwrap();
        assert!((cardioid_radius(0.7, 0.7, 0.0, &z0) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn max_range_values() {
        let z = ez();
        assert_eq!(max_range(0.0, &z).unwrap(), 0.15);
        assert!(max_range(PI, &z).unwrap().abs() < 1e-15);
        assert!((max_range(FRAC_PI_2, &z).unwrap() - 0.075).abs() < 1e-15);
        let bad = EngagementZone::with_min_range(0.0, 0.0, 0.2, 0.1).unwrap();
        assert_eq!(max_range(0.0, &bad), Err(GeometryError::NonzeroMinRange(0.1)));
        assert!(obstacle_cross_section(0.0, 0.0, &bad).is_err());
    }

    #[test]
    fn cross_section_values() {
        let z = ez();
        assert_eq!(obstacle_cross_section(1.0, 1.0, &z).unwrap(), 0.0);
        assert!((obstacle_cross_section(1.0, 1.0 + PI, &z).unwrap() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn engagement_examples() {
        let z = ez();
        assert!(in_engagement(&Configuration::new(0.6, 0.5, PI), &z));
        assert!(!in_engagement(&Configuration::new(0.6, 0.5, 0.0), &z));
        for k in 0..16 {
            let psi = k as f64 * TAU / 16.0;
            assert!(!in_engagement(&Configuration::new(0.66, 0.5, psi), &z));
        }
        // center is engaged at any heading
        assert!(in_engagement(&Configuration::new(0.5, 0.5, 0.3), &z));
        assert!(engaged_dynamic(&Configuration::new(0.5, 0.5, 0.3), &z));
    }

    #[test]
    fn config_free_domain() {
        let d = Domain::unit();
        assert!(config_free(&Configuration::new(0.2, 0.2, 0.0), &[], &d));
        assert!(!config_free(&Configuration::new(1.2, 0.2, 0.0), &[], &d));
        assert!(config_free(&Configuration::new(1.0, 0.0, 0.0), &[], &d));
    }

    #[test]
    fn zone_and_domain_validation() {
        assert!(EngagementZone::with_min_range(0.0, 0.0, 0.1, 0.2).is_err());
        assert!(EngagementZone::new(0.0, 0.0, -0.1).is_err());
        assert!(Domain::new(0.0, 0.0, 0.0, 1.0).is_err());
        let z: EngagementZone = serde_json::from_str(r#"{"x":0.1,"y":0.2,"r_max":0.15,"r_min":0}"#).unwrap();
        assert_eq!(z, EngagementZone::new(0.1, 0.2, 0.15).unwrap());
        assert!(serde_json::from_str::<EngagementZone>(r#"{"x":0.1,"y":0.2,"r_max":-1}"#).is_err());
    }

    #[test]
    fn zero_length_path_free() {
        let q = Configuration::new(0.2, 0.2, 0.0);
        let p = crate::dubins::shortest_path(q, q, 0.1);
        assert!(segment_free(&p, &[ez()], &Domain::unit(), 0.005));
    }

    #[test]
    fn head_on_transit_collides() {
        let p = crate::dubins::shortest_path(Configuration::new(0.1, 0.5, 0.0), Configuration::new(0.9, 0.5, 0.0), 0.1);
        assert!(!segment_free(&p, &[ez()], &Domain::unit(), 0.005));
        // the same transit away from the zone's reach is clear
        let q = crate::dubins::shortest_path(Configuration::new(0.1, 0.2, 0.0), Configuration::new(0.9, 0.2, 0.0), 0.1);
        assert!(segment_free(&q, &[ez()], &Domain::unit(), 0.005));
    }

    #[test]
    fn cross_section_csv() {
        let mut buf = Vec::new();
        write_cross_sections(&mut buf, &ez(), &[0.0, PI], 8).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 16);
        assert!(text.starts_with("psi_plane,lambda,rho"));
    }
}
