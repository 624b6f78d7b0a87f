//! Dubins shortest paths between oriented planar states.
//!
//! A path is one of six three-segment words. Turn segments are stored as arc
//! angles (rad), straight segments as lengths (LU). Viewed in the lifted
//! `(x, y, psi)` space a turn is a helix of radius `turn_radius` whose heading
//! advances by `1 / turn_radius` per unit arc length, and a straight is a line
//! on a constant-heading plane.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{wrap_pi, wrap_two_pi};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DubinsError {
    #[error("arc length {s} outside path of length {length}")]
    ArcLengthOutOfRange { s: f64, length: f64 },
    #[error("invalid vehicle parameters: {0}")]
    InvalidVehicle(String),
    #[error("sampling step must be positive, got {0}")]
    InvalidStep(f64),
}

/// A point `(x, y, psi)` of the lifted configuration space.
///
/// `psi` is kept in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawConfiguration")]
pub struct Configuration {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

#[derive(Deserialize)]
struct RawConfiguration {
    x: f64,
    y: f64,
    psi: f64,
}

impl From<RawConfiguration> for Configuration {
    fn from(raw: RawConfiguration) -> Self {
        Configuration::new(raw.x, raw.y, raw.psi)
    }
}

impl Configuration {
    pub fn new(x: f64, y: f64, psi: f64) -> Self {
        Self {
            x,
            y,
            psi: wrap_two_pi(psi),
        }
    }

    pub fn planar_distance(&self, other: &Configuration) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.psi)
    }
}

/// Constant speed `v` and turn-rate bound `u_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVehicle")]
pub struct VehicleParams {
    pub v: f64,
    pub u_max: f64,
}

#[derive(Deserialize)]
struct RawVehicle {
    v: f64,
    u_max: f64,
}

impl TryFrom<RawVehicle> for VehicleParams {
    type Error = DubinsError;

    fn try_from(raw: RawVehicle) -> Result<Self, Self::Error> {
        VehicleParams::new(raw.v, raw.u_max)
    }
}

impl VehicleParams {
    pub fn new(v: f64, u_max: f64) -> Result<Self, DubinsError> {
        if !(v.is_finite() && v > 0.0) {
            return Err(DubinsError::InvalidVehicle(format!("speed must be positive, got {v}")));
        }
        if !(u_max.is_finite() && u_max > 0.0) {
            return Err(DubinsError::InvalidVehicle(format!(
                "turn-rate bound must be positive, got {u_max}"
            )));
        }
        Ok(Self { v, u_max })
    }

    /// Vehicle with speed `v` and minimum turn radius `turn_radius`.
    pub fn from_turn_radius(v: f64, turn_radius: f64) -> Result<Self, DubinsError> {
        Self::new(v, v / turn_radius)
    }

    /// `R = v / u_max`.
    #[inline]
    pub fn turn_radius(&self) -> f64 {
        self.v / self.u_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Left,
    Straight,
    Right,
}

impl SegmentKind {
    /// Sign of the turn rate: +1 left, -1 right, 0 straight.
    pub fn turn_sign(self) -> f64 {
        match self {
            SegmentKind::Left => 1.0,
            SegmentKind::Straight => 0.0,
            SegmentKind::Right => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Word {
    #[serde(rename = "LSL")]
    Lsl,
    #[serde(rename = "RSR")]
    Rsr,
    #[serde(rename = "LSR")]
    Lsr,
    #[serde(rename = "RSL")]
    Rsl,
    #[serde(rename = "RLR")]
    Rlr,
    #[serde(rename = "LRL")]
    Lrl,
}

impl Word {
    /// All words, in tie-breaking order.
    pub const ALL: [Word; 6] = [Word::Lsl, Word::Rsr, Word::Lsr, Word::Rsl, Word::Rlr, Word::Lrl];

    pub fn segments(self) -> [SegmentKind; 3] {
        use SegmentKind::*;
        match self {
            Word::Lsl => [Left, Straight, Left],
            Word::Rsr => [Right, Straight, Right],
            Word::Lsr => [Left, Straight, Right],
            Word::Rsl => [Right, Straight, Left],
            Word::Rlr => [Right, Left, Right],
            Word::Lrl => [Left, Right, Left],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Word::Lsl => "LSL",
            Word::Rsr => "RSR",
            Word::Lsr => "LSR",
            Word::Rsl => "RSL",
            Word::Rlr => "RLR",
            Word::Lrl => "LRL",
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A three-segment curvature-bounded path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DubinsPath {
    pub word: Word,
    /// Arc angle (rad) for turns, length (LU) for straights.
    pub params: [f64; 3],
    pub start: Configuration,
    pub turn_radius: f64,
    #[serde(rename = "length")]
    pub total_length: f64,
}

/// One piece of a piecewise-constant turn-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlInterval {
    /// TU
    pub duration: f64,
    /// rad/TU, positive is a left turn
    pub turn_rate: f64,
}

// Angles this close to a full turn are treated as zero. Closed-form solutions
// land on either side of 0 = 2pi through rounding.
const FULL_TURN_SNAP: f64 = 1e-9;

// Squared normalized straight length below which the two turn circles of an
// LSL or RSR word coincide and the straight's direction is rounding noise.
const COINCIDENT_CENTERS: f64 = 1e-15;

fn mod2pi(a: f64) -> f64 {
    let r = wrap_two_pi(a);
    if TAU - r < FULL_TURN_SNAP {
        0.0
    } else {
        r
    }
}

/// Normalized segment parameters `(t, p, q)` for one word, all in units of
/// the turn radius. `None` when the word has no solution.
fn solve_word(word: Word, n: &Normalized) -> Option<[f64; 3]> {
    let Normalized {
        alpha,
        beta,
        d,
        sa,
        ca,
        sb,
        cb,
        c_ab,
    } = *n;
    match word {
        Word::Lsl => {
            let tmp0 = d + sa - sb;
            let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
            if p_sq < 0.0 {
                return None;
            }
            if p_sq < COINCIDENT_CENTERS {
                return Some([mod2pi(beta - alpha), 0.0, 0.0]);
            }
            let tmp1 = (cb - ca).atan2(tmp0);
            Some([mod2pi(tmp1 - alpha), p_sq.sqrt(), mod2pi(beta - tmp1)])
        }
        Word::Rsr => {
            let tmp0 = d - sa + sb;
            let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
            if p_sq < 0.0 {
                return None;
            }
            if p_sq < COINCIDENT_CENTERS {
                return Some([mod2pi(alpha - beta), 0.0, 0.0]);
            }
            let tmp1 = (ca - cb).atan2(tmp0);
            Some([mod2pi(alpha - tmp1), p_sq.sqrt(), mod2pi(tmp1 - beta)])
        }
        Word::Lsr => {
            let p_sq = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
            if p_sq < 0.0 {
                return None;
            }
            let p = p_sq.sqrt();
            let tmp0 = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
            Some([mod2pi(tmp0 - alpha), p, mod2pi(tmp0 - beta)])
        }
        Word::Rsl => {
            let p_sq = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
            if p_sq < 0.0 {
                return None;
            }
            let p = p_sq.sqrt();
            let tmp0 = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
            Some([mod2pi(alpha - tmp0), p, mod2pi(beta - tmp0)])
        }
        Word::Rlr => {
            let tmp0 = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
            if tmp0.abs() > 1.0 {
                return None;
            }
            let phi = (ca - cb).atan2(d - sa + sb);
            let p = mod2pi(TAU - tmp0.acos());
            let t = mod2pi(alpha - phi + mod2pi(p / 2.0));
            Some([t, p, mod2pi(alpha - beta - t + mod2pi(p))])
        }
        Word::Lrl => {
            let tmp0 = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
            if tmp0.abs() > 1.0 {
                return None;
            }
            let phi = (ca - cb).atan2(d + sa - sb);
            let p = mod2pi(TAU - tmp0.acos());
            let t = mod2pi(-alpha - phi + p / 2.0);
            Some([t, p, mod2pi(beta - alpha - t + mod2pi(p))])
        }
    }
}

#[derive(Clone, Copy)]
struct Normalized {
    alpha: f64,
    beta: f64,
    d: f64,
    sa: f64,
    ca: f64,
    sb: f64,
    cb: f64,
    c_ab: f64,
}

fn normalize(start: &Configuration, goal: &Configuration, turn_radius: f64) -> Normalized {
    let dx = goal.x - start.x;
    let dy = goal.y - start.y;
    let dist = dx.hypot(dy);
    let theta = if dist > 0.0 { mod2pi(dy.atan2(dx)) } else { 0.0 };
    let alpha = mod2pi(start.psi - theta);
    let beta = mod2pi(goal.psi - theta);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    Normalized {
        alpha,
        beta,
        d: dist / turn_radius,
        sa,
        ca,
        sb,
        cb,
        c_ab: (alpha - beta).cos(),
    }
}

fn solve_path(start: Configuration, turn_radius: f64, word: Word, n: &Normalized) -> Option<DubinsPath> {
    let normalized = solve_word(word, n)?;
    let mut params = [0.0; 3];
    for (i, kind) in word.segments().iter().enumerate() {
        params[i] = match kind {
            SegmentKind::Straight => normalized[i] * turn_radius,
            _ => normalized[i],
        };
    }
    Some(DubinsPath::from_params(start, word, params, turn_radius))
}

fn is_identity(start: &Configuration, goal: &Configuration) -> bool {
    start.x == goal.x && start.y == goal.y && wrap_pi(start.psi - goal.psi) == 0.0
}

/// The solution for a single word, if that word can join `start` to `goal`.
pub fn word_path(
    start: Configuration,
    goal: Configuration,
    turn_radius: f64,
    word: Word,
) -> Option<DubinsPath> {
    assert!(turn_radius > 0.0, "turn radius must be positive");
    if is_identity(&start, &goal) {
        return match word.segments()[1] {
            SegmentKind::Straight => Some(DubinsPath::from_params(start, word, [0.0; 3], turn_radius)),
            _ => None,
        };
    }
    solve_path(start, turn_radius, word, &normalize(&start, &goal, turn_radius))
}

/// Shortest Dubins path from `start` to `goal`.
///
/// Evaluates all six words and keeps the shortest; equal lengths resolve to
/// the earlier word in [`Word::ALL`].
pub fn shortest_path(start: Configuration, goal: Configuration, turn_radius: f64) -> DubinsPath {
    assert!(turn_radius > 0.0, "turn radius must be positive");
    if is_identity(&start, &goal) {
        return DubinsPath::from_params(start, Word::Lsl, [0.0; 3], turn_radius);
    }
    let n = normalize(&start, &goal, turn_radius);
    let mut best: Option<DubinsPath> = None;
    for word in Word::ALL {
        if let Some(path) = solve_path(start, turn_radius, word, &n) {
            if best.is_none_or(|b| path.total_length < b.total_length) {
                best = Some(path);
            }
        }
    }
    // LSL/RSR/LSR/RSL cannot all be infeasible at once
    best.expect("no Dubins word admitted a solution")
}

/// Advance a raw (unwrapped heading) state along one segment.
#[inline]
fn advance(state: (f64, f64, f64), kind: SegmentKind, length: f64, r: f64) -> (f64, f64, f64) {
    let (x, y, psi) = state;
    match kind {
        SegmentKind::Straight => (x + length * psi.cos(), y + length * psi.sin(), psi),
        SegmentKind::Left => {
            let phi = length / r;
            let (s0, c0) = psi.sin_cos();
            let (s1, c1) = (psi + phi).sin_cos();
            (x + r * (s1 - s0), y + r * (c0 - c1), psi + phi)
        }
        SegmentKind::Right => {
            let phi = length / r;
            let (s0, c0) = psi.sin_cos();
            let (s1, c1) = (psi - phi).sin_cos();
            (x + r * (s0 - s1), y + r * (c1 - c0), psi - phi)
        }
    }
}

impl DubinsPath {
    pub fn shortest(start: Configuration, goal: Configuration, turn_radius: f64) -> Self {
        shortest_path(start, goal, turn_radius)
    }

    /// Build a path directly from its word and segment parameters.
    pub fn from_params(start: Configuration, word: Word, params: [f64; 3], turn_radius: f64) -> Self {
        let mut path = DubinsPath {
            word,
            params,
            start,
            turn_radius,
            total_length: 0.0,
        };
        path.total_length = path.segment_lengths().iter().sum();
        path
    }

    /// Arc length of each segment (LU).
    pub fn segment_lengths(&self) -> [f64; 3] {
        let kinds = self.word.segments();
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = match kinds[i] {
                SegmentKind::Straight => self.params[i],
                _ => self.params[i] * self.turn_radius,
            };
        }
        out
    }

    /// Transit time at speed `v`.
    pub fn duration(&self, v: f64) -> f64 {
        self.total_length / v
    }

    pub(crate) fn raw_point_at(&self, s: f64) -> (f64, f64, f64) {
        let kinds = self.word.segments();
        let lengths = self.segment_lengths();
        let mut state = (self.start.x, self.start.y, self.start.psi);
        let mut remaining = s;
        for i in 0..3 {
            if remaining <= lengths[i] || i == 2 {
                return advance(state, kinds[i], remaining.min(lengths[i]), self.turn_radius);
            }
            state = advance(state, kinds[i], lengths[i], self.turn_radius);
            remaining -= lengths[i];
        }
        unreachable!()
    }

    /// Configuration at arc length `s` along the path.
    pub fn point_at(&self, s: f64) -> Result<Configuration, DubinsError> {
        let slack = 1e-12 * self.total_length.max(1.0);
        if !(s >= -slack && s <= self.total_length + slack) {
            return Err(DubinsError::ArcLengthOutOfRange {
                s,
                length: self.total_length,
            });
        }
        let (x, y, psi) = self.raw_point_at(s.clamp(0.0, self.total_length));
        Ok(Configuration::new(x, y, psi))
    }

    /// Final configuration of the path.
    pub fn endpoint(&self) -> Configuration {
        let kinds = self.word.segments();
        let lengths = self.segment_lengths();
        let mut state = (self.start.x, self.start.y, self.start.psi);
        for i in 0..3 {
            state = advance(state, kinds[i], lengths[i], self.turn_radius);
        }
        Configuration::new(state.0, state.1, state.2)
    }

    /// Samples at arc lengths `0, step, 2 step, ...`, always ending with the
    /// exact endpoint.
    pub fn sample(&self, step: f64) -> Result<Vec<Configuration>, DubinsError> {
        if !(step > 0.0) {
            return Err(DubinsError::InvalidStep(step));
        }
        let mut out = Vec::with_capacity((self.total_length / step) as usize + 2);
        self.for_each_sample(step, |_, c| {
            out.push(c);
            true
        });
        Ok(out)
    }

    /// Visit `(arc length, sample)` in order until `f` returns false. Returns
    /// whether every visited sample was accepted. `step` must be positive.
    pub(crate) fn for_each_sample(&self, step: f64, mut f: impl FnMut(f64, Configuration) -> bool) -> bool {
        debug_assert!(step > 0.0);
        let eps = 1e-9 * step;
        let mut k = 0usize;
        loop {
            let s = k as f64 * step;
            if s >= self.total_length - eps {
                break;
            }
            let (x, y, psi) = self.raw_point_at(s);
            if !f(s, Configuration::new(x, y, psi)) {
                return false;
            }
            k += 1;
        }
        f(self.total_length, self.endpoint())
    }

    /// The first `length` LU of this path, same word.
    pub fn truncated(&self, length: f64) -> DubinsPath {
        if length >= self.total_length {
            return *self;
        }
        let lengths = self.segment_lengths();
        let kinds = self.word.segments();
        let mut remaining = length.max(0.0);
        let mut params = [0.0; 3];
        for i in 0..3 {
            let take = remaining.min(lengths[i]);
            params[i] = match kinds[i] {
                SegmentKind::Straight => take,
                _ => take / self.turn_radius,
            };
            remaining -= take;
        }
        DubinsPath::from_params(self.start, self.word, params, self.turn_radius)
    }

    /// Piecewise-constant turn-rate schedule that flies this path at speed
    /// `vehicle.v`. Turns map to `+-v / turn_radius`, which is `+-u_max` when
    /// the path was planned with the vehicle's own radius. Zero-length
    /// segments are omitted.
    pub fn control_profile(&self, vehicle: &VehicleParams) -> Vec<ControlInterval> {
        let rate = vehicle.v / self.turn_radius;
        self.word
            .segments()
            .iter()
            .zip(self.segment_lengths())
            .filter(|(_, len)| *len > 0.0)
            .map(|(kind, len)| ControlInterval {
                duration: len / vehicle.v,
                turn_rate: kind.turn_sign() * rate,
            })
            .collect()
    }
}
