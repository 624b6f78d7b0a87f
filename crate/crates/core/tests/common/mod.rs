#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use ezplan::dubins::ControlInterval;
use ezplan::{Configuration, DubinsPath, VehicleParams};
use rand::Rng;

/// Number of first-turn angles scanned per word by the shooting oracle.
pub const SHOOTING_GRID: usize = 4096;

fn wrap(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

fn left_normal(h: f64) -> (f64, f64) {
    (-h.sin(), h.cos())
}

/// Position and heading after turning `angle` (rad) from `(x, y, h)` in
/// direction `sign` (+1 left, -1 right) on a circle of radius `r`.
fn turn(x: f64, y: f64, h: f64, sign: f64, angle: f64, r: f64) -> (f64, f64, f64) {
    let (nx, ny) = left_normal(h);
    let cx = x + sign * r * nx;
    let cy = y + sign * r * ny;
    let h2 = h + sign * angle;
    let (mx, my) = left_normal(h2);
    (cx - sign * r * mx, cy - sign * r * my, h2)
}

fn circle_center(q: &Configuration, sign: f64, r: f64) -> (f64, f64) {
    let (nx, ny) = left_normal(q.psi);
    (q.x + sign * r * nx, q.y + sign * r * ny)
}

/// Bisect a sign change of `f` on `[a, b]`.
fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// All roots of `f` on `[0, 2pi]` found by scanning and bisection.
fn roots(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let step = TAU / SHOOTING_GRID as f64;
    let mut out = Vec::new();
    let mut prev = f(0.0);
    if prev == 0.0 {
        out.push(0.0);
    }
    for k in 1..=SHOOTING_GRID {
        let t = k as f64 * step;
        let cur = f(t);
        if cur == 0.0 {
            out.push(t);
        } else if prev != 0.0 && (prev < 0.0) != (cur < 0.0) {
            out.push(bisect(&f, t - step, t));
        }
        prev = cur;
    }
    out
}

/// Shortest curve-straight-curve length found by shooting on the first
/// turn angle: after the first turn the heading line must be tangent to
/// the goal's turning circle with the right orientation.
fn csc_length(start: &Configuration, goal: &Configuration, r: f64, s1: f64, s2: f64) -> Option<f64> {
    let (c2x, c2y) = circle_center(goal, s2, r);
    let residual = |t: f64| {
        let (x, y, h) = turn(start.x, start.y, start.psi, s1, t, r);
        let (hx, hy) = (h.cos(), h.sin());
        hx * (c2y - y) - hy * (c2x - x) - s2 * r
    };
    roots(residual)
        .into_iter()
        .filter_map(|t| {
            let (x, y, h) = turn(start.x, start.y, start.psi, s1, t, r);
            let p = h.cos() * (c2x - x) + h.sin() * (c2y - y);
            if p < -1e-9 {
                return None;
            }
            let q = wrap(s2 * (goal.psi - h));
            let q = if TAU - q < 1e-9 { 0.0 } else { q };
            Some(r * (wrap(t) + q) + p.max(0.0))
        })
        .min_by(f64::total_cmp)
}

/// Shortest curve-curve-curve length: the middle circle must touch the
/// goal's circle, i.e. the centers are `2r` apart.
fn ccc_length(start: &Configuration, goal: &Configuration, r: f64, s1: f64) -> Option<f64> {
    let s2 = -s1;
    let (c3x, c3y) = circle_center(goal, s1, r);
    let middle = |t: f64| {
        let (x, y, h) = turn(start.x, start.y, start.psi, s1, t, r);
        let (nx, ny) = left_normal(h);
        (x, y, h, x + s2 * r * nx, y + s2 * r * ny)
    };
    let residual = |t: f64| {
        let (_, _, _, cx, cy) = middle(t);
        (c3x - cx).hypot(c3y - cy) - 2.0 * r
    };
    roots(residual)
        .into_iter()
        .map(|t| {
            let (x, y, h, cx, cy) = middle(t);
            let (mx, my) = (0.5 * (cx + c3x), 0.5 * (cy + c3y));
            let a0 = (y - cy).atan2(x - cx);
            let a1 = (my - cy).atan2(mx - cx);
            let p = wrap(s2 * (a1 - a0));
            let h2 = h + s2 * p;
            let q = wrap(s1 * (goal.psi - h2));
            let q = if TAU - q < 1e-9 { 0.0 } else { q };
            r * (wrap(t) + p + q)
        })
        .min_by(f64::total_cmp)
}

/// Brute-force shortest Dubins length over all six words.
pub fn shooting_shortest_length(start: &Configuration, goal: &Configuration, r: f64) -> f64 {
    let (l, rr) = (1.0, -1.0);
    [
        csc_length(start, goal, r, l, l),
        csc_length(start, goal, r, rr, rr),
        csc_length(start, goal, r, l, rr),
        csc_length(start, goal, r, rr, l),
        ccc_length(start, goal, r, rr),
        ccc_length(start, goal, r, l),
    ]
    .into_iter()
    .flatten()
    .min_by(f64::total_cmp)
    .expect("some word connects any pair")
}

/// Classical RK4 on the unicycle model, independent of the library's
/// integrator. `steps_per_tu` sets the resolution.
pub fn rk4_fly(start: &Configuration, v: f64, controls: &[ControlInterval], steps_per_tu: f64) -> Configuration {
    let f = |s: [f64; 3], u: f64| [v * s[2].cos(), v * s[2].sin(), u];
    let mut s = [start.x, start.y, start.psi];
    for c in controls {
        let n = (c.duration * steps_per_tu).ceil().max(1.0) as usize;
        let h = c.duration / n as f64;
        for _ in 0..n {
            let k1 = f(s, c.turn_rate);
            let k2 = f([s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1], s[2] + 0.5 * h * k1[2]], c.turn_rate);
            let k3 = f([s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1], s[2] + 0.5 * h * k2[2]], c.turn_rate);
            let k4 = f([s[0] + h * k3[0], s[1] + h * k3[1], s[2] + h * k3[2]], c.turn_rate);
            for i in 0..3 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    Configuration::new(s[0], s[1], s[2])
}

pub fn heading_error(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

pub fn random_config<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Configuration {
    Configuration::new(
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(-PI..PI),
    )
}

/// Fly `path` with its control profile and return the endpoint.
pub fn fly_path(path: &DubinsPath, vehicle: &VehicleParams) -> Configuration {
    rk4_fly(&path.start, vehicle.v, &path.control_profile(vehicle), 2000.0)
}

/// Plain lifted distance, written out independently of the library.
pub fn lifted(a: &Configuration, b: &Configuration, w: f64) -> f64 {
    let dpsi = heading_error(a.psi, b.psi);
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (w * dpsi).powi(2)).sqrt()
}
