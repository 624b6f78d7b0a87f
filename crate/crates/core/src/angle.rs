//! Angle wrapping helpers.

use std::f64::consts::{PI, TAU};

/// Reduce an angle to `[0, 2pi)`.
#[inline]
pub fn wrap_two_pi(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduce an angle to `(-pi, pi]`.
#[inline]
pub fn wrap_pi(a: f64) -> f64 {
    let r = wrap_two_pi(a);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraps_into_range() {
        for k in -20..20 {
            let a = 0.3 + k as f64 * TAU;
            assert!((wrap_two_pi(a) - 0.3).abs() < 1e-9);
        }
        assert_eq!(wrap_two_pi(-1e-20), 0.0);
        assert_eq!(wrap_pi(PI), PI);
        assert_eq!(wrap_pi(-PI), PI);
        assert!((wrap_pi(1.5 * PI) + 0.5 * PI).abs() < 1e-12);
    }
}
