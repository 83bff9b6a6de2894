use std::f64::consts::{PI, TAU};

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_to_pi(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    // rem_euclid can return TAU itself for tiny negative inputs
    if y <= -PI {
        y += TAU;
    }
    y
}

/// Reduce an angle to `[0, 2pi)`.
pub fn wrap_to_two_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minus_pi_maps_to_pi() {
        assert_eq!(wrap_to_pi(-PI), PI);
        assert_eq!(wrap_to_pi(PI), PI);
        assert_eq!(wrap_to_pi(3.0 * PI), PI);
    }

    #[test]
    fn two_pi_range() {
        assert_eq!(wrap_to_two_pi(TAU), 0.0);
        assert!((wrap_to_two_pi(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!(wrap_to_two_pi(-1e-300) < TAU);
    }
}
