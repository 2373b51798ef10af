//! Snapping phases to the lattice of n-th roots of unity.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// Result of projecting an angle onto the lattice `(2π/n)Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSnap {
    /// Lattice index in `0..n`.
    pub index: usize,
    /// Signed angular distance (radians) from the nearest lattice point.
    pub deviation: f64,
}

/// Nearest multiple of `2π/n` to `angle`, reduced mod n.
pub fn snap_angle(angle: f64, n: usize) -> LatticeSnap {
    let step = TAU / n as f64;
    let k = (angle / step).round();
    let deviation = angle - k * step;
    LatticeSnap {
        index: (k as i64).rem_euclid(n as i64) as usize,
        deviation,
    }
}

/// Angular acceptance window for lattice snapping at tolerance `tol`.
pub fn angle_window(tol: f64, n: usize) -> f64 {
    tol * n as f64 / PI
}

/// `e^{2iπ m / n}`, with `m` reduced mod n before forming the angle.
pub fn root_of_unity(m: i64, n: usize) -> Complex64 {
    let m = m.rem_euclid(n as i64) as f64;
    Complex64::from_polar(1.0, TAU * m / n as f64)
}

/// Number of n-th roots of unity within distance `radius` of `z`.
pub fn roots_within(z: Complex64, n: usize, radius: f64) -> usize {
    (0..n as i64)
        .filter(|&m| (z - root_of_unity(m, n)).norm() <= radius)
        .count()
}

/// Angle reduced to `(-π, π]`.
pub fn principal_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
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
    fn snaps_to_nearest_root() {
        let s = snap_angle(TAU * 3.0 / 8.0 + 1e-12, 8);
        assert_eq!(s.index, 3);
        assert!(s.deviation.abs() < 2e-12);
        assert_eq!(snap_angle(-TAU / 8.0, 8).index, 7);
        assert_eq!(snap_angle(PI - 1e-3, 2).index, 1);
    }

    #[test]
    fn roots_are_periodic() {
        assert!((root_of_unity(9, 8) - root_of_unity(1, 8)).norm() < 1e-15);
        assert!((root_of_unity(-1, 8) - root_of_unity(7, 8)).norm() < 1e-15);
        assert_eq!(roots_within(root_of_unity(5, 12), 12, 1e-8), 1);
        assert_eq!(roots_within(Complex64::new(0.0, 0.0), 12, 0.5), 0);
    }

    #[test]
    fn principal_range() {
        assert!((principal_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((principal_angle(-0.5) + 0.5).abs() < 1e-15);
    }
}
