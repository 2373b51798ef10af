//! Fourier and convolution algebra on finite cyclic groups, with constructive
//! classifiers for the operators that exchange convolution and pointwise
//! products.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`] and [`signal`]: the group algebra of `Z/n1 x ... x Z/nk`
//!   (convolution, pointwise product, DFT).
//! * [`operator`]: dense or black-box operators and the axiom checkers.
//! * [`conv`], [`exchange`], [`intertwiner`]: classifiers that recover a
//!   canonical Fourier form or report which step of the recovery failed.
//! * [`torus`]: kernel extraction and frequency recovery on a sampled circle.
//! * [`twisted`]: twisted convolution and the Weyl kernel calculus on a
//!   truncated grid.
//! * [`formats`]: the JSON file schemas.

pub mod conv;
pub mod error;
pub mod exchange;
pub mod formats;
pub mod group;
pub mod intertwiner;
pub mod lattice;
pub mod operator;
pub mod signal;
pub mod torus;
pub mod twisted;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use group::Group;
pub use operator::{AxiomReport, Operator, SampleMode, Witness};
pub use signal::Signal;

/// Absolute per-entry tolerance used when the caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `‖lhs - rhs‖_∞ / (1 + max(‖lhs‖_∞, ‖rhs‖_∞))`.
pub fn relative_residual(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    debug_assert_eq!(lhs.len(), rhs.len());
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (a, b) in lhs.iter().zip(rhs) {
        diff = diff.max((a - b).norm());
        scale = scale.max(a.norm()).max(b.norm());
    }
    diff / (1.0 + scale)
}

/// Largest entrywise modulus of the difference.
pub fn max_abs_diff(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    lhs.iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}
