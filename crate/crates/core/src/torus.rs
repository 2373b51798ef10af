//! Kernel operators on a sampled one-dimensional torus.
//!
//! Signals live on `M` equispaced points `x_i = i/M` of `[0, 1)` with cell
//! weight `1/M`; operators map them to the frequency window `{-N..N}` via
//! `T f(ξ) = (1/M) Σ_i f(x_i) h_ξ(x_i)`. When `T` turns convolution into
//! products each nonzero `h_ξ` is a character `e^{2iπ a_ξ x}`, and then
//! `T f(ξ) = f̂(φ(ξ))` with `φ(ξ) = -a_ξ`.
//!
//! The character equation is checked on every grid pair: `(i + j) mod M` is
//! the torus group law restricted to the grid, so no interpolation enters.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::error::Error;
use crate::group::Group;
use crate::lattice::principal_angle;
use crate::operator::{AxiomReport, Witness};
use crate::signal::{delta, Signal};

const SNAP_LIMIT: f64 = 0.25;
const BATTERY_SIZE: usize = 8;
const BATTERY_SEED: u64 = 0x7075;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    m: usize,
}

impl TorusGrid {
    pub fn new(m: usize) -> Result<Self, TorusError> {
        if m < 2 {
            return Err(TorusError::InvalidGrid(m));
        }
        Ok(Self { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 / self.m as f64
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn group(&self) -> Group {
        Group::cyclic(self.m).expect("m >= 2")
    }

    /// `e^{2iπ a x_i}`, with `a·i` reduced mod M first.
    pub fn character(&self, a: i64) -> Vec<Complex64> {
        let m = self.m as i64;
        (0..m)
            .map(|i| Complex64::from_polar(1.0, TAU * (a * i).rem_euclid(m) as f64 / m as f64))
            .collect()
    }

    /// `f̂(η) = (1/M) Σ f(x_i) e^{-2iπηx_i}`.
    pub fn fourier_coefficient(&self, f: &[Complex64], eta: i64) -> Complex64 {
        let chi = self.character(-eta);
        f.iter().zip(&chi).map(|(a, b)| a * b).sum::<Complex64>() * self.weight()
    }
}

/// Sampled kernels `h_ξ` for `ξ ∈ {-N..N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFamily {
    grid: TorusGrid,
    n: usize,
    kernels: Vec<Vec<Complex64>>,
}

impl KernelFamily {
    /// `kernels[r]` is `h_ξ` for `ξ = r - N`.
    pub fn new(
        grid: TorusGrid,
        n: usize,
        kernels: Vec<Vec<Complex64>>,
    ) -> Result<Self, TorusError> {
        check_shape(grid, n, &kernels)?;
        Ok(Self { grid, n, kernels })
    }

    pub fn from_fn(
        grid: TorusGrid,
        n: usize,
        f: impl Fn(i64) -> Vec<Complex64>,
    ) -> Result<Self, TorusError> {
        let kernels = window(n).map(f).collect();
        Self::new(grid, n, kernels)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn window(&self) -> usize {
        self.n
    }

    pub fn kernel(&self, xi: i64) -> Option<&[Complex64]> {
        row_of(self.n, xi).map(|r| self.kernels[r].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &[Complex64])> {
        window(self.n).zip(self.kernels.iter().map(Vec::as_slice))
    }
}

/// A `(2N+1) × M` table; row `r` is the frequency `ξ = r - N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusOperator {
    grid: TorusGrid,
    n: usize,
    rows: Vec<Vec<Complex64>>,
}

impl TorusOperator {
    pub fn new(grid: TorusGrid, n: usize, rows: Vec<Vec<Complex64>>) -> Result<Self, TorusError> {
        check_shape(grid, n, &rows)?;
        Ok(Self { grid, n, rows })
    }

    /// Quadrature against the given kernels.
    pub fn from_kernels(family: &KernelFamily) -> Self {
        let w = family.grid.weight();
        let rows = family
            .kernels
            .iter()
            .map(|h| h.iter().map(|v| v * w).collect())
            .collect();
        Self {
            grid: family.grid,
            n: family.n,
            rows,
        }
    }

    /// Fourier coefficients on `{-N..N}`: `h_ξ = e^{-2iπξx}`.
    pub fn fourier_coefficients(grid: TorusGrid, n: usize) -> Self {
        let family = KernelFamily::from_fn(grid, n, |xi| grid.character(-xi)).expect("shape");
        Self::from_kernels(&family)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn window(&self) -> usize {
        self.n
    }

    pub fn row(&self, xi: i64) -> Option<&[Complex64]> {
        row_of(self.n, xi).map(|r| self.rows[r].as_slice())
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    /// Values indexed like the rows: entry `r` is `T f(r - N)`.
    pub fn apply(&self, f: &[Complex64]) -> Result<Vec<Complex64>, TorusError> {
        if f.len() != self.grid.m {
            return Err(TorusError::DimensionMismatch {
                expected: self.grid.m,
                found: f.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().zip(f).map(|(k, v)| k * v).sum())
            .collect())
    }
}

fn window(n: usize) -> impl Iterator<Item = i64> {
    -(n as i64)..=n as i64
}

fn row_of(n: usize, xi: i64) -> Option<usize> {
    (xi.unsigned_abs() as usize <= n).then(|| (xi + n as i64) as usize)
}

fn check_shape(grid: TorusGrid, n: usize, rows: &[Vec<Complex64>]) -> Result<(), TorusError> {
    if rows.len() != 2 * n + 1 {
        return Err(TorusError::DimensionMismatch {
            expected: 2 * n + 1,
            found: rows.len(),
        });
    }
    for row in rows {
        if row.len() != grid.m {
            return Err(TorusError::DimensionMismatch {
                expected: grid.m,
                found: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(TorusError::Unbounded);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusClassification {
    pub support: Vec<i64>,
    /// `φ(ξ)`, so that `T f(ξ) = f̂(φ(ξ))` on the support.
    pub freq_map: BTreeMap<i64, i64>,
    pub residual: f64,
}

impl TorusClassification {
    /// The `a_ξ` with `h_ξ = e^{2iπ a_ξ x}`, i.e. `-φ(ξ)`.
    pub fn character_frequency(&self, xi: i64) -> Option<i64> {
        self.freq_map.get(&xi).map(|p| -p)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorusError {
    #[error(transparent)]
    Algebra(#[from] Error),
    #[error("torus grid needs at least 2 points, got {0}")]
    InvalidGrid(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("kernel has a non-finite sample")]
    Unbounded,
    #[error("kernel is not unimodular: ||h(x)| - 1| reaches {max_deviation:.3e}")]
    NotUnimodular { max_deviation: f64 },
    #[error("frequency estimate {estimate:.4} is {deviation:.3} away from the nearest integer {nearest}")]
    SnapFailure {
        estimate: f64,
        nearest: i64,
        deviation: f64,
    },
    #[error("kernel differs from the character of frequency {a} by {residual:.3e}")]
    CharacterMismatch { a: i64, residual: f64 },
    #[error("character equation fails (max residual {:.3e})", .0.max_residual)]
    NotCharacter(Box<AxiomReport>),
    #[error("frequency {xi}: {source}")]
    AtFrequency {
        xi: i64,
        #[source]
        source: Box<TorusError>,
    },
    #[error("T f(ξ) differs from the recovered form on test signals by {0:.3e}")]
    BatteryMismatch(f64),
}

/// Splits a table into its kernels `h_ξ = M · row_ξ`.
pub fn extract_kernels(t: &TorusOperator) -> KernelFamily {
    let m = t.grid.m as f64;
    KernelFamily {
        grid: t.grid,
        n: t.n,
        kernels: t
            .rows
            .iter()
            .map(|row| row.iter().map(|v| v * m).collect())
            .collect(),
    }
}

/// Checks `h(x_i + x_j) = h(x_i) h(x_j)` on all grid pairs (absolute residual).
pub fn check_character_equation(h: &[Complex64], tol: f64) -> Result<AxiomReport, TorusError> {
    let grid = TorusGrid::new(h.len())?;
    let m = grid.m;
    let mut max = 0.0f64;
    let mut witness = None;
    for j in 0..m {
        let mut row_max = 0.0f64;
        for i in 0..m {
            let d = (h[(i + j) % m] - h[i] * h[j]).norm();
            row_max = row_max.max(if d.is_nan() { f64::INFINITY } else { d });
        }
        max = max.max(row_max);
        if row_max > tol && witness.is_none() {
            let g = grid.group();
            let hs = Signal::new(g.clone(), h.to_vec())?;
            witness = Some(Witness {
                identity: format!("h(x + x_{j}) = h(x) h(x_{j})"),
                inputs: vec![hs.clone(), delta(&g, j)?],
                lhs: Signal::from_fn(&g, |i| h[(i + j) % m]),
                rhs: hs.scale(h[j]),
            });
        }
    }
    Ok(AxiomReport {
        passed: witness.is_none(),
        max_residual: max,
        tolerance: tol,
        witness,
        notes: vec!["every grid pair is checked; there are no null sets to skip".into()],
    })
}

/// Unsnapped frequency estimate from windowed sums of `h`.
///
/// With `D_k = Σ_{k≤i<k+w} h_i` and `h` a character of frequency `a`,
/// `D_k = D_0 e^{2iπak/M}`, so the unwrapped phase of `D_k` is linear in `k`.
/// The window `w ∈ 1..=M/2` maximizes `|D_0|`, which keeps the phases well
/// conditioned and averages sample noise. This is also the real-line variant:
/// the result is not snapped and carries no lattice guarantee.
pub fn estimate_frequency(h: &[Complex64], tol: f64) -> Result<f64, TorusError> {
    let grid = TorusGrid::new(h.len())?;
    let m = grid.m;
    let max_deviation = h
        .iter()
        .map(|v| (v.norm() - 1.0).abs())
        .fold(
            0.0,
            |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) },
        );
    if max_deviation > tol {
        return Err(TorusError::NotUnimodular { max_deviation });
    }
    // cum[i] = Σ_{t<i} h_t; windows do not wrap, so a non-periodic linear
    // phase (the real-line case) is still fitted exactly.
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(Complex64::new(0.0, 0.0));
    for (i, v) in h.iter().enumerate() {
        let next = cum[i] + v;
        cum.push(next);
    }
    let w = (1..=m / 2)
        .max_by(|&a, &b| cum[a].norm().total_cmp(&cum[b].norm()))
        .unwrap_or(1);
    let phases: Vec<f64> = (0..=m - w).map(|k| (cum[k + w] - cum[k]).arg()).collect();

    // Sequential unwrapping: each step is folded into (-π, π].
    let mut unwrapped = Vec::with_capacity(phases.len());
    let mut acc = phases[0];
    unwrapped.push(acc);
    for pair in phases.windows(2) {
        acc += principal_angle(pair[1] - pair[0]);
        unwrapped.push(acc);
    }

    // Least-squares slope of phase against k.
    let count = unwrapped.len() as f64;
    let k_mean = (count - 1.0) / 2.0;
    let p_mean = unwrapped.iter().sum::<f64>() / count;
    let (num, den) = unwrapped
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(num, den), (k, p)| {
            let dk = k as f64 - k_mean;
            (num + dk * (p - p_mean), den + dk * dk)
        });
    Ok(num / den * m as f64 / TAU)
}

/// Integer `a` with `h ≈ e^{2iπax}`, re-verified within `tol`.
pub fn recover_frequency(h: &[Complex64], tol: f64) -> Result<i64, TorusError> {
    let estimate = estimate_frequency(h, tol)?;
    let nearest = estimate.round();
    let deviation = (estimate - nearest).abs();
    let nearest = nearest as i64;
    if deviation > SNAP_LIMIT || deviation.is_nan() {
        return Err(TorusError::SnapFailure {
            estimate,
            nearest,
            deviation,
        });
    }
    let grid = TorusGrid::new(h.len())?;
    let residual = crate::max_abs_diff(h, &grid.character(nearest));
    if residual > tol {
        return Err(TorusError::CharacterMismatch {
            a: nearest,
            residual,
        });
    }
    Ok(nearest)
}

enum KernelKind {
    Vanishing(f64),
    Character(i64, f64),
}

fn analyse_kernel(h: &[Complex64], tol: f64) -> Result<KernelKind, TorusError> {
    let sup = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup <= tol {
        return Ok(KernelKind::Vanishing(sup));
    }
    let report = check_character_equation(h, tol)?;
    if !report.passed {
        return Err(TorusError::NotCharacter(Box::new(report)));
    }
    let a = recover_frequency(h, tol)?;
    let grid = TorusGrid::new(h.len())?;
    Ok(KernelKind::Character(
        a,
        crate::max_abs_diff(h, &grid.character(a)),
    ))
}

/// Recovers `(E, φ)` with `T f(ξ) = χ_E(ξ) f̂(φ(ξ))`.
///
/// Kernels are analysed independently; the first failing frequency (in
/// increasing order) is reported. The result is then checked on seeded
/// random signals.
pub fn classify_torus_operator(
    t: &TorusOperator,
    tol: f64,
) -> Result<TorusClassification, TorusError> {
    let family = extract_kernels(t);
    let kinds: Vec<(i64, Result<KernelKind, TorusError>)> = family
        .kernels
        .par_iter()
        .zip(window(family.n).collect::<Vec<_>>())
        .map(|(h, xi)| (xi, analyse_kernel(h, tol)))
        .collect();

    let mut support = Vec::new();
    let mut freq_map = BTreeMap::new();
    let mut residual = 0.0f64;
    for (xi, kind) in kinds {
        match kind.map_err(|e| TorusError::AtFrequency {
            xi,
            source: Box::new(e),
        })? {
            KernelKind::Vanishing(sup) => residual = residual.max(sup),
            KernelKind::Character(a, r) => {
                support.push(xi);
                freq_map.insert(xi, -a);
                residual = residual.max(r);
            }
        }
    }

    let grid = t.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED);
    let g = grid.group();
    let mut battery = 0.0f64;
    for _ in 0..BATTERY_SIZE {
        let f = Signal::random_unit_disc(&g, &mut rng);
        let got = t.apply(f.values())?;
        let expected: Vec<Complex64> = window(t.n)
            .map(|xi| match freq_map.get(&xi) {
                Some(&p) => grid.fourier_coefficient(f.values(), p),
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        battery = battery.max(crate::relative_residual(&got, &expected));
    }
    if battery > tol {
        return Err(TorusError::BatteryMismatch(battery));
    }
    Ok(TorusClassification {
        support,
        freq_map,
        residual,
    })
}

/// Grid convolution `(f*g)(x) = ∫ f(y) g(x - y) dy` with weight `1/M`.
pub fn torus_convolve(grid: TorusGrid, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let m = grid.m;
    (0..m)
        .map(|x| (0..m).map(|y| f[y] * g[(x + m - y) % m]).sum::<Complex64>() * grid.weight())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::unit_disc;

    fn grid(m: usize) -> TorusGrid {
        TorusGrid::new(m).unwrap()
    }

    fn noisy_character(grid: TorusGrid, a: i64, amp: f64, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        grid.character(a)
            .into_iter()
            .map(|v| v + unit_disc(&mut rng) * amp)
            .collect()
    }

    #[test]
    fn extract_examples() {
        let g = grid(32);
        let fc = TorusOperator::fourier_coefficients(g, 4);
        let fam = extract_kernels(&fc);
        for (xi, h) in fam.iter() {
            assert!(crate::max_abs_diff(h, &g.character(-xi)) < 1e-14);
        }
        let zero = TorusOperator::new(g, 2, vec![vec![Complex64::new(0.0, 0.0); 32]; 5]).unwrap();
        assert!(extract_kernels(&zero)
            .iter()
            .all(|(_, h)| h.iter().all(|v| v.norm() == 0.0)));

        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let kernels: Vec<Vec<Complex64>> = (0..7)
            .map(|_| (0..64).map(|_| unit_disc(&mut rng)).collect())
            .collect();
        let fam = KernelFamily::new(g, 3, kernels).unwrap();
        let back = extract_kernels(&TorusOperator::from_kernels(&fam));
        for ((_, a), (_, b)) in fam.iter().zip(back.iter()) {
            assert!(crate::max_abs_diff(a, b) < 1e-14);
        }
    }

    #[test]
    fn shape_errors() {
        let g = grid(8);
        assert!(matches!(
            TorusOperator::new(g, 1, vec![vec![Complex64::new(0.0, 0.0); 8]; 2]),
            Err(TorusError::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
        assert!(matches!(
            TorusOperator::new(g, 0, vec![vec![Complex64::new(0.0, 0.0); 7]]),
            Err(TorusError::DimensionMismatch {
                expected: 8,
                found: 7
            })
        ));
        assert_eq!(TorusGrid::new(1), Err(TorusError::InvalidGrid(1)));
    }

    #[test]
    fn character_equation_examples() {
        let g = grid(64);
        let r = check_character_equation(&g.character(3), 1e-12).unwrap();
        assert!(r.passed);
        assert!(r.max_residual < 1e-13);
        let r = check_character_equation(&[Complex64::new(0.0, 0.0); 64], 1e-12).unwrap();
        assert!(r.passed);
        let affine: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new(1.0 + g.point(i), 0.0))
            .collect();
        let r = check_character_equation(&affine, 1e-9).unwrap();
        assert!(!r.passed);
        // At i = j = M/4: h(1/2) = 1.5 while h(1/4)^2 = 1.5625.
        let d = (affine[32] - affine[16] * affine[16]).norm();
        assert!((d - 0.0625).abs() < 1e-12);
        assert!(r.max_residual >= d);
        assert!(r.witness.is_some());
    }

    #[test]
    fn recover_examples() {
        let g = grid(64);
        assert_eq!(recover_frequency(&g.character(3), 1e-9).unwrap(), 3);
        assert_eq!(recover_frequency(&g.character(0), 1e-9).unwrap(), 0);
        assert_eq!(recover_frequency(&g.character(-20), 1e-9).unwrap(), -20);
        let noisy = noisy_character(g, -7, 1e-3, 11);
        assert_eq!(recover_frequency(&noisy, 1e-2).unwrap(), -7);
        let half: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new(0.5, 0.0) * g.character(1)[i])
            .collect();
        assert!(matches!(
            recover_frequency(&half, 1e-9),
            Err(TorusError::NotUnimodular { .. })
        ));
    }

    #[test]
    fn real_line_variant_is_unsnapped() {
        let m = 128;
        let h: Vec<Complex64> = (0..m)
            .map(|i| Complex64::from_polar(1.0, TAU * 2.5 * i as f64 / m as f64))
            .collect();
        let est = estimate_frequency(&h, 1e-9).unwrap();
        assert!((est - 2.5).abs() < 1e-9, "{est}");
        assert!(matches!(
            recover_frequency(&h, 1e-9),
            Err(TorusError::SnapFailure { .. }) | Err(TorusError::CharacterMismatch { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let g = grid(64);
        let fc = TorusOperator::fourier_coefficients(g, 8);
        let cls = classify_torus_operator(&fc, 1e-9).unwrap();
        assert_eq!(cls.support, (-8..=8).collect::<Vec<_>>());
        for xi in -8..=8 {
            assert_eq!(cls.freq_map[&xi], xi);
            assert_eq!(cls.character_frequency(xi), Some(-xi));
        }

        let fam = KernelFamily::from_fn(g, 8, |xi| {
            if xi < 0 {
                vec![Complex64::new(0.0, 0.0); 64]
            } else {
                g.character(-xi)
            }
        })
        .unwrap();
        let cls = classify_torus_operator(&TorusOperator::from_kernels(&fam), 1e-9).unwrap();
        assert_eq!(cls.support, (0..=8).collect::<Vec<_>>());
        assert!(cls.support.iter().all(|&xi| cls.freq_map[&xi] == xi));

        let fam = KernelFamily::from_fn(g, 8, |xi| g.character(xi)).unwrap();
        let cls = classify_torus_operator(&TorusOperator::from_kernels(&fam), 1e-9).unwrap();
        assert!((-8..=8).all(|xi| cls.freq_map[&xi] == -xi));
    }

    #[test]
    fn classify_reports_offending_frequency() {
        let g = grid(32);
        let fam = KernelFamily::from_fn(g, 2, |xi| {
            if xi == 1 {
                (0..32)
                    .map(|i| Complex64::new(1.0 + g.point(i), 0.0))
                    .collect()
            } else {
                g.character(xi)
            }
        })
        .unwrap();
        match classify_torus_operator(&TorusOperator::from_kernels(&fam), 1e-9) {
            Err(TorusError::AtFrequency { xi: 1, source }) => {
                assert!(matches!(*source, TorusError::NotCharacter(_)))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quadrature_is_exact_below_nyquist() {
        let g = grid(64);
        // f = 2 e^{2iπ3x} - i e^{-2iπ5x} + 0.5
        let f: Vec<Complex64> = (0..64)
            .map(|i| g.character(3)[i] * 2.0 - Complex64::i() * g.character(-5)[i] + 0.5)
            .collect();
        let fc = TorusOperator::fourier_coefficients(g, 8);
        let out = fc.apply(&f).unwrap();
        for xi in -8i64..=8 {
            let exact = match xi {
                3 => Complex64::new(2.0, 0.0),
                -5 => -Complex64::i(),
                0 => Complex64::new(0.5, 0.0),
                _ => Complex64::new(0.0, 0.0),
            };
            assert!((out[(xi + 8) as usize] - exact).norm() <= 1e-10);
        }
    }

    #[test]
    fn convolution_becomes_product() {
        let g = grid(64);
        let fam = KernelFamily::from_fn(g, 6, |xi| g.character((3 * xi) % 7)).unwrap();
        let t = TorusOperator::from_kernels(&fam);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut band = || -> Vec<Complex64> {
            let coeffs: Vec<Complex64> = (0..31).map(|_| unit_disc(&mut rng)).collect();
            (0..64)
                .map(|i| {
                    (-15i64..=15)
                        .map(|a| coeffs[(a + 15) as usize] * g.character(a)[i])
                        .sum()
                })
                .collect()
        };
        let (f, h) = (band(), band());
        let lhs = t.apply(&torus_convolve(g, &f, &h)).unwrap();
        let tf = t.apply(&f).unwrap();
        let th = t.apply(&h).unwrap();
        let rhs: Vec<Complex64> = tf.iter().zip(&th).map(|(a, b)| a * b).collect();
        assert!(crate::max_abs_diff(&lhs, &rhs) <= 1e-9);
    }

    #[test]
    fn fubini_on_indicator_sets() {
        let g = grid(64);
        let h = g.character(5);
        let a: Vec<usize> = (3..20).collect();
        let b: Vec<usize> = [1, 7, 8, 40, 63].into();
        let w = g.weight();
        let double: Complex64 = a
            .iter()
            .flat_map(|&s| b.iter().map(move |&t| (s, t)))
            .map(|(s, t)| h[(s + t) % 64])
            .sum::<Complex64>()
            * w
            * w;
        let ia: Complex64 = a.iter().map(|&s| h[s]).sum::<Complex64>() * w;
        let ib: Complex64 = b.iter().map(|&t| h[t]).sum::<Complex64>() * w;
        assert!((double - ia * ib).norm() <= 1e-8);
    }
}
