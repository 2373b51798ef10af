//! Twisted convolution and the Weyl representation on a truncated grid.
//!
//! Everything is one-dimensional in each variable: phase-space functions are
//! `S × S` tables over `x_i = -L + i·h`, `h = 2L/S`, and operators act on
//! functions sampled on the same axis. Integrals become left-point Riemann
//! sums with zero extension outside the window, so every identity here holds
//! only up to discretization and truncation error.
//!
//! The kernel of `ρ(f)` is `K_f(x, y) = ∫ f(y - x, q) e^{iπq(x+y)} dq`. Its
//! q-sum has phase step `πh(x+y)`; once `|x+y|·h ≥ 1` the samples no longer
//! resolve that phase and the sum is pure aliasing, so those entries are set
//! to zero.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwistedError {
    #[error("invalid plane grid: {0}")]
    InvalidGrid(String),
    #[error("grids differ: (L, S) = ({}, {}) vs ({}, {})", .left.0, .left.1, .right.0, .right.1)]
    GridMismatch {
        left: (f64, usize),
        right: (f64, usize),
    },
    #[error("expected {expected} samples, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("shift {0} is not a multiple of the grid step")]
    OffLatticeShift(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneGrid {
    half_width: f64,
    side: usize,
}

impl PlaneGrid {
    pub fn new(half_width: f64, side: usize) -> Result<Self, TwistedError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(TwistedError::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if side < 2 || !side.is_multiple_of(2) {
            return Err(TwistedError::InvalidGrid(format!(
                "side count must be even and at least 2, got {side}"
            )));
        }
        Ok(Self { half_width, side })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.side as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.side).map(|i| self.point(i)).collect()
    }

    /// Index of `x = 0`.
    pub fn origin(&self) -> usize {
        self.side / 2
    }

    /// Same window, twice the resolution; `refined().point(2i) == point(i)`.
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            side: 2 * self.side,
        }
    }

    fn ensure_same(&self, other: &PlaneGrid) -> Result<(), TwistedError> {
        if self == other {
            Ok(())
        } else {
            Err(TwistedError::GridMismatch {
                left: (self.half_width, self.side),
                right: (other.half_width, other.side),
            })
        }
    }

    /// Grid index of `x_i + shift`, if it stays in the window.
    fn offset(&self, i: usize, shift: isize) -> Option<usize> {
        let j = i as isize + shift;
        (0..self.side as isize).contains(&j).then_some(j as usize)
    }
}

/// `f(x_i, y_j)` stored row-major in x: `values[i·S + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceFunction {
    grid: PlaneGrid,
    values: Vec<Complex64>,
}

/// `K(x_i, y_j)` stored row-major in x.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKernel {
    grid: PlaneGrid,
    values: Vec<Complex64>,
}

macro_rules! table_impl {
    ($t:ident) => {
        impl $t {
            pub fn new(grid: PlaneGrid, values: Vec<Complex64>) -> Result<Self, TwistedError> {
                let expected = grid.side * grid.side;
                if values.len() != expected {
                    return Err(TwistedError::ShapeMismatch {
                        expected,
                        found: values.len(),
                    });
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(TwistedError::NonFinite(i));
                }
                Ok(Self { grid, values })
            }

            pub fn from_fn(grid: PlaneGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
                let s = grid.side;
                let values = (0..s * s)
                    .map(|k| f(grid.point(k / s), grid.point(k % s)))
                    .collect();
                Self { grid, values }
            }

            pub fn zeros(grid: PlaneGrid) -> Self {
                Self {
                    grid,
                    values: vec![Complex64::new(0.0, 0.0); grid.side * grid.side],
                }
            }

            pub fn grid(&self) -> PlaneGrid {
                self.grid
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn get(&self, i: usize, j: usize) -> Complex64 {
                self.values[i * self.grid.side + j]
            }

            pub fn scale(&self, c: Complex64) -> Self {
                Self {
                    grid: self.grid,
                    values: self.values.iter().map(|v| v * c).collect(),
                }
            }

            pub fn add(&self, other: &Self) -> Result<Self, TwistedError> {
                self.grid.ensure_same(&other.grid)?;
                Ok(Self {
                    grid: self.grid,
                    values: self
                        .values
                        .iter()
                        .zip(&other.values)
                        .map(|(a, b)| a + b)
                        .collect(),
                })
            }

            /// Values at the coarse points of a twice-refined table.
            pub fn restrict_from_refined(fine: &Self) -> Result<Self, TwistedError> {
                let s = fine.grid.side;
                if s % 4 != 0 {
                    return Err(TwistedError::InvalidGrid(format!(
                        "side {s} is not a refinement of an even grid"
                    )));
                }
                let grid = PlaneGrid::new(fine.grid.half_width, s / 2)?;
                let c = grid.side;
                let values = (0..c * c)
                    .map(|k| fine.get(2 * (k / c), 2 * (k % c)))
                    .collect();
                Ok(Self { grid, values })
            }
        }
    };
}

table_impl!(PhaseSpaceFunction);
table_impl!(OperatorKernel);

impl PhaseSpaceFunction {
    /// Largest magnitude on the outermost ring of samples.
    pub fn boundary_max(&self) -> f64 {
        let s = self.grid.side;
        (0..s * s)
            .filter(|k| {
                let (i, j) = (k / s, k % s);
                i == 0 || j == 0 || i == s - 1 || j == s - 1
            })
            .map(|k| self.values[k].norm())
            .fold(0.0, f64::max)
    }

    /// Unit mass at the origin: value `1/h²` at `(0, 0)`, zero elsewhere.
    pub fn point_mass(grid: PlaneGrid) -> Self {
        let mut f = Self::zeros(grid);
        let o = grid.origin();
        let h = grid.step();
        f.values[o * grid.side + o] = Complex64::new(1.0 / (h * h), 0.0);
        f
    }
}

impl OperatorKernel {
    /// `1/h` on the diagonal: the identity for [`compose_kernels`].
    pub fn identity(grid: PlaneGrid) -> Self {
        let mut k = Self::zeros(grid);
        for i in 0..grid.side {
            k.values[i * grid.side + i] = Complex64::new(1.0 / grid.step(), 0.0);
        }
        k
    }
}

/// `e^{-π((x - x0)² + (y - y0)²)}`.
pub fn gaussian(grid: PlaneGrid, x0: f64, y0: f64) -> PhaseSpaceFunction {
    PhaseSpaceFunction::from_fn(grid, |x, y| {
        Complex64::new((-PI * ((x - x0).powi(2) + (y - y0).powi(2))).exp(), 0.0)
    })
}

fn phase_table(grid: PlaneGrid, scale: f64) -> Vec<Complex64> {
    let x = grid.points();
    let s = grid.side;
    (0..s * s)
        .map(|k| Complex64::from_polar(1.0, scale * x[k / s] * x[k % s]))
        .collect()
}

/// `f♮g(x, y) = h² Σ_{s,t} f(x - s, y - t) g(s, t) e^{iπ(xt - ys)}`.
pub fn twisted_convolve(
    f: &PhaseSpaceFunction,
    g: &PhaseSpaceFunction,
) -> Result<PhaseSpaceFunction, TwistedError> {
    f.grid.ensure_same(&g.grid)?;
    let grid = f.grid;
    let s = grid.side;
    let half = grid.origin() as isize;
    let h2 = grid.step() * grid.step();
    // e[a·S + d] = e^{iπ x_a x_d}
    let e = phase_table(grid, PI);

    let rows: Vec<Vec<Complex64>> = (0..s)
        .into_par_iter()
        .map(|a| {
            // g(s_b, t_d) e^{iπ x_a t_d}
            let ga: Vec<Complex64> = (0..s * s).map(|k| g.values[k] * e[a * s + k % s]).collect();
            (0..s)
                .map(|c| {
                    let mut total = Complex64::new(0.0, 0.0);
                    for b in 0..s {
                        // x_a - s_b sits at index a - b + S/2.
                        let Some(u) = grid.offset(a, half - b as isize) else {
                            continue;
                        };
                        let frow = &f.values[u * s..(u + 1) * s];
                        let grow = &ga[b * s..(b + 1) * s];
                        let mut inner = Complex64::new(0.0, 0.0);
                        for (d, gv) in grow.iter().enumerate() {
                            if let Some(v) = grid.offset(c, half - d as isize) {
                                inner += frow[v] * gv;
                            }
                        }
                        total += inner * e[c * s + b].conj();
                    }
                    total * h2
                })
                .collect()
        })
        .collect();
    Ok(PhaseSpaceFunction {
        grid,
        values: rows.concat(),
    })
}

/// `ρ(p, q)φ(x) = e^{2iπqx + iπpq} φ(x + p)`, zero where `x + p` leaves the window.
pub fn rho_point(
    grid: PlaneGrid,
    p: f64,
    q: f64,
    phi: &[Complex64],
) -> Result<Vec<Complex64>, TwistedError> {
    if phi.len() != grid.side {
        return Err(TwistedError::ShapeMismatch {
            expected: grid.side,
            found: phi.len(),
        });
    }
    let steps = p / grid.step();
    let shift = steps.round();
    if !p.is_finite() || (steps - shift).abs() > 1e-9 {
        return Err(TwistedError::OffLatticeShift(p));
    }
    let shift = shift as isize;
    Ok((0..grid.side)
        .map(|i| match grid.offset(i, shift) {
            Some(j) => {
                Complex64::from_polar(1.0, 2.0 * PI * q * grid.point(i) + PI * p * q) * phi[j]
            }
            None => Complex64::new(0.0, 0.0),
        })
        .collect())
}

/// `K_f(x, y) = h Σ_q f(y - x, q) e^{iπq(x+y)}`, zero when `|x+y|·h ≥ 1`.
pub fn rho_kernel(f: &PhaseSpaceFunction) -> OperatorKernel {
    let grid = f.grid;
    let s = grid.side;
    let h = grid.step();
    let half = grid.origin() as isize;
    let x = grid.points();
    let rows: Vec<Vec<Complex64>> = (0..s)
        .into_par_iter()
        .map(|a| {
            (0..s)
                .map(|c| {
                    let sum = x[a] + x[c];
                    if sum.abs() * h >= 1.0 - 1e-12 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let Some(u) = grid.offset(c, half - a as isize) else {
                        return Complex64::new(0.0, 0.0);
                    };
                    let row = &f.values[u * s..(u + 1) * s];
                    let step = Complex64::from_polar(1.0, PI * h * sum);
                    let mut phase = Complex64::from_polar(1.0, PI * x[0] * sum);
                    let mut total = Complex64::new(0.0, 0.0);
                    for (d, v) in row.iter().enumerate() {
                        if d % 32 == 0 {
                            // Re-anchor the running phase to bound drift.
                            phase = Complex64::from_polar(1.0, PI * x[d] * sum);
                        }
                        total += v * phase;
                        phase *= step;
                    }
                    total * h
                })
                .collect()
        })
        .collect();
    OperatorKernel {
        grid,
        values: rows.concat(),
    }
}

/// `(K1∘K2)(x, y) = h Σ_z K1(x, z) K2(z, y)`.
pub fn compose_kernels(
    k1: &OperatorKernel,
    k2: &OperatorKernel,
) -> Result<OperatorKernel, TwistedError> {
    k1.grid.ensure_same(&k2.grid)?;
    let grid = k1.grid;
    let s = grid.side;
    let h = grid.step();
    let rows: Vec<Vec<Complex64>> = (0..s)
        .into_par_iter()
        .map(|a| {
            let mut out = vec![Complex64::new(0.0, 0.0); s];
            for z in 0..s {
                let w = k1.values[a * s + z];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, v) in out.iter_mut().zip(&k2.values[z * s..(z + 1) * s]) {
                    *o += w * v;
                }
            }
            out.into_iter().map(|v| v * h).collect()
        })
        .collect();
    Ok(OperatorKernel {
        grid,
        values: rows.concat(),
    })
}

/// `‖a - b‖₂ / ‖b‖₂`, falling back to `‖a‖₂` and then to 0 when norms vanish.
pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let nb = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let na = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let denom = if nb > 0.0 { nb } else { na };
    if denom > 0.0 {
        diff / denom
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomomorphismReport {
    /// `‖K_{f♮g} - K_f∘K_g‖₂ / ‖K_f∘K_g‖₂`.
    pub relative_error: f64,
    /// Boundary-ring maxima of `f` and `g`; large values mean truncation matters.
    pub boundary_f: f64,
    pub boundary_g: f64,
}

/// Measures how far `ρ(f♮g) = ρ(f)ρ(g)` is from holding on the grid.
pub fn verify_rho_homomorphism(
    f: &PhaseSpaceFunction,
    g: &PhaseSpaceFunction,
) -> Result<HomomorphismReport, TwistedError> {
    let lhs = rho_kernel(&twisted_convolve(f, g)?);
    let rhs = compose_kernels(&rho_kernel(f), &rho_kernel(g))?;
    Ok(HomomorphismReport {
        relative_error: relative_l2(&lhs.values, &rhs.values),
        boundary_f: f.boundary_max(),
        boundary_g: g.boundary_max(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(s: usize) -> PlaneGrid {
        PlaneGrid::new(8.0, s).unwrap()
    }

    fn l2(a: &[Complex64]) -> f64 {
        a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn grid_layout() {
        let g = grid(64);
        assert_eq!(g.step(), 0.25);
        assert_eq!(g.point(0), -8.0);
        assert_eq!(g.point(g.origin()), 0.0);
        assert_eq!(g.refined().point(10), g.point(5));
        assert!(PlaneGrid::new(8.0, 63).is_err());
        assert!(PlaneGrid::new(0.0, 64).is_err());
    }

    #[test]
    fn convolve_trivial_cases() {
        let g = grid(16);
        let f = gaussian(g, 0.5, -1.0);
        let zero = twisted_convolve(&f, &PhaseSpaceFunction::zeros(g)).unwrap();
        assert!(zero.values().iter().all(|v| v.norm() == 0.0));
        let sifted = twisted_convolve(&f, &PhaseSpaceFunction::point_mass(g)).unwrap();
        assert!(crate::max_abs_diff(sifted.values(), f.values()) < 1e-14);
        assert!(matches!(
            twisted_convolve(&f, &PhaseSpaceFunction::zeros(grid(8))),
            Err(TwistedError::GridMismatch { .. })
        ));
    }

    #[test]
    fn convolve_matches_refined_oracle() {
        let coarse = grid(64);
        let f = gaussian(coarse, 0.0, 0.0);
        let out = twisted_convolve(&f, &f).unwrap();
        let fine = coarse.refined();
        let ff = gaussian(fine, 0.0, 0.0);
        let oracle =
            PhaseSpaceFunction::restrict_from_refined(&twisted_convolve(&ff, &ff).unwrap())
                .unwrap();
        let r = relative_l2(out.values(), oracle.values());
        assert!(r <= 1e-3, "{r}");
    }

    #[test]
    fn kernel_examples() {
        let g = grid(64);
        let zero = rho_kernel(&PhaseSpaceFunction::zeros(g));
        assert!(zero.values().iter().all(|v| v.norm() == 0.0));

        // A point mass gives 1/h on the diagonal, inside the resolved band.
        let k = rho_kernel(&PhaseSpaceFunction::point_mass(g));
        let h = g.step();
        for i in 0..64 {
            for j in 0..64 {
                let v = k.get(i, j);
                if i == j && (2.0 * g.point(i)).abs() * h < 1.0 {
                    assert!((v - 1.0 / h).norm() < 1e-12);
                } else {
                    assert_eq!(v.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn kernel_matches_refined_oracle() {
        let coarse = grid(64);
        let f = gaussian(coarse, 0.3, -0.2);
        let k = rho_kernel(&f);
        let kf = rho_kernel(&gaussian(coarse.refined(), 0.3, -0.2));
        let oracle = OperatorKernel::restrict_from_refined(&kf).unwrap();
        let r = relative_l2(k.values(), oracle.values());
        assert!(r <= 1e-3, "{r}");
        // Closed form for the centred Gaussian: e^{-π(y-x)²} e^{-π(x+y)²/4}.
        let k0 = rho_kernel(&gaussian(coarse, 0.0, 0.0));
        let exact = OperatorKernel::from_fn(coarse, |x, y| {
            Complex64::new(
                (-PI * (y - x).powi(2) - PI * (x + y).powi(2) / 4.0).exp(),
                0.0,
            )
        });
        assert!(relative_l2(k0.values(), exact.values()) <= 1e-5);
    }

    #[test]
    fn kernel_is_linear() {
        let g = grid(32);
        let f = gaussian(g, 1.0, 0.5);
        let h = gaussian(g, -0.5, 0.25);
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.7));
        let lhs = rho_kernel(&f.scale(a).add(&h.scale(b)).unwrap());
        let rhs = rho_kernel(&f)
            .scale(a)
            .add(&rho_kernel(&h).scale(b))
            .unwrap();
        assert!(crate::max_abs_diff(lhs.values(), rhs.values()) <= 1e-12);
    }

    #[test]
    fn compose_examples() {
        let g = grid(16);
        let k = rho_kernel(&gaussian(g, 0.0, 1.0));
        let zero = compose_kernels(&k, &OperatorKernel::zeros(g)).unwrap();
        assert!(zero.values().iter().all(|v| v.norm() == 0.0));
        let id = compose_kernels(&OperatorKernel::identity(g), &k).unwrap();
        assert!(crate::max_abs_diff(id.values(), k.values()) < 1e-14);
    }

    #[test]
    fn compose_is_associative() {
        let g = grid(24);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut random_kernel = || {
            let noise: Vec<Complex64> = (0..24 * 24)
                .map(|_| crate::signal::unit_disc(&mut rng))
                .collect();
            let decay = OperatorKernel::from_fn(g, |x, y| {
                Complex64::new((-(x * x + y * y) / 4.0).exp(), 0.0)
            });
            let values = noise
                .iter()
                .zip(decay.values())
                .map(|(a, b)| a * b)
                .collect();
            OperatorKernel::new(g, values).unwrap()
        };
        let (a, b, c) = (random_kernel(), random_kernel(), random_kernel());
        let left = compose_kernels(&compose_kernels(&a, &b).unwrap(), &c).unwrap();
        let right = compose_kernels(&a, &compose_kernels(&b, &c).unwrap()).unwrap();
        assert!(relative_l2(left.values(), right.values()) <= 1e-10);
    }

    #[test]
    fn twisted_product_is_not_commutative() {
        let g = grid(32);
        let f = gaussian(g, 1.0, 0.0);
        let h = gaussian(g, 0.0, 1.0);
        let fh = twisted_convolve(&f, &h).unwrap();
        let hf = twisted_convolve(&h, &f).unwrap();
        let gap = relative_l2(fh.values(), hf.values());
        assert!(gap > 1e-2, "{gap}");
        assert!(l2(fh.values()) > 0.0);
    }

    #[test]
    fn rho_point_examples() {
        let g = grid(32);
        let phi: Vec<Complex64> = g
            .points()
            .iter()
            .map(|&x| Complex64::new((-x * x).exp(), x))
            .collect();
        assert_eq!(rho_point(g, 0.0, 0.0, &phi).unwrap(), phi);
        let q = 0.3;
        let m = rho_point(g, 0.0, q, &phi).unwrap();
        for (i, v) in m.iter().enumerate() {
            let expected = Complex64::from_polar(1.0, 2.0 * PI * q * g.point(i)) * phi[i];
            assert!((v - expected).norm() < 1e-14);
        }
        assert!(matches!(
            rho_point(g, 0.1, 0.0, &phi),
            Err(TwistedError::OffLatticeShift(_))
        ));

        // ρ(p,q)ρ(-p,-q): the phases e^{2iπqx + iπpq} and e^{-2iπq(x+p) + iπpq}
        // cancel, so the result is φ wherever x + p stays in the window.
        let (p, q) = (1.5, 0.7);
        let back = rho_point(g, p, q, &rho_point(g, -p, -q, &phi).unwrap()).unwrap();
        let shift = (p / g.step()) as usize;
        for i in 0..32 - shift {
            assert!((back[i] - phi[i]).norm() < 1e-13);
            assert!((back[i].norm() - phi[i].norm()).abs() < 1e-13);
        }
    }

    #[test]
    fn weyl_commutation() {
        let g = grid(32);
        // Supported well inside the window so that no shift below falls off it.
        let phi: Vec<Complex64> = g
            .points()
            .iter()
            .map(|&x| {
                if x.abs() < 4.0 {
                    Complex64::new((-x * x / 3.0).exp(), 0.1 * x)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let (p, p2, q) = (1.0, -0.5, 0.35);
        let a = rho_point(g, p, 0.0, &rho_point(g, p2, 0.0, &phi).unwrap()).unwrap();
        let b = rho_point(g, p2, 0.0, &rho_point(g, p, 0.0, &phi).unwrap()).unwrap();
        assert_eq!(a, b);
        let mq_tp = rho_point(g, 0.0, q, &rho_point(g, p, 0.0, &phi).unwrap()).unwrap();
        let tp_mq = rho_point(g, p, 0.0, &rho_point(g, 0.0, q, &phi).unwrap()).unwrap();
        let factor = Complex64::from_polar(1.0, 2.0 * PI * p * q);
        for (x, y) in mq_tp.iter().zip(&tp_mq) {
            assert!((y - x * factor).norm() < 1e-13);
        }
    }

    #[test]
    fn homomorphism_trivial_and_shape() {
        let g = grid(16);
        let z = PhaseSpaceFunction::zeros(g);
        let r = verify_rho_homomorphism(&z, &z).unwrap();
        assert_eq!(r.relative_error, 0.0);
        assert_eq!(r.boundary_f, 0.0);
        let f = gaussian(grid(32), 0.0, 0.0);
        let r = verify_rho_homomorphism(&f, &f).unwrap();
        assert!(r.boundary_f < 1e-70);
    }
}
