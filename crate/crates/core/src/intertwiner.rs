//! Operators that intertwine translations with modulations on `Z/nZ`.
//!
//! With `τ_k a(j) = a(j+k)` and `M_k^φ a(j) = e^{kφ(j)} a(j)`, a nonzero linear
//! `T` satisfying `Tτ_k = M_k^φ T` and `T M_k^ψ = τ_k T` for all k has the
//! form `T(a)(ℓ) = c e^{2iπℓm₁/n} â(k₀ℓ + m₀)`. Phase functions here take
//! values in `iR` mod `2iπ`; they are stored by their imaginary part.
//!
//! Convention: the DFT satisfies `Fτ_k = M_k^φ F` with `φ(ℓ) = 2iπℓ/n`, not
//! `Fτ_{-k} = M_k^φ F`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::Error;
use crate::group::Group;
use crate::lattice::{angle_window, root_of_unity, snap_angle};
use crate::operator::{AxiomReport, Operator, ResidualTracker};
use crate::signal::{delta, Signal};

/// A purely imaginary function on `Z/n`, stored as angles in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    angles: Vec<f64>,
}

impl PhaseFunction {
    pub fn from_angles(angles: Vec<f64>) -> Result<Self, Error> {
        if let Some(i) = angles.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            angles: angles.into_iter().map(canonical_angle).collect(),
        })
    }

    /// Values given in turns, i.e. `φ(j) = 2iπ·turns[j]`.
    pub fn from_turns(turns: &[f64]) -> Result<Self, Error> {
        Self::from_angles(turns.iter().map(|t| t * TAU).collect())
    }

    /// `φ(j) = (2iπ/n)(slope·j + offset)`, reduced exactly in `Z/n`.
    pub fn affine(n: usize, slope: i64, offset: i64) -> Self {
        let angles = (0..n as i64)
            .map(|j| {
                let m = (slope * j + offset).rem_euclid(n as i64);
                TAU * m as f64 / n as f64
            })
            .collect();
        Self { angles }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn turns(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a / TAU).collect()
    }

    /// `e^{kφ(j)}`.
    pub fn exp(&self, j: usize, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, k as f64 * self.angles[j])
    }
}

fn canonical_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `τ_k a(j) = a(j+k mod n)`. Negative `k` shifts the other way.
pub fn translate(a: &Signal, k: i64) -> Signal {
    let n = a.len() as i64;
    Signal::from_fn(a.group(), |j| a.get((j as i64 + k).rem_euclid(n) as usize))
}

/// `M_k^φ a(j) = e^{kφ(j)} a(j)`.
pub fn modulate(a: &Signal, k: i64, phi: &PhaseFunction) -> Result<Signal, Error> {
    if phi.len() != a.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: phi.len(),
        });
    }
    Ok(Signal::from_fn(a.group(), |j| a.get(j) * phi.exp(j, k)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntertwinerClassification {
    pub n: usize,
    pub k0: usize,
    pub m0: usize,
    pub m1: usize,
    pub c: Complex64,
    pub residual: f64,
}

impl IntertwinerClassification {
    /// `φ(ℓ) = (2iπ/n)(k₀ℓ + m₀)`.
    pub fn phi(&self) -> PhaseFunction {
        PhaseFunction::affine(self.n, self.k0 as i64, self.m0 as i64)
    }

    /// `ψ(j) = (2iπ/n)(m₁ − k₀j)`.
    pub fn psi(&self) -> PhaseFunction {
        PhaseFunction::affine(self.n, -(self.k0 as i64), self.m1 as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntertwinerError {
    #[error(transparent)]
    Algebra(#[from] Error),
    #[error("classification requires a dense operator table")]
    NotDense,
    #[error("the scale c must be nonzero")]
    ZeroScale,
    #[error("T vanishes identically; the canonical form needs T != 0")]
    ZeroOperator,
    #[error("entry (column {j}, row {l}) vanishes; the canonical form has constant modulus")]
    EntryVanishes { j: usize, l: usize },
    #[error("phase for column {j} is off the 2π/n lattice by {deviation:.3e} rad")]
    PhaseOffLattice { j: usize, deviation: f64 },
    #[error("table differs from its reconstruction by {0:.3e}")]
    ReconstructionMismatch(f64),
}

/// Dense table with column j, row ℓ equal to `c e^{2iπ(ℓm₁ − j(k₀ℓ+m₀))/n}`.
pub fn construct_intertwiner(
    n: usize,
    k0: i64,
    m0: i64,
    m1: i64,
    c: Complex64,
) -> Result<Operator, IntertwinerError> {
    let group = Group::cyclic(n)?;
    if c.norm() == 0.0 || !c.is_finite() {
        return Err(IntertwinerError::ZeroScale);
    }
    let n_i = n as i64;
    Ok(Operator::from_entries(group, |l, j| {
        let (l, j) = (l as i64, j as i64);
        // Integer phase, reduced before touching floating point.
        let m = (l * m1 - j * (k0 * l + m0)).rem_euclid(n_i);
        c * root_of_unity(m, n)
    }))
}

pub fn construct_from(cls: &IntertwinerClassification) -> Result<Operator, IntertwinerError> {
    construct_intertwiner(cls.n, cls.k0 as i64, cls.m0 as i64, cls.m1 as i64, cls.c)
}

/// Checks `Tτ_k = M_k^φ T` and `T M_k^ψ = τ_k T` for every k on every `δ_j`.
pub fn check_intertwining(
    t: &Operator,
    phi: &PhaseFunction,
    psi: &PhaseFunction,
    tol: f64,
) -> Result<AxiomReport, Error> {
    let g = t.group().clone();
    let n = g.cyclic_order()?;
    for p in [phi, psi] {
        if p.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: p.len(),
            });
        }
    }
    let images: Vec<Signal> = (0..n)
        .map(|j| t.apply(&delta(&g, j)?))
        .collect::<Result<_, _>>()?;
    let mut tracker = ResidualTracker::new(tol);
    for k in 0..n as i64 {
        for (j, image) in images.iter().enumerate() {
            let d = delta(&g, j)?;
            let lhs = t.apply(&translate(&d, k))?;
            let rhs = modulate(image, k, phi)?;
            tracker.compare(
                &format!("T(tau_{k} a) = M_{k}^phi T(a)"),
                || vec![d.clone()],
                &lhs,
                &rhs,
            );
            let lhs = t.apply(&modulate(&d, k, psi)?)?;
            let rhs = translate(image, k);
            tracker.compare(
                &format!("T(M_{k}^psi a) = tau_{k} T(a)"),
                || vec![d.clone()],
                &lhs,
                &rhs,
            );
        }
    }
    Ok(tracker.finish())
}

/// Recovers `(k₀, m₀, m₁, c)` from a dense table.
///
/// Reads rows 0 and 1 and column 1, then verifies the whole table against
/// [`construct_intertwiner`] with tolerance `tol·max(1, |c|)`.
pub fn classify_intertwiner(
    t: &Operator,
    tol: f64,
) -> Result<IntertwinerClassification, IntertwinerError> {
    let n = t.group().cyclic_order()?;
    let table = t.table().ok_or(IntertwinerError::NotDense)?;
    if table.entries().iter().all(|v| v.norm() <= tol) {
        return Err(IntertwinerError::ZeroOperator);
    }
    for j in 0..n {
        if let Some(l) = table.column(j).iter().position(|v| v.norm() <= tol) {
            return Err(IntertwinerError::EntryVanishes { j, l });
        }
    }
    let c = table.entry(0, 0);
    let window = angle_window(tol, n);
    let snap = |j: usize, z: Complex64| {
        let s = snap_angle(z.arg(), n);
        if s.deviation.abs() > window {
            Err(IntertwinerError::PhaseOffLattice {
                j,
                deviation: s.deviation,
            })
        } else {
            Ok(s.index)
        }
    };
    let r1 = 1 % n;
    // e^{ψ(j)} = T(δ_j)(1) / T(δ_j)(0).
    let psi0 = snap(0, table.entry(r1, 0) / table.entry(0, 0))?;
    let psi1 = snap(r1, table.entry(r1, r1) / table.entry(0, r1))?;
    let m1 = psi0;
    let k0 = (psi0 + n - psi1) % n;
    let m0 = (n - snap(r1, table.entry(0, r1) / c)?) % n;

    let mut cls = IntertwinerClassification {
        n,
        k0,
        m0,
        m1,
        c,
        residual: 0.0,
    };
    let rebuilt = construct_from(&cls)?;
    let residual = table.distance(rebuilt.table().expect("construct is dense"));
    if residual > tol * c.norm().max(1.0) || residual.is_nan() {
        return Err(IntertwinerError::ReconstructionMismatch(residual));
    }
    cls.residual = residual;
    Ok(cls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{constant, dft};

    fn z(n: usize) -> Group {
        Group::cyclic(n).unwrap()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn translate_examples() {
        let g = z(4);
        let a = Signal::from_fn(&g, |j| Complex64::new(j as f64, 1.0));
        assert_eq!(translate(&a, 0), a);
        assert_eq!(translate(&a, 4), a);
        assert_eq!(translate(&delta(&g, 0).unwrap(), 1), delta(&g, 3).unwrap());
        assert_eq!(translate(&translate(&a, -1), 1), a);
    }

    #[test]
    fn modulate_examples() {
        let g = z(5);
        let a = Signal::from_fn(&g, |j| Complex64::new(1.0, j as f64));
        let phi = PhaseFunction::affine(5, 1, 0);
        assert_eq!(modulate(&a, 0, &phi).unwrap(), a);
        let zero = PhaseFunction::from_angles(vec![0.0; 5]).unwrap();
        assert_eq!(modulate(&a, 3, &zero).unwrap(), a);
        let row = modulate(&constant(&g, one()), 1, &phi).unwrap();
        for j in 0..5 {
            assert!((row.get(j) - root_of_unity(j as i64, 5)).norm() < 1e-15);
        }
        let short = PhaseFunction::affine(4, 1, 0);
        assert!(matches!(
            modulate(&a, 1, &short),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn phase_functions_are_canonical() {
        let p = PhaseFunction::from_angles(vec![-0.5, TAU, 7.0]).unwrap();
        for &a in p.angles() {
            assert!((0.0..TAU).contains(&a));
        }
        assert_eq!(PhaseFunction::affine(6, -1, 0).turns()[1], 5.0 / 6.0);
    }

    #[test]
    fn dft_parameters() {
        let d = Operator::dft_table(z(8));
        let built = construct_intertwiner(8, 1, 0, 0, one()).unwrap();
        assert!(built.table().unwrap().distance(d.table().unwrap()) < 1e-12);
        let cls = classify_intertwiner(&d, 1e-9).unwrap();
        assert_eq!((cls.k0, cls.m0, cls.m1), (1, 0, 0));
        assert!((cls.c - one()).norm() < 1e-15);
    }

    #[test]
    fn dft_relations_with_table_convention() {
        let n = 7;
        let d = Operator::dft_table(z(n));
        let phi = PhaseFunction::affine(n, 1, 0);
        let psi = PhaseFunction::affine(n, -1, 0);
        let r = check_intertwining(&d, &phi, &psi, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");

        let zero = PhaseFunction::affine(n, 0, 0);
        let r = check_intertwining(&d, &zero, &psi, 1e-9).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert!(w.identity.contains("tau_1"), "{}", w.identity);
    }

    #[test]
    fn zero_operator_satisfies_relations_trivially() {
        let t = Operator::zero(z(5));
        let p = PhaseFunction::affine(5, 2, 1);
        assert!(check_intertwining(&t, &p, &p, 1e-12).unwrap().passed);
        assert_eq!(
            classify_intertwiner(&t, 1e-9),
            Err(IntertwinerError::ZeroOperator)
        );
    }

    #[test]
    fn round_trip_on_z8() {
        let c = Complex64::new(2.0, -1.0);
        let t = construct_intertwiner(8, 3, 2, 5, c).unwrap();
        let cls = classify_intertwiner(&t, 1e-9).unwrap();
        assert_eq!((cls.k0, cls.m0, cls.m1), (3, 2, 5));
        assert!((cls.c - c).norm() <= 1e-9 * c.norm());
        let r = check_intertwining(&t, &cls.phi(), &cls.psi(), 1e-12).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn dft_then_modulation() {
        let n = 6;
        let t = construct_intertwiner(n, 1, 0, 1, one()).unwrap();
        let g = z(n);
        for j in 0..n {
            let a = delta(&g, j).unwrap();
            let hat = dft(&a);
            let expected = Signal::from_fn(&g, |l| root_of_unity(l as i64, n) * hat.get(l));
            let got = t.apply(&a).unwrap();
            assert!(crate::max_abs_diff(got.values(), expected.values()) < 1e-12);
        }
    }

    #[test]
    fn rank_one_table() {
        let n = 6;
        let t = construct_intertwiner(n, 0, 1, 0, one()).unwrap();
        let table = t.table().unwrap();
        for l in 1..n {
            assert_eq!(table.row(l), table.row(0));
        }
        for j in 0..n {
            assert!((table.entry(0, j) - root_of_unity(-(j as i64), n)).norm() < 1e-15);
        }
        let phi = PhaseFunction::affine(n, 0, 1);
        let psi = PhaseFunction::affine(n, 0, 0);
        assert!(check_intertwining(&t, &phi, &psi, 1e-12).unwrap().passed);
    }

    #[test]
    fn zeroed_entry_is_rejected() {
        let t = construct_intertwiner(5, 2, 1, 3, one()).unwrap();
        let table = t.table().unwrap();
        let broken = Operator::from_entries(z(5), |l, j| {
            if (l, j) == (3, 2) {
                Complex64::new(0.0, 0.0)
            } else {
                table.entry(l, j)
            }
        });
        assert_eq!(
            classify_intertwiner(&broken, 1e-9),
            Err(IntertwinerError::EntryVanishes { j: 2, l: 3 })
        );
    }

    #[test]
    fn off_lattice_and_mismatch() {
        let n = 8;
        let skew = Operator::from_entries(z(n), |l, _| Complex64::from_polar(1.0, 0.1 * l as f64));
        assert!(matches!(
            classify_intertwiner(&skew, 1e-9),
            Err(IntertwinerError::PhaseOffLattice { j: 0, .. })
        ));
        // Right rows 0 and 1, wrong row 2.
        let good = construct_intertwiner(n, 1, 0, 0, one()).unwrap();
        let gt = good.table().unwrap();
        let bad = Operator::from_entries(z(n), |l, j| {
            if l == 2 {
                -gt.entry(l, j)
            } else {
                gt.entry(l, j)
            }
        });
        assert!(matches!(
            classify_intertwiner(&bad, 1e-9),
            Err(IntertwinerError::ReconstructionMismatch(r)) if r > 1.0
        ));
    }

    #[test]
    fn construct_rejects_zero_scale() {
        assert_eq!(
            construct_intertwiner(4, 1, 0, 0, Complex64::new(0.0, 0.0)).err(),
            Some(IntertwinerError::ZeroScale)
        );
    }

    #[test]
    fn trivial_group() {
        let c = Complex64::new(0.0, 3.0);
        let t = construct_intertwiner(1, 0, 0, 0, c).unwrap();
        let cls = classify_intertwiner(&t, 1e-9).unwrap();
        assert_eq!((cls.k0, cls.m0, cls.m1), (0, 0, 0));
        assert_eq!(cls.c, c);
    }
}
