//! Maps on `Z/nZ` that preserve both products.
//!
//! A bijection with `T(a.b) = T(a).T(b)` and `T(a*b) = T(a)*T(b)` (and continuous
//! on constants) is a reindexing `T(a)(ηj) = a(j)` by a unit `η`, optionally
//! followed by complex conjugation. [`classify_exchange`] walks through the
//! recovery one probe at a time and stops at the first probe that contradicts
//! the canonical form. Errors carry the step they belong to:
//!
//! * step 1, fixed points: `T(0) = 0` and `T(δ_0) = δ_0`;
//! * step 2, Dirac images: `T(δ_j) = δ_{σ(j)}`, `σ(j) = jσ(1)`, `gcd(σ(1), n) = 1`;
//! * step 3, constants: `T(c·1) = β(c)·1` with `β(c) ∈ {c, c̄}` (the α = 1
//!   consequence), which also covers `T(1) = 1`;
//! * step 4, a seeded sweep over random signals.
//!
//! Execution order is `T(0)`, then constants, then Dirac masses, then the
//! sweep, so that a rescaling such as `a ↦ 2a` is reported through `β` rather
//! than through `T(δ_0)`.
//!
//! Passing is evidence, not proof: bijectivity and continuity cannot be
//! established from finitely many probes.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::Error;
use crate::group::{gcd, Group};
use crate::operator::{compose, AxiomReport, Operator, ResidualTracker, Witness};
use crate::relative_residual;
use crate::signal::{constant, delta, expectation, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeVariant {
    /// `T(a)(ηj) = a(j)` or its conjugate.
    Direct,
    /// `T(a)(ηj) = â(j)` or its conjugate.
    Fourier,
}

impl ExchangeVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Fourier => "fourier",
        }
    }
}

/// Sampled values of `β(c) = 𝔼[T((c/n)·1)]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BetaProbe {
    pub samples: Vec<(Complex64, Complex64)>,
}

impl BetaProbe {
    pub fn get(&self, c: Complex64) -> Option<Complex64> {
        self.samples
            .iter()
            .find(|(probe, _)| (probe - c).norm() <= 1e-15 * (1.0 + c.norm()))
            .map(|&(_, b)| b)
    }

    /// Largest `|β(c₁c₂) - β(c₁)β(c₂)| / (1 + |c₁c₂|)` over sampled pairs whose
    /// product was also sampled.
    pub fn multiplicativity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for &(c1, b1) in &self.samples {
            for &(c2, b2) in &self.samples {
                if let Some(b12) = self.get(c1 * c2) {
                    worst = worst.max((b12 - b1 * b2).norm() / (1.0 + (c1 * c2).norm()));
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeClassification {
    pub n: usize,
    pub eta: usize,
    pub conjugate: bool,
    pub variant: ExchangeVariant,
    pub residual: f64,
    pub beta: BetaProbe,
    /// Hypotheses that were probed versus merely assumed.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExchangeError {
    #[error(transparent)]
    Algebra(#[from] Error),
    #[error("need n >= 2 for a unit eta in 1..n-1, got n = {0}")]
    TrivialGroup(usize),
    #[error("step 1 (fixed points): T({element}) != {element} (residual {residual:.3e})")]
    FixedPointViolation { element: String, residual: f64 },
    #[error("step 2 (Dirac images): T(delta_{j}) is not a Dirac mass")]
    DeltaImageNotDelta { j: usize },
    #[error("step 2 (Dirac images): sigma({j}) = {found}, expected j*sigma(1) = {expected}")]
    NotAdditive {
        j: usize,
        expected: usize,
        found: usize,
    },
    #[error("step 2 (Bezout): sigma(1) = {eta} shares a divisor with n")]
    EtaNotCoprime { eta: usize },
    #[error("step 3 (alpha = 1): beta({c}) = {beta} is neither c nor conj(c)")]
    BetaNotIdentityOrConjugation { c: Complex64, beta: Complex64 },
    #[error("step 4 (final sweep): {} fails (residual {:.3e})", .0.identity, relative_residual(.0.lhs.values(), .0.rhs.values()))]
    FinalSweepViolation(Box<Witness>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeOptions {
    pub tol: f64,
    pub seed: u64,
    pub sweep_count: usize,
}

impl Default for ExchangeOptions {
    fn default() -> Self {
        Self {
            tol: crate::DEFAULT_TOL,
            seed: 0,
            sweep_count: 32,
        }
    }
}

/// Real probes for the α-test: 2, 3 and 1 + t for t ∈ {0.5, 1, 2}, plus 1.
const ALPHA_PROBES: [f64; 4] = [1.0, 2.0, 3.0, 1.5];
/// Non-real probes; their images decide and then confirm the conjugation flag.
const PHASE_PROBES: [(f64, f64); 5] = [
    (0.0, 1.0),
    (-1.0, 0.0),
    (0.5, -0.5),
    (2.0, -1.0),
    (-0.3, 1.7),
];

pub fn classify_exchange(t: &Operator, tol: f64) -> Result<ExchangeClassification, ExchangeError> {
    classify_exchange_with(
        t,
        &ExchangeOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn classify_exchange_with(
    t: &Operator,
    opts: &ExchangeOptions,
) -> Result<ExchangeClassification, ExchangeError> {
    let group = t.group().clone();
    let n = group.cyclic_order()?;
    if n < 2 {
        return Err(ExchangeError::TrivialGroup(n));
    }
    let tol = opts.tol;
    let mut residual = 0.0f64;

    // Step 1: the zero signal.
    let zero_img = t.apply(&constant(&group, Complex64::new(0.0, 0.0)))?;
    let r = zero_img.sup_norm();
    if r > tol {
        return Err(ExchangeError::FixedPointViolation {
            element: "0".into(),
            residual: r,
        });
    }
    residual = residual.max(r);

    // Step 3 (run early): β on constants.
    let mut beta = BetaProbe::default();
    let probe = |c: Complex64, beta: &mut BetaProbe| -> Result<Complex64, ExchangeError> {
        if let Some(b) = beta.get(c) {
            return Ok(b);
        }
        let b = expectation(&t.apply(&constant(&group, c / n as f64))?);
        beta.samples.push((c, b));
        Ok(b)
    };
    for &x in &ALPHA_PROBES {
        let c = Complex64::new(x, 0.0);
        let b = probe(c, &mut beta)?;
        let dev = (b - c).norm().min((b - c.conj()).norm());
        if dev > tol * (1.0 + c.norm()) {
            return Err(ExchangeError::BetaNotIdentityOrConjugation { c, beta: b });
        }
        residual = residual.max(dev);
    }
    let i = Complex64::new(0.0, 1.0);
    let beta_i = probe(i, &mut beta)?;
    let (d_id, d_conj) = ((beta_i - i).norm(), (beta_i + i).norm());
    let conjugate = d_conj < d_id;
    let (win, lose) = if conjugate {
        (d_conj, d_id)
    } else {
        (d_id, d_conj)
    };
    if win > 2.0 * tol || lose < 1.0 {
        return Err(ExchangeError::BetaNotIdentityOrConjugation { c: i, beta: beta_i });
    }
    let branch = |c: Complex64| if conjugate { c.conj() } else { c };
    let all_probes: Vec<Complex64> = ALPHA_PROBES
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(PHASE_PROBES.iter().map(|&(re, im)| Complex64::new(re, im)))
        .collect();
    for &c in &all_probes {
        let b = probe(c, &mut beta)?;
        let dev = (b - branch(c)).norm();
        if dev > tol * (1.0 + c.norm()) {
            return Err(ExchangeError::BetaNotIdentityOrConjugation { c, beta: b });
        }
        residual = residual.max(dev);
        // T(c·1) must itself be the constant β(c)·1.
        let img = t.apply(&constant(&group, c))?;
        if let Some(&v) = img
            .values()
            .iter()
            .find(|v| (*v - b).norm() > tol * (1.0 + c.norm()))
        {
            return Err(ExchangeError::BetaNotIdentityOrConjugation { c, beta: v });
        }
    }
    // β multiplicativity on pairs of probes.
    for &c1 in &all_probes[..4] {
        for &c2 in &all_probes {
            let b = probe(c1 * c2, &mut beta)?;
            let (b1, b2) = (beta.get(c1).unwrap(), beta.get(c2).unwrap());
            let dev = (b - b1 * b2).norm();
            if dev > tol * (1.0 + (c1 * c2).norm()) {
                return Err(ExchangeError::BetaNotIdentityOrConjugation {
                    c: c1 * c2,
                    beta: b,
                });
            }
            residual = residual.max(dev);
        }
    }

    // Step 2: images of Dirac masses.
    let mut sigma = Vec::with_capacity(n);
    for j in 0..n {
        let img = t.apply(&delta(&group, j)?)?;
        let (m, dev) = dirac_index(&img, tol).ok_or(ExchangeError::DeltaImageNotDelta { j })?;
        if j == 0 && m != 0 {
            return Err(ExchangeError::FixedPointViolation {
                element: "delta_0".into(),
                residual: 1.0,
            });
        }
        residual = residual.max(dev);
        sigma.push(m);
    }
    let eta = sigma[1];
    for (j, &found) in sigma.iter().enumerate() {
        let expected = (j * eta) % n;
        if found != expected {
            return Err(ExchangeError::NotAdditive { j, expected, found });
        }
    }
    if gcd(eta, n) != 1 {
        return Err(ExchangeError::EtaNotCoprime { eta });
    }

    // Step 4: T(a)(ηj) = a(j) (or conj) on random signals.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.sweep_count {
        let a = Signal::random_unit_disc(&group, &mut rng);
        let lhs = t.apply(&a)?;
        let rhs = canonical_image(&a, eta, conjugate);
        let r = relative_residual(lhs.values(), rhs.values());
        if r > tol {
            return Err(ExchangeError::FinalSweepViolation(Box::new(Witness {
                identity: if conjugate {
                    format!("T(a)({eta}j) = conj(a(j))")
                } else {
                    format!("T(a)({eta}j) = a(j)")
                },
                inputs: vec![a],
                lhs,
                rhs,
            })));
        }
        residual = residual.max(r);
    }

    Ok(ExchangeClassification {
        n,
        eta,
        conjugate,
        variant: ExchangeVariant::Direct,
        residual,
        beta,
        notes: vec![
            format!(
                "checked: T(0), T(c1) on {} constants, T(delta_j) for all j, {} random signals",
                all_probes.len(),
                opts.sweep_count
            ),
            "assumed: bijectivity of T; continuity of c -> T(c1) between probes".into(),
        ],
    })
}

/// Classifies `𝓕⁻¹ ∘ T`; the result describes `T(a)(ηj) = â(j)` or its conjugate.
pub fn classify_fourier_exchange(
    t: &Operator,
    tol: f64,
) -> Result<ExchangeClassification, ExchangeError> {
    classify_fourier_exchange_with(
        t,
        &ExchangeOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn classify_fourier_exchange_with(
    t: &Operator,
    opts: &ExchangeOptions,
) -> Result<ExchangeClassification, ExchangeError> {
    let inverse = Operator::idft_table(t.group().clone());
    let composed = compose(&inverse, t)?;
    let mut cls = classify_exchange_with(&composed, opts)?;
    cls.variant = ExchangeVariant::Fourier;
    cls.notes.push("classified the composition idft o T".into());
    Ok(cls)
}

/// Checks `T(T(a))(k) = a(-k)` on the Dirac basis and on seeded random signals.
pub fn check_involution_symmetry(
    t: &Operator,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport, Error> {
    const IDENTITY: &str = "T(T(a))(k) = a(-k)";
    let group = t.group().clone();
    let mut tracker = ResidualTracker::new(tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = (0..group.order()).map(|j| delta(&group, j));
    let random = (0..samples).map(|_| Ok(Signal::random_unit_disc(&group, &mut rng)));
    for a in basis.collect::<Vec<_>>().into_iter().chain(random) {
        let a = a?;
        let lhs = t.apply(&t.apply(&a)?)?;
        tracker.compare(IDENTITY, || vec![a.clone()], &lhs, &a.reflect());
    }
    Ok(tracker.finish())
}

/// The map `a ↦ b` with `b(ηj) = a(j)` (conjugated if asked).
pub fn canonical_exchange_map(n: usize, eta: usize, conjugate: bool) -> Result<Operator, Error> {
    let group = Group::cyclic(n)?;
    if eta == 0 || eta >= n || gcd(eta, n) != 1 {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} is not a unit mod {n}"
        )));
    }
    Ok(Operator::black_box(group, !conjugate, move |a| {
        canonical_image(a, eta, conjugate)
    }))
}

/// `a ↦ b` with `b(ηj) = â(j)` (conjugated if asked).
pub fn canonical_fourier_exchange_map(
    n: usize,
    eta: usize,
    conjugate: bool,
) -> Result<Operator, Error> {
    let reindex = canonical_exchange_map(n, eta, conjugate)?;
    compose(&reindex, &Operator::dft_table(Group::cyclic(n)?))
}

fn canonical_image(a: &Signal, eta: usize, conjugate: bool) -> Signal {
    let n = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (j, &v) in a.values().iter().enumerate() {
        out[(eta * j) % n] = if conjugate { v.conj() } else { v };
    }
    Signal::new(a.group().clone(), out).expect("permutation preserves shape")
}

/// Index `m` if `s ≈ δ_m`, with the largest deviation from that Dirac mass.
fn dirac_index(s: &Signal, tol: f64) -> Option<(usize, f64)> {
    let mut found = None;
    let mut dev = 0.0f64;
    for (k, &v) in s.values().iter().enumerate() {
        if (v - 1.0).norm() <= tol {
            if found.is_some() {
                return None;
            }
            found = Some(k);
            dev = dev.max((v - 1.0).norm());
        } else if v.norm() <= tol {
            dev = dev.max(v.norm());
        } else {
            return None;
        }
    }
    found.map(|m| (m, dev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{dft, idft};

    fn z(n: usize) -> Group {
        Group::cyclic(n).unwrap()
    }

    #[test]
    fn identity_and_conjugation() {
        let id = Operator::black_box(z(7), false, |a| a.clone());
        let cls = classify_exchange(&id, 1e-9).unwrap();
        assert_eq!((cls.eta, cls.conjugate), (1, false));
        assert_eq!(cls.variant, ExchangeVariant::Direct);

        let conj = Operator::black_box(z(7), false, |a| a.conj());
        let cls = classify_exchange(&conj, 1e-9).unwrap();
        assert_eq!((cls.eta, cls.conjugate), (1, true));
        assert!(cls.beta.multiplicativity_defect() <= 1e-9);
    }

    #[test]
    fn reindexing_by_five_on_z7() {
        // T(a)(j) = a(5j mod 7); both axioms hold by brute force on random pairs.
        let t = Operator::black_box(z(7), true, |a| {
            Signal::from_fn(a.group(), |j| a.get((5 * j) % 7))
        });
        let report = crate::operator::check_exchange_axioms(&t, 50, 11, 1e-9).unwrap();
        assert!(report.passed);
        let cls = classify_exchange(&t, 1e-9).unwrap();
        assert_eq!((cls.eta, cls.conjugate), (3, false));
    }

    #[test]
    fn rejections_name_the_step() {
        let double = Operator::black_box(z(6), true, |a| a.scale(Complex64::new(2.0, 0.0)));
        match classify_exchange(&double, 1e-9) {
            Err(ExchangeError::BetaNotIdentityOrConjugation { c, beta }) => {
                assert_eq!(c, Complex64::new(1.0, 0.0));
                assert!((beta - 2.0).norm() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }

        let squash = Operator::black_box(z(8), true, |a| {
            Signal::from_fn(a.group(), |j| a.get((2 * j) % 8))
        });
        assert!(matches!(
            classify_exchange(&squash, 1e-9),
            Err(ExchangeError::DeltaImageNotDelta { .. } | ExchangeError::EtaNotCoprime { .. })
        ));

        let shift = Operator::black_box(z(5), false, |a| {
            a.add(&constant(a.group(), Complex64::new(1.0, 0.0)))
                .unwrap()
        });
        assert!(matches!(
            classify_exchange(&shift, 1e-9),
            Err(ExchangeError::FixedPointViolation { .. })
        ));

        // cyclic rotation moves δ_0
        let rotate = Operator::black_box(z(5), true, |a| {
            Signal::from_fn(a.group(), |j| a.get((j + 4) % 5))
        });
        assert!(matches!(
            classify_exchange(&rotate, 1e-9),
            Err(ExchangeError::FixedPointViolation { ref element, .. }) if element == "delta_0"
        ));

        assert!(matches!(
            classify_exchange(&Operator::identity(z(1)), 1e-9),
            Err(ExchangeError::TrivialGroup(1))
        ));
    }

    #[test]
    fn sweep_catches_maps_that_agree_on_structured_signals() {
        let n = 6;
        let t = Operator::black_box(z(n), false, move |a| {
            let v = a.values();
            let is_constant = v.iter().all(|x| (x - v[0]).norm() == 0.0);
            let nonzero = v.iter().filter(|x| x.norm() != 0.0).count();
            if is_constant || nonzero <= 1 {
                a.clone()
            } else {
                a.map(|x| x * 1.01)
            }
        });
        match classify_exchange(&t, 1e-9) {
            Err(ExchangeError::FinalSweepViolation(w)) => {
                assert_eq!(w.inputs.len(), 1);
                assert!(relative_residual(w.lhs.values(), w.rhs.values()) > 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fourier_variant_examples() {
        let dft_op = Operator::black_box(z(6), true, dft);
        let cls = classify_fourier_exchange(&dft_op, 1e-9).unwrap();
        assert_eq!(
            (cls.eta, cls.conjugate, cls.variant),
            (1, false, ExchangeVariant::Fourier)
        );

        // idft(conj(dft(a)))(j) = conj(a(-j)): double-sum oracle on Z/5.
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = Signal::random_unit_disc(&z(n), &mut rng);
        let composed = idft(&dft(&a).conj());
        let oracle = Signal::from_fn(&z(n), |j| {
            let tw = |k: usize, t: usize, s: f64| {
                Complex64::from_polar(
                    1.0,
                    s * std::f64::consts::TAU * ((k * t) % n) as f64 / n as f64,
                )
            };
            (0..n)
                .map(|k| {
                    let hat: Complex64 = (0..n).map(|t| a.get(t) * tw(k, t, -1.0)).sum();
                    hat.conj() * tw(k, j, 1.0)
                })
                .sum::<Complex64>()
                / n as f64
        });
        assert!(crate::max_abs_diff(composed.values(), oracle.values()) < 1e-12);
        assert!(crate::max_abs_diff(oracle.values(), a.reflect().conj().values()) < 1e-12);

        let conj_dft = Operator::black_box(z(n), false, |a| dft(a).conj());
        let cls = classify_fourier_exchange(&conj_dft, 1e-9).unwrap();
        assert_eq!((cls.eta, cls.conjugate), (n - 1, true));

        // T(a)(j) = â(3j) on Z/8: T(a)(3j) = â(9j) = â(j), so η = 3.
        let t = Operator::black_box(z(8), true, |a| {
            let hat = dft(a);
            Signal::from_fn(a.group(), |j| hat.get((3 * j) % 8))
        });
        let cls = classify_fourier_exchange(&t, 1e-9).unwrap();
        assert_eq!((cls.eta, cls.conjugate), (3, false));
    }

    #[test]
    fn involution_examples() {
        let n = 5;
        let plain = Operator::dft_table(z(n));
        let r = check_involution_symmetry(&plain, 1e-9, 10, 0).unwrap();
        assert!(!r.passed);
        // F²a(k) = n·a(-k): the residual is driven by the factor n.
        let unitary = plain.scaled(Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
        let r = check_involution_symmetry(&unitary, 1e-9, 10, 0).unwrap();
        assert!(r.passed, "{}", r.max_residual);

        let negate = Operator::black_box(z(n), true, |a| a.reflect());
        let r = check_involution_symmetry(&negate, 1e-9, 10, 0).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        // first failing basis probe is δ_1: T²δ_1 = δ_1 but δ_1(-k) = δ_4
        assert_eq!(w.inputs[0], delta(&z(n), 1).unwrap());
        assert_eq!(w.lhs, delta(&z(n), 1).unwrap());
        assert_eq!(w.rhs, delta(&z(n), 4).unwrap());

        let id2 = Operator::identity(z(2));
        assert!(check_involution_symmetry(&id2, 1e-9, 10, 0).unwrap().passed);
    }

    #[test]
    fn canonical_maps_reject_non_units() {
        assert!(canonical_exchange_map(8, 2, false).is_err());
        assert!(canonical_exchange_map(8, 0, false).is_err());
        assert!(canonical_exchange_map(8, 3, true).is_ok());
    }

    #[test]
    fn beta_probe_lookup_and_defect() {
        let probe = BetaProbe {
            samples: vec![
                (Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)),
                (Complex64::new(4.0, 0.0), Complex64::new(8.0, 0.0)),
            ],
        };
        assert_eq!(
            probe.get(Complex64::new(4.0, 0.0)),
            Some(Complex64::new(8.0, 0.0))
        );
        assert_eq!(probe.get(Complex64::new(3.0, 0.0)), None);
        // β(2·2) = 8 but β(2)² = 16
        assert!((probe.multiplicativity_defect() - 8.0 / 5.0).abs() < 1e-12);
    }
}
