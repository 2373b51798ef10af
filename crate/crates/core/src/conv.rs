//! Linear convolution-to-product homomorphisms on `Z/nZ`.
//!
//! Every such map has the form `T(f)(η) = χ_E(η) f̂(σ(η))` for a support set
//! `E` (the rows where `T` does not vanish) and an arbitrary map `σ: E -> Z/n`.
//! [`classify`] recovers `(E, σ)` row by row: the row `k ↦ T(δ_k)(η)` is a
//! homomorphism `Z/n -> (C, ·)`, so its value at 0 is 0 or 1, and when it is 1
//! the value at 1 is an n-th root of unity whose lattice index is `σ(η)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::Error;
use crate::group::Group;
use crate::lattice::{root_of_unity, snap_angle};
use crate::operator::{check_conv_homomorphism, AxiomReport, Operator, SampleMode};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvClassification {
    pub n: usize,
    /// Rows where `T` does not vanish, ascending.
    pub support: Vec<usize>,
    sigma: BTreeMap<usize, usize>,
    pub residual: f64,
}

impl ConvClassification {
    pub fn new(n: usize, sigma: BTreeMap<usize, usize>, residual: f64) -> Result<Self, ConvError> {
        if let Some((&eta, &s)) = sigma.iter().find(|(&eta, &s)| eta >= n || s >= n) {
            return Err(ConvError::InvalidSigma(format!(
                "sigma({eta}) = {s} out of range for n = {n}"
            )));
        }
        Ok(Self {
            n,
            support: sigma.keys().copied().collect(),
            sigma,
            residual,
        })
    }

    /// `σ(η)`; only defined on the support.
    pub fn sigma(&self, eta: usize) -> Result<usize, ConvError> {
        self.sigma
            .get(&eta)
            .copied()
            .ok_or(ConvError::OffSupport(eta))
    }

    pub fn sigma_map(&self) -> &BTreeMap<usize, usize> {
        &self.sigma
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvError {
    #[error(transparent)]
    Algebra(#[from] Error),
    #[error("classification requires a dense operator table")]
    NotDense,
    #[error("T(f*g) = T(f).T(g) fails on the Dirac basis (max residual {:.3e})", .0.max_residual)]
    Precondition(Box<AxiomReport>),
    #[error("row {eta} is not a homomorphism k -> T(delta_k)(eta): offending value {value}")]
    RowNotHomomorphic { eta: usize, value: Complex64 },
    #[error("row {eta}: T(delta_1)(eta) = {z} is not an n-th root of unity")]
    NotRootOfUnity { eta: usize, z: Complex64 },
    #[error("invalid sigma: {0}")]
    InvalidSigma(String),
    #[error("sigma is not defined off the support (eta = {0})")]
    OffSupport(usize),
}

/// Recovers `(E, σ)` from a dense operator satisfying the convolution axiom.
pub fn classify(t: &Operator, tol: f64) -> Result<ConvClassification, ConvError> {
    let n = t.group().cyclic_order()?;
    let table = t.table().ok_or(ConvError::NotDense)?;
    let report = check_conv_homomorphism(t, SampleMode::Basis, tol)?;
    if !report.passed {
        return Err(ConvError::Precondition(Box::new(report)));
    }

    // The axiom residual is relative to 1 + the column sup norm, so absolute
    // deviations are judged against the table's own scale.
    let scale = 1.0 + table.entries().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let etol = tol * scale;
    let mut sigma = BTreeMap::new();
    let mut residual = 0.0f64;
    for eta in 0..n {
        let row = table.row(eta);
        let at_zero = row[0];
        if at_zero.norm() <= etol {
            if let Some(&value) = row.iter().find(|v| v.norm() > etol) {
                return Err(ConvError::RowNotHomomorphic { eta, value });
            }
            residual = residual.max(row.iter().map(|v| v.norm()).fold(0.0, f64::max));
            continue;
        }
        if (at_zero - 1.0).norm() > etol {
            return Err(ConvError::RowNotHomomorphic {
                eta,
                value: at_zero,
            });
        }
        let z = row[1 % n];
        // Canonical rows are e^{-2iπkσ/n}, so σ is the lattice index of -arg z.
        let snap = snap_angle(-z.arg(), n);
        // The chord test subsumes the angular window tol·n/π, which is the
        // tighter of the two for n <= 3.
        if (z - root_of_unity(-(snap.index as i64), n)).norm() > etol {
            return Err(ConvError::NotRootOfUnity { eta, z });
        }
        let s = snap.index;
        for (k, &v) in row.iter().enumerate() {
            let expected = root_of_unity(-((k * s) as i64), n);
            if (v - expected).norm() > etol {
                return Err(ConvError::RowNotHomomorphic { eta, value: v });
            }
            residual = residual.max((v - expected).norm());
        }
        sigma.insert(eta, s);
    }
    ConvClassification::new(n, sigma, residual)
}

/// The canonical operator `T(f)(η) = χ_E(η) f̂(σ(η))`.
///
/// `σ` need not be injective; any map defined on the support works.
pub fn construct(n: usize, sigma: &BTreeMap<usize, usize>) -> Result<Operator, ConvError> {
    let group = Group::cyclic(n)?;
    if let Some((&eta, &s)) = sigma.iter().find(|(&eta, &s)| eta >= n || s >= n) {
        return Err(ConvError::InvalidSigma(format!(
            "sigma({eta}) = {s} out of range for n = {n}"
        )));
    }
    let rows: Vec<Option<usize>> = (0..n).map(|eta| sigma.get(&eta).copied()).collect();
    Ok(Operator::from_entries(group, |eta, k| match rows[eta] {
        Some(s) => root_of_unity(-((k * s) as i64), n),
        None => Complex64::new(0.0, 0.0),
    }))
}

pub fn construct_from(cls: &ConvClassification) -> Result<Operator, ConvError> {
    construct(cls.n, &cls.sigma)
}

/// Sup-norm distance between `T`'s table and the table rebuilt from `cls`.
pub fn roundtrip_residual(t: &Operator, cls: &ConvClassification) -> Result<f64, ConvError> {
    let table = t.table().ok_or(ConvError::NotDense)?;
    let rebuilt = construct_from(cls)?;
    t.group().ensure_same(rebuilt.group())?;
    Ok(table.distance(rebuilt.table().expect("construct is dense")))
}
