//! JSON file formats.
//!
//! Every top-level file carries `"schema": 1` and unknown fields are
//! rejected. Complex numbers are `[re, im]` pairs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::conv::{ConvClassification, ConvError};
use crate::error::Error;
use crate::exchange::{ExchangeClassification, ExchangeVariant};
use crate::group::Group;
use crate::intertwiner::{IntertwinerClassification, PhaseFunction};
use crate::operator::{AxiomReport, Operator, OperatorForm, Witness};
use crate::signal::Signal;
use crate::torus::{KernelFamily, TorusClassification, TorusError, TorusGrid, TorusOperator};
use crate::twisted::{PhaseSpaceFunction, PlaneGrid, TwistedError};

pub const SCHEMA_VERSION: u32 = 1;

/// The `"schema"` field; only [`SCHEMA_VERSION`] deserializes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Schema;

impl Serialize for Schema {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u32(SCHEMA_VERSION)
    }
}

impl<'de> Deserialize<'de> for Schema {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = u32::deserialize(d)?;
        if v == SCHEMA_VERSION {
            Ok(Schema)
        } else {
            Err(serde::de::Error::custom(format!(
                "unsupported schema version {v}, expected {SCHEMA_VERSION}"
            )))
        }
    }
}

pub type ComplexPair = [f64; 2];

/// Negative zeros are written as `0.0`.
pub fn to_pair(z: Complex64) -> ComplexPair {
    [z.re + 0.0, z.im + 0.0]
}

pub fn from_pair(p: ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pairs(values: &[Complex64]) -> Vec<ComplexPair> {
    values.iter().copied().map(to_pair).collect()
}

fn complexes(values: &[ComplexPair]) -> Vec<Complex64> {
    values.iter().copied().map(from_pair).collect()
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Algebra(#[from] Error),
    #[error(transparent)]
    Conv(#[from] ConvError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Twisted(#[from] TwistedError),
    #[error("{0}")]
    Invalid(String),
}

/// A signal without the schema marker, for embedding in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalBody {
    pub group: Vec<usize>,
    pub values: Vec<ComplexPair>,
}

impl From<&Signal> for SignalBody {
    fn from(s: &Signal) -> Self {
        Self {
            group: s.group().factors().to_vec(),
            values: pairs(s.values()),
        }
    }
}

impl SignalBody {
    pub fn to_signal(&self) -> Result<Signal, FormatError> {
        Ok(Signal::new(
            Group::new(self.group.clone())?,
            complexes(&self.values),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalFile {
    pub schema: Schema,
    pub group: Vec<usize>,
    pub values: Vec<ComplexPair>,
}

impl From<&Signal> for SignalFile {
    fn from(s: &Signal) -> Self {
        let body = SignalBody::from(s);
        Self {
            schema: Schema,
            group: body.group,
            values: body.values,
        }
    }
}

impl SignalFile {
    pub fn to_signal(&self) -> Result<Signal, FormatError> {
        Ok(Signal::new(
            Group::new(self.group.clone())?,
            complexes(&self.values),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub schema: Schema,
    pub group: Vec<usize>,
    /// Column k is the image of `δ_k`.
    pub columns: Vec<Vec<ComplexPair>>,
}

impl OperatorFile {
    /// Tabulates the operator; black boxes must be linear.
    pub fn from_operator(t: &Operator) -> Result<Self, FormatError> {
        let dense = match t.form() {
            OperatorForm::Dense(_) => t.clone(),
            OperatorForm::BlackBox(_) => t.to_dense()?,
        };
        let table = dense.table().expect("dense");
        Ok(Self {
            schema: Schema,
            group: t.group().factors().to_vec(),
            columns: (0..table.side()).map(|k| pairs(table.column(k))).collect(),
        })
    }

    pub fn to_operator(&self) -> Result<Operator, FormatError> {
        let group = Group::new(self.group.clone())?;
        let columns = self.columns.iter().map(|c| complexes(c)).collect();
        Ok(Operator::dense(group, columns)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvClassificationFile {
    pub schema: Schema,
    pub support: Vec<usize>,
    pub sigma: Vec<(usize, usize)>,
    pub residual: f64,
}

impl From<&ConvClassification> for ConvClassificationFile {
    fn from(c: &ConvClassification) -> Self {
        Self {
            schema: Schema,
            support: c.support.clone(),
            sigma: c.sigma_map().iter().map(|(&e, &s)| (e, s)).collect(),
            residual: c.residual,
        }
    }
}

impl ConvClassificationFile {
    /// The file does not record n, so the caller supplies it.
    pub fn to_classification(&self, n: usize) -> Result<ConvClassification, FormatError> {
        let sigma: BTreeMap<usize, usize> = self.sigma.iter().copied().collect();
        if sigma.len() != self.sigma.len() {
            return Err(FormatError::Invalid("sigma lists an index twice".into()));
        }
        if !sigma.keys().copied().eq(self.support.iter().copied()) {
            return Err(FormatError::Invalid(
                "support must list the sigma keys in ascending order".into(),
            ));
        }
        Ok(ConvClassification::new(n, sigma, self.residual)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantName {
    Direct,
    Fourier,
}

impl From<ExchangeVariant> for VariantName {
    fn from(v: ExchangeVariant) -> Self {
        match v {
            ExchangeVariant::Direct => Self::Direct,
            ExchangeVariant::Fourier => Self::Fourier,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExchangeClassificationFile {
    pub schema: Schema,
    pub eta: usize,
    pub conjugate: bool,
    pub variant: VariantName,
    pub residual: f64,
}

impl From<&ExchangeClassification> for ExchangeClassificationFile {
    fn from(c: &ExchangeClassification) -> Self {
        Self {
            schema: Schema,
            eta: c.eta,
            conjugate: c.conjugate,
            variant: c.variant.into(),
            residual: c.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntertwinerClassificationFile {
    pub schema: Schema,
    pub k0: usize,
    pub m0: usize,
    pub m1: usize,
    pub c: ComplexPair,
    pub residual: f64,
}

impl From<&IntertwinerClassification> for IntertwinerClassificationFile {
    fn from(c: &IntertwinerClassification) -> Self {
        Self {
            schema: Schema,
            k0: c.k0,
            m0: c.m0,
            m1: c.m1,
            c: to_pair(c.c),
            residual: c.residual,
        }
    }
}

impl IntertwinerClassificationFile {
    pub fn to_classification(&self, n: usize) -> IntertwinerClassification {
        IntertwinerClassification {
            n,
            k0: self.k0 % n.max(1),
            m0: self.m0 % n.max(1),
            m1: self.m1 % n.max(1),
            c: from_pair(self.c),
            residual: self.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseFunctionFile {
    pub schema: Schema,
    /// `φ(j) = 2iπ·turns[j]`.
    pub turns: Vec<f64>,
}

impl From<&PhaseFunction> for PhaseFunctionFile {
    fn from(p: &PhaseFunction) -> Self {
        Self {
            schema: Schema,
            turns: p.turns(),
        }
    }
}

impl PhaseFunctionFile {
    pub fn to_phase_function(&self) -> Result<PhaseFunction, FormatError> {
        Ok(PhaseFunction::from_turns(&self.turns)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFamilyFile {
    pub schema: Schema,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub kernels: Vec<(i64, Vec<ComplexPair>)>,
}

impl From<&KernelFamily> for KernelFamilyFile {
    fn from(f: &KernelFamily) -> Self {
        Self {
            schema: Schema,
            m: f.grid().len(),
            n: f.window(),
            kernels: f.iter().map(|(xi, h)| (xi, pairs(h))).collect(),
        }
    }
}

impl KernelFamilyFile {
    /// Kernels may be listed in any order but must cover `{-N..N}` once each.
    pub fn to_family(&self) -> Result<KernelFamily, FormatError> {
        let grid = TorusGrid::new(self.m)?;
        let by_xi: BTreeMap<i64, &Vec<ComplexPair>> =
            self.kernels.iter().map(|(xi, h)| (*xi, h)).collect();
        let n = self.n as i64;
        let expected: Vec<i64> = (-n..=n).collect();
        if by_xi.len() != self.kernels.len() || !by_xi.keys().copied().eq(expected) {
            return Err(FormatError::Invalid(format!(
                "kernels must list each frequency in -{n}..={n} exactly once"
            )));
        }
        let kernels = by_xi.values().map(|h| complexes(h)).collect();
        Ok(KernelFamily::new(grid, self.n, kernels)?)
    }

    pub fn to_operator(&self) -> Result<TorusOperator, FormatError> {
        Ok(TorusOperator::from_kernels(&self.to_family()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusClassificationFile {
    pub schema: Schema,
    pub support: Vec<i64>,
    /// Pairs `(ξ, φ(ξ))`.
    pub sigma: Vec<(i64, i64)>,
    pub residual: f64,
}

impl From<&TorusClassification> for TorusClassificationFile {
    fn from(c: &TorusClassification) -> Self {
        Self {
            schema: Schema,
            support: c.support.clone(),
            sigma: c.freq_map.iter().map(|(&x, &p)| (x, p)).collect(),
            residual: c.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpaceFunctionFile {
    pub schema: Schema,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "S")]
    pub side: usize,
    /// `values[i][j] = f(x_i, y_j)`.
    pub values: Vec<Vec<ComplexPair>>,
}

impl From<&PhaseSpaceFunction> for PhaseSpaceFunctionFile {
    fn from(f: &PhaseSpaceFunction) -> Self {
        let g = f.grid();
        Self {
            schema: Schema,
            half_width: g.half_width(),
            side: g.side(),
            values: f.values().chunks(g.side()).map(pairs).collect(),
        }
    }
}

impl PhaseSpaceFunctionFile {
    pub fn to_function(&self) -> Result<PhaseSpaceFunction, FormatError> {
        let grid = PlaneGrid::new(self.half_width, self.side)?;
        if self.values.len() != self.side {
            return Err(TwistedError::ShapeMismatch {
                expected: self.side,
                found: self.values.len(),
            }
            .into());
        }
        let mut flat = Vec::with_capacity(self.side * self.side);
        for row in &self.values {
            if row.len() != self.side {
                return Err(TwistedError::ShapeMismatch {
                    expected: self.side,
                    found: row.len(),
                }
                .into());
            }
            flat.extend(row.iter().copied().map(from_pair));
        }
        Ok(PhaseSpaceFunction::new(grid, flat)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessBody {
    pub identity: String,
    pub inputs: Vec<SignalBody>,
    pub lhs: SignalBody,
    pub rhs: SignalBody,
}

impl From<&Witness> for WitnessBody {
    fn from(w: &Witness) -> Self {
        Self {
            identity: w.identity.clone(),
            inputs: w.inputs.iter().map(SignalBody::from).collect(),
            lhs: (&w.lhs).into(),
            rhs: (&w.rhs).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomReportBody {
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub witness: Option<WitnessBody>,
    pub notes: Vec<String>,
}

impl From<&AxiomReport> for AxiomReportBody {
    fn from(r: &AxiomReport) -> Self {
        Self {
            passed: r.passed,
            max_residual: r.max_residual,
            tolerance: r.tolerance,
            witness: r.witness.as_ref().map(WitnessBody::from),
            notes: r.notes.clone(),
        }
    }
}
