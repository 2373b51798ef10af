//! `fourier-char`: run the classifiers and axiom checkers on JSON inputs.
//!
//! Exit status: 0 when the input classifies or passes, 1 when it is rejected
//! (the report carries the error and any witness), 2 for unreadable input,
//! schema violations and bad flags.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use fourier_char::conv::{self, ConvError};
use fourier_char::exchange::{
    check_involution_symmetry, classify_exchange_with, classify_fourier_exchange_with,
    ExchangeOptions,
};
use fourier_char::formats::{
    to_pair, AxiomReportBody, ConvClassificationFile, ExchangeClassificationFile,
    IntertwinerClassificationFile, KernelFamilyFile, OperatorFile, PhaseSpaceFunctionFile,
    TorusClassificationFile,
};
use fourier_char::intertwiner::{check_intertwining, classify_intertwiner, construct_from};
use fourier_char::operator::{check_conv_homomorphism, check_exchange_axioms};
use fourier_char::torus::{classify_torus_operator, TorusError};
use fourier_char::twisted::{gaussian, verify_rho_homomorphism, PlaneGrid};
use fourier_char::{AxiomReport, Complex64, Group, Operator, SampleMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    ClassifyConv,
    ClassifyExchange,
    ClassifyIntertwiner,
    ClassifyTorus,
    VerifyTwisted,
    CheckAxioms,
    Construct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Basis,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Axiom {
    /// T(f*g) = T(f).T(g)
    Conv,
    /// T(a*b) = T(a).T(b) and T(a.b) = T(a)*T(b)
    Exchange,
    /// T(T(a))(k) = a(-k)
    Involution,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "fourier-char",
    version,
    about = "Classify operators that exchange convolution and products"
)]
struct RunConfig {
    #[arg(value_enum)]
    command: Command,
    /// Input JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Group order, for `construct`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale the operator by 1/sqrt(n) first (`check-axioms`, `construct`).
    #[arg(long)]
    unitary: bool,
    /// Pair selection for the convolution axiom.
    #[arg(long, value_enum, default_value_t = Mode::Basis)]
    mode: Mode,
    /// Random pairs or signals drawn by the sampled checks.
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[arg(long = "grid-S", default_value_t = 64)]
    grid_s: usize,
    #[arg(long = "grid-L", default_value_t = 8.0)]
    grid_l: f64,
    /// Which identity `check-axioms` tests.
    #[arg(long, value_enum, default_value_t = Axiom::Conv)]
    axiom: Axiom,
    /// Classify `idft o T` instead of `T` (`classify-exchange`).
    #[arg(long)]
    fourier: bool,
}

/// Input or flag problems; always exit 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Ok,
    Rejected,
    Invalid,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    schema: u32,
    config: &'a RunConfig,
    status: Status,
    result: Option<Value>,
    error: Option<String>,
    axioms: Option<AxiomReportBody>,
}

struct Outcome {
    status: Status,
    result: Option<Value>,
    error: Option<String>,
    axioms: Option<AxiomReport>,
    summary: String,
}

impl Outcome {
    fn ok(result: Value, axioms: Option<AxiomReport>, summary: String) -> Self {
        Self {
            status: Status::Ok,
            result: Some(result),
            error: None,
            axioms,
            summary,
        }
    }

    fn rejected(error: String, axioms: Option<AxiomReport>) -> Self {
        Self {
            status: Status::Rejected,
            result: None,
            summary: format!("rejected: {error}"),
            error: Some(error),
            axioms,
        }
    }

    /// Axiom checks reject on failure but still carry their report.
    fn from_check(report: AxiomReport, what: &str) -> Self {
        let summary = format!(
            "{what}: {} (max residual {:.3e}, tol {:.1e})",
            if report.passed { "passed" } else { "failed" },
            report.max_residual,
            report.tolerance
        );
        Self {
            status: if report.passed {
                Status::Ok
            } else {
                Status::Rejected
            },
            result: None,
            error: (!report.passed).then(|| {
                let identity = report
                    .witness
                    .as_ref()
                    .map(|w| w.identity.as_str())
                    .unwrap_or("identity");
                format!(
                    "{what}: {identity} fails (max residual {:.3e})",
                    report.max_residual
                )
            }),
            axioms: Some(report),
            summary,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text, path)
}

fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T, InputError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        InputError(format!(
            "{}: schema violation at `{at}`: {}",
            path.display(),
            e.inner()
        ))
    })
}

fn require_input(cfg: &RunConfig) -> Result<&Path, InputError> {
    cfg.input
        .as_deref()
        .ok_or_else(|| InputError("--input is required for this command".into()))
}

fn read_operator(cfg: &RunConfig) -> Result<Operator, InputError> {
    let file: OperatorFile = read_json(require_input(cfg)?)?;
    Ok(file.to_operator()?)
}

fn unitary_scale(t: &Operator) -> Operator {
    t.scaled(Complex64::new(1.0 / (t.group().order() as f64).sqrt(), 0.0))
}

fn classify_conv_cmd(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let t = read_operator(cfg)?;
    match conv::classify(&t, cfg.tol) {
        Ok(cls) => {
            let n = cls.n;
            let summary = format!(
                "classified: support {}/{n}, residual {:.3e}",
                cls.support.len(),
                cls.residual
            );
            Ok(Outcome::ok(
                to_value(&ConvClassificationFile::from(&cls)),
                None,
                summary,
            ))
        }
        Err(ConvError::Precondition(report)) => {
            let err = ConvError::Precondition(report.clone());
            Ok(Outcome::rejected(err.to_string(), Some(*report)))
        }
        Err(e) => Ok(Outcome::rejected(e.to_string(), None)),
    }
}

fn classify_exchange_cmd(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let t = read_operator(cfg)?;
    let opts = ExchangeOptions {
        tol: cfg.tol,
        seed: cfg.seed,
        sweep_count: cfg.samples,
    };
    let res = if cfg.fourier {
        classify_fourier_exchange_with(&t, &opts)
    } else {
        classify_exchange_with(&t, &opts)
    };
    Ok(match res {
        Ok(cls) => {
            let summary = format!(
                "classified: eta = {}, conjugate = {}, variant = {}, residual {:.3e}",
                cls.eta,
                cls.conjugate,
                cls.variant.as_str(),
                cls.residual
            );
            Outcome::ok(
                to_value(&ExchangeClassificationFile::from(&cls)),
                None,
                summary,
            )
        }
        Err(e) => {
            let report = check_exchange_axioms(&t, cfg.samples, cfg.seed, cfg.tol)?;
            Outcome::rejected(e.to_string(), Some(report))
        }
    })
}

fn classify_intertwiner_cmd(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let t = read_operator(cfg)?;
    Ok(match classify_intertwiner(&t, cfg.tol) {
        Ok(cls) => {
            let report = check_intertwining(&t, &cls.phi(), &cls.psi(), cfg.tol)?;
            let summary = format!(
                "classified: (k0, m0, m1) = ({}, {}, {}), c = {:?}, residual {:.3e}",
                cls.k0,
                cls.m0,
                cls.m1,
                to_pair(cls.c),
                cls.residual
            );
            Outcome::ok(
                to_value(&IntertwinerClassificationFile::from(&cls)),
                Some(report),
                summary,
            )
        }
        Err(e) => Outcome::rejected(e.to_string(), None),
    })
}

fn classify_torus_cmd(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let file: KernelFamilyFile = read_json(require_input(cfg)?)?;
    let t = file.to_operator()?;
    Ok(match classify_torus_operator(&t, cfg.tol) {
        Ok(cls) => {
            let summary = format!(
                "classified: support {}/{}, residual {:.3e}",
                cls.support.len(),
                2 * t.window() + 1,
                cls.residual
            );
            Outcome::ok(
                to_value(&TorusClassificationFile::from(&cls)),
                None,
                summary,
            )
        }
        Err(e) => {
            let axioms = match &e {
                TorusError::AtFrequency { source, .. } => match source.as_ref() {
                    TorusError::NotCharacter(r) => Some((**r).clone()),
                    _ => None,
                },
                _ => None,
            };
            Outcome::rejected(e.to_string(), axioms)
        }
    })
}

fn verify_twisted_cmd(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let f = match &cfg.input {
        Some(path) => read_json::<PhaseSpaceFunctionFile>(path)?.to_function()?,
        None => gaussian(PlaneGrid::new(cfg.grid_l, cfg.grid_s)?, 0.0, 0.0),
    };
    let r = verify_rho_homomorphism(&f, &f)?;
    let grid = f.grid();
    let summary = format!(
        "rho(f#f) vs rho(f)rho(f) at L = {}, S = {}: relative L2 error {:.3e}",
        grid.half_width(),
        grid.side(),
        r.relative_error
    );
    let result = json!({
        "L": grid.half_width(),
        "S": grid.side(),
        "relative_error": r.relative_error,
        "boundary_f": r.boundary_f,
        "boundary_g": r.boundary_g,
    });
    Ok(Outcome::ok(result, None, summary))
}

fn check_axioms_cmd(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let mut t = read_operator(cfg)?;
    if cfg.unitary {
        t = unitary_scale(&t);
    }
    let report = match cfg.axiom {
        Axiom::Conv => {
            let mode = match cfg.mode {
                Mode::Basis => SampleMode::Basis,
                Mode::Sampled => SampleMode::Sampled {
                    count: cfg.samples,
                    seed: cfg.seed,
                },
            };
            check_conv_homomorphism(&t, mode, cfg.tol)?
        }
        Axiom::Exchange => check_exchange_axioms(&t, cfg.samples, cfg.seed, cfg.tol)?,
        Axiom::Involution => check_involution_symmetry(&t, cfg.tol, cfg.samples, cfg.seed)?,
    };
    let what = match cfg.axiom {
        Axiom::Conv => "convolution homomorphism",
        Axiom::Exchange => "exchange identities",
        Axiom::Involution => "involution symmetry",
    };
    Ok(Outcome::from_check(report, what))
}

/// Writes an operator file rather than a report, so the output can be fed
/// straight back to the classifiers.
fn construct_cmd(cfg: &RunConfig) -> Result<(OperatorFile, String), InputError> {
    let n = cfg.n;
    let op = match &cfg.input {
        None => {
            let n = n.ok_or_else(|| InputError("--n is required for construct".into()))?;
            Operator::dft_table(Group::cyclic(n)?)
        }
        Some(path) => {
            let n = n.ok_or_else(|| InputError("--n is required for construct".into()))?;
            let text = fs::read_to_string(path)
                .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
            let probe: Value = serde_json::from_str(&text)
                .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            if probe.get("k0").is_some() {
                let file: IntertwinerClassificationFile = parse_json(&text, path)?;
                if n == 0 {
                    return Err(InputError("--n must be at least 1".into()));
                }
                construct_from(&file.to_classification(n))?
            } else {
                let file: ConvClassificationFile = parse_json(&text, path)?;
                conv::construct_from(&file.to_classification(n)?)?
            }
        }
    };
    let op = if cfg.unitary { unitary_scale(&op) } else { op };
    let summary = format!("constructed a dense operator on {}", op.group());
    Ok((OperatorFile::from_operator(&op)?, summary))
}

fn validate(cfg: &RunConfig) -> Result<(), InputError> {
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(InputError(format!(
            "--tol must be positive, got {}",
            cfg.tol
        )));
    }
    if cfg.n == Some(0) {
        return Err(InputError("--n must be at least 1".into()));
    }
    Ok(())
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), InputError> {
    match &cfg.output {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(InputError::from)
        }
    }
}

fn report_text(cfg: &RunConfig, outcome: &Outcome) -> String {
    let report = Report {
        schema: 1,
        config: cfg,
        status: outcome.status,
        result: outcome.result.clone(),
        error: outcome.error.clone(),
        axioms: outcome.axioms.as_ref().map(AxiomReportBody::from),
    };
    serde_json::to_string_pretty(&report).expect("report serializes")
}

fn run(cfg: &RunConfig) -> ExitCode {
    let name = to_value(&cfg.command);
    let name = name.as_str().unwrap_or("command");

    let outcome = validate(cfg).and_then(|()| match cfg.command {
        Command::Construct => {
            let (file, summary) = construct_cmd(cfg)?;
            let text = serde_json::to_string_pretty(&file).expect("operator serializes");
            emit(cfg, &text)?;
            Ok(Outcome::ok(Value::Null, None, summary))
        }
        Command::ClassifyConv => classify_conv_cmd(cfg),
        Command::ClassifyExchange => classify_exchange_cmd(cfg),
        Command::ClassifyIntertwiner => classify_intertwiner_cmd(cfg),
        Command::ClassifyTorus => classify_torus_cmd(cfg),
        Command::VerifyTwisted => verify_twisted_cmd(cfg),
        Command::CheckAxioms => check_axioms_cmd(cfg),
    });

    let outcome = match outcome {
        Ok(o) => o,
        Err(InputError(msg)) => {
            eprintln!("{name}: error: {msg}");
            let o = Outcome {
                status: Status::Invalid,
                result: None,
                error: Some(msg),
                axioms: None,
                summary: String::new(),
            };
            if cfg.command != Command::Construct {
                let _ = emit(cfg, &report_text(cfg, &o));
            }
            return ExitCode::from(2);
        }
    };
    eprintln!("{name}: {}", outcome.summary);
    if cfg.command == Command::Construct {
        return ExitCode::SUCCESS;
    }
    if let Err(InputError(msg)) = emit(cfg, &report_text(cfg, &outcome)) {
        eprintln!("{name}: error: {msg}");
        return ExitCode::from(2);
    }
    match outcome.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Rejected => ExitCode::from(1),
        Status::Invalid => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(&cfg)
}
