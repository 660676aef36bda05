//! Command implementations for the `common-witness` binary.
//!
//! Commands return an [`Outcome`] (exit code plus rendered output) so they
//! can be driven and tested without a process boundary.
//!
//! Exit codes: 0 ok, 1 parse or input error, 2 coefficients not coprime to
//! `|G|`, 3 no witness exists for this case, 4 internal check or property
//! failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{multiplicity_bruteforce, Equation, LinearSystem};
use crate::error::Error;
use crate::fourier::{dft, idft, multiplicity_fourier, spectral_sum, DenseFunction};
use crate::group::GroupSpec;
use crate::rounding::{classify, Classification};
use crate::witness::{build_plan, psi, psi_scale};
use crate::TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NOT_APPLICABLE: i32 = 2;
pub const EXIT_NO_WITNESS: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Environment variable overriding [`TOL`] in `verify`.
pub const TOL_ENV: &str = "COMMON_WITNESS_TOL";

/// Largest `|G|^(d-1)` accepted by `verify`.
pub const VERIFY_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Classify,
    Witness,
    Sweep { samples: usize },
    Verify { trials: usize, replay: Option<PathBuf> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub group: String,
    pub equation: String,
    pub command: Command,
    /// Drives the random functions in `verify`; constructions are deterministic.
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tolerance: f64,
}

impl RunConfig {
    pub fn new(group: &str, equation: &str, command: Command) -> Self {
        Self {
            group: group.to_string(),
            equation: equation.to_string(),
            command,
            seed: 0,
            out: None,
            format: Format::Json,
            tolerance: TOL,
        }
    }
}

/// Reads [`TOL_ENV`], falling back to [`TOL`].
pub fn tolerance_from_env() -> Result<f64, String> {
    match std::env::var(TOL_ENV) {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| format!("{TOL_ENV}={s:?} is not a nonnegative number")),
        Err(_) => Ok(TOL),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self {
            code: EXIT_OK,
            output,
            message: None,
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            output: String::new(),
            message: Some(message.into()),
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::EmptyGroup
        | Error::FactorTooSmall(_)
        | Error::OrderOverflow
        | Error::ArityTooSmall(_)
        | Error::SearchTooLarge { .. } => EXIT_PARSE,
        Error::NonCoprimeCoefficient { .. } | Error::NoCoprimeCoefficient { .. } => EXIT_NOT_APPLICABLE,
        Error::CancelingPartition | Error::ExponentTwo | Error::PositiveCase(_) => EXIT_NO_WITNESS,
        _ => EXIT_INTERNAL,
    }
}

impl From<Error> for Outcome {
    fn from(err: Error) -> Self {
        Outcome::fail(exit_code(&err), err.to_string())
    }
}

/// Floats in CSV output: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn parse_inputs(cfg: &RunConfig) -> Result<(GroupSpec, Equation), Error> {
    Ok((cfg.group.parse()?, cfg.equation.parse()?))
}

/// Runs a command and returns its exit code and rendered output.
pub fn run(cfg: &RunConfig) -> Outcome {
    if let Command::Verify { replay: Some(path), .. } = &cfg.command {
        return replay(path, cfg.format);
    }
    let (group, eq) = match parse_inputs(cfg) {
        Ok(v) => v,
        Err(e) => return Outcome::fail(EXIT_PARSE, e.to_string()),
    };
    let result = match &cfg.command {
        Command::Classify => cmd_classify(&group, &eq, cfg.format),
        Command::Witness => cmd_witness(&group, &eq, cfg.format),
        Command::Sweep { samples } => cmd_sweep(&group, &eq, *samples, cfg.format),
        Command::Verify { trials, .. } => Ok(cmd_verify(&group, &eq, *trials, cfg.seed, cfg.tolerance, cfg.format)),
    };
    result.unwrap_or_else(Outcome::from)
}

/// Runs a command and writes its output to `cfg.out` or standard output.
pub fn execute(cfg: &RunConfig) -> i32 {
    let outcome = run(cfg);
    if let Some(msg) = &outcome.message {
        eprintln!("error: {msg}");
    }
    if !outcome.output.is_empty() {
        match &cfg.out {
            Some(path) => {
                if let Err(e) = fs::write(path, &outcome.output) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_PARSE;
                }
            }
            None => print!("{}", outcome.output),
        }
    }
    outcome.code
}

pub fn cmd_classify(group: &GroupSpec, eq: &Equation, format: Format) -> Result<Outcome, Error> {
    let verdict = classify(eq, group)?;
    let output = match format {
        Format::Json => to_json(&json!({
            "group": group.to_string(),
            "equation": eq.coeffs(),
            "verdict": verdict,
        })),
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
            format!(
                "classification,gap,guaranteed_gap,corollary_constant\n{:?},{},{},{}\n",
                verdict.classification,
                opt(verdict.margins.gap),
                opt(verdict.margins.guaranteed_gap),
                fmt_float(verdict.corollary_constant)
            )
        }
    };
    let code = if verdict.classification == Classification::NotApplicable {
        EXIT_NOT_APPLICABLE
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        code,
        output,
        message: verdict.reason.clone(),
    })
}

pub fn cmd_witness(group: &GroupSpec, eq: &Equation, format: Format) -> Result<Outcome, Error> {
    let verdict = classify(eq, group)?;
    match verdict.classification {
        Classification::NotApplicable => {
            return Ok(Outcome::fail(
                EXIT_NOT_APPLICABLE,
                verdict.reason.unwrap_or_default(),
            ))
        }
        Classification::FullySidorenko => {
            return Ok(Outcome::fail(
                EXIT_NO_WITNESS,
                "a canceling partition exists; the equation is fully Sidorenko",
            ))
        }
        _ => {}
    }
    let witness = verdict.witness.expect("negative verdicts carry a witness");
    let cert = &witness.certificate;
    let output = match format {
        Format::Json => to_json(&json!({
            "group": group.to_string(),
            "equation": eq.coeffs(),
            "classification": verdict.classification,
            "certificate": cert,
            "function": witness.function,
        })),
        Format::Csv => {
            let mut s = String::from("rank,element,value\n");
            for (rank, v) in witness.function.values().iter().enumerate() {
                let _ = writeln!(s, "{rank},{},{}", group.unrank(rank), fmt_float(v.re));
            }
            s
        }
    };
    let code = if cert.verified { EXIT_OK } else { EXIT_INTERNAL };
    Ok(Outcome {
        code,
        output,
        message: (!cert.verified).then(|| "witness failed verification".to_string()),
    })
}

/// `samples` equally spaced phases over one period, both ends included.
pub fn cmd_sweep(group: &GroupSpec, eq: &Equation, samples: usize, format: Format) -> Result<Outcome, Error> {
    if samples == 0 {
        return Err(Error::Parse {
            what: "samples",
            token: "0".into(),
        });
    }
    let plan = build_plan(eq, group)?;
    let scale = psi_scale(&plan);
    let step = if samples > 1 {
        plan.period / (samples - 1) as f64
    } else {
        0.0
    };
    let rows: Vec<(f64, f64, f64)> = (0..samples)
        .map(|k| {
            let phi = k as f64 * step;
            let p = psi(&plan, phi);
            (phi, p, scale * p)
        })
        .collect();
    let output = match format {
        Format::Csv => {
            let mut s = String::from("phi,psi,deviation\n");
            for (phi, p, dev) in &rows {
                let _ = writeln!(s, "{},{},{}", fmt_float(*phi), fmt_float(*p), fmt_float(*dev));
            }
            s
        }
        Format::Json => to_json(&json!({
            "period": plan.period,
            "threshold": plan.threshold,
            "X_size": plan.x_size(),
            "r": plan.r,
            "rows": rows
                .iter()
                .map(|(phi, p, dev)| json!({"phi": phi, "psi": p, "deviation": dev}))
                .collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome::ok(output))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    FourierVsBruteforce,
    Parseval,
    Inversion,
    DeviationIdentity,
    DeviationComplement,
    CommonSumIdentity,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::FourierVsBruteforce,
        Property::Parseval,
        Property::Inversion,
        Property::DeviationIdentity,
        Property::DeviationComplement,
        Property::CommonSumIdentity,
    ];
}

/// Error of one property on one function.
pub fn property_error(property: Property, f: &DenseFunction, eq: &Equation, group: &GroupSpec) -> Result<f64, Error> {
    let sys = LinearSystem::from(eq);
    let d = eq.arity() as i32;
    let spec = dft(group, f)?;
    let mean = spec.coeffs()[0].re;
    Ok(match property {
        Property::FourierVsBruteforce => {
            (multiplicity_fourier(f, eq, group)? - multiplicity_bruteforce(f, &sys, group)?).norm()
        }
        Property::Parseval => {
            let energy: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum();
            let mean_sq = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / f.len() as f64;
            (energy - mean_sq).abs()
        }
        Property::Inversion => idft(group, &spec)?
            .values()
            .iter()
            .zip(f.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max),
        Property::DeviationIdentity => {
            let dev = spectral_sum(&spec, eq, group, true)?;
            (multiplicity_bruteforce(f, &sys, group)? - mean.powi(d) - dev).norm()
        }
        Property::DeviationComplement => {
            let dev = spectral_sum(&spec, eq, group, true)?;
            let dev_c = spectral_sum(&dft(group, &f.complement())?, eq, group, true)?;
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            (dev_c - sign * dev).norm()
        }
        Property::CommonSumIdentity => {
            let total = multiplicity_fourier(f, eq, group)? + multiplicity_fourier(&f.complement(), eq, group)?;
            let mut expected = mean.powi(d) + (1.0 - mean).powi(d);
            if d % 2 == 0 {
                expected += 2.0 * spectral_sum(&spec, eq, group, true)?.re;
            }
            (total - expected).norm()
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub passed: bool,
    pub max_error: f64,
}

/// A failing case, replayable with `verify --replay`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureCase {
    pub group: GroupSpec,
    pub equation: Equation,
    pub seed: u64,
    pub trial: usize,
    pub property: Property,
    pub error: f64,
    pub tolerance: f64,
    pub function: DenseFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub group: String,
    pub equation: Vec<i64>,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub properties: Vec<PropertyReport>,
    pub passed: bool,
    /// Why the suite did not run: a coefficient shares a factor with `|G|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureCase>,
}

/// Uniform `[0, 1]` values; trial `k` of seed `s` is always the same function.
pub fn random_unit_function(group: &GroupSpec, rng: &mut ChaCha8Rng) -> DenseFunction {
    DenseFunction::from_real((0..group.size()).map(|_| rng.gen::<f64>()).collect())
}

pub fn verify_suite(group: &GroupSpec, eq: &Equation, trials: usize, seed: u64, tol: f64) -> Result<VerifyReport, Error> {
    if let Some(c) = eq.first_non_coprime(group) {
        return Err(Error::NonCoprimeCoefficient {
            coeff: c,
            order: group.order(),
        });
    }
    let size = (group.order() as u128).saturating_pow(eq.arity() as u32 - 1);
    if size > VERIFY_LIMIT {
        return Err(Error::SearchTooLarge {
            size,
            limit: VERIFY_LIMIT,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_errors = [0.0f64; Property::ALL.len()];
    let mut failure = None;
    for trial in 0..trials {
        let f = random_unit_function(group, &mut rng);
        for (i, &property) in Property::ALL.iter().enumerate() {
            let err = property_error(property, &f, eq, group)?;
            max_errors[i] = max_errors[i].max(err);
            if !(err <= tol) && failure.is_none() {
                failure = Some(FailureCase {
                    group: group.clone(),
                    equation: eq.clone(),
                    seed,
                    trial,
                    property,
                    error: err,
                    tolerance: tol,
                    function: f.clone(),
                });
            }
        }
    }
    let properties: Vec<PropertyReport> = Property::ALL
        .iter()
        .zip(max_errors)
        .map(|(&property, max_error)| PropertyReport {
            property,
            passed: max_error <= tol,
            max_error,
        })
        .collect();
    Ok(VerifyReport {
        group: group.to_string(),
        equation: eq.coeffs().to_vec(),
        seed,
        trials,
        tolerance: tol,
        passed: properties.iter().all(|p| p.passed),
        properties,
        hypothesis_failure: None,
        failure,
    })
}

fn render_report(report: &VerifyReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            let mut s = String::from("property,passed,max_error\n");
            if report.hypothesis_failure.is_some() {
                s.push_str("hypothesis,false,\n");
            }
            for p in &report.properties {
                let name = serde_json::to_value(p.property).expect("enum serializes");
                let _ = writeln!(s, "{},{},{}", name.as_str().unwrap_or_default(), p.passed, fmt_float(p.max_error));
            }
            s
        }
    }
}

pub fn cmd_verify(group: &GroupSpec, eq: &Equation, trials: usize, seed: u64, tol: f64, format: Format) -> Outcome {
    match verify_suite(group, eq, trials, seed, tol) {
        Ok(report) => {
            let output = render_report(&report, format);
            if report.passed {
                Outcome::ok(output)
            } else {
                let failure = report.failure.as_ref().expect("failed reports carry a case");
                Outcome {
                    code: EXIT_INTERNAL,
                    output,
                    message: Some(format!(
                        "property {:?} failed at trial {} with error {:e}",
                        failure.property, failure.trial, failure.error
                    )),
                }
            }
        }
        Err(e @ Error::NonCoprimeCoefficient { .. }) => {
            let report = VerifyReport {
                group: group.to_string(),
                equation: eq.coeffs().to_vec(),
                seed,
                trials,
                tolerance: tol,
                properties: Vec::new(),
                passed: false,
                hypothesis_failure: Some(e.to_string()),
                failure: None,
            };
            Outcome {
                code: EXIT_NOT_APPLICABLE,
                output: render_report(&report, format),
                message: Some(format!("hypothesis failure: {e}")),
            }
        }
        Err(e) => e.into(),
    }
}

/// Re-evaluates a stored failure. Accepts a bare case or a whole report.
pub fn replay(path: &PathBuf, format: Format) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::fail(EXIT_PARSE, format!("cannot read {}: {e}", path.display())),
    };
    let case: FailureCase = match serde_json::from_str::<FailureCase>(&text) {
        Ok(c) => c,
        Err(_) => match serde_json::from_str::<VerifyReport>(&text).map(|r| r.failure) {
            Ok(Some(c)) => c,
            _ => return Outcome::fail(EXIT_PARSE, format!("{} holds no failure case", path.display())),
        },
    };
    let err = match property_error(case.property, &case.function, &case.equation, &case.group) {
        Ok(e) => e,
        Err(e) => return e.into(),
    };
    let reproduced = FailureCase { error: err, ..case.clone() };
    let failed = !(err <= case.tolerance);
    let output = match format {
        Format::Json => to_json(&json!({ "reproduced": failed, "case": reproduced })),
        Format::Csv => {
            let name = serde_json::to_value(case.property).expect("enum serializes");
            format!(
                "property,passed,error\n{},{},{}\n",
                name.as_str().unwrap_or_default(),
                !failed,
                fmt_float(err)
            )
        }
    };
    Outcome {
        code: if failed { EXIT_INTERNAL } else { EXIT_OK },
        output,
        message: failed.then(|| format!("property {:?} fails with error {err:e}", case.property)),
    }
}
