//! Command-line front end: JSON artifacts in, JSON certificates out.
//!
//! Exit codes: 0 when the property holds or the input is valid, 1 when it
//! does not hold or the input violates an invariant, 2 on I/O, parse or usage
//! errors.

pub mod artifact;
pub mod examples;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mmsim_core::analysis::{classify, is_trash_and_prepare, is_triviality_preserving, FamilyFlags};
use mmsim_core::feasibility::{is_classically_simulable, joint_measurement_feasibility_with, FeasibilityCert};
use mmsim_core::qcore::Multimeter;
use mmsim_core::random::{random_classical_realization, random_instrument, random_multimeter, random_povm, rng};
use mmsim_core::supermap::{
    action_distance, from_classical_realization, from_general_realization, realize, Shape, Superchannel,
};
use mmsim_core::tol::{self, Tolerances, MAX_ITER_COMPAT, TOL_COMPAT};
use serde_json::{json, Value};

use artifact::{condprob_value, multimeter_value, povm_value, Artifact, LoadError};
use examples::{parse_effect, run_example, ExampleName, ExampleParams};

pub const TOLERANCE_ENV: &str = "MMSIM_TOLERANCE";

#[derive(Debug, Parser)]
#[command(name = "mmsim", version, about = "Multimeter superchannel toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Tp,
    Tap,
    Classify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    Multimeter,
    Povm,
    Instrument,
    Superchannel,
    ClassicalRealization,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that an artifact parses and satisfies its invariants.
    Validate { path: PathBuf },
    /// Apply a superchannel to a multimeter (or POVM).
    Apply {
        #[arg(long)]
        superchannel: PathBuf,
        #[arg(long)]
        multimeter: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute a realization and check that it reproduces the superchannel.
    Realize {
        superchannel: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide triviality preservation, trash-and-prepare, or both.
    Check {
        #[arg(value_enum)]
        property: Property,
        superchannel: PathBuf,
        /// Declare the map a classical simulation (classify only).
        #[arg(long)]
        classical_sim: bool,
        /// Declare the map a compression (classify only).
        #[arg(long)]
        compression: bool,
        /// Declare the map compatibility preserving (classify only).
        #[arg(long)]
        compat_preserving: bool,
    },
    /// Search for a joint POVM of the settings of a multimeter.
    Compat {
        multimeter: PathBuf,
        #[arg(long, default_value_t = MAX_ITER_COMPAT)]
        max_iter: usize,
    },
    /// Decide whether the target is a classical simulation of the simulator.
    ClassicalSim {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        simulator: PathBuf,
    },
    /// Reproduce a worked example and compare against its stated verdicts.
    Examples {
        #[arg(value_enum)]
        name: ExampleName,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// Effect `E`: `"1,0.5"` for a diagonal or `"a,b;c,d"` for rows.
        #[arg(long)]
        e: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a seeded random artifact.
    Random {
        #[arg(value_enum)]
        kind: RandomKind,
        #[arg(long, default_value_t = 2)]
        g: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        let code = if matches!(e, LoadError::Invalid(_)) { 1 } else { 2 };
        CliError { code, message: e.to_string() }
    }
}

impl From<mmsim_core::Error> for CliError {
    fn from(e: mmsim_core::Error) -> Self {
        let code = match e {
            mmsim_core::Error::Dimension(_) => 1,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: 2, message: format!("I/O error: {e}") }
    }
}

type CliResult = std::result::Result<i32, CliError>;

pub fn tolerances_value() -> Value {
    let t = Tolerances::current();
    json!({
        "eq": t.eq, "herm": t.herm, "psd": t.psd, "rank": t.rank,
        "rn": t.rn, "compat": t.compat, "lp": t.lp,
    })
}

fn emit(out: &mut dyn Write, mut cert: Value) -> std::io::Result<()> {
    cert["tolerances"] = tolerances_value();
    writeln!(out, "{}", serde_json::to_string_pretty(&cert).expect("serializable"))
}

fn code(holds: bool) -> i32 {
    if holds {
        0
    } else {
        1
    }
}

/// Writes to a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

fn write_artifact(a: &Artifact, path: Option<&Path>, out: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(p) => write_atomic(p, &a.to_json()),
        None => out.write_all(a.to_json().as_bytes()),
    }
}

fn load_superchannel(path: &Path) -> std::result::Result<Superchannel, CliError> {
    match Artifact::read(path)? {
        Artifact::Superchannel(psi) => Ok(psi),
        other => Err(CliError::usage(format!(
            "{}: expected a superchannel, found {}",
            path.display(),
            other.kind().as_str()
        ))),
    }
}

/// Multimeters, or POVMs as single-setting multimeters.
fn load_multimeter(path: &Path) -> std::result::Result<Multimeter, CliError> {
    match Artifact::read(path)? {
        Artifact::Multimeter(m) => Ok(m),
        Artifact::Povm(p) => Ok(Multimeter::single(p)),
        other => Err(CliError::usage(format!(
            "{}: expected a multimeter or POVM, found {}",
            path.display(),
            other.kind().as_str()
        ))),
    }
}

fn cert_fields<T>(c: &FeasibilityCert<T>) -> Value {
    json!({ "status": c.status.as_str(), "residual": c.residual, "iterations": c.iterations })
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> CliResult {
    match Artifact::read(path) {
        Ok(a) => {
            let file = a.to_file();
            emit(out, json!({ "command": "validate", "valid": true, "kind": file.kind.as_str(), "dims": file.dims }))?;
            Ok(0)
        }
        Err(LoadError::Invalid(e)) => {
            emit(out, json!({ "command": "validate", "valid": false, "violation": e.to_string() }))?;
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_apply(sc: &Path, mm: &Path, output: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let psi = load_superchannel(sc)?;
    let m = load_multimeter(mm)?;
    if Shape::of(&m) != psi.dims_in() {
        let Shape { g, k, d } = psi.dims_in();
        return Err(CliError {
            code: 1,
            message: format!(
                "dimension mismatch: superchannel expects (g, k, d) = ({g}, {k}, {d}), multimeter has {:?}",
                m.shape()
            ),
        });
    }
    let result = Artifact::Multimeter(psi.apply(&m)?);
    write_artifact(&result, output, out)?;
    Ok(0)
}

fn cmd_realize(sc: &Path, output: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let psi = load_superchannel(sc)?;
    let r = realize(&psi)?;
    let residual = action_distance(&psi, &from_general_realization(&r)?)?;
    let ok = residual <= tol::eps_eq() * 10.0;
    let artifact = Artifact::GeneralRealization(r);
    let mut cert =
        json!({ "command": "realize", "verdict": ok, "s": artifact_s(&artifact), "round_trip_residual": residual });
    match output {
        Some(p) => {
            write_atomic(p, &artifact.to_json())?;
            cert["output"] = json!(p.display().to_string());
        }
        None => cert["realization"] = serde_json::to_value(artifact.to_file()).expect("serializable"),
    }
    emit(out, cert)?;
    Ok(code(ok))
}

fn artifact_s(a: &Artifact) -> usize {
    match a {
        Artifact::GeneralRealization(r) => r.s,
        Artifact::ClassicalRealization(r) => r.s,
        _ => 0,
    }
}

fn cmd_check(property: Property, sc: &Path, flags: FamilyFlags, out: &mut dyn Write) -> CliResult {
    let psi = load_superchannel(sc)?;
    match property {
        Property::Tp => {
            let v = is_triviality_preserving(&psi)?;
            let witness =
                v.witness.as_ref().map(|w| json!({ "vertex": w.vertex.alpha, "output": multimeter_value(&w.output) }));
            emit(out, json!({ "command": "check tp", "verdict": v.tp, "witness": witness }))?;
            Ok(code(v.tp))
        }
        Property::Tap => {
            let v = is_trash_and_prepare(&psi)?;
            emit(
                out,
                json!({ "command": "check tap", "verdict": v.tap, "prepared": v.prepared.as_ref().map(multimeter_value) }),
            )?;
            Ok(code(v.tap))
        }
        Property::Classify => match classify(&psi, Some(flags)) {
            Ok(rep) => {
                emit(
                    out,
                    json!({
                        "command": "check classify",
                        "verdict": true,
                        "tp": rep.tp,
                        "tap": rep.tap,
                        "ttap": rep.ttap,
                        "families": {
                            "classical_sim": rep.families.classical_sim,
                            "compression": rep.families.compression,
                            "compat_preserving": rep.families.compat_preserving,
                        },
                        "tp_witness": rep.tp_witness.as_ref().map(|w| json!(w.vertex.alpha)),
                        "prepared": rep.prepared.as_ref().map(multimeter_value),
                    }),
                )?;
                Ok(0)
            }
            Err(mmsim_core::Error::Inconsistency(msg)) => {
                emit(out, json!({ "command": "check classify", "verdict": false, "inconsistency": msg }))?;
                Ok(1)
            }
            Err(e) => Err(e.into()),
        },
    }
}

fn cmd_compat(mm: &Path, max_iter: usize, out: &mut dyn Write) -> CliResult {
    let m = load_multimeter(mm)?;
    let c = joint_measurement_feasibility_with(&m, TOL_COMPAT, max_iter)?;
    let mut cert = json!({ "command": "compat", "verdict": c.is_feasible() });
    cert["certificate"] = cert_fields(&c);
    cert["joint"] = json!(c.solution.as_ref().map(|j| povm_value(&j.joint)));
    emit(out, cert)?;
    Ok(code(c.is_feasible()))
}

fn cmd_classical_sim(target: &Path, simulator: &Path, out: &mut dyn Write) -> CliResult {
    let (n, m) = (load_multimeter(target)?, load_multimeter(simulator)?);
    let c = is_classically_simulable(&n, &m)?;
    let mut cert = json!({ "command": "classical-sim", "verdict": c.is_feasible() });
    cert["certificate"] = cert_fields(&c);
    cert["simulation"] =
        json!(c.solution.as_ref().map(|s| json!({ "pi": condprob_value(&s.pi), "nu": condprob_value(&s.nu) })));
    emit(out, cert)?;
    Ok(code(c.is_feasible()))
}

fn cmd_examples(name: ExampleName, params: ExampleParams, out: &mut dyn Write) -> CliResult {
    let rep = run_example(name, &params)?;
    write!(out, "{}", rep.table())?;
    writeln!(out, "tolerances: {}", tolerances_value())?;
    Ok(code(rep.all_pass()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_random(
    kind: RandomKind,
    dims: (usize, usize, usize, usize, usize, usize, usize),
    seed: u64,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult {
    let (g, k, d, r, l, n, s) = dims;
    if [g, k, d, r, l, n, s].contains(&0) {
        return Err(CliError::usage("dimensions must be positive"));
    }
    let mut rng = rng(seed);
    let a = match kind {
        RandomKind::Multimeter => Artifact::Multimeter(random_multimeter(g, k, d, &mut rng)),
        RandomKind::Povm => Artifact::Povm(random_povm(k, d, &mut rng)),
        RandomKind::Instrument => Artifact::Instrument(random_instrument(d, n, k, &mut rng)),
        RandomKind::Superchannel | RandomKind::ClassicalRealization => {
            let real = random_classical_realization(Shape::new(g, k, d), Shape::new(r, l, n), s, false, &mut rng)?;
            if kind == RandomKind::Superchannel {
                Artifact::Superchannel(from_classical_realization(&real)?.verify()?)
            } else {
                Artifact::ClassicalRealization(real)
            }
        }
    };
    write_artifact(&a, output, out)?;
    Ok(0)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path, out),
        Command::Apply { superchannel, multimeter, output } => {
            cmd_apply(&superchannel, &multimeter, output.as_deref(), out)
        }
        Command::Realize { superchannel, output } => cmd_realize(&superchannel, output.as_deref(), out),
        Command::Check { property, superchannel, classical_sim, compression, compat_preserving } => {
            cmd_check(property, &superchannel, FamilyFlags { classical_sim, compression, compat_preserving }, out)
        }
        Command::Compat { multimeter, max_iter } => cmd_compat(&multimeter, max_iter, out),
        Command::ClassicalSim { target, simulator } => cmd_classical_sim(&target, &simulator, out),
        Command::Examples { name, p, q, e, seed } => {
            let mut params = ExampleParams { p, q, seed, ..ExampleParams::default() };
            if let Some(text) = e {
                params.e = parse_effect(&text).map_err(|m| CliError::usage(format!("--e: {m}")))?;
            }
            cmd_examples(name, params, out)
        }
        Command::Random { kind, g, k, d, r, l, n, s, seed, output } => {
            cmd_random(kind, (g, k, d, r, l, n, s), seed, output.as_deref(), out)
        }
    }
}

/// Parses `MMSIM_TOLERANCE`, which must be a positive finite number.
pub fn parse_tolerance(text: &str) -> std::result::Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("{TOLERANCE_ENV} must be a positive number, got `{text}`")),
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, tolerance: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(text) = tolerance {
        match parse_tolerance(text) {
            Ok(v) => tol::set_eps_eq(v),
            Err(m) => {
                let _ = writeln!(err, "error: {m}");
                return 2;
            }
        }
    }
    match dispatch(cli, out) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
