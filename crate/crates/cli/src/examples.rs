//! Worked examples with their expected verdicts.

use std::fmt::Write as _;

use clap::ValueEnum;
use mmsim_core::analysis::{is_trash_and_prepare, is_triviality_preserving};
use mmsim_core::densemat::hadamard;
use mmsim_core::feasibility::{joint_measurement_feasibility, FeasibilityStatus};
use mmsim_core::qcore::{CondProb, Multimeter, Povm};
use mmsim_core::random::{random_povm, rng};
use mmsim_core::supermap::{
    action_distance, from_classical_realization, from_general_realization, instances, quantum_ancilla_example_map,
    quantum_ancilla_from_realization, realize, Superchannel,
};
use mmsim_core::{CMat, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Hadamard,
    Lueders,
    TapClassical,
    QuantumAncilla,
    TapNotUnique,
}

impl ExampleName {
    pub const ALL: [ExampleName; 5] = [
        ExampleName::Hadamard,
        ExampleName::Lueders,
        ExampleName::TapClassical,
        ExampleName::QuantumAncilla,
        ExampleName::TapNotUnique,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Hadamard => "hadamard",
            ExampleName::Lueders => "lueders",
            ExampleName::TapClassical => "tap-classical",
            ExampleName::QuantumAncilla => "quantum-ancilla",
            ExampleName::TapNotUnique => "tap-not-unique",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExampleParams {
    pub p: f64,
    pub q: f64,
    pub e: CMat,
    pub seed: u64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        ExampleParams { p: 1.0, q: 0.0, e: CMat::diag(&[1.0, 0.5]), seed: 0 }
    }
}

/// Parses `"1,0.5"` as a diagonal matrix or `"a,b;c,d"` as real rows.
pub fn parse_effect(text: &str) -> std::result::Result<CMat, String> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad entry `{v}`: {e}"))).collect()
        })
        .collect::<std::result::Result<_, _>>()?;
    if rows.len() == 1 {
        return Ok(CMat::diag(&rows[0]));
    }
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    CMat::from_real_rows(&refs).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleReport {
    pub name: &'static str,
    pub rows: Vec<CheckRow>,
}

impl ExampleReport {
    fn new(name: ExampleName) -> Self {
        ExampleReport { name: name.as_str(), rows: Vec::new() }
    }

    fn flag(&mut self, name: &str, expected: bool, observed: bool) {
        self.rows.push(CheckRow {
            name: name.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            pass: expected == observed,
        });
    }

    fn bound(&mut self, name: &str, value: f64, limit: f64) {
        self.rows.push(CheckRow {
            name: name.into(),
            expected: format!("< {limit:.0e}"),
            observed: format!("{value:.3e}"),
            pass: value < limit,
        });
    }

    fn text(&mut self, name: &str, expected: &str, observed: String, pass: bool) {
        self.rows.push(CheckRow { name: name.into(), expected: expected.into(), observed, pass });
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn table(&self) -> String {
        let w = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
        let we = self.rows.iter().map(|r| r.expected.len()).max().unwrap_or(0).max(8);
        let wo = self.rows.iter().map(|r| r.observed.len()).max().unwrap_or(0).max(8);
        let mut s = String::new();
        let _ = writeln!(s, "example: {}", self.name);
        let _ = writeln!(s, "{:<w$}  {:<we$}  {:<wo$}  result", "check", "expected", "observed");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<w$}  {:<we$}  {:<wo$}  {}",
                r.name,
                r.expected,
                r.observed,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        let passed = self.rows.iter().filter(|r| r.pass).count();
        let _ = writeln!(s, "{passed}/{} checks match", self.rows.len());
        s
    }
}

pub fn run_example(name: ExampleName, params: &ExampleParams) -> Result<ExampleReport> {
    match name {
        ExampleName::Hadamard => hadamard_example(),
        ExampleName::Lueders => lueders_example(params),
        ExampleName::TapClassical => tap_classical_example(params),
        ExampleName::QuantumAncilla => quantum_ancilla_example(),
        ExampleName::TapNotUnique => tap_not_unique_example(),
    }
}

fn round_trip_distance(psi: &Superchannel) -> Result<(usize, f64)> {
    let r = realize(psi)?;
    r.validate()?;
    let back = from_general_realization(&r)?;
    Ok((r.s, action_distance(psi, &back)?))
}

fn hadamard_example() -> Result<ExampleReport> {
    let mut rep = ExampleReport::new(ExampleName::Hadamard);
    let psi = from_classical_realization(&instances::hadamard_realization())?.verify()?;
    rep.flag("triviality-preserving", true, is_triviality_preserving(&psi)?.tp);
    rep.flag("trash-and-prepare", false, is_trash_and_prepare(&psi)?.tap);
    let input = Multimeter::single(Povm::computational(2));
    let out = psi.apply(&input)?;
    let hb = Povm::basis(&hadamard());
    rep.flag("setting 0 is the input POVM", true, out.povm(0).approx_eq(input.povm(0)));
    rep.flag("setting 1 is the Hadamard basis", true, out.povm(1).approx_eq(&hb));
    let cert = joint_measurement_feasibility(&out)?;
    rep.text(
        "output settings jointly measurable",
        "not feasible",
        format!("{} (residual {:.3e})", cert.status.as_str(), cert.residual),
        cert.status != FeasibilityStatus::Feasible,
    );
    Ok(rep)
}

fn lueders_example(params: &ExampleParams) -> Result<ExampleReport> {
    let ExampleParams { p, q, ref e, .. } = *params;
    let d = e.dim();
    if (p - q).abs() <= mmsim_core::tol::eps_eq() {
        return Err(Error::Realization("the Lüders example needs p ≠ q".into()));
    }
    if e.approx_eq(&CMat::identity(d).scale(e.trace().re / d as f64)) {
        return Err(Error::Realization("the Lüders example needs E not proportional to the identity".into()));
    }
    let mut rep = ExampleReport::new(ExampleName::Lueders);
    let psi = from_classical_realization(&instances::lueders_realization(p, q, e)?)?.verify()?;
    rep.flag("triviality-preserving", false, is_triviality_preserving(&psi)?.tp);
    rep.flag("trash-and-prepare", false, is_trash_and_prepare(&psi)?.tap);
    let trivial =
        |pi: f64| -> Result<Multimeter> { Multimeter::trivial(&CondProb::new(2, &[1], vec![pi, 1.0 - pi])?, d) };
    let mut worst: f64 = 0.0;
    for pi in [0.0, 0.25, 0.5, 1.0] {
        let n0 = psi.apply(&trivial(pi)?)?.effect(0, 0).clone();
        worst = worst.max(n0.dist(&e.scale(p * pi + q * (1.0 - pi))));
    }
    rep.bound("N^{πI} = (pπ + q(1-π))E", worst, 1e-8);
    let n_id = psi.apply(&trivial(1.0)?)?.effect(0, 0).clone();
    rep.flag("N^I = I (required of a compression)", false, n_id.approx_eq(&CMat::identity(d)));
    let n_zero = psi.apply(&trivial(0.0)?)?.effect(0, 0).clone();
    rep.flag("N^0 = N^I", false, n_zero.approx_eq(&n_id));
    Ok(rep)
}

fn tap_classical_example(params: &ExampleParams) -> Result<ExampleReport> {
    let mut rep = ExampleReport::new(ExampleName::TapClassical);
    let r = instances::tap_classical_default()?;
    let psi = from_classical_realization(&r)?.verify()?;
    let target = Povm::computational(2);
    let mut rng = rng(params.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let m = Multimeter::single(random_povm(2, 2, &mut rng));
        worst = worst.max(psi.apply(&m)?.max_dist(&Multimeter::single(target.clone())));
    }
    rep.bound("output on 10 random inputs equals the target", worst, 1e-8);
    rep.flag("trash-and-prepare", true, is_trash_and_prepare(&psi)?.tap);
    rep.flag("triviality-preserving", false, is_triviality_preserving(&psi)?.tp);
    rep.text("classical ancilla size", "2", r.s.to_string(), r.s == 2);
    let (_, dist) = round_trip_distance(&psi)?;
    rep.bound("realize round trip", dist, 1e-8);
    Ok(rep)
}

fn quantum_ancilla_example() -> Result<ExampleReport> {
    let mut rep = ExampleReport::new(ExampleName::QuantumAncilla);
    let b = [Povm::computational(2), Povm::basis(&hadamard())];
    let d = 2;
    let psi = quantum_ancilla_example_map(&b, d)?;
    let verified = Superchannel::new(psi.dims_in(), psi.dims_out(), psi.map().clone())?.verify().is_ok();
    rep.flag("valid superchannel", true, verified);
    rep.bound(
        "agrees with its quantum-ancilla realization",
        action_distance(&psi, &quantum_ancilla_from_realization(&b, d)?)?,
        1e-8,
    );
    let (s, dist) = round_trip_distance(&psi)?;
    rep.text("realize ancilla dimension", ">= 2", s.to_string(), s >= 2);
    rep.bound("realize round trip", dist, 1e-8);
    let mut worst: f64 = 0.0;
    for (a, ba) in b.iter().enumerate() {
        let m = Multimeter::trivial(&CondProb::deterministic(2, &[1], |_| a), d)?;
        worst = worst.max(psi.apply(&m)?.max_dist(&Multimeter::single(ba.clone())));
    }
    rep.bound("trivial input M^(a) maps to B_a", worst, 1e-8);
    let cert = joint_measurement_feasibility(&Multimeter::new(b.to_vec())?)?;
    rep.text(
        "B jointly measurable",
        "not feasible",
        format!("{} (residual {:.3e})", cert.status.as_str(), cert.residual),
        cert.status != FeasibilityStatus::Feasible,
    );
    rep.flag("trash-and-prepare", false, is_trash_and_prepare(&psi)?.tap);
    Ok(rep)
}

fn tap_not_unique_example() -> Result<ExampleReport> {
    let mut rep = ExampleReport::new(ExampleName::TapNotUnique);
    let weights = [0.25, 0.75];
    let (r1, r2) = instances::tap_not_unique_realizations(&weights, 2, 2)?;
    let distinct = r1
        .lambda
        .iter()
        .zip(&r2.lambda)
        .any(|(a, b)| a.branches().iter().zip(b.branches()).any(|(x, y)| !x.approx_eq(y)));
    rep.flag("realizations differ", true, distinct);
    let (a, b) = (from_classical_realization(&r1)?.verify()?, from_classical_realization(&r2)?.verify()?);
    rep.bound("canonical Choi distance", a.canonical_choi().dist(&b.canonical_choi()), 1e-9);
    rep.bound("action distance", action_distance(&a, &b)?, 1e-9);
    let tap = is_trash_and_prepare(&a)?;
    rep.flag("trash-and-prepare", true, tap.tap);
    let expected = Multimeter::trivial(&CondProb::distribution(weights.to_vec())?, 2)?;
    let prepared = tap.prepared.map(|m| m.approx_eq(&expected)).unwrap_or(false);
    rep.flag("prepares p_b · I", true, prepared);
    Ok(rep)
}
