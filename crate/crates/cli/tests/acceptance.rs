//! End-to-end acceptance criteria. Runs without the libtest harness so that
//! every criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use mmsim::examples::{run_example, ExampleName, ExampleParams};
use mmsim_core::analysis::{
    classify, is_trash_and_prepare, is_trash_and_prepare_structural, is_trivial_multimeter, is_triviality_preserving,
    is_triviality_preserving_structural, FamilyFlags,
};
use mmsim_core::densemat::hadamard;
use mmsim_core::feasibility::{
    is_classically_simulable, joint_measurement_feasibility, joint_measurement_feasibility_with, FeasibilityStatus,
};
use mmsim_core::qcore::{
    choi_of_map, map_of_choi, radon_nikodym, stinespring, CondProb, CpMap, Instrument, Multimeter, Povm,
};
use mmsim_core::random::{self, rng, Rng64};
use mmsim_core::supermap::{
    action_distance, classical_simulation_map, classical_simulation_realization, compatibility_preserving_map,
    compression_map, compression_realization, from_classical_realization, from_general_realization, instances, realize,
    trash_and_prepare_map, ClassicalRealization, GeneralRealization, Shape, Superchannel,
};
use mmsim_core::tol::{MAX_ITER_COMPAT, TOL_COMPAT};
use mmsim_core::{CMat, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn matrix_units(d: usize) -> impl Iterator<Item = CMat> {
    (0..d * d).map(move |i| CMat::unit(d, i / d, i % d))
}

fn choi_round_trip() -> Result<Outcome> {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let (din, dout) = (1 + i % 4, 1 + (i / 4) % 4);
        let m = random::random_cp_map(din, dout, &mut r);
        let back = choi_of_map(|x| map_of_choi(&m, x).expect("dims"), din, dout);
        worst = worst.max(m.choi().dist(back.choi()));
    }
    outcome(worst < 1e-10, format!("50 CP maps, max ‖J − J'‖_F = {worst:.2e} (< 1e-10)"))
}

fn stinespring_radon_nikodym() -> Result<Outcome> {
    let mut r = rng(102);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let (din, dout, c) = (1 + i % 4, 1 + (i / 4) % 4, 1 + (i / 2) % 4);
        let ins = random::random_instrument(din, dout, c, &mut r);
        let dil = stinespring(&ins.total(), None)?;
        let q = radon_nikodym(ins.branches(), &dil)?;
        for (branch, qi) in ins.branches().iter().zip(q.effects()) {
            for e in matrix_units(dout) {
                worst = worst.max(dil.sandwich(&e, qi)?.dist(&branch.dual_apply(&e)?));
            }
        }
    }
    outcome(worst < 1e-7, format!("50 instruments, max branch dual error {worst:.2e} (< 1e-7)"))
}

/// Heisenberg maps from a random instrument `M_n → M_{d·s}` and random ancilla POVMs.
fn random_general_realization(dims_in: Shape, dims_out: Shape, s: usize, r: &mut Rng64) -> GeneralRealization {
    let lambda = (0..dims_out.g)
        .map(|_| {
            random::random_instrument(dims_out.d, dims_in.d * s, dims_in.g, r)
                .branches()
                .iter()
                .map(CpMap::dual)
                .collect()
        })
        .collect();
    let b = (0..dims_out.g)
        .map(|_| {
            (0..dims_in.g).map(|_| (0..dims_in.k).map(|_| random::random_povm(dims_out.k, s, r)).collect()).collect()
        })
        .collect();
    GeneralRealization { s, dims_in, dims_out, lambda, b }
}

fn realization_round_trip() -> Result<Outcome> {
    let mut r = rng(103);
    let shapes = [
        (Shape::new(1, 2, 2), Shape::new(1, 2, 2)),
        (Shape::new(2, 2, 2), Shape::new(1, 3, 2)),
        (Shape::new(2, 2, 2), Shape::new(2, 2, 3)),
        (Shape::new(1, 3, 2), Shape::new(2, 2, 2)),
        (Shape::new(2, 2, 3), Shape::new(1, 2, 2)),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let (a, b) = shapes[i % shapes.len()];
        let s = 1 + (i / 2) % 3;
        let psi = if i % 2 == 0 {
            let real = random_general_realization(a, b, s, &mut r);
            real.validate()?;
            from_general_realization(&real)?
        } else {
            from_classical_realization(&random::random_classical_realization(a, b, s, false, &mut r)?)?
        }
        .verify()?;
        let back = from_general_realization(&realize(&psi)?)?;
        worst = worst.max(action_distance(&psi, &back)?);
    }
    outcome(worst < 1e-8, format!("20 superchannels, max spanning-set output error {worst:.2e} (< 1e-8)"))
}

/// Ancilla-free TP instance with `g = 4`: two weighted channels with
/// `a`-dependent `ν`, and the Lüders branches of a POVM with `a`-independent `ν`.
fn mixed_tp_realization(i: usize, r: &mut Rng64) -> Result<ClassicalRealization> {
    let w = 0.2 + 0.6 * ((i * 37) % 100) as f64 / 100.0;
    let lu = Instrument::lueders(&random::random_povm(2, 2, r))?;
    let branches = vec![
        random::random_channel(2, 2, r).scale((1.0 - w) * 0.3),
        random::random_channel(2, 2, r).scale((1.0 - w) * 0.7),
        lu.branch(0).scale(w),
        lu.branch(1).scale(w),
    ];
    let dep = random::random_condprob(2, &[2, 2], r);
    let q = random::random_condprob(2, &[], r);
    let nu =
        CondProb::from_fn(2, &[2, 4, 1, 1], |b, c| if c[1] < 2 { dep.get(b, &[c[0], c[1]]) } else { q.get(b, &[]) })?;
    Ok(ClassicalRealization {
        s: 1,
        dims_in: Shape::new(4, 2, 2),
        dims_out: Shape::new(1, 2, 2),
        lambda: vec![Instrument::new(branches)?],
        nu,
    })
}

/// Instrument whose branches are `π_c Φ_c` for channels `Φ_c : M_n → M_d`.
fn factored_instrument(n: usize, d: usize, c: usize, r: &mut Rng64) -> Result<Instrument> {
    let pi = random::random_condprob(c, &[], r);
    Instrument::new((0..c).map(|i| random::random_channel(n, d, r).scale(pi.get(i, &[]))).collect())
}

fn tp_oracle_agreement() -> Result<Outcome> {
    let mut r = rng(104);
    let (mut yes, mut no, mut disagree) = (0, 0, 0);
    for i in 0..100 {
        let real = match i % 5 {
            0 => mixed_tp_realization(i, &mut r)?,
            1 => {
                let (g, k) = (1 + i % 3, 2 + i % 2);
                random::random_classical_realization(
                    Shape::new(g, k, 2),
                    Shape::new(1 + i % 2, 2, 2),
                    1,
                    i % 2 == 0,
                    &mut r,
                )?
            }
            2 => {
                let pi = random::random_condprob(2, &[2], &mut r);
                let nu = random::random_condprob(3, &[2, 2, 2], &mut r);
                classical_simulation_realization(&pi, &nu, 2)?
            }
            3 => compression_realization(&factored_instrument(3, 2, 2, &mut r)?, 1, 2)?,
            _ => compression_realization(&random::random_instrument(2, 2, 2, &mut r), 1, 2)?,
        };
        let psi = from_classical_realization(&real)?.verify()?;
        let brute = is_triviality_preserving(&psi)?.tp;
        if brute != is_triviality_preserving_structural(&real)?.tp {
            disagree += 1;
        }
        if brute {
            yes += 1
        } else {
            no += 1
        }
    }
    outcome(
        disagree == 0 && yes > 0 && no > 0,
        format!("100 realizations ({yes} tp, {no} not), {disagree} disagreements"),
    )
}

fn tap_oracle_agreement() -> Result<Outcome> {
    let mut r = rng(105);
    let (mut yes, mut no, mut disagree) = (0, 0, 0);
    for i in 0..100 {
        let s = 1 + i % 3;
        let (g, k, rr) = (1 + (i / 3) % 2, 2 + (i / 6) % 2, 1 + (i / 12) % 2);
        let real = random::random_classical_realization(
            Shape::new(g, k, 2),
            Shape::new(rr, 2, 2),
            s,
            (i / 2) % 2 == 0,
            &mut r,
        )?;
        let st = is_trash_and_prepare_structural(&real)?;
        let brute = is_trash_and_prepare(&from_classical_realization(&real)?.verify()?)?.tap;
        if st.tap != brute || st.direct.is_some_and(|d| d != brute) {
            disagree += 1;
        }
        if brute {
            yes += 1
        } else {
            no += 1
        }
    }
    outcome(
        disagree == 0 && yes > 0 && no > 0,
        format!("100 realizations ({yes} tap, {no} not), {disagree} disagreements"),
    )
}

fn corollaries() -> Result<Outcome> {
    let mut r = rng(106);
    let mut failures = Vec::new();
    // Classical simulations are triviality preserving.
    let mut cs_tp = 0;
    for i in 0..50 {
        let (g, k, l, rr) = (1 + i % 3, 2 + i % 2, 2 + (i / 2) % 2, 1 + (i / 3) % 2);
        let pi = random::random_condprob(g, &[rr], &mut r);
        let nu = random::random_condprob(l, &[k, g, rr], &mut r);
        cs_tp += is_triviality_preserving(&classical_simulation_map(&pi, &nu, 2)?.verify()?)?.tp as usize;
    }
    if cs_tp != 50 {
        failures.push(format!("cs-tp {cs_tp}/50"));
    }
    // Compressions are never trash-and-prepare.
    let mut c_ntap = 0;
    for i in 0..50 {
        let (n, d, c) = (1 + i % 3, 2 + (i / 3) % 2, 1 + i % 2);
        let phi = random::random_instrument(n, d, c, &mut r);
        c_ntap += !is_trash_and_prepare(&compression_map(&phi, 1 + (i / 2) % 2, 2)?.verify()?)?.tap as usize;
    }
    if c_ntap != 50 {
        failures.push(format!("c-tap {c_ntap}/50"));
    }
    // Compression is tp iff every Φ*_c(I) is proportional to I.
    let mut c_tp = 0;
    for i in 0..50 {
        let (n, d, c) = (2 + i % 2, 2, 2);
        let phi =
            if i % 2 == 0 { factored_instrument(n, d, c, &mut r)? } else { random::random_instrument(n, d, c, &mut r) };
        let factors = phi.branches().iter().all(|b| {
            let u = b.dual_apply(&CMat::identity(d)).expect("dims");
            u.approx_eq(&CMat::identity(n).scale(u.trace().re / n as f64))
        });
        let brute = is_triviality_preserving(&compression_map(&phi, 1, 2)?.verify()?)?.tp;
        c_tp += (factors == brute) as usize;
    }
    if c_tp != 50 {
        failures.push(format!("c-tp {c_tp}/50"));
    }
    // Classical simulation is trash-and-prepare iff ν does not depend on a.
    let mut cs_tap = 0;
    for i in 0..50 {
        let (g, k, rr) = (1 + i % 2, 2 + (i / 2) % 2, 1 + (i / 4) % 2);
        let pi = random::random_condprob(g, &[rr], &mut r);
        let independent = i % 2 == 0;
        let nu = if independent {
            let base = random::random_condprob(2, &[g, rr], &mut r);
            CondProb::from_fn(2, &[k, g, rr], |b, c| base.get(b, &c[1..]))?
        } else {
            random::random_condprob(2, &[k, g, rr], &mut r)
        };
        let tap = is_trash_and_prepare(&classical_simulation_map(&pi, &nu, 2)?.verify()?)?.tap;
        cs_tap += (tap == independent) as usize;
    }
    if cs_tap != 50 {
        failures.push(format!("cs-tap {cs_tap}/50"));
    }
    let detail = if failures.is_empty() {
        "cs-tp 50/50, c-tap 50/50, c-tp 50/50, cs-tap 50/50".to_string()
    } else {
        failures.join(", ")
    };
    outcome(failures.is_empty(), detail)
}

fn example_suite() -> Result<Outcome> {
    let mut failed = Vec::new();
    let mut checks = 0;
    for name in ExampleName::ALL {
        let rep = run_example(name, &ExampleParams::default())?;
        checks += rep.rows.len();
        failed.extend(rep.rows.iter().filter(|row| !row.pass).map(|row| format!("{}: {}", rep.name, row.name)));
    }
    let detail = if failed.is_empty() {
        format!("5 examples, {checks} checks match")
    } else {
        format!("mismatches: {}", failed.join("; "))
    };
    outcome(failed.is_empty(), detail)
}

struct ClassCase {
    label: &'static str,
    psi: Superchannel,
    flags: FamilyFlags,
    tp: bool,
    tap: bool,
    /// Expected compatibility of the image of a compatible input, when claimed.
    compatible_output: Option<(Multimeter, bool)>,
}

fn flags(cs: bool, c: bool, cp: bool) -> FamilyFlags {
    FamilyFlags { classical_sim: cs, compression: c, compat_preserving: cp }
}

fn class_cases(r: &mut Rng64) -> Result<Vec<ClassCase>> {
    let mut cases = Vec::new();
    // Classical simulation with ν_{b|a,x,y} = q_{b|y} lands in ttap.
    let q = random::random_condprob(2, &[2], r);
    let nu = CondProb::from_fn(2, &[2, 2, 2], |b, c| q.get(b, &[c[2]]))?;
    cases.push(ClassCase {
        label: "ttap as classical simulation",
        psi: classical_simulation_map(&random::random_condprob(2, &[2], r), &nu, 2)?,
        flags: flags(true, false, true),
        tp: true,
        tap: true,
        compatible_output: None,
    });
    // Φ_c = π_c id is both a compression and a classical simulation.
    let pi = random::random_condprob(2, &[], r);
    let phi = Instrument::new((0..2).map(|c| CpMap::identity(2).scale(pi.get(c, &[]))).collect())?;
    cases.push(ClassCase {
        label: "compression by π_c id",
        psi: compression_map(&phi, 1, 2)?,
        flags: flags(true, true, true),
        tp: true,
        tap: false,
        compatible_output: None,
    });
    // Φ_c = π_c Φ_0 with n ≠ d: tp compression, not a classical simulation.
    let phi0 = random::random_channel(3, 2, r);
    let phi = Instrument::new((0..2).map(|c| phi0.scale(pi.get(c, &[]))).collect())?;
    cases.push(ClassCase {
        label: "compression by π_c Φ_0, n ≠ d",
        psi: compression_map(&phi, 1, 2)?,
        flags: flags(false, true, true),
        tp: true,
        tap: false,
        compatible_output: None,
    });
    // Classical simulation with l ≠ k is not a compression.
    cases.push(ClassCase {
        label: "classical simulation, l ≠ k",
        psi: classical_simulation_map(
            &random::random_condprob(2, &[1], r),
            &random::random_condprob(3, &[2, 2, 1], r),
            2,
        )?,
        flags: flags(true, false, true),
        tp: true,
        tap: false,
        compatible_output: None,
    });
    // Generic compression instrument: not tp.
    cases.push(ClassCase {
        label: "generic compression",
        psi: compression_map(&random::random_instrument(2, 2, 2, r), 1, 2)?,
        flags: flags(false, true, true),
        tp: false,
        tap: false,
        compatible_output: None,
    });
    // Compatibility preserving with K = 1, L = g, π_{x|y,x'} = 1_{x=x'}, ν = q_{b|y}.
    let (g, k, rr, l) = (2, 2, 2, 2);
    let gamma = random::random_instrument(3, 2, g, r);
    let pi_sel = CondProb::deterministic(g, &[rr, g, 1], |c| c[1]);
    let q = random::random_condprob(l, &[rr], r);
    let nu = CondProb::from_fn(l, &[k, g, rr, g, 1], |b, c| q.get(b, &[c[2]]))?;
    let one = CondProb::distribution(vec![1.0])?;
    cases.push(ClassCase {
        label: "ttap as compatibility preserving",
        psi: compatibility_preserving_map(&one, &[gamma], &pi_sel, &nu)?,
        flags: flags(false, false, true),
        tp: true,
        tap: true,
        compatible_output: None,
    });
    // K = L = 1, n ≠ d, l ≠ k, a-dependent ν.
    let gamma = Instrument::channel(random::random_channel(3, 2, r));
    let pi1 = random::random_condprob(2, &[1, 1, 1], r);
    let nu = CondProb::from_fn(3, &[2, 2, 1, 1, 1], |b, c| {
        [[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]][c[0]][b] * 0.5 + [[0.5, 0.25, 0.25], [0.2, 0.2, 0.6]][c[1]][b] * 0.5
    })?;
    cases.push(ClassCase {
        label: "compatibility preserving, tp only",
        psi: compatibility_preserving_map(&one, &[gamma], &pi1, &nu)?,
        flags: flags(false, false, true),
        tp: true,
        tap: false,
        compatible_output: None,
    });
    // Trash-and-prepare of an incompatible multimeter.
    let bh = Multimeter::new(vec![Povm::computational(2), Povm::basis(&hadamard())])?;
    cases.push(ClassCase {
        label: "tap of an incompatible multimeter",
        psi: trash_and_prepare_map(&bh, Shape::new(1, 2, 2))?,
        flags: flags(false, false, false),
        tp: false,
        tap: true,
        compatible_output: Some((Multimeter::single(Povm::computational(2)), false)),
    });
    // Copies of a nontrivial POVM: compatibility preserving, tap, not tp.
    let e = random::random_povm(2, 2, r);
    cases.push(ClassCase {
        label: "cp-tap-ntp example",
        psi: from_classical_realization(&instances::cp_tap_ntp_realization(&e, 2, Shape::new(2, 2, 2))?)?,
        flags: flags(false, false, true),
        tp: false,
        tap: true,
        compatible_output: Some((random::random_multimeter(2, 2, 2, r), true)),
    });
    // Hadamard conjugation: tp, not compatibility preserving, not tap.
    cases.push(ClassCase {
        label: "tp-ncp-ntap example",
        psi: from_classical_realization(&instances::hadamard_realization())?,
        flags: flags(false, false, false),
        tp: true,
        tap: false,
        compatible_output: Some((Multimeter::single(Povm::computational(2)), false)),
    });
    // Lüders instrument with p ≠ q.
    cases.push(ClassCase {
        label: "cp-ntp-nc-ntap example",
        psi: from_classical_realization(&instances::lueders_default()?)?,
        flags: flags(false, false, true),
        tp: false,
        tap: false,
        compatible_output: None,
    });
    Ok(cases)
}

fn class_inclusion_consistency() -> Result<Outcome> {
    let mut r = rng(108);
    let cases = class_cases(&mut r)?;
    let total = cases.len();
    let mut violations = Vec::new();
    for case in cases {
        let psi = case.psi.verify()?;
        let rep = match classify(&psi, Some(case.flags)) {
            Ok(rep) => rep,
            Err(e) => {
                violations.push(format!("{}: {e}", case.label));
                continue;
            }
        };
        if rep.ttap != (rep.tp && rep.tap) || (rep.tp, rep.tap) != (case.tp, case.tap) {
            violations.push(format!("{}: tp={} tap={} ttap={}", case.label, rep.tp, rep.tap, rep.ttap));
        }
        if rep.ttap && !rep.prepared.as_ref().is_some_and(is_trivial_multimeter) {
            violations.push(format!("{}: ttap prepares a nontrivial multimeter", case.label));
        }
        if let Some((input, expected)) = case.compatible_output {
            let out = psi.apply(&input)?;
            let feasible = joint_measurement_feasibility(&out)?.is_feasible();
            if feasible != expected {
                violations.push(format!("{}: output compatibility {feasible}", case.label));
            }
        }
    }
    let detail = if violations.is_empty() {
        format!("{total} instances in their claimed regions, 0 violations")
    } else {
        format!("{} violations: {}", violations.len(), violations.join("; "))
    };
    outcome(violations.is_empty(), detail)
}

fn feasibility_engines() -> Result<Outcome> {
    let mut r = rng(109);
    let mut failures = Vec::new();
    let mut worst_lp: f64 = 0.0;
    for i in 0..10 {
        let m = random::random_multimeter(1 + i % 3, 2 + i % 2, 2, &mut r);
        let cert = is_classically_simulable(&m, &m)?;
        worst_lp = worst_lp.max(cert.residual);
        if !cert.is_feasible() || cert.residual >= 1e-9 {
            failures.push(format!("self-simulation {i}"));
        }
        let w = 0.3 + 0.04 * i as f64;
        let mix =
            Povm::new((0..m.k()).map(|a| &m.effect(0, a).scale(w) + &m.effect(m.g() - 1, a).scale(1.0 - w)).collect())?;
        let cert = is_classically_simulable(&Multimeter::single(mix), &m)?;
        worst_lp = worst_lp.max(cert.residual);
        if !cert.is_feasible() || cert.residual >= 1e-9 {
            failures.push(format!("mixture {i}"));
        }
    }
    for d in 2..=4 {
        let trivial = random::random_trivial_multimeter(2, 3, d, &mut r);
        let cert = is_classically_simulable(&Multimeter::single(Povm::computational(d)), &trivial)?;
        if cert.status != FeasibilityStatus::Infeasible {
            failures.push(format!("trivial simulator d={d} gave {}", cert.status.as_str()));
        }
    }
    let mut worst_joint: f64 = 0.0;
    let mut max_iter = 0;
    for i in 0..10 {
        let d = 2 + i % 3;
        let u = mmsim_core::densemat::eigh(&random::random_hermitian(d, &mut r))?;
        let basis = CMat::from_fn(d, |a, b| u.vector(b)[a]);
        let proj = Povm::basis(&basis);
        let coarse = |f: &dyn Fn(usize) -> f64| -> Result<Povm> {
            let e0 = proj.effects().iter().enumerate().fold(CMat::zeros(d), |acc, (j, p)| &acc + &p.scale(f(j)));
            Povm::new(vec![e0.clone(), &CMat::identity(d) - &e0])
        };
        let w: Vec<f64> = (0..d).map(|j| ((j * 7 + i * 3) % 10) as f64 / 10.0).collect();
        let m = Multimeter::new(vec![coarse(&|j| w[j])?, coarse(&|j| 1.0 - w[(j + 1) % d])?])?;
        let cert = joint_measurement_feasibility(&m)?;
        worst_joint = worst_joint.max(cert.residual);
        max_iter = max_iter.max(cert.iterations);
        if !cert.is_feasible() || cert.residual >= TOL_COMPAT || cert.iterations >= MAX_ITER_COMPAT {
            failures.push(format!("commuting pair {i}: {} residual {:.2e}", cert.status.as_str(), cert.residual));
        }
    }
    let bh = Multimeter::new(vec![Povm::computational(2), Povm::basis(&hadamard())])?;
    let cert = joint_measurement_feasibility_with(&bh, TOL_COMPAT, MAX_ITER_COMPAT)?;
    if cert.is_feasible() || cert.residual <= 1e-4 || cert.iterations != MAX_ITER_COMPAT {
        failures.push(format!("basis/Hadamard: {} residual {:.2e}", cert.status.as_str(), cert.residual));
    }
    let detail = format!(
        "LP max residual {worst_lp:.1e}, commuting max residual {worst_joint:.1e} in ≤ {max_iter} iterations, basis/Hadamard residual {:.2e} at {} iterations{}",
        cert.residual,
        cert.iterations,
        if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join(", ")) }
    );
    outcome(failures.is_empty(), detail)
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("Choi round trip", choi_round_trip),
        ("Stinespring and Radon-Nikodym", stinespring_radon_nikodym),
        ("realization round trip", realization_round_trip),
        ("triviality-preservation oracle agreement", tp_oracle_agreement),
        ("trash-and-prepare oracle agreement", tap_oracle_agreement),
        ("corollary regressions", corollaries),
        ("worked example suite", example_suite),
        ("class inclusion consistency", class_inclusion_consistency),
        ("feasibility engines", feasibility_engines),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run));
        let (pass, detail) = match res {
            Ok(Ok(o)) => (o.pass, o.detail),
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".to_string()),
        };
        failed += !pass as usize;
        println!(
            "criterion {}: {} {name}: {detail} [{:.2}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/9 criteria passed in {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
