//! Named instances from the worked examples.

use crate::densemat::{hadamard, CMat};
use crate::error::Result;
use crate::qcore::{choi_of_map, CondProb, CpMap, Instrument, Multimeter, Povm};
use crate::supermap::{
    compatibility_preserving_realization, trash_and_prepare_realization, ClassicalRealization, Shape,
};

/// `g = 1`, `k = l = d = n = r = 2`: setting `y` conjugates by `H^y`, `ν_{b|a,y} = 1_{b=a}`.
pub fn hadamard_realization() -> ClassicalRealization {
    let lambda = vec![Instrument::channel(CpMap::identity(2)), Instrument::channel(CpMap::unitary(&hadamard()))];
    ClassicalRealization {
        s: 1,
        dims_in: Shape::new(1, 2, 2),
        dims_out: Shape::new(2, 2, 2),
        lambda,
        nu: CondProb::deterministic(2, &[2, 1, 2, 1], |c| c[0]),
    }
}

/// Lüders example: `K = 1`, `L = 2`, `g = r = 1`, `k = l = 2`, `Γ` the Lüders
/// instrument of `{E, I − E}`, `ν_{0|0,0} = p`, `ν_{0|1,0} = q`, `ν_{0|a,1} = 0`.
/// On `M = {F, I − F}` the output effect is `N_0 = qE + (p − q)√E F √E`.
pub fn lueders_realization(p: f64, q: f64, e: &CMat) -> Result<ClassicalRealization> {
    let d = e.dim();
    let g = Povm::new(vec![e.clone(), &CMat::identity(d) - e])?;
    let gamma = Instrument::lueders(&g)?;
    let pk = CondProb::distribution(vec![1.0])?;
    let pi = CondProb::uniform(1, &[1, 2, 1]);
    let nu = CondProb::from_fn(2, &[2, 1, 1, 2, 1], |b, c| {
        let (a, lam) = (c[0], c[3]);
        let p0 = match (a, lam) {
            (0, 0) => p,
            (1, 0) => q,
            _ => 0.0,
        };
        if b == 0 {
            p0
        } else {
            1.0 - p0
        }
    })?;
    compatibility_preserving_realization(&pk, &[gamma], &pi, &nu)
}

/// Default Lüders parameters `p = 1`, `q = 0`, `E = diag(1, 1/2)`.
pub fn lueders_default() -> Result<ClassicalRealization> {
    lueders_realization(1.0, 0.0, &CMat::diag(&[1.0, 0.5]))
}

/// Trash-and-prepare POVM transformation (`g = r = 1`) preparing `target`,
/// realized with a classical ancilla of size `l`.
pub fn tap_classical_realization(target: &Povm, k: usize, d: usize) -> Result<ClassicalRealization> {
    trash_and_prepare_realization(&Multimeter::single(target.clone()), Shape::new(1, k, d))
}

/// Default trash-and-prepare target: the qubit computational-basis POVM.
pub fn tap_classical_default() -> Result<ClassicalRealization> {
    tap_classical_realization(&Povm::computational(2), 2, 2)
}

/// Two different `s = 1` realizations of the map preparing the trivial POVM
/// `p_b · I`: the postprocessing is `ν_{b|a,x} = p_b` and `Λ` is arbitrary.
pub fn tap_not_unique_realizations(
    p: &[f64],
    k: usize,
    d: usize,
) -> Result<(ClassicalRealization, ClassicalRealization)> {
    let l = p.len();
    let nu = CondProb::from_fn(l, &[k, 2, 1, 1], |b, _| p[b])?;
    let dims_in = Shape::new(2, k, d);
    let dims_out = Shape::new(1, l, d);
    let even = Instrument::new(vec![CpMap::identity(d).scale(0.5), CpMap::identity(d).scale(0.5)])?;
    let diag_readout = Instrument::new(
        (0..2)
            .map(|x| {
                choi_of_map(
                    move |z| {
                        let mut out = CMat::zeros(d);
                        for i in (0..d).filter(|i| i % 2 == x) {
                            out[(i, i)] = z[(i, i)];
                        }
                        out
                    },
                    d,
                    d,
                )
            })
            .collect(),
    )?;
    let r1 = ClassicalRealization { s: 1, dims_in, dims_out, lambda: vec![even], nu: nu.clone() };
    let r2 = ClassicalRealization { s: 1, dims_in, dims_out, lambda: vec![diag_readout], nu };
    Ok((r1, r2))
}

/// Non-triviality-preserving readout: `g = 2`, `r = 1`, `k = l = d = n = 2`,
/// `Λ_x(Z) = ⟨x|Z|x⟩ |x⟩⟨x|`, `ν_{b|a,x} = 1_{b=a}`.
pub fn diagonal_readout_realization() -> Result<ClassicalRealization> {
    let branches = (0..2)
        .map(|x| {
            let p = CMat::unit(2, x, x);
            choi_of_map(move |z| p.scale_c(z[(x, x)]), 2, 2)
        })
        .collect();
    Ok(ClassicalRealization {
        s: 1,
        dims_in: Shape::new(2, 2, 2),
        dims_out: Shape::new(1, 2, 2),
        lambda: vec![Instrument::new(branches)?],
        nu: CondProb::deterministic(2, &[2, 2, 1, 1], |c| c[0]),
    })
}

/// Compatibility-preserving trash-and-prepare map that is not triviality
/// preserving: `K = 1`, `L = l`, `Γ_b(ρ) = Tr[E_b ρ] σ`, `ν_{b|a,x,y,b'} = 1_{b=b'}`,
/// preparing `r` copies of the nontrivial POVM `E`.
pub fn cp_tap_ntp_realization(e: &Povm, r: usize, dims_in: Shape) -> Result<ClassicalRealization> {
    let Shape { g, k, d } = dims_in;
    let l = e.k();
    let sigma = CMat::identity(d).scale(1.0 / d as f64);
    let gamma = Instrument::new(e.effects().iter().map(|eb| CpMap::measure_prepare(eb, &sigma)).collect())?;
    let pk = CondProb::distribution(vec![1.0])?;
    // The measured-and-prepared state is fed to setting 0.
    let pi = CondProb::deterministic(g, &[r, l, 1], |_| 0);
    let nu = CondProb::deterministic(l, &[k, g, r, l, 1], |c| c[3]);
    compatibility_preserving_realization(&pk, &[gamma], &pi, &nu)
}
