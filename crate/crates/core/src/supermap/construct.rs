use crate::densemat::{CMat, C64};
use crate::error::{Error, Result};
use crate::qcore::{choi_of_map, CondProb, CpMap, Instrument, Multimeter, Povm};
use crate::supermap::{
    from_classical_realization, from_general_realization, ClassicalRealization, GeneralRealization, Shape, Superchannel,
};

fn expect_shape(p: &CondProb, out: usize, cond: &[usize], what: &str) -> Result<()> {
    if p.out() != out || p.cond_shape() != cond {
        return Err(Error::Dimension(format!(
            "{what} has shape {} | {:?}; expected {out} | {cond:?}",
            p.out(),
            p.cond_shape()
        )));
    }
    Ok(())
}

/// Appends a trailing condition axis of size one.
fn with_unit_ancilla(p: &CondProb) -> CondProb {
    let mut shape = p.cond_shape().to_vec();
    shape.push(1);
    CondProb::new(p.out(), &shape, p.data().to_vec()).expect("same data")
}

/// `π` is `[g | r]`, `ν` is `[l | k, g, r]`; `Λ_{x|y} = π_{x|y} · id_d`.
pub fn classical_simulation_realization(pi: &CondProb, nu: &CondProb, d: usize) -> Result<ClassicalRealization> {
    let g = pi.out();
    let r = pi.cond_shape().first().copied().unwrap_or(0);
    expect_shape(pi, g, &[r], "π")?;
    let (l, k) = (nu.out(), nu.cond_shape().first().copied().unwrap_or(0));
    expect_shape(nu, l, &[k, g, r], "ν")?;
    let id = CpMap::identity(d);
    let lambda = (0..r)
        .map(|y| Instrument::new((0..g).map(|x| id.scale(pi.get(x, &[y]))).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassicalRealization {
        s: 1,
        dims_in: Shape::new(g, k, d),
        dims_out: Shape::new(r, l, d),
        lambda,
        nu: with_unit_ancilla(nu),
    })
}

/// `N_{b|y} = Σ_x π_{x|y} Σ_a ν_{b|a,x,y} M_{a|x}`.
pub fn classical_simulation_map(pi: &CondProb, nu: &CondProb, d: usize) -> Result<Superchannel> {
    from_classical_realization(&classical_simulation_realization(pi, nu, d)?)
}

/// Input setting `x'·C + c` is compressed by branch `c` of `Φ` into output setting `x'`.
pub fn compression_realization(phi: &Instrument, g_out: usize, k: usize) -> Result<ClassicalRealization> {
    let c_count = phi.outcomes();
    let (n, d) = (phi.din(), phi.dout());
    let g = g_out * c_count;
    let zero = CpMap::zero(n, d);
    let lambda = (0..g_out)
        .map(|y| {
            let branches = (0..g)
                .map(|xi| if xi / c_count == y { phi.branch(xi % c_count).clone() } else { zero.clone() })
                .collect();
            Instrument::new(branches)
        })
        .collect::<Result<Vec<_>>>()?;
    let nu = CondProb::deterministic(k, &[k, g, g_out, 1], |c| c[0]);
    Ok(ClassicalRealization { s: 1, dims_in: Shape::new(g, k, d), dims_out: Shape::new(g_out, k, n), lambda, nu })
}

/// `N_{a|x} = Σ_c Φ*_c(M_{a|x,c})`.
pub fn compression_map(phi: &Instrument, g_out: usize, k: usize) -> Result<Superchannel> {
    from_classical_realization(&compression_realization(phi, g_out, k)?)
}

/// `p` is `[K]`, `gamma[κ]` an instrument `M_n → M_d` with `L` outcomes,
/// `π` is `[g | r, L, K]`, `ν` is `[l | k, g, r, L, K]`. Ancilla index `λ·K + κ`.
pub fn compatibility_preserving_realization(
    p: &CondProb,
    gamma: &[Instrument],
    pi: &CondProb,
    nu: &CondProb,
) -> Result<ClassicalRealization> {
    let kk = p.out();
    expect_shape(p, kk, &[], "p")?;
    if gamma.len() != kk {
        return Err(Error::Dimension(format!("{} instruments for K={kk}", gamma.len())));
    }
    let first = &gamma[0];
    let (n, d, ll) = (first.din(), first.dout(), first.outcomes());
    if gamma.iter().any(|g| (g.din(), g.dout(), g.outcomes()) != (n, d, ll)) {
        return Err(Error::Dimension("instruments Γ_κ of different shapes".into()));
    }
    let g = pi.out();
    let r = pi.cond_shape().first().copied().unwrap_or(0);
    expect_shape(pi, g, &[r, ll, kk], "π")?;
    let (l, k) = (nu.out(), nu.cond_shape().first().copied().unwrap_or(0));
    expect_shape(nu, l, &[k, g, r, ll, kk], "ν")?;
    let s = ll * kk;
    let lambda = (0..r)
        .map(|y| {
            let mut branches = Vec::with_capacity(g * s);
            for x in 0..g {
                for lam in 0..ll {
                    for (kap, gam) in gamma.iter().enumerate() {
                        let w = p.get(kap, &[]) * pi.get(x, &[y, lam, kap]);
                        branches.push(gam.branch(lam).scale(w));
                    }
                }
            }
            Instrument::new(branches)
        })
        .collect::<Result<Vec<_>>>()?;
    let nu = CondProb::new(l, &[k, g, r, s], nu.data().to_vec())?;
    Ok(ClassicalRealization { s, dims_in: Shape::new(g, k, d), dims_out: Shape::new(r, l, n), lambda, nu })
}

/// `N_{b|y} = Σ_{κ,x,a,λ} p_κ ν_{b|a,x,y,λ,κ} π_{x|y,λ,κ} Γ*_{λ|κ}(M_{a|x})`.
pub fn compatibility_preserving_map(
    p: &CondProb,
    gamma: &[Instrument],
    pi: &CondProb,
    nu: &CondProb,
) -> Result<Superchannel> {
    from_classical_realization(&compatibility_preserving_realization(p, gamma, pi, nu)?)
}

/// Classical ancilla of size `l`: `Λ_{x,z|y}(ρ) = δ_{x,0} Tr[ρ N_{z|y}] I/d`, `ν_{b|a,x,y,z} = 1_{b=z}`.
pub fn trash_and_prepare_realization(target: &Multimeter, dims_in: Shape) -> Result<ClassicalRealization> {
    target.povms().iter().try_for_each(Povm::validate)?;
    let (r, l, n) = target.shape();
    let Shape { g, k, d } = dims_in;
    let sigma = CMat::identity(d).scale(1.0 / d as f64);
    let zero = CpMap::zero(n, d);
    let lambda = (0..r)
        .map(|y| {
            let mut branches = Vec::with_capacity(g * l);
            for x in 0..g {
                for z in 0..l {
                    branches.push(if x == 0 {
                        CpMap::measure_prepare(target.effect(y, z), &sigma)
                    } else {
                        zero.clone()
                    });
                }
            }
            Instrument::new(branches)
        })
        .collect::<Result<Vec<_>>>()?;
    let nu = CondProb::deterministic(l, &[k, g, r, l], |c| c[3]);
    Ok(ClassicalRealization { s: l, dims_in, dims_out: Shape::new(r, l, n), lambda, nu })
}

/// Maps every input multimeter of shape `dims_in` to `target`.
pub fn trash_and_prepare_map(target: &Multimeter, dims_in: Shape) -> Result<Superchannel> {
    from_classical_realization(&trash_and_prepare_realization(target, dims_in)?)
}

fn check_ancilla_povms(b: &[Povm]) -> Result<(usize, usize)> {
    let first = b.first().ok_or_else(|| Error::Dimension("no POVMs supplied".into()))?;
    let (l, n) = (first.k(), first.d());
    for p in b {
        if (p.k(), p.d()) != (l, n) {
            return Err(Error::Dimension("POVMs of different shapes".into()));
        }
        p.validate()?;
    }
    Ok((l, n))
}

/// `N_b = Σ_a Tr[M_a]/d · B_{b|a}` for POVMs (`g = r = 1`), built from its action.
pub fn quantum_ancilla_example_map(b: &[Povm], d: usize) -> Result<Superchannel> {
    let (_, n) = check_ancilla_povms(b)?;
    let (k, l) = (b.len(), b[0].k());
    let psi = Superchannel::from_components(Shape::new(1, k, d), Shape::new(1, l, n), |bb, _, a, _| {
        let eff = b[a].effect(bb).clone();
        choi_of_map(move |x| eff.scale_c(x.trace() / C64::new(d as f64, 0.0)), d, n)
    })?;
    Ok(Superchannel::new_verified(psi.dims_in(), psi.dims_out(), psi.map().clone()))
}

/// Quantum-ancilla realization with `s = n`: `Λ*(Y) = Tr_d(Y)/d` and `B_{·|a} = b[a]`.
pub fn quantum_ancilla_realization(b: &[Povm], d: usize) -> Result<GeneralRealization> {
    let (l, n) = check_ancilla_povms(b)?;
    let k = b.len();
    let lam = choi_of_map(
        |y| crate::densemat::partial_trace(y, &[d, n], &[1]).expect("dims").scale(1.0 / d as f64),
        d * n,
        n,
    );
    Ok(GeneralRealization {
        s: n,
        dims_in: Shape::new(1, k, d),
        dims_out: Shape::new(1, l, n),
        lambda: vec![vec![lam]],
        b: vec![vec![b.to_vec()]],
    })
}

/// The map of [`quantum_ancilla_example_map`], assembled from its realization.
pub fn quantum_ancilla_from_realization(b: &[Povm], d: usize) -> Result<Superchannel> {
    from_general_realization(&quantum_ancilla_realization(b, d)?)
}
