use crate::densemat::{kron, partial_trace, CMat, C64};
use crate::error::{Error, Result};
use crate::par;
use crate::qcore::{
    choi_of_map, radon_nikodym, stinespring, CondProb, CpMap, Instrument, Multimeter, Povm, StinespringDilation,
};
use crate::supermap::{Shape, Superchannel};
use crate::tol;

/// Realization `(s, Λ*, B)`: `N_{b|y} = Σ_{x,a} Λ*_{x|y}(M_{a|x} ⊗ B_{b|a,x,y})`.
///
/// `lambda[y][x]` is the Heisenberg-picture map `Λ*_{x|y}: M_{d·s} → M_n`
/// (stored as a CP map with `din = d·s`, `dout = n`, ancilla factor last).
/// `b[y][x][a]` is an `l`-outcome POVM on ℂ^s.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralRealization {
    pub s: usize,
    pub dims_in: Shape,
    pub dims_out: Shape,
    pub lambda: Vec<Vec<CpMap>>,
    pub b: Vec<Vec<Vec<Povm>>>,
}

impl GeneralRealization {
    pub fn validate(&self) -> Result<()> {
        let (Shape { g, k, d }, Shape { g: r, k: l, d: n }) = (self.dims_in, self.dims_out);
        let s = self.s;
        let bad = |msg: String| Err(Error::Realization(msg));
        if s == 0 {
            return bad("ancilla dimension must be positive".into());
        }
        if self.lambda.len() != r || self.lambda.iter().any(|row| row.len() != g) {
            return bad(format!("expected {r}x{g} preprocessing maps"));
        }
        if self.b.len() != r || self.b.iter().any(|row| row.len() != g || row.iter().any(|col| col.len() != k)) {
            return bad(format!("expected {r}x{g}x{k} ancilla POVMs"));
        }
        for (y, row) in self.lambda.iter().enumerate() {
            let mut unit = CMat::zeros(n);
            for (x, m) in row.iter().enumerate() {
                if (m.din(), m.dout()) != (d * s, n) {
                    return bad(format!("Λ*_{{{x}|{y}}} must map M_{} to M_{n}", d * s));
                }
                m.check_cp().or_else(|e| bad(format!("Λ*_{{{x}|{y}}} is not CP: {e}")))?;
                unit += &m.apply(&CMat::identity(d * s))?;
            }
            if !unit.approx_eq(&CMat::identity(n)) {
                return bad(format!(
                    "Σ_x Λ*_{{x|{y}}} is not unital (deviation {:.3e})",
                    unit.dist(&CMat::identity(n))
                ));
            }
        }
        for povm in self.b.iter().flatten().flatten() {
            if povm.k() != l || povm.d() != s {
                return bad(format!(
                    "ancilla POVM with {} outcomes on C^{}; expected {l} on C^{s}",
                    povm.k(),
                    povm.d()
                ));
            }
            povm.validate().or_else(|e| bad(format!("invalid ancilla POVM: {e}")))?;
        }
        Ok(())
    }

    /// Effect-level component `F_{b,x|a,y}(X) = Λ*_{x|y}(X ⊗ B_{b|a,x,y})` as a map `M_d → M_n`.
    pub fn component(&self, b: usize, x: usize, a: usize, y: usize) -> CpMap {
        let lam = &self.lambda[y][x];
        let eff = self.b[y][x][a].effect(b);
        choi_of_map(|m| lam.apply(&kron(m, eff)).expect("dims"), self.dims_in.d, self.dims_out.d)
    }

    /// Outcome distribution of setting `y` on state `ρ` via the measurement recipe:
    /// prepare `Λ_{x|y}(ρ)`, measure `M_{·|x}` on the system and `B_{·|a,x,y}` on the ancilla.
    pub fn outcome_probabilities(&self, m: &Multimeter, rho: &CMat, y: usize) -> Result<Vec<f64>> {
        let (Shape { g, k, d }, l) = (self.dims_in, self.dims_out.k);
        let s = self.s;
        let mut p = vec![0.0; l];
        for x in 0..g {
            let state = self.lambda[y][x].dual_apply(rho)?;
            for a in 0..k {
                let local = &kron(m.effect(x, a), &CMat::identity(s)) * &state;
                let anc = partial_trace(&local, &[d, s], &[1])?;
                for (b, pb) in p.iter_mut().enumerate() {
                    *pb += self.b[y][x][a].effect(b).trace_product(&anc).re;
                }
            }
        }
        Ok(p)
    }
}

/// Realization with a classical ancilla `(s, Λ, ν)`:
/// `N_{b|y} = Σ_{x,a,λ} ν_{b|a,x,y,λ} Λ*_{x,λ|y}(M_{a|x})`.
///
/// `lambda[y]` is an instrument `M_n → M_d` with `g·s` outcomes, branch `x·s + λ`;
/// `nu` has outcome count `l` and conditions `[k, g, r, s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalRealization {
    pub s: usize,
    pub dims_in: Shape,
    pub dims_out: Shape,
    pub lambda: Vec<Instrument>,
    pub nu: CondProb,
}

impl ClassicalRealization {
    pub fn validate(&self) -> Result<()> {
        let (Shape { g, k, d }, Shape { g: r, k: l, d: n }) = (self.dims_in, self.dims_out);
        let s = self.s;
        let bad = |msg: String| Err(Error::Realization(msg));
        if s == 0 {
            return bad("ancilla size must be positive".into());
        }
        if self.lambda.len() != r {
            return bad(format!("expected {r} instruments, got {}", self.lambda.len()));
        }
        for (y, ins) in self.lambda.iter().enumerate() {
            if (ins.din(), ins.dout(), ins.outcomes()) != (n, d, g * s) {
                return bad(format!(
                    "instrument {y} maps M_{} to M_{} with {} outcomes; expected M_{n} to M_{d} with {}",
                    ins.din(),
                    ins.dout(),
                    ins.outcomes(),
                    g * s
                ));
            }
            ins.validate().or_else(|e| bad(format!("instrument {y}: {e}")))?;
        }
        if self.nu.out() != l || self.nu.cond_shape() != [k, g, r, s] {
            return bad(format!(
                "postprocessing has shape {} | {:?}; expected {l} | [{k}, {g}, {r}, {s}]",
                self.nu.out(),
                self.nu.cond_shape()
            ));
        }
        Ok(())
    }

    /// Branch `Λ_{x,λ|y}` (Schrödinger picture, `M_n → M_d`).
    pub fn branch(&self, y: usize, x: usize, lam: usize) -> &CpMap {
        self.lambda[y].branch(x * self.s + lam)
    }

    pub fn nu(&self, b: usize, a: usize, x: usize, y: usize, lam: usize) -> f64 {
        self.nu.get(b, &[a, x, y, lam])
    }

    /// Embeds the classical ancilla as diagonal ancilla POVMs.
    pub fn to_general(&self) -> Result<GeneralRealization> {
        self.validate()?;
        let (Shape { g, k, d }, Shape { g: r, k: l, d: n }) = (self.dims_in, self.dims_out);
        let s = self.s;
        let lambda = (0..r)
            .map(|y| {
                (0..g)
                    .map(|x| {
                        let duals: Vec<CpMap> = (0..s).map(|lam| self.branch(y, x, lam).dual()).collect();
                        choi_of_map(
                            |big| {
                                let mut out = CMat::zeros(n);
                                for (lam, dual) in duals.iter().enumerate() {
                                    let blk = CMat::from_fn(d, |i, j| big[(i * s + lam, j * s + lam)]);
                                    out += &dual.apply(&blk).expect("dims");
                                }
                                out
                            },
                            d * s,
                            n,
                        )
                    })
                    .collect()
            })
            .collect();
        let b = (0..r)
            .map(|y| {
                (0..g)
                    .map(|x| {
                        (0..k)
                            .map(|a| {
                                let effects = (0..l)
                                    .map(|bb| {
                                        CMat::diag(&(0..s).map(|lam| self.nu(bb, a, x, y, lam)).collect::<Vec<_>>())
                                    })
                                    .collect();
                                Povm::new_unchecked(effects).expect("dims")
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(GeneralRealization { s, dims_in: self.dims_in, dims_out: self.dims_out, lambda, b })
    }
}

/// Superchannel induced by a general realization.
pub fn from_general_realization(r: &GeneralRealization) -> Result<Superchannel> {
    r.validate()?;
    let psi = Superchannel::from_components(r.dims_in, r.dims_out, |b, x, a, y| r.component(b, x, a, y))?;
    Ok(Superchannel::new_verified(psi.dims_in(), psi.dims_out(), psi.map().clone()))
}

/// Superchannel induced by a classical-ancilla realization.
pub fn from_classical_realization(r: &ClassicalRealization) -> Result<Superchannel> {
    from_general_realization(&r.to_general()?)
}

/// Heisenberg map `Y ↦ V†YV` on `M_{dout·s}` for a dilation `V: ℂ^din → ℂ^dout ⊗ ℂ^s`.
fn compression_map(v: &StinespringDilation) -> CpMap {
    let (din, big) = (v.din(), v.dout() * v.s());
    let data = v.v();
    // J[(i,p),(j,p')] = conj(V[p,i]) V[p',j]
    let choi = CMat::from_fn(din * big, |row, col| {
        let (i, p) = (row / big, row % big);
        let (j, pp) = (col / big, col % big);
        data[p * din + i].conj() * data[pp * din + j]
    });
    CpMap::new_unchecked(big, din, choi).expect("dims")
}

/// Dilation with every entry conjugated.
fn conjugate_dilation(v: &StinespringDilation) -> StinespringDilation {
    StinespringDilation::from_parts(v.din(), v.dout(), v.s(), v.v().iter().map(|z| z.conj()).collect())
        .expect("same shape")
}

/// Constructs a realization of a verified superchannel:
/// component extraction from the Choi blocks, a shared-ancilla Stinespring
/// dilation of each `Ψ*_{x|y}`, Radon–Nikodym ancilla POVMs, and the final
/// transposition back to effect-level maps.
pub fn realize(psi: &Superchannel) -> Result<GeneralRealization> {
    if !psi.is_verified() {
        return Err(Error::NotSuperchannel("superchannel has not been verified".into()));
    }
    let (Shape { g, k, d }, Shape { g: r, k: l, d: n }) = (psi.dims_in(), psi.dims_out());
    let scale = (k * d * g) as f64;
    let eps = tol::eps_eq() * scale;

    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|y| (0..g).map(move |x| (y, x))).collect();
    // comps[pair][a][b], Heisenberg maps M_d → M_n read from the blocks.
    let comps: Vec<Vec<Vec<CpMap>>> = par::map_slice(&pairs, |&(y, x)| {
        (0..k).map(|a| (0..l).map(|b| psi.block_component(b, x, a, y)).collect()).collect()
    });

    let mut sums = Vec::with_capacity(pairs.len());
    for (&(y, x), per_a) in pairs.iter().zip(&comps) {
        let per_a_sum: Vec<CMat> = per_a
            .iter()
            .map(|row| {
                let mut acc = CMat::zeros(d * n);
                for f in row {
                    acc += f.choi();
                }
                acc
            })
            .collect();
        let mut avg = CMat::zeros(d * n);
        for m in &per_a_sum {
            avg.axpy(C64::new(1.0 / k as f64, 0.0), m);
        }
        for (a, m) in per_a_sum.iter().enumerate() {
            if !m.approx_eq_tol(&avg, eps) {
                return Err(Error::NotSuperchannel(format!(
                    "Σ_b Ψ*_{{b,{x}|{a},{y}}} depends on a (deviation {:.3e})",
                    m.dist(&avg)
                )));
            }
        }
        sums.push(CpMap::new_unchecked(d, n, avg)?);
    }
    for y in 0..r {
        let mut unit = CMat::zeros(n);
        for x in 0..g {
            unit += &sums[y * g + x].apply(&CMat::identity(d))?;
        }
        if !unit.approx_eq_tol(&CMat::identity(n), eps) {
            return Err(Error::NotSuperchannel(format!(
                "Σ_x Ψ*_{{x|{y}}} is not unital (deviation {:.3e})",
                unit.dist(&CMat::identity(n))
            )));
        }
    }

    // Schrödinger maps M_n → M_d and their common ancilla size.
    let schro: Vec<CpMap> = sums.iter().map(CpMap::dual).collect();
    let ranks = par::map_slice(&schro, |m| stinespring(m, None).map(|v| v.rank()));
    let s = ranks.into_iter().try_fold(1usize, |acc, r| r.map(|v| acc.max(v)))?;

    let pieces = par::map_range(pairs.len(), |p| -> Result<(CpMap, Vec<Povm>)> {
        let tilde = stinespring(&schro[p], Some(s))?;
        let mut povms = Vec::with_capacity(k);
        for row in &comps[p] {
            let parts: Vec<CpMap> = row.iter().map(CpMap::dual).collect();
            let q = radon_nikodym(&parts, &tilde)?;
            let effects = q.into_effects().into_iter().map(|e| e.transpose()).collect();
            povms.push(Povm::new_unchecked(effects)?);
        }
        Ok((compression_map(&conjugate_dilation(&tilde)), povms))
    });

    let mut lambda: Vec<Vec<CpMap>> = vec![Vec::with_capacity(g); r];
    let mut b: Vec<Vec<Vec<Povm>>> = vec![Vec::with_capacity(g); r];
    for ((y, _), piece) in pairs.iter().zip(pieces) {
        let (lam, povms) = piece?;
        lambda[*y].push(lam);
        b[*y].push(povms);
    }
    let out = GeneralRealization { s, dims_in: psi.dims_in(), dims_out: psi.dims_out(), lambda, b };
    out.validate().map_err(|e| match e {
        Error::Realization(msg) => Error::Internal(format!("constructed realization is invalid: {msg}")),
        other => other,
    })?;
    Ok(out)
}
