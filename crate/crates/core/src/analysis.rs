//! Exact desk-scale deciders for triviality preservation and
//! trash-and-prepare, the canonical re-realizations behind them, and the
//! inclusion-checked classification.

use crate::densemat::CMat;
use crate::error::{Error, Result};
use crate::par;
use crate::qcore::{unflatten, CondProb, CpMap, Instrument, Multimeter};
use crate::supermap::{
    affine_spanning_multimeters, from_classical_realization, ClassicalRealization, Shape, Superchannel,
};
use crate::tol::{self, ENUMERATION_CAP};

/// A deterministic assignment `α: [g] → [k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialVertex {
    pub alpha: Vec<usize>,
}

impl TrivialVertex {
    /// `M_{a|x} = 1_{a = α(x)} · I_d`.
    pub fn multimeter(&self, k: usize, d: usize) -> Multimeter {
        let p = CondProb::deterministic(k, &[self.alpha.len()], |c| self.alpha[c[0]]);
        Multimeter::trivial(&p, d).expect("deterministic")
    }
}

fn is_trivial_effect(e: &CMat) -> bool {
    let d = e.dim();
    let t = e.trace().re / d as f64;
    e.approx_eq(&CMat::identity(d).scale(t))
}

/// Every effect is within `ε_eq` of `(Tr M/d)·I`.
pub fn is_trivial_multimeter(m: &Multimeter) -> bool {
    m.povms().iter().all(|p| p.effects().iter().all(is_trivial_effect))
}

fn vertex_count(g: usize, k: usize) -> Result<usize> {
    let mut n: u128 = 1;
    for _ in 0..g {
        n = n.saturating_mul(k as u128);
        if n > ENUMERATION_CAP {
            let requested = (k as u128).checked_pow(g as u32).unwrap_or(u128::MAX);
            return Err(Error::Cap { requested, cap: ENUMERATION_CAP });
        }
    }
    Ok(n as usize)
}

/// Vertex `index` in row-major order (`α(0)` most significant).
fn vertex(index: usize, g: usize, k: usize) -> TrivialVertex {
    let mut alpha = vec![0; g];
    unflatten(index, &vec![k; g], &mut alpha);
    TrivialVertex { alpha }
}

/// The `k^g` deterministic trivial multimeters, in row-major order of `α`.
pub fn extremal_trivial_multimeters(g: usize, k: usize, d: usize) -> Result<impl Iterator<Item = Multimeter>> {
    let n = vertex_count(g, k)?;
    Ok((0..n).map(move |i| vertex(i, g, k).multimeter(k, d)))
}

fn require_verified(psi: &Superchannel) -> Result<()> {
    if psi.is_verified() {
        Ok(())
    } else {
        Err(Error::NotSuperchannel("superchannel has not been verified".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TpWitness {
    pub vertex: TrivialVertex,
    pub output: Multimeter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TpVerdict {
    pub tp: bool,
    /// Lowest-index violating vertex and its image.
    pub witness: Option<TpWitness>,
}

/// Decides triviality preservation on the vertices of the trivial polytope.
pub fn is_triviality_preserving(psi: &Superchannel) -> Result<TpVerdict> {
    require_verified(psi)?;
    let Shape { g, k, d } = psi.dims_in();
    let n = vertex_count(g, k)?;
    let hit = par::find_first(n, |i| {
        let v = vertex(i, g, k);
        match psi.apply(&v.multimeter(k, d)) {
            Ok(out) if is_trivial_multimeter(&out) => None,
            other => Some(other.map(|output| TpWitness { vertex: v, output })),
        }
    });
    match hit {
        None => Ok(TpVerdict { tp: true, witness: None }),
        Some((_, Err(e))) => Err(e),
        Some((_, Ok(w))) => Ok(TpVerdict { tp: false, witness: Some(w) }),
    }
}

/// Largest output difference between two superchannels over the spanning
/// set, and whether every output agrees within `ε_eq`.
fn compare_induced(a: &Superchannel, b: &Superchannel) -> Result<(bool, f64)> {
    let Shape { g, k, d } = a.dims_in();
    let span = affine_spanning_multimeters(g, k, d)?;
    let rows = par::map_slice(&span, |m| -> Result<(bool, f64)> {
        let (oa, ob) = (a.apply(m)?, b.apply(m)?);
        Ok((oa.approx_eq(&ob), oa.max_dist(&ob)))
    });
    rows.into_iter().try_fold((true, 0.0f64), |(ok, worst), r| r.map(|(e, dist)| (ok && e, worst.max(dist))))
}

fn require_s1(r: &ClassicalRealization) -> Result<()> {
    r.validate()?;
    if r.s != 1 {
        return Err(Error::Realization(format!("expected an ancilla-free realization, got s = {}", r.s)));
    }
    Ok(())
}

/// Whether `a ↦ ν_{b|a,x,y,λ}` varies by more than `ε_eq` for some `b`.
fn nu_depends_on_a(r: &ClassicalRealization, x: usize, y: usize, lam: usize) -> bool {
    let (k, l) = (r.dims_in.k, r.dims_out.k);
    (0..l).any(|b| {
        let vals: Vec<f64> = (0..k).map(|a| r.nu(b, a, x, y, lam)).collect();
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo > tol::eps_eq()
    })
}

/// `Λ̃*(Z) = Tr[Λ*(Z)]/n · I_n`, i.e. `Λ̃(ρ) = Tr[ρ]·Λ(I_n/n)`.
fn trace_averaged(m: &CpMap) -> CpMap {
    let n = m.din();
    let sigma = m.apply(&CMat::identity(n).scale(1.0 / n as f64)).expect("dims");
    CpMap::measure_prepare(&CMat::identity(n), &sigma)
}

fn canonical_candidate(r: &ClassicalRealization) -> ClassicalRealization {
    let g = r.dims_in.g;
    let lambda = r
        .lambda
        .iter()
        .enumerate()
        .map(|(y, ins)| {
            let branches = (0..g)
                .map(
                    |x| if nu_depends_on_a(r, x, y, 0) { ins.branch(x).clone() } else { trace_averaged(ins.branch(x)) },
                )
                .collect();
            Instrument::new_unchecked(branches).expect("same shape")
        })
        .collect();
    ClassicalRealization { lambda, ..r.clone() }
}

/// Replaces `Λ_{x|y}` by its trace-averaged map wherever `ν_{·|·,x,y}` does not
/// depend on `a`. Succeeds exactly when the induced superchannel is unchanged,
/// which always holds for triviality-preserving maps.
pub fn canonical_tp_realization(r: &ClassicalRealization) -> Result<ClassicalRealization> {
    require_s1(r)?;
    let out = canonical_candidate(r);
    let (same, residual) = compare_induced(&from_classical_realization(r)?, &from_classical_realization(&out)?)?;
    if !same {
        return Err(Error::Internal(format!(
            "canonical realization changes the induced map (residual {residual:.3e})"
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TpStructural {
    pub tp: bool,
    /// `π_{x|y}` with shape `[g | r]`, on success.
    pub pi: Option<CondProb>,
    /// Channels `Φ_{x,y}` indexed `[y][x]`, on success.
    pub channels: Option<Vec<Vec<CpMap>>>,
}

/// Ancilla-free criterion: after canonicalization every `Λ̃*_{x|y}(I)` is
/// proportional to the identity, and `Λ̃_{x|y} = π_{x|y} Φ_{x,y}` with channels `Φ`.
pub fn is_triviality_preserving_structural(r: &ClassicalRealization) -> Result<TpStructural> {
    require_s1(r)?;
    let fail = TpStructural { tp: false, pi: None, channels: None };
    let canon = canonical_candidate(r);
    let (same, _) = compare_induced(&from_classical_realization(r)?, &from_classical_realization(&canon)?)?;
    if !same {
        return Ok(fail);
    }
    let Shape { g, d, .. } = r.dims_in;
    let Shape { g: rr, d: n, .. } = r.dims_out;
    let mut pi = Vec::with_capacity(g * rr);
    let mut channels = Vec::with_capacity(rr);
    for ins in &canon.lambda {
        let mut row = Vec::with_capacity(g);
        for x in 0..g {
            let m = ins.branch(x);
            let unit = m.dual_apply(&CMat::identity(d))?;
            let p = unit.trace().re / n as f64;
            if !unit.approx_eq(&CMat::identity(n).scale(p)) {
                return Ok(fail);
            }
            pi.push(p.max(0.0));
            row.push(if p < tol::eps_eq() { CpMap::depolarizing(n, d) } else { m.scale(1.0 / p) });
        }
        channels.push(row);
    }
    // Stored as [y][x]; CondProb wants data[y·g + x].
    let pi = CondProb::new(g, &[rr], pi)?;
    Ok(TpStructural { tp: true, pi: Some(pi), channels: Some(channels) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapVerdict {
    pub tap: bool,
    pub prepared: Option<Multimeter>,
}

/// Decides trash-and-prepare by constancy on the affine spanning set.
pub fn is_trash_and_prepare(psi: &Superchannel) -> Result<TapVerdict> {
    require_verified(psi)?;
    let Shape { g, k, d } = psi.dims_in();
    let span = affine_spanning_multimeters(g, k, d)?;
    let first = psi.apply(&span[0])?;
    let hit = par::find_first(span.len(), |i| match psi.apply(&span[i]) {
        Ok(out) if out.approx_eq(&first) => None,
        Ok(_) => Some(Ok(())),
        Err(e) => Some(Err(e)),
    });
    match hit {
        None => Ok(TapVerdict { tap: true, prepared: Some(first) }),
        Some((_, Err(e))) => Err(e),
        Some((_, Ok(()))) => Ok(TapVerdict { tap: false, prepared: None }),
    }
}

/// `ν̄_{b|a,x,y,λ} = (1/k) Σ_{a'} ν_{b|a',x,y,λ}` with the same `Λ`.
pub fn averaged_nu(r: &ClassicalRealization) -> ClassicalRealization {
    let k = r.dims_in.k;
    let nu = CondProb::from_fn(r.nu.out(), r.nu.cond_shape(), |b, c| {
        (0..k).map(|a| r.nu.get(b, &[a, c[1], c[2], c[3]])).sum::<f64>() / k as f64
    })
    .expect("average of distributions");
    ClassicalRealization { nu, ..r.clone() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapStructural {
    pub tap: bool,
    /// Ancilla-free direct criterion: `ν` is `a`-independent on every nonzero branch.
    pub direct: Option<bool>,
    /// Largest output difference between the realization and its `a`-average.
    pub residual: f64,
}

/// Trash-and-prepare iff the `a`-averaged realization induces the same map.
pub fn is_trash_and_prepare_structural(r: &ClassicalRealization) -> Result<TapStructural> {
    r.validate()?;
    let (same, residual) =
        compare_induced(&from_classical_realization(r)?, &from_classical_realization(&averaged_nu(r))?)?;
    let direct = (r.s == 1).then(|| {
        let Shape { g, k, d } = r.dims_in;
        let l = r.dims_out.k;
        (0..r.dims_out.g).all(|y| {
            (0..g).all(|x| {
                let weight = r.branch(y, x, 0).dual_apply(&CMat::identity(d)).expect("dims").frob_norm();
                (0..l).all(|b| {
                    let vals: Vec<f64> = (0..k).map(|a| r.nu(b, a, x, y, 0)).collect();
                    let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                        - vals.iter().cloned().fold(f64::INFINITY, f64::min);
                    spread * weight <= tol::eps_eq() * weight.max(1.0)
                })
            })
        })
    });
    Ok(TapStructural { tap: same, direct, residual })
}

/// Construction provenance; not decided from the Choi matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FamilyFlags {
    pub classical_sim: bool,
    pub compression: bool,
    pub compat_preserving: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub tp: bool,
    pub tap: bool,
    pub ttap: bool,
    pub families: FamilyFlags,
    pub tp_witness: Option<TpWitness>,
    pub prepared: Option<Multimeter>,
}

/// Runs both deciders and checks the inclusions between the classes.
pub fn classify(psi: &Superchannel, hints: Option<FamilyFlags>) -> Result<ClassReport> {
    let tp = is_triviality_preserving(psi)?;
    let tap = is_trash_and_prepare(psi)?;
    let families = hints.unwrap_or_default();
    let report = ClassReport {
        tp: tp.tp,
        tap: tap.tap,
        ttap: tp.tp && tap.tap,
        families,
        tp_witness: tp.witness,
        prepared: tap.prepared,
    };
    let inconsistent = |msg: &str| Err(Error::Inconsistency(msg.into()));
    if families.classical_sim && !report.tp {
        return inconsistent("classical simulation map is not triviality preserving");
    }
    if families.compression && report.tap && psi.dims_in().k >= 2 {
        return inconsistent("compression map is trash-and-prepare");
    }
    if report.ttap && !report.prepared.as_ref().is_some_and(is_trivial_multimeter) {
        return inconsistent("triviality-preserving trash-and-prepare map prepares a nontrivial multimeter");
    }
    Ok(report)
}
