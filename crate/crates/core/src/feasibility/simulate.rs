use crate::densemat::CMat;
use crate::error::{Error, Result};
use crate::feasibility::{lp_feasible, FeasibilityCert, FeasibilityStatus, LpProblem};
use crate::qcore::{CondProb, Multimeter, Povm};
use crate::tol::TOL_LP;

/// Real coordinates of a Hermitian matrix: diagonal, then `Re`/`Im` of the upper triangle.
pub(crate) fn hermitian_coords(h: &CMat) -> Vec<f64> {
    let d = h.dim();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(h[(i, i)].re);
        for j in (i + 1)..d {
            out.push(h[(i, j)].re);
            out.push(h[(i, j)].im);
        }
    }
    out
}

/// `π` with shape `[g | r]` and `ν` with shape `[l | k, g, r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub pi: CondProb,
    pub nu: CondProb,
}

/// `Σ_{x,a} π_{x|y} ν_{b|a,x,y} M_{a|x}`.
pub fn simulate(m: &Multimeter, sim: &Simulation) -> Result<Multimeter> {
    let (g, k, d) = m.shape();
    let r = sim.pi.cond_shape().first().copied().unwrap_or(0);
    let l = sim.nu.out();
    if sim.pi.out() != g || sim.nu.cond_shape() != [k, g, r] {
        return Err(Error::Dimension("simulation shapes do not match the multimeter".into()));
    }
    let povms = (0..r)
        .map(|y| {
            let effects = (0..l)
                .map(|b| {
                    let mut acc = CMat::zeros(d);
                    for x in 0..g {
                        for a in 0..k {
                            let w = sim.pi.get(x, &[y]) * sim.nu.get(b, &[a, x, y]);
                            if w != 0.0 {
                                acc += &m.effect(x, a).scale(w);
                            }
                        }
                    }
                    acc
                })
                .collect();
            Povm::new_unchecked(effects)
        })
        .collect::<Result<Vec<_>>>()?;
    Multimeter::new_unchecked(povms)
}

/// LP over `q_{b,a,x,y} = π_{x|y} ν_{b|a,x,y} ≥ 0` and `π_{x|y} ≥ 0`.
pub fn is_classically_simulable(n: &Multimeter, m: &Multimeter) -> Result<FeasibilityCert<Simulation>> {
    let (g, k, d) = m.shape();
    let (r, l, dn) = n.shape();
    if d != dn {
        return Err(Error::Dimension(format!("target acts on C^{dn}, source on C^{d}")));
    }
    let q = |b: usize, a: usize, x: usize, y: usize| ((b * k + a) * g + x) * r + y;
    let nq = l * k * g * r;
    let pv = |x: usize, y: usize| nq + x * r + y;
    let mut lp = LpProblem::new(nq + g * r);
    for y in 0..r {
        for x in 0..g {
            for a in 0..k {
                let mut terms: Vec<(usize, f64)> = (0..l).map(|b| (q(b, a, x, y), 1.0)).collect();
                terms.push((pv(x, y), -1.0));
                lp.push_sparse(&terms, 0.0)?;
            }
        }
        lp.push_sparse(&(0..g).map(|x| (pv(x, y), 1.0)).collect::<Vec<_>>(), 1.0)?;
    }
    let coords: Vec<Vec<Vec<f64>>> =
        (0..g).map(|x| (0..k).map(|a| hermitian_coords(m.effect(x, a))).collect()).collect();
    for y in 0..r {
        for b in 0..l {
            let target = hermitian_coords(n.effect(y, b));
            for (t, &rhs) in target.iter().enumerate() {
                let mut terms = Vec::with_capacity(g * k);
                for (x, row) in coords.iter().enumerate() {
                    for (a, effect) in row.iter().enumerate() {
                        let c = effect[t];
                        if c != 0.0 {
                            terms.push((q(b, a, x, y), c));
                        }
                    }
                }
                lp.push_sparse(&terms, rhs)?;
            }
        }
    }
    let cert = lp_feasible(&lp, TOL_LP)?;
    let Some(sol) = cert.solution.as_ref() else {
        return Ok(FeasibilityCert {
            status: cert.status,
            solution: None,
            residual: cert.residual,
            iterations: cert.iterations,
        });
    };
    let pi_data: Vec<f64> = (0..r).flat_map(|y| (0..g).map(move |x| (x, y))).map(|(x, y)| sol[pv(x, y)]).collect();
    let pi = CondProb::from_fn(g, &[r], |x, c| {
        let total: f64 = (0..g).map(|xx| pi_data[c[0] * g + xx]).sum();
        pi_data[c[0] * g + x] / total
    })?;
    let nu = CondProb::from_fn(l, &[k, g, r], |b, c| {
        let (a, x, y) = (c[0], c[1], c[2]);
        let p = sol[pv(x, y)];
        if p > TOL_LP {
            let total: f64 = (0..l).map(|bb| sol[q(bb, a, x, y)]).sum();
            sol[q(b, a, x, y)] / total
        } else {
            1.0 / l as f64
        }
    })?;
    let sim = Simulation { pi, nu };
    let out = simulate(m, &sim)?;
    let residual = out.max_dist(n);
    let status = if out.approx_eq(n) { FeasibilityStatus::Feasible } else { FeasibilityStatus::Undecided };
    Ok(FeasibilityCert { status, solution: Some(sim), residual, iterations: cert.iterations })
}

/// `n_b = Σ_a μ_{b|a} m_a` for some `μ` with shape `[l | k]`.
pub fn is_postprocessing_of(n: &Povm, m: &Povm) -> Result<FeasibilityCert<CondProb>> {
    let cert = is_classically_simulable(&Multimeter::single(n.clone()), &Multimeter::single(m.clone()))?;
    let (l, k) = (n.k(), m.k());
    cert.map(|sim| CondProb::from_fn(l, &[k], |b, c| sim.nu.get(b, &[c[0], 0, 0]))).solution_result()
}

impl<T> FeasibilityCert<Result<T>> {
    fn solution_result(self) -> Result<FeasibilityCert<T>> {
        let solution = self.solution.transpose()?;
        Ok(FeasibilityCert { status: self.status, solution, residual: self.residual, iterations: self.iterations })
    }
}
