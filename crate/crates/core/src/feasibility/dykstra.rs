use crate::densemat::{eigh, project_psd, CMat};
use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityCert, FeasibilityStatus};
use crate::qcore::{unflatten, Multimeter, Povm};
use crate::tol::{ENUMERATION_CAP, EPS_RANK, MAX_ITER_COMPAT, TOL_COMPAT};

/// Joint POVM over outcomes `λ ∈ [k]^g` (row-major, `λ_0` most significant)
/// with deterministic marginals `E_{a|x} = Σ_{λ: λ_x = a} G_λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMeasurement {
    pub g: usize,
    pub k: usize,
    pub joint: Povm,
}

impl JointMeasurement {
    pub fn outcome(&self, index: usize) -> Vec<usize> {
        let mut lam = vec![0; self.g];
        unflatten(index, &vec![self.k; self.g], &mut lam);
        lam
    }

    pub fn marginal(&self, x: usize) -> Povm {
        let d = self.joint.d();
        let mut effects = vec![CMat::zeros(d); self.k];
        for (i, g) in self.joint.effects().iter().enumerate() {
            effects[self.outcome(i)[x]] += g;
        }
        Povm::new_unchecked(effects).expect("same dimension")
    }
}

struct Marginals {
    g: usize,
    k: usize,
    /// `labels[λ][x] = λ_x`.
    labels: Vec<Vec<usize>>,
    /// `Aᵀ(AAᵀ)⁺`, row `λ`, column `x·k + a`.
    correction: Vec<Vec<f64>>,
}

impl Marginals {
    fn new(g: usize, k: usize, count: usize) -> Result<Self> {
        let labels: Vec<Vec<usize>> = (0..count)
            .map(|i| {
                let mut lam = vec![0; g];
                unflatten(i, &vec![k; g], &mut lam);
                lam
            })
            .collect();
        let rows = g * k;
        // (AAᵀ)[(x,a),(x',a')] = #{λ : λ_x = a, λ_x' = a'}
        let gram = CMat::from_fn(rows, |p, q| {
            let ((x, a), (xx, aa)) = ((p / k, p % k), (q / k, q % k));
            let hits = labels.iter().filter(|lam| lam[x] == a && lam[xx] == aa).count();
            (hits as f64).into()
        });
        let eig = eigh(&gram)?;
        let top = eig.eigenvalues.last().copied().unwrap_or(0.0);
        let pinv = eig.reconstruct_with(|v| if v > EPS_RANK * top { 1.0 / v } else { 0.0 });
        let correction = labels
            .iter()
            .map(|lam| (0..rows).map(|p| (0..g).map(|x| pinv[(x * k + lam[x], p)].re).sum()).collect())
            .collect();
        Ok(Self { g, k, labels, correction })
    }

    fn residuals(&self, parts: &[CMat], e: &Multimeter) -> Vec<CMat> {
        let mut out: Vec<CMat> = (0..self.g).flat_map(|x| (0..self.k).map(move |a| -e.effect(x, a))).collect();
        for (lam, gm) in self.labels.iter().zip(parts) {
            for (x, &a) in lam.iter().enumerate() {
                out[x * self.k + a] += gm;
            }
        }
        out
    }

    fn max_residual(&self, parts: &[CMat], e: &Multimeter) -> f64 {
        self.residuals(parts, e).iter().map(CMat::frob_norm).fold(0.0, f64::max)
    }

    /// Orthogonal projection onto the affine marginal constraints.
    fn project(&self, parts: &[CMat], e: &Multimeter) -> Vec<CMat> {
        let res = self.residuals(parts, e);
        parts
            .iter()
            .zip(&self.correction)
            .map(|(gm, row)| {
                let mut out = gm.clone();
                for (c, r) in row.iter().zip(&res) {
                    if *c != 0.0 {
                        out.axpy((-c).into(), r);
                    }
                }
                out
            })
            .collect()
    }
}

/// Hermitized product `E_{λ_0|0} ⋯ E_{λ_{g−1}|g−1}`; exact for commuting POVMs
/// and always consistent with the marginals.
fn product_start(e: &Multimeter, labels: &[Vec<usize>]) -> Vec<CMat> {
    labels
        .iter()
        .map(|lam| {
            let mut acc = CMat::identity(e.d());
            for (x, &a) in lam.iter().enumerate() {
                acc = &acc * e.effect(x, a);
            }
            acc.hermitize()
        })
        .collect()
}

fn add_all(a: &[CMat], b: &[CMat]) -> Vec<CMat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_all(a: &[CMat], b: &[CMat]) -> Vec<CMat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Dykstra's alternating projections between the PSD cones and the affine
/// marginal constraints. Reports `Feasible` once the marginal residual of a
/// PSD iterate drops below `TOL_COMPAT`, `Undecided` after `MAX_ITER_COMPAT`.
pub fn joint_measurement_feasibility(e: &Multimeter) -> Result<FeasibilityCert<JointMeasurement>> {
    joint_measurement_feasibility_with(e, TOL_COMPAT, MAX_ITER_COMPAT)
}

pub fn joint_measurement_feasibility_with(
    e: &Multimeter,
    tol: f64,
    max_iter: usize,
) -> Result<FeasibilityCert<JointMeasurement>> {
    let (g, k, d) = e.shape();
    let count = (k as u128).checked_pow(g as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_CAP {
        return Err(Error::Cap { requested: count, cap: ENUMERATION_CAP });
    }
    let count = count as usize;
    let cons = Marginals::new(g, k, count)?;
    let psd = |parts: &[CMat]| -> Result<Vec<CMat>> { parts.iter().map(project_psd).collect() };
    let zero = vec![CMat::zeros(d); count];
    let mut x = psd(&cons.project(&product_start(e, &cons.labels), e))?;
    let (mut p, mut q) = (zero.clone(), zero);
    let mut residual = cons.max_residual(&x, e);
    let mut iterations = 0;
    while residual >= tol && iterations < max_iter {
        let xp = add_all(&x, &p);
        let y = cons.project(&xp, e);
        p = sub_all(&xp, &y);
        let yq = add_all(&y, &q);
        x = psd(&yq)?;
        q = sub_all(&yq, &x);
        residual = cons.max_residual(&x, e);
        iterations += 1;
    }
    let (status, solution) = if residual < tol {
        let joint = Povm::new_unchecked(x)?;
        (FeasibilityStatus::Feasible, Some(JointMeasurement { g, k, joint }))
    } else {
        (FeasibilityStatus::Undecided, None)
    };
    Ok(FeasibilityCert { status, solution, residual, iterations })
}
