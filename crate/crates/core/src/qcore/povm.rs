use crate::densemat::{eigh, CMat, C64};
use crate::error::{Error, Result};
use crate::qcore::CondProb;
use crate::tol::{self, EPS_PSD};

/// Finite-outcome POVM on ℂ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    d: usize,
    effects: Vec<CMat>,
}

impl Povm {
    /// Validates hermiticity, positivity and normalization.
    pub fn new(effects: Vec<CMat>) -> Result<Self> {
        let p = Self::new_unchecked(effects)?;
        p.validate()?;
        Ok(p)
    }

    /// Checks shapes only.
    pub fn new_unchecked(effects: Vec<CMat>) -> Result<Self> {
        let d =
            effects.first().map(CMat::dim).ok_or_else(|| Error::Dimension("POVM needs at least one effect".into()))?;
        if let Some(e) = effects.iter().find(|e| e.dim() != d) {
            return Err(Error::Dimension(format!("effect of dimension {} in a POVM on C^{d}", e.dim())));
        }
        Ok(Povm { d, effects })
    }

    pub fn validate(&self) -> Result<()> {
        let mut sum = CMat::zeros(self.d);
        for e in &self.effects {
            check_effect(e)?;
            sum += e;
        }
        let id = CMat::identity(self.d);
        if !sum.approx_eq(&id) {
            return Err(Error::Normalization(format!(
                "effects sum to a matrix at Frobenius distance {:.3e} from the identity",
                sum.dist(&id)
            )));
        }
        Ok(())
    }

    /// Trivial POVM `p_a · I`.
    pub fn trivial(p: &[f64], d: usize) -> Result<Self> {
        Self::new(p.iter().map(|&x| CMat::identity(d).scale(x)).collect())
    }

    /// Projective measurement in the columns of `u`.
    pub fn basis(u: &CMat) -> Self {
        let d = u.dim();
        let effects = (0..d)
            .map(|a| {
                let v: Vec<C64> = (0..d).map(|i| u[(i, a)]).collect();
                CMat::outer(&v)
            })
            .collect();
        Povm { d, effects }
    }

    pub fn computational(d: usize) -> Self {
        Self::basis(&CMat::identity(d))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }

    pub fn effect(&self, a: usize) -> &CMat {
        &self.effects[a]
    }

    pub fn into_effects(self) -> Vec<CMat> {
        self.effects
    }

    pub fn approx_eq(&self, other: &Povm) -> bool {
        self.k() == other.k() && self.effects.iter().zip(&other.effects).all(|(a, b)| a.approx_eq(b))
    }
}

fn check_effect(e: &CMat) -> Result<()> {
    let dev = e.hermiticity_deviation();
    if dev > crate::tol::EPS_HERM * e.frob_norm().max(1.0) {
        return Err(Error::Hermiticity { deviation: dev });
    }
    let min = eigh(e)?.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -EPS_PSD {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

/// `g` POVMs with `k` outcomes on ℂ^d, indexed by setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Multimeter {
    g: usize,
    k: usize,
    d: usize,
    povms: Vec<Povm>,
}

impl Multimeter {
    pub fn new(povms: Vec<Povm>) -> Result<Self> {
        let m = Self::new_unchecked(povms)?;
        for p in &m.povms {
            p.validate()?;
        }
        Ok(m)
    }

    pub fn new_unchecked(povms: Vec<Povm>) -> Result<Self> {
        let first = povms.first().ok_or_else(|| Error::Dimension("multimeter needs at least one setting".into()))?;
        let (k, d) = (first.k(), first.d());
        if let Some(p) = povms.iter().find(|p| p.k() != k || p.d() != d) {
            return Err(Error::Dimension(format!(
                "setting with (k,d)=({},{}) in a multimeter of shape ({k},{d})",
                p.k(),
                p.d()
            )));
        }
        Ok(Multimeter { g: povms.len(), k, d, povms })
    }

    /// Builds from `effects[x][a]`, validating.
    pub fn from_effects(effects: Vec<Vec<CMat>>) -> Result<Self> {
        Self::new(effects.into_iter().map(Povm::new_unchecked).collect::<Result<Vec<_>>>()?)
    }

    pub fn single(p: Povm) -> Self {
        Multimeter { g: 1, k: p.k(), d: p.d(), povms: vec![p] }
    }

    /// Trivial multimeter `p_{a|x} · I`.
    pub fn trivial(p: &CondProb, d: usize) -> Result<Self> {
        let g: usize = p.cond_shape().iter().product();
        let povms =
            (0..g).map(|x| Povm::trivial(&p.data()[x * p.out()..(x + 1) * p.out()], d)).collect::<Result<Vec<_>>>()?;
        Self::new(povms)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.g, self.k, self.d)
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn povm(&self, x: usize) -> &Povm {
        &self.povms[x]
    }

    pub fn effect(&self, x: usize, a: usize) -> &CMat {
        self.povms[x].effect(a)
    }

    pub fn approx_eq(&self, other: &Multimeter) -> bool {
        self.shape() == other.shape() && self.povms.iter().zip(&other.povms).all(|(a, b)| a.approx_eq(b))
    }

    /// Largest Frobenius distance between corresponding effects.
    pub fn max_dist(&self, other: &Multimeter) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..self.g {
            for a in 0..self.k {
                worst = worst.max(self.effect(x, a).dist(other.effect(x, a)));
            }
        }
        worst
    }
}

/// Index of `(a, α, x)` in ℂ^k ⊗ ℂ^d ⊗ ℂ^g.
#[inline]
pub fn mm_index(a: usize, alpha: usize, x: usize, d: usize, g: usize) -> usize {
    (a * d + alpha) * g + x
}

/// `Σ_{x,a} |a⟩⟨a| ⊗ M_{a|x}ᵀ ⊗ |x⟩⟨x|`.
pub fn multimeter_choi(m: &Multimeter) -> CMat {
    let (g, k, d) = m.shape();
    let n = k * d * g;
    let mut j = CMat::zeros(n);
    for x in 0..g {
        for a in 0..k {
            let e = m.effect(x, a);
            for al in 0..d {
                for be in 0..d {
                    j[(mm_index(a, al, x, d, g), mm_index(a, be, x, d, g))] = e[(be, al)];
                }
            }
        }
    }
    j.with_factors(&[k, d, g]).expect("k*d*g")
}

/// Inverse of [`multimeter_choi`], validating block structure, normalization
/// and positivity in that order.
pub fn multimeter_of_choi(j: &CMat, k: usize, d: usize, g: usize) -> Result<Multimeter> {
    let m = decode_blocks(j, k, d, g)?;
    for p in m.povms() {
        let mut sum = CMat::zeros(d);
        for e in p.effects() {
            sum += e;
        }
        let id = CMat::identity(d);
        if !sum.approx_eq(&id) {
            return Err(Error::Normalization(format!(
                "effects sum to a matrix at Frobenius distance {:.3e} from the identity",
                sum.dist(&id)
            )));
        }
    }
    for p in m.povms() {
        for e in p.effects() {
            check_effect(e)?;
        }
    }
    Ok(m)
}

/// Reads the diagonal `(a,x)` blocks without positivity or normalization checks.
pub(crate) fn decode_blocks(j: &CMat, k: usize, d: usize, g: usize) -> Result<Multimeter> {
    let n = k * d * g;
    if j.dim() != n {
        return Err(Error::Dimension(format!(
            "Choi of dimension {} for multimeter shape (g,k,d)=({g},{k},{d})",
            j.dim()
        )));
    }
    let block_of = |i: usize| (i / (d * g), i % g);
    let mut off = 0.0;
    for r in 0..n {
        for c in 0..n {
            if block_of(r) != block_of(c) {
                off += j[(r, c)].norm_sqr();
            }
        }
    }
    let off = off.sqrt();
    if off > tol::eps_eq() * j.frob_norm().max(1.0) {
        return Err(Error::NotMultimeterChoi { off_block: off });
    }
    let povms = (0..g)
        .map(|x| {
            let effects = (0..k)
                .map(|a| CMat::from_fn(d, |al, be| j[(mm_index(a, be, x, d, g), mm_index(a, al, x, d, g))]))
                .collect();
            Povm { d, effects }
        })
        .collect();
    Ok(Multimeter { g, k, d, povms })
}

/// Validates a density matrix.
pub fn check_state(rho: &CMat) -> Result<()> {
    let eps = tol::eps_eq();
    if rho.hermiticity_deviation() > crate::tol::EPS_HERM * rho.frob_norm().max(1.0) {
        return Err(Error::State("density matrix is not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > eps || tr.im.abs() > eps {
        return Err(Error::State(format!("trace {tr} differs from 1")));
    }
    let min = eigh(rho)?.eigenvalues[0];
    if min < -EPS_PSD {
        return Err(Error::State(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Outcome distribution `Tr[M_{a|x} ρ]`.
pub fn multimeter_apply(m: &Multimeter, rho: &CMat, x: usize) -> Result<Vec<f64>> {
    if rho.dim() != m.d() {
        return Err(Error::Dimension(format!("state on C^{} for a multimeter on C^{}", rho.dim(), m.d())));
    }
    if x >= m.g() {
        return Err(Error::Dimension(format!("setting {x} out of range for g={}", m.g())));
    }
    check_state(rho)?;
    Ok(m.povm(x).effects().iter().map(|e| e.trace_product(rho).re).collect())
}

/// `N_b = Σ_a μ_{b|a} M_a`.
pub fn postprocess_povm(m: &Povm, mu: &CondProb) -> Result<Povm> {
    if mu.cond_shape() != [m.k()] {
        return Err(Error::Dimension(format!(
            "postprocessing conditioned on {:?} for a POVM with {} outcomes",
            mu.cond_shape(),
            m.k()
        )));
    }
    let effects = (0..mu.out())
        .map(|b| {
            let mut e = CMat::zeros(m.d());
            for a in 0..m.k() {
                let w = mu.get(b, &[a]);
                if w != 0.0 {
                    e.axpy(C64::new(w, 0.0), m.effect(a));
                }
            }
            e
        })
        .collect();
    Ok(Povm { d: m.d(), effects })
}
