use crate::densemat::{is_psd, partial_trace, CMat, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol::{EPS_HERM, EPS_PSD};

/// Linear map `M_din → M_dout` stored as its Choi matrix
/// `J = Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|` (output ⊗ input).
#[derive(Debug, Clone, PartialEq)]
pub struct CpMap {
    din: usize,
    dout: usize,
    choi: CMat,
}

impl CpMap {
    /// Validates hermiticity and positivity of the Choi matrix.
    pub fn new(din: usize, dout: usize, choi: CMat) -> Result<Self> {
        let m = Self::new_unchecked(din, dout, choi)?;
        m.check_cp()?;
        Ok(m)
    }

    /// Checks shapes only.
    pub fn new_unchecked(din: usize, dout: usize, choi: CMat) -> Result<Self> {
        if choi.dim() != din * dout {
            return Err(Error::Dimension(format!("Choi of dimension {} for a map M_{din} -> M_{dout}", choi.dim())));
        }
        let choi = choi.with_factors(&[dout, din])?;
        Ok(CpMap { din, dout, choi })
    }

    pub fn check_cp(&self) -> Result<()> {
        let dev = self.choi.hermiticity_deviation();
        if dev > EPS_HERM * self.choi.frob_norm().max(1.0) {
            return Err(Error::Hermiticity { deviation: dev });
        }
        if !is_psd(&self.choi) {
            let min = if self.choi.dim() <= 96 { self.choi.min_eigenvalue()? } else { f64::NAN };
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(())
    }

    pub fn identity(d: usize) -> Self {
        choi_of_map(|x| x.clone(), d, d)
    }

    /// `X ↦ U X U†`.
    pub fn unitary(u: &CMat) -> Self {
        let ud = u.adjoint();
        choi_of_map(|x| u * &(x * &ud), u.dim(), u.dim())
    }

    /// Zero map.
    pub fn zero(din: usize, dout: usize) -> Self {
        CpMap { din, dout, choi: CMat::zeros(din * dout).with_factors(&[dout, din]).expect("dims") }
    }

    /// `ρ ↦ Tr(ρ) · I/d_out`.
    pub fn depolarizing(din: usize, dout: usize) -> Self {
        let choi = CMat::identity(din * dout).scale(1.0 / dout as f64);
        CpMap::new_unchecked(din, dout, choi).expect("dims")
    }

    /// `ρ ↦ Tr(E ρ) σ`.
    pub fn measure_prepare(effect: &CMat, sigma: &CMat) -> Self {
        choi_of_map(|x| sigma.scale_c(effect.trace_product(x)), effect.dim(), sigma.dim())
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn choi(&self) -> &CMat {
        &self.choi
    }

    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        map_of_choi(self, x)
    }

    pub fn dual_apply(&self, a: &CMat) -> Result<CMat> {
        dual_apply(self, a)
    }

    /// The Heisenberg-picture map as a map `M_dout → M_din`.
    pub fn dual(&self) -> CpMap {
        let (din, dout) = (self.din, self.dout);
        // Choi of Φ*: entry ((j,β),(i,β')) = Φ*(e_ββ')[j,i] = J[(β',i),(β,j)].
        let choi = CMat::from_fn(din * dout, |r, c| {
            let (j, b) = (r / dout, r % dout);
            let (i, bp) = (c / dout, c % dout);
            self.choi[(bp * din + i, b * din + j)]
        });
        CpMap::new_unchecked(dout, din, choi).expect("dims")
    }

    /// `Tr_out J`, which equals `Φ*(I)ᵀ`.
    pub fn trace_out(&self) -> CMat {
        partial_trace(&self.choi, &[self.dout, self.din], &[1]).expect("dims")
    }

    pub fn is_tp(&self) -> bool {
        self.trace_out().approx_eq(&CMat::identity(self.din))
    }

    /// Trace non-increasing: `Tr_out J ≤ I`.
    pub fn is_tni(&self) -> bool {
        let gap = &CMat::identity(self.din) - &self.trace_out();
        match gap.min_eigenvalue() {
            Ok(l) => l >= -EPS_PSD,
            Err(_) => false,
        }
    }

    /// `Φ(I) = I` within `ε_eq`.
    pub fn is_unital(&self) -> bool {
        self.apply(&CMat::identity(self.din)).map(|o| o.approx_eq(&CMat::identity(self.dout))).unwrap_or(false)
    }

    pub fn scale(&self, s: f64) -> CpMap {
        CpMap { din: self.din, dout: self.dout, choi: self.choi.scale(s) }
    }

    pub fn add(&self, other: &CpMap) -> Result<CpMap> {
        if (self.din, self.dout) != (other.din, other.dout) {
            return Err(Error::Dimension("adding maps of different shapes".into()));
        }
        Ok(CpMap { din: self.din, dout: self.dout, choi: &self.choi + &other.choi })
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &CpMap) -> Result<CpMap> {
        if first.dout != self.din {
            return Err(Error::Dimension("composition of incompatible maps".into()));
        }
        let mut choi = CMat::zeros(first.din * self.dout);
        let n = first.din;
        for i in 0..n {
            for j in 0..n {
                let y = self.apply(&first.apply(&CMat::unit(n, i, j))?)?;
                write_choi_block(&mut choi, &y, i, j, n);
            }
        }
        CpMap::new_unchecked(first.din, self.dout, choi)
    }

    pub fn approx_eq(&self, other: &CpMap) -> bool {
        self.din == other.din && self.dout == other.dout && self.choi.approx_eq(&other.choi)
    }
}

fn write_choi_block(choi: &mut CMat, y: &CMat, i: usize, j: usize, din: usize) {
    let dout = y.dim();
    for b in 0..dout {
        for bp in 0..dout {
            choi[(b * din + i, bp * din + j)] = y[(b, bp)];
        }
    }
}

/// Choi matrix of a linear map given by its action.
pub fn choi_of_map(f: impl Fn(&CMat) -> CMat, din: usize, dout: usize) -> CpMap {
    let mut choi = CMat::zeros(din * dout);
    for i in 0..din {
        for j in 0..din {
            let y = f(&CMat::unit(din, i, j));
            assert_eq!(y.dim(), dout, "map output has dimension {} instead of {dout}", y.dim());
            write_choi_block(&mut choi, &y, i, j, din);
        }
    }
    CpMap::new_unchecked(din, dout, choi).expect("dims")
}

/// `Φ(X)[β,β'] = Σ_ij J[(β,i),(β',j)] X[i,j]`.
pub fn map_of_choi(m: &CpMap, x: &CMat) -> Result<CMat> {
    let (din, dout) = (m.din, m.dout);
    if x.dim() != din {
        return Err(Error::Dimension(format!("input of dimension {} for a map on M_{din}", x.dim())));
    }
    let mut out = CMat::zeros(dout);
    let nz: Vec<(usize, usize, C64)> = (0..din)
        .flat_map(|i| (0..din).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let v = x[(i, j)];
            (v != ZERO).then_some((i, j, v))
        })
        .collect();
    let j = &m.choi;
    for b in 0..dout {
        for bp in 0..dout {
            let mut s = ZERO;
            for &(i, jj, v) in &nz {
                s += j[(b * din + i, bp * din + jj)] * v;
            }
            out[(b, bp)] = s;
        }
    }
    Ok(out)
}

/// Heisenberg picture: `Φ*(A)[j,i] = Σ_{β,β'} A[β',β] J[(β,i),(β',j)]`.
pub fn dual_apply(m: &CpMap, a: &CMat) -> Result<CMat> {
    let (din, dout) = (m.din, m.dout);
    if a.dim() != dout {
        return Err(Error::Dimension(format!("observable of dimension {} for a map into M_{dout}", a.dim())));
    }
    let nz: Vec<(usize, usize, C64)> = (0..dout)
        .flat_map(|b| (0..dout).map(move |bp| (b, bp)))
        .filter_map(|(b, bp)| {
            let v = a[(bp, b)];
            (v != ZERO).then_some((b, bp, v))
        })
        .collect();
    let j = &m.choi;
    let mut out = CMat::zeros(din);
    for jj in 0..din {
        for i in 0..din {
            let mut s = ZERO;
            for &(b, bp, v) in &nz {
                s += v * j[(b * din + i, bp * din + jj)];
            }
            out[(jj, i)] = s;
        }
    }
    Ok(out)
}

/// Outcome-indexed CP maps summing to a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    din: usize,
    dout: usize,
    branches: Vec<CpMap>,
}

impl Instrument {
    pub fn new(branches: Vec<CpMap>) -> Result<Self> {
        let ins = Self::new_unchecked(branches)?;
        ins.validate()?;
        Ok(ins)
    }

    pub fn new_unchecked(branches: Vec<CpMap>) -> Result<Self> {
        let first = branches.first().ok_or_else(|| Error::Dimension("instrument needs at least one branch".into()))?;
        let (din, dout) = (first.din, first.dout);
        if branches.iter().any(|b| (b.din, b.dout) != (din, dout)) {
            return Err(Error::Dimension("instrument branches of different shapes".into()));
        }
        Ok(Instrument { din, dout, branches })
    }

    pub fn validate(&self) -> Result<()> {
        let mut total = CMat::zeros(self.din);
        for b in &self.branches {
            b.check_cp()?;
            total += &b.trace_out();
        }
        let id = CMat::identity(self.din);
        if !total.approx_eq(&id) {
            return Err(Error::Normalization(format!(
                "instrument is not trace preserving (deviation {:.3e})",
                total.dist(&id)
            )));
        }
        Ok(())
    }

    /// Single-outcome instrument.
    pub fn channel(m: CpMap) -> Self {
        Instrument { din: m.din, dout: m.dout, branches: vec![m] }
    }

    /// Lüders instrument `ρ ↦ √G_λ ρ √G_λ`.
    pub fn lueders(povm: &crate::qcore::Povm) -> Result<Self> {
        let branches = povm
            .effects()
            .iter()
            .map(|e| crate::densemat::psd_sqrt(e).map(|r| choi_of_map(|x| &r * &(x * &r), e.dim(), e.dim())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(branches)
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn outcomes(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[CpMap] {
        &self.branches
    }

    pub fn branch(&self, i: usize) -> &CpMap {
        &self.branches[i]
    }

    /// The channel `Σ_i Λ_i`.
    pub fn total(&self) -> CpMap {
        let mut choi = CMat::zeros(self.din * self.dout);
        for b in &self.branches {
            choi += b.choi();
        }
        CpMap::new_unchecked(self.din, self.dout, choi).expect("dims")
    }

    /// Effects `Λ_i*(I)` of the induced POVM.
    pub fn induced_effects(&self) -> Vec<CMat> {
        self.branches.iter().map(|b| b.dual_apply(&CMat::identity(self.dout)).expect("dims")).collect()
    }
}
