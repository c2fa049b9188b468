use crate::densemat::{eigh, project_psd, CMat, C64, ZERO};
use crate::error::{Error, Result};
use crate::qcore::{CpMap, Povm};
use crate::tol::{self, EPS_RANK, EPS_RN};

/// `V: ℂ^din → ℂ^dout ⊗ ℂ^s` with `Φ*(A) = V†(A ⊗ I_s)V`, where `Φ: M_din → M_dout`.
///
/// Stored row-major as a `(dout·s) × din` array, row index `β·s + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringDilation {
    din: usize,
    dout: usize,
    s: usize,
    rank: usize,
    v: Vec<C64>,
}

impl StinespringDilation {
    pub fn from_parts(din: usize, dout: usize, s: usize, v: Vec<C64>) -> Result<Self> {
        if v.len() != dout * s * din || s == 0 {
            return Err(Error::Dimension(format!(
                "dilation array of length {} for din={din}, dout={dout}, s={s}",
                v.len()
            )));
        }
        Ok(StinespringDilation { din, dout, s, rank: s, v })
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of Kraus operators before padding.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn v(&self) -> &[C64] {
        &self.v
    }

    #[inline]
    pub fn entry(&self, beta: usize, k: usize, i: usize) -> C64 {
        self.v[(beta * self.s + k) * self.din + i]
    }

    /// Kraus operator `K_k = (I ⊗ ⟨k|) V`, a `dout × din` array.
    pub fn kraus(&self, k: usize) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.dout * self.din);
        for b in 0..self.dout {
            for i in 0..self.din {
                out.push(self.entry(b, k, i));
            }
        }
        out
    }

    /// `V†(A ⊗ Q)V`.
    pub fn sandwich(&self, a: &CMat, q: &CMat) -> Result<CMat> {
        if a.dim() != self.dout || q.dim() != self.s {
            return Err(Error::Dimension(format!(
                "sandwich of ({},{}) operators through a dilation with dout={}, s={}",
                a.dim(),
                q.dim(),
                self.dout,
                self.s
            )));
        }
        let (din, s) = (self.din, self.s);
        let rows = self.dout * s;
        // (A ⊗ Q) V
        let mut av = vec![ZERO; rows * din];
        for b in 0..self.dout {
            for k in 0..s {
                let r = b * s + k;
                for bp in 0..self.dout {
                    let ab = a[(b, bp)];
                    if ab == ZERO {
                        continue;
                    }
                    for kp in 0..s {
                        let c = ab * q[(k, kp)];
                        if c == ZERO {
                            continue;
                        }
                        let src = (bp * s + kp) * din;
                        for i in 0..din {
                            av[r * din + i] += c * self.v[src + i];
                        }
                    }
                }
            }
        }
        let mut out = CMat::zeros(din);
        for r in 0..rows {
            for i in 0..din {
                let vc = self.v[r * din + i].conj();
                if vc == ZERO {
                    continue;
                }
                for j in 0..din {
                    out[(i, j)] += vc * av[r * din + j];
                }
            }
        }
        Ok(out)
    }

    /// `Φ*(A) = V†(A ⊗ I)V`.
    pub fn heisenberg(&self, a: &CMat) -> Result<CMat> {
        self.sandwich(a, &CMat::identity(self.s))
    }

    /// Schrödinger-picture Choi of `A ↦ V†(A ⊗ Q)V`, namely `W Qᵀ W†`
    /// with `W[(β,i), k] = V[(β,k), i]`.
    pub fn choi_with(&self, q: &CMat) -> CMat {
        let n = self.dout * self.din;
        let s = self.s;
        let w = |r: usize, k: usize| self.entry(r / self.din, k, r % self.din);
        // T = W Qᵀ, n × s
        let mut t = vec![ZERO; n * s];
        for r in 0..n {
            for k in 0..s {
                let wr = w(r, k);
                if wr == ZERO {
                    continue;
                }
                for kp in 0..s {
                    t[r * s + kp] += wr * q[(kp, k)];
                }
            }
        }
        CMat::from_fn(n, |r, c| (0..s).map(|k| t[r * s + k] * w(c, k).conj()).sum())
    }

    /// The dilated map in the Schrödinger picture.
    pub fn to_map(&self) -> CpMap {
        CpMap::new_unchecked(self.din, self.dout, self.choi_with(&CMat::identity(self.s))).expect("dims")
    }
}

/// Minimal dilation from the spectral decomposition of the Choi matrix,
/// padded with zero Kraus operators up to `s_min`.
pub fn stinespring(m: &CpMap, s_min: Option<usize>) -> Result<StinespringDilation> {
    let (din, dout) = (m.din(), m.dout());
    let e = eigh(m.choi())?;
    let lmax = e.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<usize> = if lmax > 0.0 {
        (0..e.eigenvalues.len()).rev().filter(|&i| e.eigenvalues[i] > EPS_RANK * lmax).collect()
    } else {
        Vec::new()
    };
    let rank = kept.len();
    let s = rank.max(s_min.unwrap_or(0)).max(1);
    let mut v = vec![ZERO; dout * s * din];
    for (k, &idx) in kept.iter().enumerate() {
        let sq = e.eigenvalues[idx].sqrt();
        let n = din * dout;
        for r in 0..n {
            let (b, i) = (r / din, r % din);
            v[(b * s + k) * din + i] = e.eigenvectors[(r, idx)] * sq;
        }
    }
    Ok(StinespringDilation { din, dout, s, rank, v })
}

/// Ancilla POVM `{Q_i}` with `Φ_i*(A) = V†(A ⊗ Q_i)V` for parts summing to the dilated map.
///
/// Solved as `Q_iᵀ = W⁺ J_i W⁺† + (I − P)/N` with `W⁺` the Moore–Penrose inverse
/// and `P` the projector onto the support of `W†W`; the second term spreads the
/// unused (padded) ancilla directions evenly across outcomes.
pub fn radon_nikodym(parts: &[CpMap], dil: &StinespringDilation) -> Result<Povm> {
    let (din, dout, s) = (dil.din, dil.dout, dil.s);
    if parts.is_empty() {
        return Err(Error::Dimension("no parts to decompose".into()));
    }
    if let Some(p) = parts.iter().find(|p| (p.din(), p.dout()) != (din, dout)) {
        return Err(Error::Dimension(format!(
            "part M_{} -> M_{} for a dilation of M_{din} -> M_{dout}",
            p.din(),
            p.dout()
        )));
    }
    let n = din * dout;
    let nparts = parts.len() as f64;
    let w = |r: usize, k: usize| dil.entry(r / din, k, r % din);

    // Gram matrix and its pseudo-inverse.
    let gram = CMat::from_fn(s, |k, kp| (0..n).map(|r| w(r, k).conj() * w(r, kp)).sum());
    let ge = eigh(&gram)?;
    let gmax = ge.eigenvalues.last().copied().unwrap_or(0.0);
    let cut = EPS_RANK * gmax.max(f64::MIN_POSITIVE);
    let ginv = ge.reconstruct_with(|l| if l > cut { 1.0 / l } else { 0.0 });
    let proj = ge.reconstruct_with(|l| if l > cut { 1.0 } else { 0.0 });
    // W⁺ = G⁺ W†, s × n
    let mut wp = vec![ZERO; s * n];
    for k in 0..s {
        for r in 0..n {
            wp[k * n + r] = (0..s).map(|kp| ginv[(k, kp)] * w(r, kp).conj()).sum();
        }
    }
    let complement = &CMat::identity(s) - &proj;

    let mut effects = Vec::with_capacity(parts.len());
    let mut sum = CMat::zeros(s);
    let mut worst = 0.0f64;
    for part in parts {
        let j = part.choi();
        // T = W⁺ J, s × n
        let mut t = vec![ZERO; s * n];
        for k in 0..s {
            for c in 0..n {
                let mut acc = ZERO;
                for r in 0..n {
                    let x = wp[k * n + r];
                    if x != ZERO {
                        acc += x * j[(r, c)];
                    }
                }
                t[k * n + c] = acc;
            }
        }
        let mut qt = CMat::from_fn(s, |k, kp| (0..n).map(|c| t[k * n + c] * wp[kp * n + c].conj()).sum());
        qt.axpy(C64::new(1.0 / nparts, 0.0), &complement);
        let q = project_psd(&qt.transpose().hermitize())?;
        let recon = dil.choi_with(&q);
        let res = recon.dist(j) / j.frob_norm().max(1.0);
        worst = worst.max(res);
        sum += &q;
        effects.push(q);
    }
    if worst > EPS_RN {
        return Err(Error::Decomposition { residual: worst, tolerance: EPS_RN });
    }
    let id = CMat::identity(s);
    if !sum.approx_eq_tol(&id, tol::eps_eq().max(EPS_RN)) {
        return Err(Error::Decomposition { residual: sum.dist(&id), tolerance: EPS_RN });
    }
    Povm::new_unchecked(effects)
}
