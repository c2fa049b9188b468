use crate::densemat::{CMat, C64, ZERO};
use crate::error::{Error, Result};
use crate::par;
use crate::qcore::{
    choi_of_map, decode_blocks, map_of_choi, mm_index, multimeter_choi, multimeter_of_choi, CpMap, Multimeter,
};
use crate::supermap::affine_spanning_multimeters;

/// Multimeter shape: `g` settings, `k` outcomes, system ℂ^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub g: usize,
    pub k: usize,
    pub d: usize,
}

impl Shape {
    pub fn new(g: usize, k: usize, d: usize) -> Self {
        Shape { g, k, d }
    }

    pub fn of(m: &Multimeter) -> Self {
        Shape { g: m.g(), k: m.k(), d: m.d() }
    }

    /// Dimension `k·d·g` of the multimeter Choi space.
    pub fn choi_dim(&self) -> usize {
        self.k * self.d * self.g
    }

    #[inline]
    pub fn index(&self, a: usize, alpha: usize, x: usize) -> usize {
        mm_index(a, alpha, x, self.d, self.g)
    }
}

/// CP map `Ψ: M_{kdg} → M_{lnr}` between multimeter Choi spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Superchannel {
    dims_in: Shape,
    dims_out: Shape,
    map: CpMap,
    verified: bool,
}

impl Superchannel {
    /// Wraps a Choi matrix; call [`Superchannel::verify`] before relying on it.
    pub fn new(dims_in: Shape, dims_out: Shape, map: CpMap) -> Result<Self> {
        if map.din() != dims_in.choi_dim() || map.dout() != dims_out.choi_dim() {
            return Err(Error::Dimension(format!(
                "map M_{} -> M_{} for multimeter shapes {dims_in:?} -> {dims_out:?}",
                map.din(),
                map.dout()
            )));
        }
        Ok(Superchannel { dims_in, dims_out, map, verified: false })
    }

    pub(crate) fn new_verified(dims_in: Shape, dims_out: Shape, map: CpMap) -> Self {
        Superchannel { dims_in, dims_out, map, verified: true }
    }

    /// Identity on multimeters of the given shape.
    pub fn identity(shape: Shape) -> Self {
        Self::new_verified(shape, shape, CpMap::identity(shape.choi_dim()))
    }

    /// Assembles `Ψ` from component maps `F_{b,x|a,y}: M_d → M_n` acting on
    /// effects, so that `N_{b|y} = Σ_{x,a} F_{b,x|a,y}(M_{a|x})`.
    ///
    /// Only the diagonal `(a,x)`/`(b,y)` blocks of the Choi matrix are filled;
    /// block `(b,y,a,x)` holds the transpose of `J_F`.
    pub fn from_components(
        dims_in: Shape,
        dims_out: Shape,
        component: impl Fn(usize, usize, usize, usize) -> CpMap + Sync + Send,
    ) -> Result<Self> {
        let (Shape { g, k, d }, Shape { g: r, k: l, d: n }) = (dims_in, dims_out);
        let din = dims_in.choi_dim();
        let dout = dims_out.choi_dim();
        let jobs: Vec<(usize, usize, usize, usize)> = (0..l)
            .flat_map(|b| (0..r).flat_map(move |y| (0..k).flat_map(move |a| (0..g).map(move |x| (b, y, a, x)))))
            .collect();
        let comps = par::map_slice(&jobs, |&(b, y, a, x)| component(b, x, a, y));
        let mut choi = CMat::zeros(din * dout);
        for (&(b, y, a, x), f) in jobs.iter().zip(&comps) {
            if (f.din(), f.dout()) != (d, n) {
                return Err(Error::Dimension(format!(
                    "component M_{} -> M_{} where M_{d} -> M_{n} is required",
                    f.din(),
                    f.dout()
                )));
            }
            let jf = f.choi();
            for be in 0..n {
                for al in 0..d {
                    let row = dims_out.index(b, be, y) * din + dims_in.index(a, al, x);
                    for bp in 0..n {
                        for ap in 0..d {
                            let col = dims_out.index(b, bp, y) * din + dims_in.index(a, ap, x);
                            choi[(row, col)] = jf[(bp * d + ap, be * d + al)];
                        }
                    }
                }
            }
        }
        let map = CpMap::new_unchecked(din, dout, choi)?;
        Self::new(dims_in, dims_out, map)
    }

    pub fn dims_in(&self) -> Shape {
        self.dims_in
    }

    pub fn dims_out(&self) -> Shape {
        self.dims_out
    }

    pub fn map(&self) -> &CpMap {
        &self.map
    }

    pub fn choi(&self) -> &CMat {
        self.map.choi()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Runs [`verify_multimeter_superchannel`] and records the outcome.
    pub fn verify(mut self) -> Result<Self> {
        let report = verify_multimeter_superchannel(&self)?;
        if !report.passed() {
            return Err(Error::NotSuperchannel(report.summary()));
        }
        self.verified = true;
        Ok(self)
    }

    /// Raw block read of the component `F̃_{b,x|a,y}` as a Heisenberg map
    /// `M_d → M_n`: its Choi matrix is the `(b,y,a,x)` block of `J_Ψ`, so
    /// `F̃(X) = F(Xᵀ)ᵀ` for the effect-level component `F`.
    pub fn block_component(&self, b: usize, x: usize, a: usize, y: usize) -> CpMap {
        let (d, n) = (self.dims_in.d, self.dims_out.d);
        let din = self.dims_in.choi_dim();
        let j = self.choi();
        let choi = CMat::from_fn(n * d, |r, c| {
            let (be, al) = (r / d, r % d);
            let (bp, ap) = (c / d, c % d);
            j[(
                self.dims_out.index(b, be, y) * din + self.dims_in.index(a, al, x),
                self.dims_out.index(b, bp, y) * din + self.dims_in.index(a, ap, x),
            )]
        });
        CpMap::new_unchecked(d, n, choi).expect("dims")
    }

    /// `Ψ(J_M)` without decoding; Hermitian part only.
    pub fn apply_choi(&self, m: &Multimeter) -> Result<CMat> {
        if Shape::of(m) != self.dims_in {
            return Err(Error::Dimension(format!(
                "multimeter of shape {:?} for a superchannel on {:?}",
                Shape::of(m),
                self.dims_in
            )));
        }
        Ok(map_of_choi(&self.map, &multimeter_choi(m))?.hermitize())
    }

    pub fn apply(&self, m: &Multimeter) -> Result<Multimeter> {
        apply(self, m)
    }

    /// Choi matrix of `Ψ ∘ P`, with `P` the orthogonal projection onto the span
    /// of input multimeter Choi matrices. Two superchannels act identically on
    /// every multimeter iff their canonical Choi matrices agree.
    pub fn canonical_choi(&self) -> CMat {
        let shape = self.dims_in;
        choi_of_map(
            |x| map_of_choi(&self.map, &project_to_multimeter_span(x, shape)).expect("dims"),
            self.map.din(),
            self.map.dout(),
        )
        .choi()
        .clone()
    }
}

/// Orthogonal projection onto `span{J_M}`: block diagonal in `(a,x)` with
/// `Σ_a B_{a,x} = t·I` for a common `t`.
pub fn project_to_multimeter_span(x: &CMat, shape: Shape) -> CMat {
    let Shape { g, k, d } = shape;
    let block = |a: usize, xs: usize| CMat::from_fn(d, |i, j| x[(shape.index(a, i, xs), shape.index(a, j, xs))]);
    let blocks: Vec<Vec<CMat>> = (0..g).map(|xs| (0..k).map(|a| block(a, xs)).collect()).collect();
    let means: Vec<CMat> = blocks
        .iter()
        .map(|row| {
            let mut s = CMat::zeros(d);
            for b in row {
                s += b;
            }
            s.scale(1.0 / k as f64)
        })
        .collect();
    let c = means.iter().map(|m| m.trace()).sum::<C64>() / (g * d) as f64;
    let mut out = CMat::zeros(x.dim());
    for xs in 0..g {
        for a in 0..k {
            let mut b = &blocks[xs][a] - &means[xs];
            for i in 0..d {
                b[(i, i)] += c;
            }
            for i in 0..d {
                for j in 0..d {
                    out[(shape.index(a, i, xs), shape.index(a, j, xs))] = b[(i, j)];
                }
            }
        }
    }
    out
}

/// `Ψ(J_M)` decoded as a multimeter.
pub fn apply(psi: &Superchannel, m: &Multimeter) -> Result<Multimeter> {
    let out = psi.apply_choi(m)?;
    let Shape { g: r, k: l, d: n } = psi.dims_out;
    multimeter_of_choi(&out, l, n, r)
}

/// Outcome of [`verify_multimeter_superchannel`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub cp: bool,
    /// Violations as `(spanning element index, message)`.
    pub violations: Vec<(usize, String)>,
    pub max_off_block: f64,
    pub max_normalization_residual: f64,
    pub min_effect_eigenvalue: f64,
    pub elements_checked: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cp && self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if !self.cp {
            return "Choi matrix is not positive semidefinite".into();
        }
        match self.violations.first() {
            None => "ok".into(),
            Some((i, msg)) => format!("spanning element {i}: {msg}"),
        }
    }
}

/// Checks complete positivity and that every affine-spanning multimeter is
/// mapped to a valid multimeter. Positivity of the outputs follows from CP;
/// block structure and normalization are affine and extend from the spanning set.
pub fn verify_multimeter_superchannel(psi: &Superchannel) -> Result<VerifyReport> {
    let cp = psi.map.check_cp().is_ok();
    let Shape { g, k, d } = psi.dims_in;
    let Shape { g: r, k: l, d: n } = psi.dims_out;
    let span = affine_spanning_multimeters(g, k, d)?;
    let results = par::map_slice(&span, |m| -> (f64, f64, f64, Option<String>) {
        let out = match psi.apply_choi(m) {
            Ok(o) => o,
            Err(e) => return (f64::NAN, f64::NAN, f64::NAN, Some(e.to_string())),
        };
        let raw = match decode_blocks(&out, l, n, r) {
            Ok(raw) => raw,
            Err(e) => {
                let off = match e {
                    Error::NotMultimeterChoi { off_block } => off_block,
                    _ => f64::NAN,
                };
                return (off, f64::NAN, f64::NAN, Some(e.to_string()));
            }
        };
        let mut norm_res = 0.0f64;
        let mut min_eig = f64::INFINITY;
        for p in raw.povms() {
            let mut sum = CMat::zeros(n);
            for e in p.effects() {
                sum += e;
                if let Ok(l) = e.min_eigenvalue() {
                    min_eig = min_eig.min(l);
                }
            }
            norm_res = norm_res.max(sum.dist(&CMat::identity(n)));
        }
        let off = off_block_mass(&out, l, n, r);
        let verdict = multimeter_of_choi(&out, l, n, r).err().map(|e| e.to_string());
        (off, norm_res, min_eig, verdict)
    });
    let mut report = VerifyReport {
        cp,
        violations: Vec::new(),
        max_off_block: 0.0,
        max_normalization_residual: 0.0,
        min_effect_eigenvalue: f64::INFINITY,
        elements_checked: span.len(),
    };
    for (i, (off, norm, eig, err)) in results.into_iter().enumerate() {
        report.max_off_block = report.max_off_block.max(off);
        report.max_normalization_residual = report.max_normalization_residual.max(norm);
        report.min_effect_eigenvalue = report.min_effect_eigenvalue.min(eig);
        if let Some(msg) = err {
            report.violations.push((i, msg));
        }
    }
    Ok(report)
}

fn off_block_mass(j: &CMat, k: usize, d: usize, g: usize) -> f64 {
    let nn = k * d * g;
    let block = |i: usize| (i / (d * g), i % g);
    let mut s = 0.0;
    for r in 0..nn {
        for c in 0..nn {
            if block(r) != block(c) {
                s += j[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Largest Frobenius distance between outputs of two superchannels over the
/// affine spanning set of their common input shape.
pub fn action_distance(a: &Superchannel, b: &Superchannel) -> Result<f64> {
    if a.dims_in != b.dims_in || a.dims_out != b.dims_out {
        return Err(Error::Dimension("superchannels of different shapes".into()));
    }
    let Shape { g, k, d } = a.dims_in;
    let span = affine_spanning_multimeters(g, k, d)?;
    let dists = par::map_slice(&span, |m| -> Result<f64> {
        let oa = block_diagonal(&a.apply_choi(m)?, a.dims_out);
        let ob = block_diagonal(&b.apply_choi(m)?, b.dims_out);
        Ok(oa.dist(&ob))
    });
    dists.into_iter().try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
}

/// Zeroes everything outside the diagonal `(b,y)` blocks.
fn block_diagonal(j: &CMat, shape: Shape) -> CMat {
    let Shape { g, d, .. } = shape;
    let block = |i: usize| (i / (d * g), i % g);
    CMat::from_fn(j.dim(), |r, c| if block(r) == block(c) { j[(r, c)] } else { ZERO })
}

/// `Σ_i w_i Ψ_i` on Choi matrices (shapes must agree).
pub fn mix(parts: &[(f64, &Superchannel)]) -> Result<Superchannel> {
    let (_, first) = parts.first().ok_or_else(|| Error::Dimension("empty mixture".into()))?;
    let mut choi = CMat::zeros(first.choi().dim());
    for (w, p) in parts {
        if p.dims_in != first.dims_in || p.dims_out != first.dims_out {
            return Err(Error::Dimension("mixing superchannels of different shapes".into()));
        }
        choi.axpy(C64::new(*w, 0.0), p.choi());
    }
    let map = CpMap::new_unchecked(first.map.din(), first.map.dout(), choi)?;
    Superchannel::new(first.dims_in, first.dims_out, map)
}
