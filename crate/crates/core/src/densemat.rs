//! Dense complex matrices on tensor-product spaces and the Hermitian
//! routines built on them (Jacobi eigensolver, PSD square root and projection).

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::{self, EPS_HERM, EPS_PSD};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major, with optional tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
    factor_dims: Option<Vec<usize>>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![ZERO; dim * dim], factor_dims: None }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Matrix unit |i⟩⟨j|.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.data[i * dim + j] = ONE;
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMat { dim, data, factor_dims: None }
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(CMat { dim, data, factor_dims: None })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Dimension(format!("row of length {} in {dim}x{dim} matrix", row.len())));
            }
            data.extend_from_slice(row);
        }
        Ok(CMat { dim, data, factor_dims: None })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = C64::new(v, 0.0);
        }
        m
    }

    /// Projector |v⟩⟨v| (no normalization).
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn factor_dims(&self) -> Option<&[usize]> {
        self.factor_dims.as_deref()
    }

    pub fn with_factors(mut self, dims: &[usize]) -> Result<Self> {
        let p: usize = dims.iter().product();
        if p != self.dim {
            return Err(Error::Dimension(format!("factor dims {dims:?} do not multiply to {}", self.dim)));
        }
        self.factor_dims = Some(dims.to_vec());
        Ok(self)
    }

    /// Factor dims if present, else the single factor `[dim]`.
    fn factors_or_whole(&self) -> Vec<usize> {
        self.factor_dims.clone().unwrap_or_else(|| vec![self.dim])
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::from_fn(n, |i, j| self.data[j * n + i].conj());
        out.factor_dims = self.factor_dims.clone();
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::from_fn(n, |i, j| self.data[j * n + i]);
        out.factor_dims = self.factor_dims.clone();
        out
    }

    pub fn conj(&self) -> Self {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
            factor_dims: self.factor_dims.clone(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_c(C64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        CMat { dim: self.dim, data: self.data.iter().map(|z| z * s).collect(), factor_dims: self.factor_dims.clone() }
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: C64, other: &CMat) {
        assert_eq!(self.dim, other.dim, "axpy dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &CMat) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        CMat { dim: n, data: out, factor_dims: None }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        (0..n).map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum()).collect()
    }

    /// Tr[self · other] without forming the product.
    pub fn trace_product(&self, other: &CMat) -> C64 {
        let n = self.dim;
        let mut s = ZERO;
        for i in 0..n {
            for j in 0..n {
                s += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        s
    }

    /// Frobenius norm of `self - self†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= EPS_HERM * self.frob_norm().max(1.0)
    }

    /// Hermitian part (A + A†)/2.
    pub fn hermitize(&self) -> Self {
        let n = self.dim;
        let mut out = Self::from_fn(n, |i, j| (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5);
        out.factor_dims = self.factor_dims.clone();
        out
    }

    /// Frobenius distance, `‖self − other‖_F`.
    pub fn dist(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim, "dist dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Equality within `ε_eq` relative to `max(1, ‖self‖_F, ‖other‖_F)`.
    pub fn approx_eq(&self, other: &CMat) -> bool {
        self.approx_eq_tol(other, tol::eps_eq())
    }

    pub fn approx_eq_tol(&self, other: &CMat, eps: f64) -> bool {
        self.dim == other.dim && self.dist(other) <= eps * self.frob_norm().max(other.frob_norm()).max(1.0)
    }

    /// Principal submatrix on `[start, start + len)`.
    pub fn block(&self, start_row: usize, start_col: usize, len: usize) -> Self {
        let n = self.dim;
        Self::from_fn(len, |i, j| self.data[(start_row + i) * n + start_col + j])
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigh(self)?.eigenvalues.first().copied().unwrap_or(0.0))
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add<&CMat> for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
            factor_dims: self.factor_dims.clone(),
        }
    }
}

impl Sub<&CMat> for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
            factor_dims: self.factor_dims.clone(),
        }
    }
}

impl Mul<&CMat> for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.scale(-1.0)
    }
}

impl AddAssign<&CMat> for CMat {
    fn add_assign(&mut self, rhs: &CMat) {
        self.axpy(ONE, rhs);
    }
}

/// Tensor product; factor dims are concatenated.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut data = vec![ZERO; n * n];
    for i1 in 0..na {
        for j1 in 0..na {
            let x = a.data[i1 * na + j1];
            if x == ZERO {
                continue;
            }
            for i2 in 0..nb {
                let row = (i1 * nb + i2) * n + j1 * nb;
                for j2 in 0..nb {
                    data[row + j2] = x * b.data[i2 * nb + j2];
                }
            }
        }
    }
    let mut dims = a.factors_or_whole();
    dims.extend(b.factors_or_whole());
    CMat { dim: n, data, factor_dims: Some(dims) }
}

/// Traces out every factor not listed in `keep`. Kept factors retain their order.
pub fn partial_trace(a: &CMat, factor_dims: &[usize], keep: &[usize]) -> Result<CMat> {
    let total: usize = factor_dims.iter().product();
    if total != a.dim {
        return Err(Error::Dimension(format!("factor dims {factor_dims:?} do not multiply to {}", a.dim)));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= factor_dims.len()) {
        return Err(Error::Dimension(format!("kept factor {bad} out of range")));
    }
    let mut strides = vec![1usize; factor_dims.len()];
    for f in (0..factor_dims.len().saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * factor_dims[f + 1];
    }
    let kept: Vec<usize> = (0..factor_dims.len()).filter(|f| keep.contains(f)).collect();
    let traced: Vec<usize> = (0..factor_dims.len()).filter(|f| !keep.contains(f)).collect();
    let offsets = |fs: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &f in fs {
            let mut next = Vec::with_capacity(offs.len() * factor_dims[f]);
            for &o in &offs {
                for v in 0..factor_dims[f] {
                    next.push(o + v * strides[f]);
                }
            }
            offs = next;
        }
        offs
    };
    let ko = offsets(&kept);
    let to = offsets(&traced);
    let m = ko.len();
    let mut out = CMat::zeros(m);
    for r in 0..m {
        for c in 0..m {
            let mut s = ZERO;
            for &t in &to {
                s += a.data[(ko[r] + t) * a.dim + ko[c] + t];
            }
            out.data[r * m + c] = s;
        }
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&f| factor_dims[f]).collect();
    if kept_dims.len() > 1 {
        out.factor_dims = Some(kept_dims);
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: CMat,
}

impl HermEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        let n = self.eigenvectors.dim;
        (0..n).map(|i| self.eigenvectors.data[i * n + k]).collect()
    }

    /// U · diag(f(λ)) · U†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.eigenvectors.dim;
        let u = &self.eigenvectors.data;
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for k in 0..n {
                    if w[k] != 0.0 {
                        s += u[i * n + k] * u[j * n + k].conj() * w[k];
                    }
                }
                out.data[i * n + j] = s;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMat {
        self.reconstruct_with(|l| l)
    }
}

/// Cyclic complex Jacobi eigensolver.
pub fn eigh(h: &CMat) -> Result<HermEig> {
    let dev = h.hermiticity_deviation();
    if dev > EPS_HERM * h.frob_norm().max(1.0) {
        return Err(Error::Hermiticity { deviation: dev });
    }
    let n = h.dim;
    let mut a = h.hermitize().data;
    let mut u = CMat::identity(n).data;
    let scale = h.frob_norm();
    let target = 1e-15 * scale.max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i * n + j].norm_sqr();
                }
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= 1e-300 || r <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 { 1.0 } else { -1.0 } / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let em = phase.conj(); // e^{-iφ}
                let vpp = C64::new(c, 0.0);
                let vpq = C64::new(s, 0.0);
                let vqp = em * (-s);
                let vqq = em * c;
                // A ← A V
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * vpp + akq * vqp;
                    a[k * n + q] = akp * vpq + akq * vqq;
                }
                // A ← V† A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = vpp.conj() * apk + vqp.conj() * aqk;
                    a[q * n + k] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
                // U ← U V
                for k in 0..n {
                    let ukp = u[k * n + p];
                    let ukq = u[k * n + q];
                    u[k * n + p] = ukp * vpp + ukq * vqp;
                    u[k * n + q] = ukp * vpq + ukq * vqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vecs = CMat::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let pivot = (0..n).map(|i| u[i * n + src]).find(|z| z.norm() > 1e-12);
        let fix = pivot.map(|z| z.conj() / z.norm()).unwrap_or(ONE);
        for i in 0..n {
            vecs.data[i * n + col] = u[i * n + src] * fix;
        }
    }
    Ok(HermEig { eigenvalues, eigenvectors: vecs })
}

/// Hermitian PSD square root; eigenvalues in `[-ε_psd·scale, 0)` are clamped.
pub fn psd_sqrt(p: &CMat) -> Result<CMat> {
    let e = eigh(p)?;
    let floor = -EPS_PSD * p.frob_norm().max(1.0);
    if let Some(&min) = e.eigenvalues.first() {
        if min < floor {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    Ok(e.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Frobenius-nearest PSD matrix.
pub fn project_psd(h: &CMat) -> Result<CMat> {
    let e = eigh(h)?;
    if e.eigenvalues.first().is_none_or(|&l| l >= 0.0) {
        return Ok(h.hermitize());
    }
    Ok(e.reconstruct_with(|l| l.max(0.0)))
}

/// PSD test by Cholesky factorization of `h + δI`, `δ = ε_psd·max(1, ‖h‖_F)`.
/// Cubic with a small constant, suitable for large Choi matrices.
pub fn is_psd_cholesky(h: &CMat) -> bool {
    if !h.is_hermitian() {
        return false;
    }
    let n = h.dim;
    let delta = EPS_PSD * h.frob_norm().max(1.0);
    let mut l = vec![ZERO; n * n];
    for j in 0..n {
        let mut d = h.data[j * n + j].re + delta;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        l[j * n + j] = C64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = h.data[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / d;
        }
    }
    true
}

/// PSD check within `ε_psd`: eigensolver for small matrices, Cholesky otherwise.
pub fn is_psd(h: &CMat) -> bool {
    if h.dim <= 48 {
        match eigh(h) {
            Ok(e) => e.eigenvalues.first().is_none_or(|&l| l >= -EPS_PSD * h.frob_norm().max(1.0)),
            Err(_) => false,
        }
    } else {
        is_psd_cholesky(h)
    }
}

/// The Hadamard unitary.
pub fn hadamard() -> CMat {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_real_rows(&[&[r, r], &[r, -r]]).expect("2x2")
}
