use crate::error::{Error, Result};
use crate::tol;

/// Conditional distribution `p(b | c₀, c₁, …)`, stored with the outcome index
/// fastest: entry `data[flat(c)·out + b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondProb {
    out: usize,
    cond_shape: Vec<usize>,
    data: Vec<f64>,
}

impl CondProb {
    pub fn new(out: usize, cond_shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let slices: usize = cond_shape.iter().product();
        if out == 0 || data.len() != out * slices {
            return Err(Error::Dimension(format!(
                "conditional distribution over {out} outcomes and conditions {cond_shape:?} needs {} entries, got {}",
                out * slices,
                data.len()
            )));
        }
        let eps = tol::eps_eq();
        for (c, slice) in data.chunks(out).enumerate() {
            if let Some(&v) = slice.iter().find(|&&v| v < -eps || !v.is_finite()) {
                return Err(Error::Normalization(format!("negative probability {v:.3e} in slice {c}")));
            }
            let s: f64 = slice.iter().sum();
            if (s - 1.0).abs() > eps {
                return Err(Error::Normalization(format!("slice {c} sums to {s}")));
            }
        }
        Ok(CondProb { out, cond_shape: cond_shape.to_vec(), data })
    }

    /// Builds from a function of `(b, condition)`.
    pub fn from_fn(out: usize, cond_shape: &[usize], f: impl Fn(usize, &[usize]) -> f64) -> Result<Self> {
        let slices: usize = cond_shape.iter().product();
        let mut data = Vec::with_capacity(out * slices);
        let mut idx = vec![0usize; cond_shape.len()];
        for c in 0..slices {
            unflatten(c, cond_shape, &mut idx);
            for b in 0..out {
                data.push(f(b, &idx));
            }
        }
        Self::new(out, cond_shape, data)
    }

    /// Deterministic distribution `p(b|c) = 1_{b = f(c)}`.
    pub fn deterministic(out: usize, cond_shape: &[usize], f: impl Fn(&[usize]) -> usize) -> Self {
        Self::from_fn(out, cond_shape, |b, c| if b == f(c) { 1.0 } else { 0.0 }).expect("deterministic distribution")
    }

    pub fn uniform(out: usize, cond_shape: &[usize]) -> Self {
        Self::from_fn(out, cond_shape, |_, _| 1.0 / out as f64).expect("uniform distribution")
    }

    /// Unconditioned distribution.
    pub fn distribution(p: Vec<f64>) -> Result<Self> {
        Self::new(p.len(), &[], p)
    }

    pub fn out(&self) -> usize {
        self.out
    }

    pub fn cond_shape(&self) -> &[usize] {
        &self.cond_shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn flat_cond(&self, cond: &[usize]) -> usize {
        debug_assert_eq!(cond.len(), self.cond_shape.len());
        cond.iter().zip(&self.cond_shape).fold(0, |acc, (&c, &n)| {
            debug_assert!(c < n);
            acc * n + c
        })
    }

    pub fn get(&self, b: usize, cond: &[usize]) -> f64 {
        self.data[self.flat_cond(cond) * self.out + b]
    }

    pub fn slice(&self, cond: &[usize]) -> &[f64] {
        let c = self.flat_cond(cond);
        &self.data[c * self.out..(c + 1) * self.out]
    }
}

pub(crate) fn unflatten(mut c: usize, shape: &[usize], idx: &mut [usize]) {
    for f in (0..shape.len()).rev() {
        idx[f] = c % shape[f];
        c /= shape[f];
    }
}
