use crate::densemat::{CMat, C64};
use crate::error::{Error, Result};
use crate::qcore::{Multimeter, Povm};
use crate::tol::ENUMERATION_CAP;

/// Hermitian basis of `M_d` with operator norm at most one:
/// `E_ii`, `E_ij + E_ji`, `i(E_ij − E_ji)` for `i < j`.
pub fn hermitian_basis(d: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(CMat::unit(d, i, i));
        for j in (i + 1)..d {
            let mut s = CMat::zeros(d);
            s[(i, j)] = C64::new(1.0, 0.0);
            s[(j, i)] = C64::new(1.0, 0.0);
            out.push(s);
            let mut a = CMat::zeros(d);
            a[(i, j)] = C64::new(0.0, 1.0);
            a[(j, i)] = C64::new(0.0, -1.0);
            out.push(a);
        }
    }
    out
}

/// Number of elements returned by [`affine_spanning_multimeters`].
pub fn spanning_set_size(g: usize, k: usize, d: usize) -> u128 {
    1 + (g as u128) * (k.saturating_sub(1) as u128) * (d as u128) * (d as u128)
}

/// Finite set of multimeters whose affine hull contains every multimeter of
/// shape `(g,k,d)`: the uniform baseline `I/k` and, per setting, outcome pairs
/// `(a₀, k−1)` perturbed by `±G_j/(2k)`.
pub fn affine_spanning_multimeters(g: usize, k: usize, d: usize) -> Result<Vec<Multimeter>> {
    if g == 0 || k == 0 || d == 0 {
        return Err(Error::Dimension(format!("degenerate multimeter shape (g,k,d)=({g},{k},{d})")));
    }
    let size = spanning_set_size(g, k, d);
    if size > ENUMERATION_CAP {
        return Err(Error::Cap { requested: size, cap: ENUMERATION_CAP });
    }
    let base_effect = CMat::identity(d).scale(1.0 / k as f64);
    let base_povm = Povm::new_unchecked(vec![base_effect.clone(); k])?;
    let base = Multimeter::new_unchecked(vec![base_povm.clone(); g])?;
    let eps = 1.0 / (2.0 * k as f64);
    let basis = hermitian_basis(d);
    let mut out = Vec::with_capacity(size as usize);
    out.push(base.clone());
    for x in 0..g {
        for a0 in 0..k - 1 {
            for gj in &basis {
                let mut effects = vec![base_effect.clone(); k];
                effects[a0] = &base_effect + &gj.scale(eps);
                effects[k - 1] = &base_effect - &gj.scale(eps);
                let mut povms = vec![base_povm.clone(); g];
                povms[x] = Povm::new_unchecked(effects)?;
                out.push(Multimeter::new_unchecked(povms)?);
            }
        }
    }
    Ok(out)
}
