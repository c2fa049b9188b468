use crate::error::{Error, Result};
use crate::qcore::{Instrument, Multimeter};

/// Checks `N_{a|x} = Σ_c Φ*_c(M_{a|x·C+c})` within `ε_eq`, where `Φ: M_n → M_d`
/// has `C` outcomes, `N` acts on `ℂ^n` and `M` on `ℂ^d` with `g·C` settings.
pub fn verify_compression(n: &Multimeter, m: &Multimeter, phi: &Instrument) -> Result<bool> {
    let (g, k, dn) = n.shape();
    let (gm, km, dm) = m.shape();
    let c_count = phi.outcomes();
    if gm != g * c_count || km != k || (phi.din(), phi.dout()) != (dn, dm) {
        return Err(Error::Dimension(format!(
            "compression of {gm}x{km} on C^{dm} by an instrument M_{} -> M_{} with {c_count} outcomes cannot give {g}x{k} on C^{dn}",
            phi.din(),
            phi.dout()
        )));
    }
    for x in 0..g {
        for a in 0..k {
            let mut acc = crate::densemat::CMat::zeros(dn);
            for c in 0..c_count {
                acc += &phi.branch(c).dual_apply(m.effect(x * c_count + c, a))?;
            }
            if !acc.approx_eq(n.effect(x, a)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
