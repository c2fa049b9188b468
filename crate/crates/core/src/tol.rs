//! Numerical tolerances.
//!
//! `eps_eq` is process-wide and may be overridden at startup (the CLI reads
//! `MMSIM_TOLERANCE`). The remaining tolerances are fixed.

use std::sync::atomic::{AtomicU64, Ordering};

/// Default Frobenius equality tolerance, relative to `max(1, ‖·‖_F)`.
pub const DEFAULT_EPS_EQ: f64 = 1e-8;
/// Hermiticity tolerance.
pub const EPS_HERM: f64 = 1e-9;
/// Tolerance on negative eigenvalues.
pub const EPS_PSD: f64 = 1e-9;
/// Relative eigenvalue cutoff for numerical rank.
pub const EPS_RANK: f64 = 1e-10;
/// Residual tolerance for Radon–Nikodym reconstruction.
pub const EPS_RN: f64 = 1e-7;
/// Marginal residual below which a joint POVM is accepted.
pub const TOL_COMPAT: f64 = 1e-7;
/// Iteration budget for the alternating-projection engine.
pub const MAX_ITER_COMPAT: usize = 20_000;
/// Phase-one optimum threshold for LP feasibility.
pub const TOL_LP: f64 = 1e-9;
/// Cap on enumerated sets (vertices, spanning sets, joint outcomes).
pub const ENUMERATION_CAP: u128 = 1_000_000;

static EPS_EQ_BITS: AtomicU64 = AtomicU64::new(0x3E45_798E_E230_8C3A); // 1e-8

pub fn eps_eq() -> f64 {
    f64::from_bits(EPS_EQ_BITS.load(Ordering::Relaxed))
}

pub fn set_eps_eq(value: f64) {
    assert!(value.is_finite() && value > 0.0, "tolerance must be positive");
    EPS_EQ_BITS.store(value.to_bits(), Ordering::Relaxed);
}

/// Snapshot of every tolerance in effect, for certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eq: f64,
    pub herm: f64,
    pub psd: f64,
    pub rank: f64,
    pub rn: f64,
    pub compat: f64,
    pub lp: f64,
}

impl Tolerances {
    pub fn current() -> Self {
        Tolerances {
            eq: eps_eq(),
            herm: EPS_HERM,
            psd: EPS_PSD,
            rank: EPS_RANK,
            rn: EPS_RN,
            compat: TOL_COMPAT,
            lp: TOL_LP,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bits_decode_to_1e_minus_8() {
        assert_eq!(f64::from_bits(0x3E45_798E_E230_8C3A), DEFAULT_EPS_EQ);
    }
}
