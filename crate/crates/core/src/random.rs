//! Seeded random generators for states, POVMs, maps and realizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::densemat::{eigh, CMat, C64, ZERO};
use crate::error::Result;
use crate::qcore::{CondProb, CpMap, Instrument, Multimeter, Povm};
use crate::supermap::{ClassicalRealization, Shape};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut Rng64) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Ginibre matrix with `rows × cols` standard complex Gaussian entries, row-major.
fn ginibre(rows: usize, cols: usize, rng: &mut Rng64) -> Vec<C64> {
    (0..rows * cols).map(|_| gaussian(rng)).collect()
}

pub fn random_hermitian(d: usize, rng: &mut Rng64) -> CMat {
    let g = ginibre(d, d, rng);
    CMat::from_vec(d, g).expect("d*d").hermitize()
}

/// `G G†` for a `d × rank` Ginibre matrix.
pub fn random_psd(d: usize, rank: usize, rng: &mut Rng64) -> CMat {
    let g = ginibre(d, rank, rng);
    CMat::from_fn(d, |i, j| (0..rank).map(|t| g[i * rank + t] * g[j * rank + t].conj()).sum())
}

pub fn random_density(d: usize, rng: &mut Rng64) -> CMat {
    let rank = rng.random_range(1..=d);
    let p = random_psd(d, rank, rng);
    let tr = p.trace().re;
    p.scale(1.0 / tr)
}

/// `S^{-1/2}` of a positive definite matrix.
fn inv_sqrt(s: &CMat) -> CMat {
    eigh(s).expect("Hermitian").reconstruct_with(|l| 1.0 / l.max(1e-300).sqrt())
}

/// Normalizes positive operators `A_a` to `S^{-1/2} A_a S^{-1/2}`, `S = Σ A_a`.
fn normalize(parts: Vec<CMat>) -> Vec<CMat> {
    let d = parts[0].dim();
    let mut s = CMat::zeros(d);
    for p in &parts {
        s += p;
    }
    let w = inv_sqrt(&s);
    parts.iter().map(|p| (&w * &(p * &w)).hermitize()).collect()
}

/// Random POVM; effects have random ranks.
pub fn random_povm(k: usize, d: usize, rng: &mut Rng64) -> Povm {
    loop {
        let parts: Vec<CMat> = (0..k).map(|_| random_psd(d, rng.random_range(1..=d), rng)).collect();
        let mut s = CMat::zeros(d);
        for p in &parts {
            s += p;
        }
        if s.min_eigenvalue().map(|l| l > 1e-3).unwrap_or(false) {
            return Povm::new(normalize(parts)).expect("normalized");
        }
    }
}

pub fn random_multimeter(g: usize, k: usize, d: usize, rng: &mut Rng64) -> Multimeter {
    Multimeter::new((0..g).map(|_| random_povm(k, d, rng)).collect()).expect("valid")
}

/// Random probabilities `p_{a|x} · I`.
pub fn random_trivial_multimeter(g: usize, k: usize, d: usize, rng: &mut Rng64) -> Multimeter {
    Multimeter::trivial(&random_condprob(k, &[g], rng), d).expect("valid")
}

/// Choi matrix of `ρ ↦ Σ K ρ K†` for Kraus operators stored row-major `dout × din`.
fn kraus_choi(kraus: &[Vec<C64>], din: usize, dout: usize) -> CMat {
    CMat::from_fn(din * dout, |r, c| kraus.iter().map(|k| k[r] * k[c].conj()).sum())
}

/// Random instrument with `outcomes` branches, each with a random number of Kraus operators.
pub fn random_instrument(din: usize, dout: usize, outcomes: usize, rng: &mut Rng64) -> Instrument {
    let (raw, w) = loop {
        let mut counts: Vec<usize> = (0..outcomes).map(|_| rng.random_range(1..=(din * dout).min(3))).collect();
        // Enough Kraus operators overall for Σ K†K to be invertible.
        let needed = din.div_ceil(dout);
        let total: usize = counts.iter().sum();
        counts[0] += needed.saturating_sub(total);
        let raw: Vec<Vec<Vec<C64>>> =
            counts.iter().map(|&c| (0..c).map(|_| ginibre(dout, din, rng)).collect()).collect();
        // S = Σ K†K
        let mut s = CMat::zeros(din);
        for k in raw.iter().flatten() {
            for i in 0..din {
                for j in 0..din {
                    let mut acc = ZERO;
                    for b in 0..dout {
                        acc += k[b * din + i].conj() * k[b * din + j];
                    }
                    s[(i, j)] += acc;
                }
            }
        }
        if s.min_eigenvalue().map(|l| l > 1e-3).unwrap_or(false) {
            break (raw, inv_sqrt(&s));
        }
    };
    let branches = raw
        .iter()
        .map(|ks| {
            let normalized: Vec<Vec<C64>> = ks
                .iter()
                .map(|k| {
                    let mut out = vec![ZERO; dout * din];
                    for b in 0..dout {
                        for i in 0..din {
                            out[b * din + i] = (0..din).map(|t| k[b * din + t] * w[(t, i)]).sum();
                        }
                    }
                    out
                })
                .collect();
            CpMap::new_unchecked(din, dout, kraus_choi(&normalized, din, dout).hermitize()).expect("dims")
        })
        .collect();
    Instrument::new(branches).expect("trace preserving by construction")
}

pub fn random_channel(din: usize, dout: usize, rng: &mut Rng64) -> CpMap {
    random_instrument(din, dout, 1, rng).branch(0).clone()
}

/// Random CP map (not trace preserving) with a Choi matrix of random rank.
pub fn random_cp_map(din: usize, dout: usize, rng: &mut Rng64) -> CpMap {
    let n = din * dout;
    let rank = rng.random_range(1..=n);
    CpMap::new_unchecked(din, dout, random_psd(n, rank, rng).scale(1.0 / n as f64)).expect("dims")
}

/// Random conditional distribution; each slice is drawn from a flat Dirichlet.
pub fn random_condprob(out: usize, cond_shape: &[usize], rng: &mut Rng64) -> CondProb {
    let slices: usize = cond_shape.iter().product();
    let mut data = Vec::with_capacity(out * slices);
    for _ in 0..slices {
        let w: Vec<f64> = (0..out).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let total: f64 = w.iter().sum();
        data.extend(w.into_iter().map(|v| v / total));
    }
    CondProb::new(out, cond_shape, data).expect("normalized")
}

/// Random deterministic conditional distribution.
pub fn random_deterministic(out: usize, cond_shape: &[usize], rng: &mut Rng64) -> CondProb {
    let slices: usize = cond_shape.iter().product();
    let picks: Vec<usize> = (0..slices).map(|_| rng.random_range(0..out)).collect();
    let mut data = vec![0.0; out * slices];
    for (c, &b) in picks.iter().enumerate() {
        data[c * out + b] = 1.0;
    }
    CondProb::new(out, cond_shape, data).expect("normalized")
}

/// `ν` of shape `[l | k, g, r, s]` with no dependence on `a`.
pub fn random_a_independent_nu(l: usize, k: usize, g: usize, r: usize, s: usize, rng: &mut Rng64) -> CondProb {
    let base = random_condprob(l, &[g, r, s], rng);
    CondProb::from_fn(l, &[k, g, r, s], |b, c| base.get(b, &c[1..])).expect("normalized")
}

/// Random classical-ancilla realization with generic instruments.
pub fn random_classical_realization(
    dims_in: Shape,
    dims_out: Shape,
    s: usize,
    a_independent: bool,
    rng: &mut Rng64,
) -> Result<ClassicalRealization> {
    let (Shape { g, k, d }, Shape { g: r, k: l, d: n }) = (dims_in, dims_out);
    let lambda = (0..r).map(|_| random_instrument(n, d, g * s, rng)).collect();
    let nu = if a_independent {
        random_a_independent_nu(l, k, g, r, s, rng)
    } else {
        random_condprob(l, &[k, g, r, s], rng)
    };
    let out = ClassicalRealization { s, dims_in, dims_out, lambda, nu };
    out.validate()?;
    Ok(out)
}
