use mmsim_core::densemat::{hadamard, CMat};
use mmsim_core::qcore::{CondProb, CpMap, Instrument, Multimeter, Povm};
use mmsim_core::random::{self, rng};
use mmsim_core::supermap::{self, instances, *};
use mmsim_core::Error;

fn hadamard_basis() -> Povm {
    Povm::basis(&hadamard())
}

#[test]
fn spanning_set_counts() {
    assert_eq!(affine_spanning_multimeters(1, 1, 2).unwrap().len(), 1);
    assert_eq!(affine_spanning_multimeters(1, 2, 2).unwrap().len(), 5);
    for m in affine_spanning_multimeters(2, 3, 2).unwrap() {
        for p in m.povms() {
            p.validate().unwrap();
        }
    }
}

#[test]
fn spanning_set_affine_dimension() {
    // Rank of vectorized differences equals g(k−1)d², computed by Gram–Schmidt over real coordinates.
    let (g, k, d) = (2, 3, 2);
    let span = affine_spanning_multimeters(g, k, d).unwrap();
    let vec_of = |m: &Multimeter| -> Vec<f64> {
        let mut v = Vec::new();
        for x in 0..g {
            for a in 0..k {
                for z in m.effect(x, a).data() {
                    v.push(z.re);
                    v.push(z.im);
                }
            }
        }
        v
    };
    let base = vec_of(&span[0]);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for m in &span[1..] {
        let mut v: Vec<f64> = vec_of(m).iter().zip(&base).map(|(a, b)| a - b).collect();
        for u in &basis {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= dot * ui;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 {
            basis.push(v.iter().map(|x| x / norm).collect());
        }
    }
    assert_eq!(basis.len(), g * (k - 1) * d * d);
}

#[test]
fn identity_superchannel_is_identity() {
    let m = random::random_multimeter(2, 2, 2, &mut rng(1));
    let psi = Superchannel::identity(Shape::of(&m));
    assert!(psi.apply(&m).unwrap().approx_eq(&m));
    assert!(verify_multimeter_superchannel(&psi).unwrap().passed());
}

#[test]
fn deterministic_classical_simulation_is_identity() {
    let pi = CondProb::deterministic(2, &[2], |c| c[0]);
    let nu = CondProb::deterministic(3, &[3, 2, 2], |c| c[0]);
    let psi = classical_simulation_map(&pi, &nu, 2).unwrap();
    let m = random::random_multimeter(2, 3, 2, &mut rng(2));
    assert!(psi.apply(&m).unwrap().approx_eq(&m));
    let id = Superchannel::identity(Shape::new(2, 3, 2));
    assert!(action_distance(&psi, &id).unwrap() < 1e-12);
}

#[test]
fn classical_simulation_mixture() {
    let pi = CondProb::new(2, &[1], vec![0.5, 0.5]).unwrap();
    let nu = CondProb::deterministic(2, &[2, 2, 1], |c| c[0]);
    let psi = classical_simulation_map(&pi, &nu, 2).unwrap();
    let m = random::random_multimeter(2, 2, 2, &mut rng(3));
    let out = psi.apply(&m).unwrap();
    for a in 0..2 {
        let expected = &m.effect(0, a).scale(0.5) + &m.effect(1, a).scale(0.5);
        assert!(out.effect(0, a).approx_eq(&expected));
    }
}

#[test]
fn a_independent_postprocessing_gives_trivial_output() {
    let mut r = rng(4);
    let pi = random::random_condprob(2, &[2], &mut r);
    let base = random::random_condprob(3, &[2, 2], &mut r);
    let nu = CondProb::from_fn(3, &[2, 2, 2], |b, c| base.get(b, &c[1..])).unwrap();
    let psi = classical_simulation_map(&pi, &nu, 2).unwrap();
    for _ in 0..5 {
        let out = psi.apply(&random::random_multimeter(2, 2, 2, &mut r)).unwrap();
        for y in 0..2 {
            for b in 0..3 {
                let e = out.effect(y, b);
                let t = e.trace().re / 2.0;
                assert!(e.approx_eq(&CMat::identity(2).scale(t)));
            }
        }
    }
}

#[test]
fn hadamard_example_outputs() {
    let psi = from_classical_realization(&instances::hadamard_realization()).unwrap();
    let out = psi.apply(&Multimeter::single(Povm::computational(2))).unwrap();
    assert!(out.povm(0).approx_eq(&Povm::computational(2)));
    assert!(out.povm(1).approx_eq(&hadamard_basis()));
}

#[test]
fn verify_rejects_non_cp_and_broken_structure() {
    let psi = from_classical_realization(&instances::hadamard_realization()).unwrap();
    // Flip the sign of the largest eigenvalue direction.
    let j = psi.choi();
    let e = mmsim_core::densemat::eigh(j).unwrap();
    let top = e.eigenvalues.len() - 1;
    let v = e.vector(top);
    let flipped = j - &CMat::outer(&v).scale(2.0 * e.eigenvalues[top]);
    let bad = Superchannel::new(
        psi.dims_in(),
        psi.dims_out(),
        CpMap::new_unchecked(psi.map().din(), psi.map().dout(), flipped).unwrap(),
    )
    .unwrap();
    assert!(!verify_multimeter_superchannel(&bad).unwrap().cp);

    // A CP term mixing outcome blocks.
    let n = j.dim();
    let mut w = vec![mmsim_core::densemat::ZERO; n];
    w[0] = mmsim_core::C64::new(0.1, 0.0);
    w[n - 1] = mmsim_core::C64::new(0.1, 0.0);
    let broken = j + &CMat::outer(&w);
    let bad = Superchannel::new(
        psi.dims_in(),
        psi.dims_out(),
        CpMap::new_unchecked(psi.map().din(), psi.map().dout(), broken).unwrap(),
    )
    .unwrap();
    let report = verify_multimeter_superchannel(&bad).unwrap();
    assert!(report.cp && !report.passed());
    assert!(matches!(bad.verify(), Err(Error::NotSuperchannel(_))));
}

#[test]
fn realize_trivial_shapes() {
    let psi = Superchannel::identity(Shape::new(1, 1, 1));
    let r = realize(&psi).unwrap();
    assert_eq!(r.s, 1);
    let back = from_general_realization(&r).unwrap();
    assert!(action_distance(&psi, &back).unwrap() < 1e-12);
}

#[test]
fn realize_round_trip_classical_simulation() {
    let mut r = rng(5);
    let pi = random::random_condprob(2, &[2], &mut r);
    let nu = random::random_condprob(2, &[2, 2, 2], &mut r);
    let psi = classical_simulation_map(&pi, &nu, 2).unwrap();
    let real = realize(&psi).unwrap();
    let back = from_general_realization(&real).unwrap();
    assert!(action_distance(&psi, &back).unwrap() < 1e-8);
}

#[test]
fn realize_identity_superchannel() {
    let psi = Superchannel::identity(Shape::new(2, 2, 2));
    let real = realize(&psi).unwrap();
    let back = from_general_realization(&real).unwrap();
    assert!(action_distance(&psi, &back).unwrap() < 1e-8);
}

#[test]
fn quantum_ancilla_needs_quantum_ancilla() {
    let b = vec![Povm::computational(2), hadamard_basis()];
    let psi = quantum_ancilla_example_map(&b, 2).unwrap();
    assert!(verify_multimeter_superchannel(&psi).unwrap().passed());
    let via = quantum_ancilla_from_realization(&b, 2).unwrap();
    assert!(action_distance(&psi, &via).unwrap() < 1e-12);
    let real = realize(&psi).unwrap();
    assert!(real.s >= 2);
    let back = from_general_realization(&real).unwrap();
    assert!(action_distance(&psi, &back).unwrap() < 1e-8);
    // Deterministic trivial input concentrated on a gives B_{·|a}.
    for (a, ba) in b.iter().enumerate() {
        let m = Multimeter::single(Povm::trivial(&[(a == 0) as u8 as f64, (a == 1) as u8 as f64], 2).unwrap());
        assert!(psi.apply(&m).unwrap().povm(0).approx_eq(ba));
    }
}

#[test]
fn quantum_ancilla_equal_povms_is_constant() {
    let mut r = rng(6);
    let e = random::random_povm(3, 2, &mut r);
    let psi = quantum_ancilla_example_map(&[e.clone(), e.clone()], 2).unwrap();
    for _ in 0..5 {
        let out = psi.apply(&random::random_multimeter(1, 2, 2, &mut r)).unwrap();
        assert!(out.povm(0).approx_eq(&e));
    }
}

#[test]
fn compression_examples() {
    let mut r = rng(7);
    // C = 1, Φ = id.
    let psi = compression_map(&Instrument::channel(CpMap::identity(2)), 2, 2).unwrap();
    assert!(action_distance(&psi, &Superchannel::identity(Shape::new(2, 2, 2))).unwrap() < 1e-12);
    // Φ_c = π_c id gives a mixture.
    let phi = Instrument::new(vec![CpMap::identity(2).scale(0.3), CpMap::identity(2).scale(0.7)]).unwrap();
    let psi = compression_map(&phi, 1, 2).unwrap();
    let m = random::random_multimeter(2, 2, 2, &mut r);
    let out = psi.apply(&m).unwrap();
    let expected = &m.effect(0, 0).scale(0.3) + &m.effect(1, 0).scale(0.7);
    assert!(out.effect(0, 0).approx_eq(&expected));
    // C = 1 with a channel is pure preprocessing.
    let ch = random::random_channel(3, 2, &mut r);
    let psi = compression_map(&Instrument::channel(ch.clone()), 1, 2).unwrap();
    let m = random::random_multimeter(1, 2, 2, &mut r);
    let out = psi.apply(&m).unwrap();
    assert!(out.effect(0, 1).approx_eq(&ch.dual_apply(m.effect(0, 1)).unwrap()));
}

#[test]
fn trash_and_prepare_constant() {
    let mut r = rng(8);
    let target = Multimeter::single(random::random_povm(3, 2, &mut r));
    let psi = trash_and_prepare_map(&target, Shape::new(1, 2, 3)).unwrap();
    for _ in 0..10 {
        let out = psi.apply(&random::random_multimeter(1, 2, 3, &mut r)).unwrap();
        assert!(out.approx_eq(&target));
    }
    let same = trash_and_prepare_map(&target, Shape::of(&target)).unwrap();
    assert!(same.apply(&target).unwrap().approx_eq(&target));
}

#[test]
fn trivial_target_also_has_s1_realization() {
    let (r1, r2) = instances::tap_not_unique_realizations(&[0.2, 0.8], 2, 2).unwrap();
    let a = from_classical_realization(&r1).unwrap();
    let b = from_classical_realization(&r2).unwrap();
    assert!(action_distance(&a, &b).unwrap() < 1e-12);
    assert_ne!(r1.lambda, r2.lambda);
    let target = Multimeter::single(Povm::trivial(&[0.2, 0.8], 2).unwrap());
    let tap = trash_and_prepare_map(&target, Shape::new(2, 2, 2)).unwrap();
    assert!(action_distance(&a, &tap).unwrap() < 1e-12);
}

#[test]
fn compatibility_preserving_reduces_to_classical_simulation() {
    let mut r = rng(9);
    let pi = random::random_condprob(2, &[2], &mut r);
    let nu = random::random_condprob(2, &[2, 2, 2], &mut r);
    let cs = classical_simulation_map(&pi, &nu, 2).unwrap();
    let pi5 = CondProb::new(2, &[2, 1, 1], pi.data().to_vec()).unwrap();
    let nu5 = CondProb::new(2, &[2, 2, 2, 1, 1], nu.data().to_vec()).unwrap();
    let p = CondProb::distribution(vec![1.0]).unwrap();
    let cp = compatibility_preserving_map(&p, &[Instrument::channel(CpMap::identity(2))], &pi5, &nu5).unwrap();
    assert!(cp.choi().approx_eq(cs.choi()));
}

#[test]
fn compatibility_preserving_embeds_compression() {
    let mut r = rng(10);
    let phi = random::random_instrument(3, 2, 2, &mut r);
    let (g_out, k, c) = (2, 2, 2);
    let g = g_out * c;
    let comp = compression_map(&phi, g_out, k).unwrap();
    let p = CondProb::distribution(vec![1.0]).unwrap();
    // π_{x̃|y,λ} = 1_{x̃ = y·C + λ}, ν_{b|a,...} = 1_{b=a}.
    let pi = CondProb::deterministic(g, &[g_out, c, 1], |cc| cc[0] * c + cc[1]);
    let nu = CondProb::deterministic(k, &[k, g, g_out, c, 1], |cc| cc[0]);
    let cp = compatibility_preserving_map(&p, &[phi], &pi, &nu).unwrap();
    assert!(action_distance(&cp, &comp).unwrap() < 1e-10);
}

#[test]
fn lueders_example_output() {
    let (p, q) = (0.8, 0.3);
    let e = CMat::diag(&[1.0, 0.5]);
    let psi = from_classical_realization(&instances::lueders_realization(p, q, &e).unwrap()).unwrap();
    for pi in [0.0, 0.25, 1.0] {
        let m = Multimeter::single(Povm::trivial(&[pi, 1.0 - pi], 2).unwrap());
        let out = psi.apply(&m).unwrap();
        assert!(out.effect(0, 0).approx_eq(&e.scale(p * pi + q * (1.0 - pi))));
    }
}

#[test]
fn classical_realization_with_identity_postprocessing_is_preprocessing() {
    let mut r = rng(11);
    let ch = random::random_channel(2, 3, &mut r);
    let real = ClassicalRealization {
        s: 1,
        dims_in: Shape::new(1, 2, 3),
        dims_out: Shape::new(1, 2, 2),
        lambda: vec![Instrument::channel(ch.clone())],
        nu: CondProb::deterministic(2, &[2, 1, 1, 1], |c| c[0]),
    };
    let psi = from_classical_realization(&real).unwrap();
    let m = random::random_multimeter(1, 2, 3, &mut r);
    let out = psi.apply(&m).unwrap();
    assert!(out.effect(0, 0).approx_eq(&ch.dual_apply(m.effect(0, 0)).unwrap()));
}

#[test]
fn uniform_postprocessing_gives_trivial_output() {
    let mut r = rng(12);
    let mut real =
        random::random_classical_realization(Shape::new(2, 2, 2), Shape::new(2, 3, 2), 2, false, &mut r).unwrap();
    real.nu = CondProb::uniform(3, &[2, 2, 2, 2]);
    let psi = from_classical_realization(&real).unwrap();
    let out = psi.apply(&random::random_multimeter(2, 2, 2, &mut r)).unwrap();
    for y in 0..2 {
        for b in 0..3 {
            assert!(out.effect(y, b).approx_eq(&CMat::identity(2).scale(1.0 / 3.0)));
        }
    }
}

#[test]
fn tap_classical_constant_output() {
    let real = instances::tap_classical_default().unwrap();
    let psi = from_classical_realization(&real).unwrap();
    let mut r = rng(13);
    for _ in 0..10 {
        let out = psi.apply(&random::random_multimeter(1, 2, 2, &mut r)).unwrap();
        assert!(out.povm(0).approx_eq(&Povm::computational(2)));
    }
}

#[test]
fn constructors_output_valid_multimeters_and_are_affine() {
    let mut r = rng(14);
    let real =
        random::random_classical_realization(Shape::new(2, 2, 2), Shape::new(2, 2, 3), 2, false, &mut r).unwrap();
    let psi = from_classical_realization(&real).unwrap();
    assert!(verify_multimeter_superchannel(&psi).unwrap().passed());
    let m1 = random::random_multimeter(2, 2, 2, &mut r);
    let m2 = random::random_multimeter(2, 2, 2, &mut r);
    let t = 0.37;
    let mix = Multimeter::new(
        (0..2)
            .map(|x| {
                Povm::new((0..2).map(|a| &m1.effect(x, a).scale(t) + &m2.effect(x, a).scale(1.0 - t)).collect())
                    .unwrap()
            })
            .collect(),
    )
    .unwrap();
    let lhs = psi.apply(&mix).unwrap();
    let o1 = psi.apply(&m1).unwrap();
    let o2 = psi.apply(&m2).unwrap();
    for y in 0..2 {
        for b in 0..2 {
            let rhs = &o1.effect(y, b).scale(t) + &o2.effect(y, b).scale(1.0 - t);
            assert!(lhs.effect(y, b).approx_eq(&rhs));
        }
    }
}

#[test]
fn classical_embedding_matches_direct_formula() {
    let mut r = rng(15);
    let real =
        random::random_classical_realization(Shape::new(2, 2, 2), Shape::new(1, 2, 2), 2, false, &mut r).unwrap();
    let psi = from_classical_realization(&real).unwrap();
    let direct = Superchannel::from_components(real.dims_in, real.dims_out, |b, x, a, y| {
        let mut acc = CpMap::zero(2, 2);
        for lam in 0..real.s {
            acc = acc.add(&real.branch(y, x, lam).dual().scale(real.nu(b, a, x, y, lam))).unwrap();
        }
        acc
    })
    .unwrap();
    assert!(psi.choi().approx_eq(direct.choi()));
}

#[test]
fn measurement_recipe_matches_superchannel() {
    let mut r = rng(16);
    let real =
        random::random_classical_realization(Shape::new(2, 2, 2), Shape::new(2, 2, 2), 2, false, &mut r).unwrap();
    let psi = from_classical_realization(&real).unwrap();
    let general = realize(&psi).unwrap();
    let m = random::random_multimeter(2, 2, 2, &mut r);
    let out = psi.apply(&m).unwrap();
    for y in 0..2 {
        let rho = random::random_density(2, &mut r);
        let p = general.outcome_probabilities(&m, &rho, y).unwrap();
        for (b, pb) in p.iter().enumerate() {
            assert!((pb - out.effect(y, b).trace_product(&rho).re).abs() < 1e-8);
        }
    }
}

#[test]
fn realize_requires_verification() {
    let psi = Superchannel::identity(Shape::new(1, 2, 2));
    let raw = Superchannel::new(psi.dims_in(), psi.dims_out(), psi.map().clone()).unwrap();
    assert!(matches!(realize(&raw), Err(Error::NotSuperchannel(_))));
    assert!(realize(&raw.verify().unwrap()).is_ok());
}

#[test]
fn apply_dimension_mismatch() {
    let psi = Superchannel::identity(Shape::new(1, 2, 2));
    let m = random::random_multimeter(2, 2, 2, &mut rng(17));
    assert!(matches!(supermap::apply(&psi, &m), Err(Error::Dimension(_))));
}

#[test]
fn multimeter_span_projection() {
    let mut r = rng(18);
    let shape = Shape::new(2, 3, 2);
    let m = random::random_multimeter(2, 3, 2, &mut r);
    let j = mmsim_core::qcore::multimeter_choi(&m);
    assert!(project_to_multimeter_span(&j, shape).dist(&j) < 1e-12);
    let x = random::random_hermitian(shape.choi_dim(), &mut r);
    let once = project_to_multimeter_span(&x, shape);
    assert!(project_to_multimeter_span(&once, shape).dist(&once) < 1e-12);
    // The residual is orthogonal to every multimeter Choi matrix.
    let resid = &x - &once;
    assert!(resid.trace_product(&j).norm() < 1e-10);
}

#[test]
fn canonical_choi_identifies_equal_actions() {
    let (r1, r2) = instances::tap_not_unique_realizations(&[0.2, 0.8], 2, 2).unwrap();
    let a = from_classical_realization(&r1).unwrap();
    let b = from_classical_realization(&r2).unwrap();
    assert!(a.choi().dist(b.choi()) > 1e-3);
    assert!(a.canonical_choi().dist(&b.canonical_choi()) < 1e-9);
    let other = trash_and_prepare_map(&Multimeter::single(Povm::computational(2)), Shape::new(2, 2, 2)).unwrap();
    assert!(a.canonical_choi().dist(&other.canonical_choi()) > 1e-3);
}
