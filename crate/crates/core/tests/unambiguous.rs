mod common;

use std::f64::consts::FRAC_PI_4;

use common::*;
use proptest::prelude::*;

use qsd::minerror::{make_symmetric_real, TwoStateFamily};
use qsd::povm::outcome_probs;
use qsd::unambiguous::{
    failure_posterior, idp_bound, interferometer_model, reciprocal_states, symmetric_unambiguous_optimum,
    unambiguous_povm,
};
use qsd::{Error, Ket};

fn independent_set(r: &mut rand_chacha::ChaCha8Rng, n: usize, d: usize) -> Vec<Ket> {
    loop {
        let kets: Vec<Ket> = (0..n).map(|_| random_ket(r, d)).collect();
        if reciprocal_states(&kets).is_ok() {
            return kets;
        }
    }
}

#[test]
fn random_sets_satisfy_no_error_condition() {
    let mut r = rng(2024);
    for _ in 0..100 {
        let d = 2 + (r.random_range(0..5usize));
        let n = 1 + r.random_range(0..d.min(4));
        let states = independent_set(&mut r, n, d);
        let recip = reciprocal_states(&states).unwrap();
        // sum_j P_j / |<perp_j|psi_j>|^2 <= 1 guarantees feasibility
        let w = random_simplex(&mut r, n, 0.1);
        let p: Vec<f64> = w
            .iter()
            .zip(recip.states.iter().zip(&states))
            .map(|(w, (x, s))| w * x.inner(s).norm_sqr())
            .collect();
        let u = unambiguous_povm(&states, &p).unwrap();
        assert!(u.conclusive_residual(&states) <= 1e-9);
        assert!(u.inconclusive_min_eigenvalue() >= -1e-9);
        assert!(u.to_povm().unwrap().validate(1e-9).is_ok());
    }
}

use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reciprocal_is_an_involution(s in any::<u64>(), n in 1usize..=4, extra in 0usize..=2) {
        let mut r = rng(s);
        let states = independent_set(&mut r, n, n + extra);
        let twice = reciprocal_states(&reciprocal_states(&states).unwrap().states).unwrap();
        for (a, b) in twice.states.iter().zip(&states) {
            prop_assert!(a.fidelity(b) >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn symmetric_two_state_reduction() {
    for i in 1..=100 {
        let th = i as f64 * FRAC_PI_4 / 101.0;
        let fam = make_symmetric_real(&[th.sin(), th.cos()]).unwrap();
        let opt = symmetric_unambiguous_optimum(&fam).unwrap();
        let overlap = fam.states[0].inner(&fam.states[1]).norm();
        assert!((opt.inconclusive - idp_bound(overlap).unwrap()).abs() <= 1e-9);
        assert!((opt.inconclusive - (2.0 * th).cos()).abs() <= 1e-9);
    }
}

#[test]
fn symmetric_boundary_matches_oracle() {
    let mut r = rng(77);
    for n in [3usize, 4] {
        for _ in 0..10 {
            let w = random_simplex(&mut r, n, 0.2);
            let cs: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
            let fam = make_symmetric_real(&cs).unwrap();
            let opt = symmetric_unambiguous_optimum(&fam).unwrap();
            let oracle = feasibility_boundary(&fam.states);
            assert!(
                (opt.success - oracle).abs() <= 1e-6,
                "n {n}: {} vs {oracle}",
                opt.success
            );
            assert!(unambiguous_povm(&fam.states, &opt.success_vector(n)).is_ok());
            assert!(matches!(
                unambiguous_povm(&fam.states, &vec![opt.success + 1e-6; n]),
                Err(Error::Infeasible { .. })
            ));
        }
    }
}

#[test]
fn interferometer_equals_povm_on_grid() {
    for i in 1..=100 {
        let th = i as f64 * FRAC_PI_4 / 100.0;
        let model = interferometer_model(th).unwrap();
        let t_want = (2.0 * th).cos().max(0.0).sqrt() / th.cos();
        assert!((model.transmission - t_want).abs() < 1e-12);
        assert!((model.reflection - (1.0 - t_want * t_want).max(0.0).sqrt()).abs() < 1e-12);
        let states = TwoStateFamily::new(th, 0.5).unwrap().states().to_vec();
        let p = 1.0 - (2.0 * th).cos();
        let povm = unambiguous_povm(&states, &[p, p]).unwrap().to_povm().unwrap();
        for s in &states {
            let direct = outcome_probs(&povm, &s.density()).unwrap();
            let optics = model.detector_probs(s);
            for (a, b) in direct.iter().zip(optics) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn two_state_posteriors_coincide() {
    for i in 1..20 {
        let th = i as f64 * FRAC_PI_4 / 20.0;
        let states = TwoStateFamily::new(th, 0.5).unwrap().states().to_vec();
        let p = 1.0 - (2.0 * th).cos();
        let u = unambiguous_povm(&states, &[p, p]).unwrap();
        let post = failure_posterior(&states, &u).unwrap();
        assert!(post[0].fidelity(&post[1]) >= 1.0 - 1e-9);
    }
}

#[test]
fn serialized_povm_has_all_parts() {
    let states = TwoStateFamily::new(0.4, 0.5).unwrap().states().to_vec();
    let u = unambiguous_povm(&states, &[0.2, 0.3]).unwrap();
    let v = serde_json::to_value(&u).unwrap();
    assert!(v.get("conclusive").is_some() && v.get("inconclusive").is_some());
    assert_eq!(v["success"], serde_json::json!([0.2, 0.3]));
}
