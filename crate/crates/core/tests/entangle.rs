mod common;

use common::*;

use qsd::entangle::{apply_plan, build_plan, build_plan_with, concentrate, verify_orthogonaliser, PlanOptions};
use qsd::qcore::{entanglement_entropy, schmidt};
use qsd::unambiguous::symmetric_unambiguous_optimum;
use qsd::{BipartiteState, Ket};

fn random_full_rank(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> BipartiteState {
    loop {
        let extra_a = r_usize(r, 2);
        let extra_b = r_usize(r, 2);
        let psi = random_bipartite(r, n + extra_a, n + extra_b);
        let sd = schmidt(&psi);
        // keep the Schmidt rank at n: project onto the leading n terms
        let cs: Vec<f64> = sd.coefficients[..n].to_vec();
        let norm = cs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let cs: Vec<f64> = cs.iter().map(|c| c / norm).collect();
        if cs.iter().all(|c| c * c > 1e-3) {
            return BipartiteState::from_schmidt(&cs, &sd.basis_a[..n], &sd.basis_b[..n]).unwrap();
        }
    }
}

fn r_usize(r: &mut rand_chacha::ChaCha8Rng, below: usize) -> usize {
    use rand::Rng;
    r.random_range(0..below)
}

#[test]
fn rectangular_inputs_are_rank_checked() {
    // d_A > Schmidt rank: the spare Schmidt slot is empty, so the plan is refused
    let psi = random_full_rank(&mut rng(1), 2);
    if psi.dims().0.min(psi.dims().1) > 2 {
        assert!(build_plan(&psi).is_err());
    }
}

#[test]
fn norm_bookkeeping_and_entropy() {
    let mut r = rng(99);
    for trial in 0..50 {
        let n = 2 + trial % 3;
        let basis: Vec<Ket> = (0..n).map(|i| Ket::basis(n, i)).collect();
        let w = random_simplex(&mut r, n, 0.05);
        let cs: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
        let u = random_unitary(&mut r, n);
        let rotated: Vec<Ket> = (0..n)
            .map(|i| Ket::normalize(u.column(i).into_owned()).unwrap())
            .collect();
        let psi = BipartiteState::from_schmidt(&cs, &rotated, &basis).unwrap();

        let plan = build_plan(&psi).unwrap();
        let out = plan.orthogonaliser.matrix() * psi.amplitudes();
        let min_w = w.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((out.norm_squared() - n as f64 * min_w).abs() <= 1e-9);

        let (state, p) = concentrate(&psi).unwrap();
        assert!((p - plan.success_prob).abs() <= 1e-12);
        assert!((entanglement_entropy(&state) - (n as f64).log2()).abs() <= 1e-9);
        if entanglement_entropy(&psi) < (n as f64).log2() - 1e-9 {
            assert!(p < 1.0);
        }

        let opt = symmetric_unambiguous_optimum(&plan.family).unwrap();
        assert!((opt.success - p).abs() <= 1e-9);
        assert!(verify_orthogonaliser(&plan).unwrap().passed);
    }
}

#[test]
fn procrustean_two_level() {
    let mut r = rng(5);
    for _ in 0..20 {
        let psi = random_full_rank(&mut r, 2);
        if psi.dims() != (2, 2) {
            continue;
        }
        let rho = reduce_a(&psi);
        let lam_min = real_embedded_eigenvalues(&rho)[0];
        let (_, p) = concentrate(&psi).unwrap();
        assert!((p - 2.0 * lam_min).abs() <= 1e-9);
    }
}

#[test]
fn target_basis_only_changes_a_local_unitary() {
    let mut r = rng(12);
    let n = 3;
    let basis: Vec<Ket> = (0..n).map(|i| Ket::basis(n, i)).collect();
    let cs: Vec<f64> = random_simplex(&mut r, n, 0.1).iter().map(|x| x.sqrt()).collect();
    let psi = BipartiteState::from_schmidt(&cs, &basis, &basis).unwrap();
    let u = random_unitary(&mut r, n);
    let target: Vec<Ket> = (0..n)
        .map(|i| Ket::normalize(u.column(i).into_owned()).unwrap())
        .collect();
    let plan = build_plan_with(
        &psi,
        PlanOptions {
            target_basis: Some(target),
            ..Default::default()
        },
    )
    .unwrap();
    let (a, pa) = apply_plan(&plan, &psi).unwrap();
    let (b, pb) = concentrate(&psi).unwrap();
    assert!((pa - pb).abs() < 1e-12);
    for (x, y) in schmidt(&a).coefficients.iter().zip(schmidt(&b).coefficients) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn plan_serializes() {
    let basis: Vec<Ket> = (0..2).map(|i| Ket::basis(2, i)).collect();
    let psi = BipartiteState::from_schmidt(&[0.8, 0.6], &basis, &basis).unwrap();
    let plan = build_plan(&psi).unwrap();
    let v = serde_json::to_value(&plan).unwrap();
    for key in ["x_states", "y_basis", "orthogonaliser", "target_basis", "success_prob"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
