//! Probabilistic entanglement concentration with an orthogonalising
//! measurement on one party.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minerror::{make_symmetric_real, SymmetricFamily};
use crate::povm::post_state;
use crate::qcore::linalg::{self, c, CMatrix, CVector};
use crate::qcore::{schmidt, BipartiteState, DensityOperator, Ket, Operator, SchmidtDecomposition};
use crate::unambiguous::reciprocal_states;
use crate::{DEFAULT_TOL, PINV_CUTOFF};

/// Everything needed to turn a partly entangled pure state into a maximally
/// entangled one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationPlan {
    pub schmidt: SchmidtDecomposition,
    /// Coordinates of the `x` states in the Schmidt basis of A.
    pub family: SymmetricFamily,
    /// `|x_k> = sum_j c_j exp(2 pi i j k / N) |alpha'_j>`
    pub x_states: Vec<Ket>,
    /// `|y_k> = N^{-1/2} sum_j exp(-2 pi i j k / N) |beta'_j>`
    pub y_basis: Vec<Ket>,
    pub target_basis: Vec<Ket>,
    /// `A_O` acting on subsystem A.
    pub orthogonaliser: Operator,
    /// Success probability `P_k`, the same for every `k`.
    pub success_prob: f64,
}

/// Optional overrides for [`build_plan_with`].
#[derive(Clone, Debug, Default)]
pub struct PlanOptions {
    /// Orthonormal kets on A, one per Schmidt term. Defaults to the Schmidt
    /// basis of A.
    pub target_basis: Option<Vec<Ket>>,
    /// Demanded success probability. Defaults to the optimum `N min_j c_j^2`.
    /// Larger values produce an orthogonaliser that is not a valid
    /// measurement, which [`verify_orthogonaliser`] reports.
    pub success: Option<f64>,
}

/// `N min_j c_j^2` for the Schmidt coefficients `c_j`.
pub fn optimal_success(sd: &SchmidtDecomposition) -> f64 {
    let n = sd.coefficients.len() as f64;
    let min = sd.coefficients.iter().map(|c| c * c).fold(f64::INFINITY, f64::min);
    (n * min).min(1.0)
}

fn root(sign: f64, j: usize, k: usize, n: usize) -> linalg::C64 {
    let phi = sign * 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
    c(phi.cos(), phi.sin())
}

fn combine(basis: &[Ket], coeffs: impl Iterator<Item = linalg::C64>) -> CVector {
    basis
        .iter()
        .zip(coeffs)
        .fold(CVector::zeros(basis[0].dim()), |acc, (b, w)| acc + b.vector() * w)
}

pub fn build_plan(psi: &BipartiteState) -> Result<ConcentrationPlan> {
    build_plan_with(psi, PlanOptions::default())
}

pub fn build_plan_with(psi: &BipartiteState, opts: PlanOptions) -> Result<ConcentrationPlan> {
    let sd = schmidt(psi);
    let n = sd.coefficients.len();
    let c_max = sd.coefficients[0];
    if let Some(&c_min) = sd.coefficients.last() {
        if c_min * c_min <= PINV_CUTOFF * c_max * c_max {
            return Err(Error::RankDeficient(c_min * c_min));
        }
    }
    if n < 2 {
        return Err(Error::RankDeficient(0.0));
    }

    let family = make_symmetric_real(&sd.coefficients)?;
    // labels j, k = 1..N sit at index - 1
    let x_states: Vec<Ket> = family
        .states
        .iter()
        .map(|coords| Ket::from_unit(combine(&sd.basis_a, coords.vector().iter().copied())))
        .collect();
    let scale = 1.0 / (n as f64).sqrt();
    let y_basis: Vec<Ket> = (1..=n)
        .map(|k| Ket::from_unit(combine(&sd.basis_b, (1..=n).map(|j| root(-1.0, j, k, n) * scale))))
        .collect();

    let d_a = psi.dims().0;
    let target_basis = match opts.target_basis {
        None => sd.basis_a.clone(),
        Some(t) => {
            if t.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.len(),
                });
            }
            if let Some(k) = t.iter().find(|k| k.dim() != d_a) {
                return Err(Error::DimensionMismatch {
                    expected: d_a,
                    found: k.dim(),
                });
            }
            let vs: Vec<CVector> = t.iter().map(|k| k.vector().clone()).collect();
            let dev = linalg::max_abs(&(linalg::gram(&vs) - linalg::identity(n)));
            if dev > DEFAULT_TOL {
                return Err(Error::Invalid(format!("target basis is not orthonormal ({dev:e})")));
            }
            t
        }
    };

    let success_prob = opts.success.unwrap_or_else(|| optimal_success(&sd));
    if !(0.0..=1.0).contains(&success_prob) {
        return Err(Error::OutOfRange {
            what: "success probability",
            value: success_prob,
            range: "[0, 1]",
        });
    }

    let recip = reciprocal_states(&x_states)?;
    let amp = success_prob.sqrt();
    let a_o =
        recip
            .states
            .iter()
            .zip(&x_states)
            .zip(&target_basis)
            .fold(CMatrix::zeros(d_a, d_a), |acc, ((xp, x), phi)| {
                let denom = xp.inner(x);
                acc + linalg::outer(phi.vector(), xp.vector()) * (linalg::cr(amp) / denom)
            });

    Ok(ConcentrationPlan {
        schmidt: sd,
        family,
        x_states,
        y_basis,
        target_basis,
        orthogonaliser: Operator::from_square(a_o),
        success_prob,
    })
}

impl ConcentrationPlan {
    pub fn n(&self) -> usize {
        self.x_states.len()
    }

    /// `N^{-1/2} sum_k |x_k>|y_k>` as a bipartite state.
    pub fn rewritten(&self) -> Result<BipartiteState> {
        let scale = linalg::cr(1.0 / (self.n() as f64).sqrt());
        let m = self
            .x_states
            .iter()
            .zip(&self.y_basis)
            .fold(None::<CMatrix>, |acc, (x, y)| {
                let term = x.vector() * y.vector().transpose() * scale;
                Some(match acc {
                    Some(a) => a + term,
                    None => term,
                })
            })
            .ok_or(Error::Empty("concentration plan"))?;
        BipartiteState::new(m)
    }

    /// `Pi_O = A_O^dagger A_O`
    pub fn effect(&self) -> Operator {
        let a = self.orthogonaliser.matrix();
        Operator::from_square(a.adjoint() * a)
    }
}

/// Applies `A_O (x) 1` to the input and renormalizes.
///
/// Returns the maximally entangled output and the probability that the
/// orthogonalising measurement succeeds.
pub fn concentrate(psi: &BipartiteState) -> Result<(BipartiteState, f64)> {
    let plan = build_plan(psi)?;
    apply_plan(&plan, psi)
}

pub fn apply_plan(plan: &ConcentrationPlan, psi: &BipartiteState) -> Result<(BipartiteState, f64)> {
    let out = plan.orthogonaliser.matrix() * psi.amplitudes();
    let p = out.norm_squared();
    let state = BipartiteState::normalize(out)?;
    Ok((state, p))
}

/// Checks of an orthogonaliser against its defining properties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonaliserReport {
    /// Fidelity of the post-measurement state for `|x_k>` with `|phi_k>`.
    pub posterior_fidelities: Vec<f64>,
    /// `<x_k|A_O^dagger A_O|x_k>`
    pub probabilities: Vec<f64>,
    /// Smallest eigenvalue of `1 - A_O^dagger A_O`; negative when no
    /// complementary failure operator exists.
    pub failure_margin: f64,
    /// Largest entry of `A_O^dagger A_O - sum_k Pi_k`.
    pub effect_residual: f64,
    /// Largest entry of `<y_j|y_k> - delta_jk`.
    pub y_orthonormality: f64,
    /// `1 - F` between the input and its rewritten form.
    pub rewrite_residual: f64,
    pub passed: bool,
}

pub fn verify_orthogonaliser(plan: &ConcentrationPlan) -> Result<OrthogonaliserReport> {
    verify_with_tolerance(plan, DEFAULT_TOL)
}

pub fn verify_with_tolerance(plan: &ConcentrationPlan, tol: f64) -> Result<OrthogonaliserReport> {
    let a = plan.orthogonaliser.matrix();
    let mut posterior_fidelities = Vec::with_capacity(plan.n());
    let mut probabilities = Vec::with_capacity(plan.n());
    for (x, phi) in plan.x_states.iter().zip(&plan.target_basis) {
        let rho = DensityOperator::from(x);
        let (post, p) = post_state(a, &rho)?;
        posterior_fidelities.push(post.fidelity_with(phi));
        probabilities.push(p);
    }

    let effect = plan.effect();
    let d = effect.dim();
    let failure_margin = linalg::min_eigenvalue(&(linalg::identity(d) - effect.matrix()));

    let recip = reciprocal_states(&plan.x_states)?;
    let pis = recip
        .states
        .iter()
        .zip(&plan.x_states)
        .fold(CMatrix::zeros(d, d), |acc, (xp, x)| {
            acc + xp
                .projector()
                .scale(plan.success_prob / xp.inner(x).norm_sqr())
                .into_matrix()
        });
    let effect_residual = linalg::max_abs(&(effect.matrix() - pis));

    let ys: Vec<CVector> = plan.y_basis.iter().map(|k| k.vector().clone()).collect();
    let y_orthonormality = linalg::max_abs(&(linalg::gram(&ys) - linalg::identity(ys.len())));

    let original = plan.schmidt.reconstruct()?;
    let rewrite_residual = 1.0 - original.fidelity(&plan.rewritten()?);

    let passed = posterior_fidelities.iter().all(|f| *f >= 1.0 - tol)
        && probabilities.iter().all(|p| (p - plan.success_prob).abs() <= tol)
        && failure_margin >= -tol
        && effect_residual <= tol
        && y_orthonormality <= tol
        && rewrite_residual <= tol;

    Ok(OrthogonaliserReport {
        posterior_fidelities,
        probabilities,
        failure_margin,
        effect_residual,
        y_orthonormality,
        rewrite_residual,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::entanglement_entropy;
    use crate::unambiguous::symmetric_unambiguous_optimum;
    use std::f64::consts::FRAC_PI_8;

    fn two_qubit(theta: f64) -> BipartiteState {
        let (s, c) = theta.sin_cos();
        BipartiteState::from_schmidt(
            &[c, s],
            &[Ket::basis(2, 0), Ket::basis(2, 1)],
            &[Ket::basis(2, 0), Ket::basis(2, 1)],
        )
        .unwrap()
    }

    fn diag3(w: [f64; 3]) -> BipartiteState {
        let b: Vec<Ket> = (0..3).map(|i| Ket::basis(3, i)).collect();
        let cs: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
        BipartiteState::from_schmidt(&cs, &b, &b).unwrap()
    }

    #[test]
    fn pi_over_eight() {
        let psi = two_qubit(FRAC_PI_8);
        let (out, p) = concentrate(&psi).unwrap();
        assert!((p - 2.0 * FRAC_PI_8.sin().powi(2)).abs() < 1e-12);
        assert!((p - 0.292_893_218_813_452_5).abs() < 1e-12);
        assert!((entanglement_entropy(&out) - 1.0).abs() < 1e-9);

        let plan = build_plan(&psi).unwrap();
        let rep = verify_orthogonaliser(&plan).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.posterior_fidelities.iter().all(|f| (f - 1.0).abs() < 1e-9));
    }

    #[test]
    fn three_level_success() {
        let psi = diag3([0.5, 0.25, 0.25]);
        let (out, p) = concentrate(&psi).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
        assert!((entanglement_entropy(&out) - 3f64.log2()).abs() < 1e-9);
        let plan = build_plan(&psi).unwrap();
        let opt = symmetric_unambiguous_optimum(&plan.family).unwrap();
        assert!((opt.success - p).abs() < 1e-12);
    }

    #[test]
    fn maximally_entangled_is_unchanged() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = two_qubit(std::f64::consts::FRAC_PI_4);
        let (out, p) = concentrate(&psi).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let w = crate::qcore::schmidt(&out).coefficients;
        assert!(w.iter().all(|c| (c - s).abs() < 1e-12));
        let plan = build_plan(&psi).unwrap();
        assert!(plan.orthogonaliser.is_unitary(1e-12));
    }

    #[test]
    fn product_state_is_rejected() {
        let psi = BipartiteState::product(&Ket::basis(2, 0), &Ket::basis(2, 0));
        assert!(matches!(build_plan(&psi), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn rewrite_reproduces_input() {
        let psi = two_qubit(0.3);
        let plan = build_plan(&psi).unwrap();
        assert!(plan.rewritten().unwrap().fidelity(&psi) > 1.0 - 1e-12);
        let (s, c) = 0.3f64.sin_cos();
        let ov = plan.x_states[0].inner(&plan.x_states[1]).norm();
        assert!((ov - (c * c - s * s)).abs() < 1e-12);
    }

    #[test]
    fn over_demand_breaks_positivity() {
        let psi = two_qubit(FRAC_PI_8);
        let opt = optimal_success(&schmidt(&psi));
        let plan = build_plan_with(
            &psi,
            PlanOptions {
                success: Some(opt + 1e-6),
                ..Default::default()
            },
        )
        .unwrap();
        let rep = verify_orthogonaliser(&plan).unwrap();
        assert!(rep.failure_margin < 0.0);
        assert!(!rep.passed);
    }

    #[test]
    fn custom_target_basis() {
        let psi = diag3([0.6, 0.3, 0.1]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let target = vec![
            Ket::from_real(&[s, s, 0.0]).unwrap(),
            Ket::from_real(&[s, -s, 0.0]).unwrap(),
            Ket::basis(3, 2),
        ];
        let plan = build_plan_with(
            &psi,
            PlanOptions {
                target_basis: Some(target),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(verify_orthogonaliser(&plan).unwrap().passed);
        let (a, pa) = apply_plan(&plan, &psi).unwrap();
        let (b, pb) = concentrate(&psi).unwrap();
        assert!((pa - pb).abs() < 1e-12);
        let (wa, wb) = (schmidt(&a).coefficients, schmidt(&b).coefficients);
        for (x, y) in wa.iter().zip(&wb) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
