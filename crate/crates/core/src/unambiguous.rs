//! Error-free discrimination with an inconclusive outcome.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minerror::SymmetricFamily;
use crate::povm::Povm;
use crate::qcore::linalg::{self, cr, CMatrix, CVector};
use crate::qcore::{Ket, Operator};
use crate::{DEFAULT_TOL, ZERO_PROB};

/// Smallest-to-largest Gram eigenvalue ratio below which a state set is
/// treated as linearly dependent.
pub const INDEPENDENCE_CUTOFF: f64 = 1e-10;

fn check_overlap(overlap: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::OutOfRange {
            what: "overlap",
            value: overlap,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Minimum inconclusive probability for two equiprobable pure states:
/// `P_? = |<psi+|psi->|`.
pub fn idp_bound(overlap: f64) -> Result<f64> {
    check_overlap(overlap)?;
    Ok(overlap)
}

/// Matching success probability per state, `1 - |<psi+|psi->|`.
pub fn idp_success(overlap: f64) -> Result<f64> {
    Ok(1.0 - idp_bound(overlap)?)
}

/// Normalized Gram matrix of `states` after the linear-independence check.
fn independent_gram(states: &[Ket]) -> Result<CMatrix> {
    let first = states.first().ok_or(Error::Empty("state list"))?;
    let d = first.dim();
    if let Some(s) = states.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: s.dim(),
        });
    }
    if states.len() > d {
        return Err(Error::LinearlyDependent(0.0));
    }
    let vectors: Vec<CVector> = states.iter().map(|s| s.vector().clone()).collect();
    let g = linalg::gram(&vectors);
    let eig = linalg::eigvalsh(&g);
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if ratio <= INDEPENDENCE_CUTOFF {
        return Err(Error::LinearlyDependent(ratio));
    }
    Ok(g)
}

/// True when the Gram matrix of `states` has full rank at the independence
/// cutoff.
pub fn linearly_independent(states: &[Ket]) -> bool {
    independent_gram(states).is_ok()
}

/// `|psi_j^perp>`: orthogonal to every input state except `|psi_j>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReciprocalBasis {
    pub states: Vec<Ket>,
}

impl ReciprocalBasis {
    /// Largest `|<psi_j^perp|psi_j'>|` over `j != j'`.
    pub fn orthogonality_residual(&self, originals: &[Ket]) -> f64 {
        let mut worst = 0.0_f64;
        for (j, r) in self.states.iter().enumerate() {
            for (jp, s) in originals.iter().enumerate() {
                if j != jp {
                    worst = worst.max(r.inner(s).norm());
                }
            }
        }
        worst
    }
}

/// Dual basis within the span of `states`: `|psi~_j> = sum_k (G^{-1})_kj |psi_k>`,
/// normalized and put in canonical phase.
pub fn reciprocal_states(states: &[Ket]) -> Result<ReciprocalBasis> {
    let g = independent_gram(states)?;
    let g_inv = g.try_inverse().ok_or(Error::LinearlyDependent(0.0))?;
    let d = states[0].dim();
    let duals = (0..states.len())
        .map(|j| {
            let v = states
                .iter()
                .enumerate()
                .fold(CVector::zeros(d), |acc, (k, s)| acc + s.vector() * g_inv[(k, j)]);
            Ket::normalize(v).map(Ket::canonical)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReciprocalBasis { states: duals })
}

/// Conclusive elements `Pi_j` with their success probabilities, plus the
/// inconclusive element `Pi_? = 1 - sum_j Pi_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnambiguousPovm {
    pub conclusive: Vec<Operator>,
    pub inconclusive: Operator,
    pub success: Vec<f64>,
}

impl UnambiguousPovm {
    pub fn len(&self) -> usize {
        self.conclusive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conclusive.is_empty()
    }

    /// As a plain POVM with outcomes `0..N-1` followed by `?`.
    pub fn to_povm(&self) -> Result<Povm> {
        let mut elements = self.conclusive.clone();
        elements.push(self.inconclusive.clone());
        let mut labels: Vec<String> = (0..self.conclusive.len()).map(|j| j.to_string()).collect();
        labels.push("?".into());
        Povm::new(elements, labels)
    }

    pub fn inconclusive_min_eigenvalue(&self) -> f64 {
        self.inconclusive.min_eigenvalue()
    }

    /// Largest deviation of `<psi_j'|Pi_j|psi_j'>` from `P_j delta_jj'`.
    pub fn conclusive_residual(&self, states: &[Ket]) -> f64 {
        let mut worst = 0.0_f64;
        for (j, pi) in self.conclusive.iter().enumerate() {
            for (jp, s) in states.iter().enumerate() {
                let got = linalg::inner(s.vector(), &pi.apply(s)).re;
                let want = if j == jp { self.success[j] } else { 0.0 };
                worst = worst.max((got - want).abs());
            }
        }
        worst
    }

    /// Inconclusive probability under priors `eta`: `1 - sum_j eta_j P_j`.
    pub fn inconclusive_probability(&self, priors: &[f64]) -> f64 {
        1.0 - priors.iter().zip(&self.success).map(|(e, p)| e * p).sum::<f64>()
    }
}

/// `Pi_j = P_j |psi_j^perp><psi_j^perp| / |<psi_j^perp|psi_j>|^2`.
///
/// Fails with [`Error::Infeasible`] when the demanded success probabilities
/// leave `Pi_?` with an eigenvalue below `-DEFAULT_TOL`.
pub fn unambiguous_povm(states: &[Ket], success: &[f64]) -> Result<UnambiguousPovm> {
    unambiguous_povm_with_tolerance(states, success, DEFAULT_TOL)
}

pub fn unambiguous_povm_with_tolerance(states: &[Ket], success: &[f64], tol: f64) -> Result<UnambiguousPovm> {
    if success.len() != states.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            found: success.len(),
        });
    }
    // demands above 1 are left to the positivity check below
    if let Some(&p) = success.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::OutOfRange {
            what: "success probability",
            value: p,
            range: ">= 0",
        });
    }
    let recip = reciprocal_states(states)?;
    let d = states[0].dim();
    let conclusive: Vec<Operator> = recip
        .states
        .iter()
        .zip(states)
        .zip(success)
        .map(|((r, s), p)| r.projector().scale(p / r.inner(s).norm_sqr()))
        .collect();
    let sum = conclusive
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, op| acc + op.matrix());
    let inconclusive = Operator::from_square(linalg::hermitian_part(&(linalg::identity(d) - sum)));
    let lam = inconclusive.min_eigenvalue();
    if lam < -tol {
        return Err(Error::Infeasible { min_eigenvalue: lam });
    }
    Ok(UnambiguousPovm {
        conclusive,
        inconclusive,
        success: success.to_vec(),
    })
}

/// Optimal unambiguous discrimination of an equiprobable symmetric family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnambiguousOptimum {
    /// Success probability, equal for every state.
    pub success: f64,
    pub inconclusive: f64,
}

impl UnambiguousOptimum {
    pub fn success_vector(&self, n: usize) -> Vec<f64> {
        vec![self.success; n]
    }
}

/// `P_success = N min_k |c_k|^2` and `P_? = 1 - P_success`.
pub fn symmetric_unambiguous_optimum(fam: &SymmetricFamily) -> Result<UnambiguousOptimum> {
    independent_gram(&fam.states)?;
    let n = fam.len() as f64;
    let weights = fam.weights();
    let min_weight = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let success = (n * min_weight).min(1.0);
    debug_assert!(weights
        .iter()
        .filter(|&&w| w == min_weight)
        .all(|&w| n * w == n * min_weight));
    Ok(UnambiguousOptimum {
        success,
        inconclusive: 1.0 - success,
    })
}

/// State of each input after the inconclusive outcome, using the Kraus
/// operator `Pi_?^{1/2}`.
///
/// For an optimal POVM the posteriors become linearly dependent (for two
/// states: identical). Non-optimal POVMs are accepted as well.
pub fn failure_posterior(states: &[Ket], povm: &UnambiguousPovm) -> Result<Vec<Ket>> {
    let a = povm.inconclusive.psd_sqrt();
    states
        .iter()
        .map(|s| {
            let v = a.apply(s);
            let p = v.norm_squared();
            if p < ZERO_PROB {
                return Err(Error::ImpossibleOutcome(p));
            }
            Ok(Ket::from_unit(v.unscale(p.sqrt())).canonical())
        })
        .collect()
}

/// Polarization-based unambiguous discriminator for
/// `|psi+-> = cos(theta)|V> +- sin(theta)|H>`.
///
/// The photon lives on `path (x) polarization` with paths
/// `{interferometer, inconclusive port}` and polarizations `{V, H}`. The
/// polarizing beamsplitters route the two polarizations through separate
/// arms and recombine them, so in this encoding they act as the identity; the
/// arm is carried by the polarization label. The ordinary beamsplitter in the
/// vertical arm couples `|int, V>` to the inconclusive port with transmission
/// `t = sqrt(cos 2 theta) / cos theta`. The final polarizing beamsplitter is
/// oriented at 45 degrees and feeds `D+` and `D-`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerModel {
    pub theta: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub joint_unitary: Operator,
    /// Projectors for `D+`, `D-`, `D?` on the 4-mode space.
    pub detectors: [Operator; 3],
}

/// Mode index for (path, polarization).
fn mode(path: usize, pol: usize) -> usize {
    path * 2 + pol
}

const INT: usize = 0;
const PORT: usize = 1;
const V: usize = 0;
const H: usize = 1;

pub fn interferometer_model(theta: f64) -> Result<InterferometerModel> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_4 + 1e-12) {
        return Err(Error::OutOfRange {
            what: "theta",
            value: theta,
            range: "(0, pi/4]",
        });
    }
    let theta = theta.min(std::f64::consts::FRAC_PI_4);
    let cos2 = (2.0 * theta).cos().max(0.0);
    let t = cos2.sqrt() / theta.cos();
    let r = (1.0 - t * t).max(0.0).sqrt();

    let mut bs = CMatrix::identity(4, 4);
    let (a, b) = (mode(INT, V), mode(PORT, V));
    bs[(a, a)] = cr(r);
    bs[(b, a)] = cr(t);
    bs[(a, b)] = cr(-t);
    bs[(b, b)] = cr(r);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut diag_plus = CVector::zeros(4);
    diag_plus[mode(INT, V)] = cr(s);
    diag_plus[mode(INT, H)] = cr(s);
    let mut diag_minus = CVector::zeros(4);
    diag_minus[mode(INT, V)] = cr(s);
    diag_minus[mode(INT, H)] = cr(-s);
    let mut port = CMatrix::zeros(4, 4);
    port[(mode(PORT, V), mode(PORT, V))] = cr(1.0);
    port[(mode(PORT, H), mode(PORT, H))] = cr(1.0);

    Ok(InterferometerModel {
        theta,
        transmission: t,
        reflection: r,
        joint_unitary: Operator::from_square(bs),
        detectors: [
            Operator::from_square(linalg::outer(&diag_plus, &diag_plus)),
            Operator::from_square(linalg::outer(&diag_minus, &diag_minus)),
            Operator::from_square(port),
        ],
    })
}

impl InterferometerModel {
    /// The two input polarization states `[psi+, psi-]` in the `{V, H}` basis.
    pub fn inputs(&self) -> [Ket; 2] {
        let (sn, cs) = self.theta.sin_cos();
        [
            Ket::from_unit(CVector::from_vec(vec![cr(cs), cr(sn)])),
            Ket::from_unit(CVector::from_vec(vec![cr(cs), cr(-sn)])),
        ]
    }

    /// Embed a polarization state into the interferometer path.
    fn embed(pol: &Ket) -> CVector {
        let mut v = CVector::zeros(4);
        v[mode(INT, V)] = pol.vector()[0];
        v[mode(INT, H)] = pol.vector()[1];
        v
    }

    /// `[P(D+), P(D-), P(D?)]` for a polarization input.
    pub fn detector_probs(&self, pol: &Ket) -> [f64; 3] {
        let out = self.joint_unitary.matrix() * Self::embed(pol);
        self.detectors
            .clone()
            .map(|d| linalg::inner(&out, &(d.matrix() * &out)).re)
    }

    /// Normalized polarization state left in the interferometer path after the
    /// beamsplitter (photons not sent to `D?`).
    pub fn post_beamsplitter(&self, pol: &Ket) -> Result<Ket> {
        let out = self.joint_unitary.matrix() * Self::embed(pol);
        let v = CVector::from_vec(vec![out[mode(INT, V)], out[mode(INT, H)]]);
        Ket::normalize(v)
    }

    /// The polarization POVM `{E+, E-, E?}` implemented by the apparatus.
    pub fn effective_povm(&self) -> Result<Povm> {
        let mut embed = CMatrix::zeros(4, 2);
        embed[(mode(INT, V), 0)] = cr(1.0);
        embed[(mode(INT, H), 1)] = cr(1.0);
        let u = self.joint_unitary.matrix();
        let els = self
            .detectors
            .iter()
            .map(|d| {
                let e = embed.adjoint() * u.adjoint() * d.matrix() * u * &embed;
                Operator::from_square(linalg::hermitian_part(&e))
            })
            .collect();
        Povm::new(els, vec!["D+".into(), "D-".into(), "D?".into()])
    }
}

/// Detector statistics for one input state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorRow {
    pub state: String,
    pub d_plus: f64,
    pub d_minus: f64,
    pub d_inconclusive: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerReport {
    pub theta: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub rows: Vec<DetectorRow>,
    /// Polarization states after the beamsplitter, `[psi+, psi-]`.
    pub post_beamsplitter: Vec<Ket>,
}

/// Runs both inputs through the interferometer.
pub fn interferometer_sim(theta: f64) -> Result<InterferometerReport> {
    let model = interferometer_model(theta)?;
    let inputs = model.inputs();
    let rows = inputs
        .iter()
        .zip(["+", "-"])
        .map(|(k, label)| {
            let [p, m, q] = model.detector_probs(k);
            DetectorRow {
                state: label.into(),
                d_plus: p,
                d_minus: m,
                d_inconclusive: q,
            }
        })
        .collect();
    let post_beamsplitter = inputs
        .iter()
        .map(|k| model.post_beamsplitter(k))
        .collect::<Result<Vec<_>>>()?;
    Ok(InterferometerReport {
        theta: model.theta,
        transmission: model.transmission,
        reflection: model.reflection,
        rows,
        post_beamsplitter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minerror::{make_symmetric_real, trine_states, TwoStateFamily};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};

    fn pair(theta: f64) -> Vec<Ket> {
        TwoStateFamily::new(theta, 0.5).unwrap().states().to_vec()
    }

    #[test]
    fn idp_values() {
        assert_eq!(idp_bound(0.0).unwrap(), 0.0);
        assert!((idp_bound((2.0 * FRAC_PI_6).cos()).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(idp_bound(1.0).unwrap(), 1.0);
        assert!(idp_bound(-0.1).is_err());
    }

    #[test]
    fn reciprocal_of_two_state_pair() {
        let th: f64 = 0.4;
        let r = reciprocal_states(&pair(th)).unwrap();
        let (s, c) = th.sin_cos();
        assert!(r.states[0].fidelity(&Ket::from_real(&[s, c]).unwrap()) > 1.0 - 1e-12);
        assert!(r.states[1].fidelity(&Ket::from_real(&[s, -c]).unwrap()) > 1.0 - 1e-12);
        assert!(r.orthogonality_residual(&pair(th)) < 1e-12);
    }

    #[test]
    fn reciprocal_of_orthonormal_is_identity() {
        let b: Vec<Ket> = (0..3).map(|i| Ket::basis(3, i)).collect();
        assert_eq!(reciprocal_states(&b).unwrap().states, b);
    }

    #[test]
    fn trine_is_dependent() {
        let r = reciprocal_states(&trine_states());
        assert!(matches!(r, Err(Error::LinearlyDependent(_))));
    }

    #[test]
    fn idp_optimum_saturates_positivity() {
        let th: f64 = 0.35;
        let ov = (2.0 * th).cos();
        let p = 1.0 - ov;
        let u = unambiguous_povm(&pair(th), &[p, p]).unwrap();
        assert!(u.inconclusive_min_eigenvalue().abs() < 1e-12);
        assert!(u.conclusive_residual(&pair(th)) < 1e-12);
        assert!((u.inconclusive_probability(&[0.5, 0.5]) - ov).abs() < 1e-12);
        assert!(u.to_povm().is_ok());

        let over = unambiguous_povm(&pair(th), &[p + 0.05, p + 0.05]);
        assert!(matches!(over, Err(Error::Infeasible { min_eigenvalue }) if min_eigenvalue < -1e-3));

        let b = [Ket::basis(2, 0), Ket::basis(2, 1)];
        assert!(matches!(
            unambiguous_povm(&b, &[1.0 + 1e-6, 1.0]),
            Err(Error::Infeasible { .. })
        ));
        assert!(unambiguous_povm(&b, &[-0.1, 1.0]).is_err());
    }

    #[test]
    fn zero_success_is_identity() {
        let u = unambiguous_povm(&pair(0.2), &[0.0, 0.0]).unwrap();
        assert!(u.inconclusive.distance(&Operator::identity(2)) < 1e-15);
    }

    #[test]
    fn symmetric_optimum_reduces_to_idp() {
        for i in 1..=20 {
            let th = i as f64 * FRAC_PI_4 / 20.0;
            let fam = make_symmetric_real(&[th.sin(), th.cos()]);
            let Ok(fam) = fam else { continue };
            if th == FRAC_PI_4 {
                continue;
            }
            let opt = symmetric_unambiguous_optimum(&fam).unwrap();
            assert!((opt.inconclusive - idp_bound((2.0 * th).cos()).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_three_state_boundary() {
        let fam = make_symmetric_real(&[0.5f64.sqrt(), 0.5, 0.5]).unwrap();
        let opt = symmetric_unambiguous_optimum(&fam).unwrap();
        assert!((opt.success - 0.75).abs() < 1e-12);
        assert!((opt.inconclusive - 0.25).abs() < 1e-12);
        assert!(unambiguous_povm(&fam.states, &opt.success_vector(3)).is_ok());
        assert!(unambiguous_povm(&fam.states, &[opt.success + 1e-6; 3]).is_err());
    }

    #[test]
    fn orthonormal_family_always_succeeds() {
        let fam = make_symmetric_real(&[0.5; 4]).unwrap();
        let opt = symmetric_unambiguous_optimum(&fam).unwrap();
        assert!((opt.success - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posteriors_merge_at_optimum() {
        let th = FRAC_PI_8;
        let p = 1.0 - (2.0 * th).cos();
        let u = unambiguous_povm(&pair(th), &[p, p]).unwrap();
        let post = failure_posterior(&pair(th), &u).unwrap();
        assert!(post[0].fidelity(&post[1]) > 1.0 - 1e-9);
    }

    #[test]
    fn posteriors_of_three_state_optimum_have_rank_two() {
        let fam = make_symmetric_real(&[0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()]).unwrap();
        let opt = symmetric_unambiguous_optimum(&fam).unwrap();
        let u = unambiguous_povm(&fam.states, &opt.success_vector(3)).unwrap();
        let post = failure_posterior(&fam.states, &u).unwrap();
        let vs: Vec<CVector> = post.iter().map(|k| k.vector().clone()).collect();
        assert_eq!(linalg::numerical_rank(&linalg::gram(&vs), 1e-9), 2);
    }

    #[test]
    fn orthogonal_inputs_have_no_failure_branch() {
        let b = [Ket::basis(2, 0), Ket::basis(2, 1)];
        let u = unambiguous_povm(&b, &[1.0, 1.0]).unwrap();
        assert!(matches!(failure_posterior(&b, &u), Err(Error::ImpossibleOutcome(_))));
    }

    #[test]
    fn interferometer_at_sixty_degrees() {
        let rep = interferometer_sim(FRAC_PI_6).unwrap();
        assert!((rep.transmission - (0.5f64.sqrt() / (3f64.sqrt() / 2.0))).abs() < 1e-12);
        assert!((rep.transmission - 0.816_496_580_927_726).abs() < 1e-12);
        let plus = &rep.rows[0];
        assert!((plus.d_inconclusive - 0.5).abs() < 1e-12);
        assert!((plus.d_plus - 0.5).abs() < 1e-12);
        assert!(plus.d_minus.abs() < 1e-12);
        let minus = &rep.rows[1];
        assert!((minus.d_minus - 0.5).abs() < 1e-12);
        assert!(minus.d_plus.abs() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(rep.post_beamsplitter[0].fidelity(&Ket::from_real(&[s, s]).unwrap()) > 1.0 - 1e-12);
        assert!(rep.post_beamsplitter[1].fidelity(&Ket::from_real(&[s, -s]).unwrap()) > 1.0 - 1e-12);
    }

    #[test]
    fn interferometer_matches_povm() {
        for th in [0.1, 0.3, 0.6, FRAC_PI_4] {
            let m = interferometer_model(th).unwrap();
            assert!(m.joint_unitary.is_unitary(1e-12));
            let p = 1.0 - (2.0 * th).cos();
            let u = unambiguous_povm(&pair(th), &[p, p]).unwrap();
            let eff = m.effective_povm().unwrap();
            assert!(eff.elements()[0].distance(&u.conclusive[0]) < 1e-12);
            assert!(eff.elements()[1].distance(&u.conclusive[1]) < 1e-12);
            assert!(eff.elements()[2].distance(&u.inconclusive) < 1e-12);
        }
    }

    #[test]
    fn interferometer_range() {
        assert!(interferometer_model(0.0).is_err());
        assert!(interferometer_model(0.8).is_err());
        let rep = interferometer_sim(FRAC_PI_4).unwrap();
        assert!(rep.rows[0].d_inconclusive.abs() < 1e-12);
        assert!((rep.rows[0].d_plus - 1.0).abs() < 1e-12);
    }
}
