//! Minimum-error discrimination: error probability and Bayes cost, the
//! two-state Helstrom optimum, the optimality certificate, symmetric state
//! families and the square-root measurement.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{outcome_probs, Povm};
use crate::qcore::linalg::{self, c, cr, CMatrix, CVector, C64};
use crate::qcore::{herm_inv_sqrt, DensityOperator, Ket, Operator};
use crate::{DEFAULT_TOL, PINV_CUTOFF};

/// A member of an ensemble: either a pure state or a density operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum State {
    Pure(Ket),
    Mixed(DensityOperator),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(k) => k.dim(),
            State::Mixed(r) => r.dim(),
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            State::Pure(k) => k.density(),
            State::Mixed(r) => r.clone(),
        }
    }

    pub fn as_ket(&self) -> Option<&Ket> {
        match self {
            State::Pure(k) => Some(k),
            State::Mixed(_) => None,
        }
    }
}

/// States with a priori probabilities summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleJson", into = "EnsembleJson")]
pub struct Ensemble {
    states: Vec<State>,
    priors: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    states: Vec<State>,
    priors: Vec<f64>,
}

impl TryFrom<EnsembleJson> for Ensemble {
    type Error = Error;
    fn try_from(j: EnsembleJson) -> Result<Self> {
        Ensemble::new(j.states, j.priors)
    }
}

impl From<Ensemble> for EnsembleJson {
    fn from(e: Ensemble) -> Self {
        EnsembleJson {
            states: e.states,
            priors: e.priors,
        }
    }
}

impl Ensemble {
    pub fn new(states: Vec<State>, priors: Vec<f64>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty("ensemble states"));
        }
        if states.len() != priors.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: priors.len(),
            });
        }
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
        if let Some(&p) = priors.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::OutOfRange {
                what: "prior",
                value: p,
                range: "[0, 1]",
            });
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::OutOfRange {
                what: "sum of priors",
                value: total,
                range: "{1}",
            });
        }
        Ok(Self { states, priors })
    }

    pub fn from_kets(kets: Vec<Ket>, priors: Vec<f64>) -> Result<Self> {
        Self::new(kets.into_iter().map(State::Pure).collect(), priors)
    }

    /// Equal priors `1/N`.
    pub fn uniform(kets: Vec<Ket>) -> Result<Self> {
        let n = kets.len();
        Self::from_kets(kets, vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn densities(&self) -> Vec<DensityOperator> {
        self.states.iter().map(State::density).collect()
    }

    /// The kets, when every member is pure.
    pub fn kets(&self) -> Option<Vec<Ket>> {
        self.states.iter().map(|s| s.as_ket().cloned()).collect()
    }
}

/// Which POVM outcome announces each state: `outcome_of[j]` is the outcome
/// index read as "state j".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(Vec<usize>);

impl Assignment {
    /// Outcome `j` announces state `j`.
    pub fn aligned(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn new(outcome_of: Vec<usize>) -> Result<Self> {
        let mut seen = outcome_of.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidAssignment("two states share an outcome".into()));
        }
        Ok(Self(outcome_of))
    }

    pub fn outcome_of(&self, state: usize) -> usize {
        self.0[state]
    }

    fn check(&self, n_states: usize, n_outcomes: usize) -> Result<()> {
        if self.0.len() != n_states {
            return Err(Error::InvalidAssignment(format!(
                "{} entries for {} states",
                self.0.len(),
                n_states
            )));
        }
        if let Some(&k) = self.0.iter().find(|&&k| k >= n_outcomes) {
            return Err(Error::InvalidAssignment(format!(
                "outcome {k} does not exist ({n_outcomes} outcomes)"
            )));
        }
        Ok(())
    }
}

fn resolve(ens: &Ensemble, povm: &Povm, assignment: Option<&Assignment>) -> Result<Assignment> {
    if povm.dim() != ens.dim() {
        return Err(Error::DimensionMismatch {
            expected: ens.dim(),
            found: povm.dim(),
        });
    }
    if povm.len() < ens.len() {
        return Err(Error::DimensionMismatch {
            expected: ens.len(),
            found: povm.len(),
        });
    }
    let a = assignment.cloned().unwrap_or_else(|| Assignment::aligned(ens.len()));
    a.check(ens.len(), povm.len())?;
    Ok(a)
}

/// `P(w_k|rho_j)`, one row per state and one column per outcome.
pub fn channel_matrix(ens: &Ensemble, povm: &Povm) -> Result<Vec<Vec<f64>>> {
    ens.densities().iter().map(|rho| outcome_probs(povm, rho)).collect()
}

/// `P_E = 1 - sum_j eta_j Tr(Pi_{a(j)} rho_j)`.
pub fn error_probability(ens: &Ensemble, povm: &Povm, assignment: Option<&Assignment>) -> Result<f64> {
    let a = resolve(ens, povm, assignment)?;
    let channel = channel_matrix(ens, povm)?;
    let correct: f64 = ens
        .priors
        .iter()
        .enumerate()
        .map(|(j, eta)| eta * channel[j][a.outcome_of(j)])
        .sum();
    Ok((1.0 - correct).clamp(0.0, 1.0))
}

/// `C_kj`: the cost of announcing state `k` when state `j` was sent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix(Vec<Vec<f64>>);

impl CostMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        Ok(Self(rows))
    }

    /// Zero on the diagonal, `cost` everywhere else.
    pub fn uniform(n: usize, cost: f64) -> Self {
        Self(
            (0..n)
                .map(|k| (0..n).map(|j| if j == k { 0.0 } else { cost }).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.0[k][j]
    }
}

/// `C_B = sum_jk eta_j C_kj P(w_k|rho_j)`.
pub fn bayes_cost(ens: &Ensemble, povm: &Povm, cost: &CostMatrix, assignment: Option<&Assignment>) -> Result<f64> {
    if cost.len() != ens.len() {
        return Err(Error::DimensionMismatch {
            expected: ens.len(),
            found: cost.len(),
        });
    }
    let a = resolve(ens, povm, assignment)?;
    let channel = channel_matrix(ens, povm)?;
    let mut total = 0.0;
    for (j, eta) in ens.priors.iter().enumerate() {
        for k in 0..ens.len() {
            total += eta * cost.get(k, j) * channel[j][a.outcome_of(k)];
        }
    }
    Ok(total)
}

fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            what,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Minimum error probability for two pure states with prior `eta_plus` and
/// overlap modulus `|<psi+|psi->|`.
pub fn helstrom_bound(eta_plus: f64, overlap: f64) -> Result<f64> {
    check_unit("eta_plus", eta_plus)?;
    check_unit("overlap", overlap)?;
    let eta_minus = 1.0 - eta_plus;
    let disc = (1.0 - 4.0 * eta_plus * eta_minus * overlap * overlap).max(0.0);
    Ok(0.5 * (1.0 - disc.sqrt()))
}

/// `|psi+-> = cos(theta)|+> +- sin(theta)|->` with prior `eta_plus` on `psi+`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoStateFamily {
    pub theta: f64,
    pub eta_plus: f64,
    pub basis: [Ket; 2],
}

impl TwoStateFamily {
    pub fn new(theta: f64, eta_plus: f64) -> Result<Self> {
        Self::with_basis(theta, eta_plus, [Ket::basis(2, 0), Ket::basis(2, 1)])
    }

    pub fn with_basis(theta: f64, eta_plus: f64, basis: [Ket; 2]) -> Result<Self> {
        if !(0.0..=FRAC_PI_4 + 1e-12).contains(&theta) {
            return Err(Error::OutOfRange {
                what: "theta",
                value: theta,
                range: "[0, pi/4]",
            });
        }
        check_unit("eta_plus", eta_plus)?;
        if basis[0].dim() != basis[1].dim() {
            return Err(Error::DimensionMismatch {
                expected: basis[0].dim(),
                found: basis[1].dim(),
            });
        }
        let ov = basis[0].inner(&basis[1]).norm();
        if ov > DEFAULT_TOL {
            return Err(Error::Invalid(format!("basis is not orthogonal (overlap {ov:e})")));
        }
        Ok(Self {
            theta: theta.min(FRAC_PI_4),
            eta_plus,
            basis,
        })
    }

    fn combine(&self, a: f64, b: f64) -> Ket {
        Ket::from_unit(self.basis[0].vector() * cr(a) + self.basis[1].vector() * cr(b))
    }

    /// `[psi+, psi-]`
    pub fn states(&self) -> [Ket; 2] {
        let (s, c) = self.theta.sin_cos();
        [self.combine(c, s), self.combine(c, -s)]
    }

    /// `<psi+|psi-> = cos 2 theta`
    pub fn overlap(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    /// `eta+ - eta-`
    pub fn delta(&self) -> f64 {
        2.0 * self.eta_plus - 1.0
    }

    /// `xi = Delta cos2t / sqrt(1 + cos^2 2t (Delta^2 - 1))`, with the
    /// denominator written as `sin^2 2t + cos^2 2t Delta^2`.
    pub fn xi(&self) -> f64 {
        let delta = self.delta();
        if self.theta == FRAC_PI_4 || delta == 0.0 {
            return 0.0;
        }
        let (s2, c2) = (2.0 * self.theta).sin_cos();
        let denom = (s2 * s2 + c2 * c2 * delta * delta).sqrt();
        if denom == 0.0 {
            return 0.0;
        }
        (delta * c2 / denom).clamp(-1.0, 1.0)
    }

    pub fn ensemble(&self) -> Ensemble {
        let [p, m] = self.states();
        Ensemble::from_kets(vec![p, m], vec![self.eta_plus, 1.0 - self.eta_plus]).expect("family priors are valid")
    }

    pub fn bound(&self) -> f64 {
        helstrom_bound(self.eta_plus, self.overlap()).expect("family parameters are in range")
    }
}

/// Optimal projective measurement `|w+-> = [sqrt(1+-xi)|+> +- sqrt(1-+xi)|->]/sqrt2`,
/// outcomes labelled `+` and `-`.
pub fn helstrom_measurement(fam: &TwoStateFamily) -> Povm {
    let xi = fam.xi();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let w_plus = fam.combine(s * (1.0 + xi).sqrt(), s * (1.0 - xi).sqrt());
    let w_minus = fam.combine(s * (1.0 - xi).sqrt(), -s * (1.0 + xi).sqrt());
    Povm::new(
        vec![w_plus.projector(), w_minus.projector()],
        vec!["+".into(), "-".into()],
    )
    .expect("Helstrom detector states are orthonormal")
}

/// Outcome of the minimum-error optimality conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    /// `Gamma = sum_k eta_k Pi_k rho_k`
    pub gamma: Operator,
    /// Largest entry of `Gamma - Gamma^dagger`.
    pub gamma_hermiticity: f64,
    /// Frobenius norms of `Pi_j (eta_j rho_j - eta_k rho_k) Pi_k`.
    pub pairwise_residuals: Vec<Vec<f64>>,
    /// Smallest eigenvalue of `Gamma - eta_j rho_j` for each state.
    pub psd_margins: Vec<f64>,
    pub passed: bool,
}

/// Checks the stationarity and positivity conditions that certify a
/// minimum-error measurement.
pub fn hykl_check(ens: &Ensemble, povm: &Povm, assignment: Option<&Assignment>, tol: f64) -> Result<OptimalityReport> {
    let a = resolve(ens, povm, assignment)?;
    let n = ens.len();
    let d = ens.dim();
    let weighted: Vec<CMatrix> = ens
        .densities()
        .iter()
        .zip(&ens.priors)
        .map(|(rho, eta)| rho.matrix().scale(*eta))
        .collect();
    let pis: Vec<&CMatrix> = (0..n).map(|j| povm.elements()[a.outcome_of(j)].matrix()).collect();

    let gamma = (0..n).fold(CMatrix::zeros(d, d), |acc, k| acc + pis[k] * &weighted[k]);
    let gamma_hermiticity = linalg::hermitian_deviation(&gamma);

    let pairwise_residuals: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| (pis[j] * (&weighted[j] - &weighted[k]) * pis[k]).norm())
                .collect()
        })
        .collect();

    let gamma_h = linalg::hermitian_part(&gamma);
    let psd_margins: Vec<f64> = weighted
        .iter()
        .map(|w| linalg::min_eigenvalue(&(&gamma_h - w)))
        .collect();

    let passed = gamma_hermiticity <= tol
        && pairwise_residuals.iter().flatten().all(|&r| r <= tol)
        && psd_margins.iter().all(|&m| m >= -tol);

    Ok(OptimalityReport {
        gamma: Operator::from_square(gamma),
        gamma_hermiticity,
        pairwise_residuals,
        psd_margins,
        passed,
    })
}

/// States `|psi_j> = sum_k c_k exp(2 pi i j k / N) |k>` (j, k = 1..N) cycled by
/// `U = sum_k exp(2 pi i k / N) |k><k|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricFamily {
    pub coefficients: Vec<C64>,
    pub generator: Operator,
    pub states: Vec<Ket>,
}

fn root_of_unity(numerator: usize, n: usize) -> C64 {
    let phi = 2.0 * PI * ((numerator % n) as f64) / n as f64;
    c(phi.cos(), phi.sin())
}

pub fn make_symmetric(coefficients: &[C64], n: usize) -> Result<SymmetricFamily> {
    if n == 0 {
        return Err(Error::Empty("symmetric family"));
    }
    if coefficients.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coefficients.len(),
        });
    }
    let norm2: f64 = coefficients.iter().map(C64::norm_sqr).sum();
    if (norm2 - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized(norm2));
    }
    // basis label k = 1..N sits at index k - 1
    let states = (1..=n)
        .map(|j| {
            let v = CVector::from_fn(n, |idx, _| coefficients[idx] * root_of_unity(j * (idx + 1), n));
            Ket::from_unit(v)
        })
        .collect();
    let generator = Operator::from_square(CMatrix::from_fn(n, n, |r, s| {
        if r == s {
            root_of_unity(r + 1, n)
        } else {
            cr(0.0)
        }
    }));
    Ok(SymmetricFamily {
        coefficients: coefficients.to_vec(),
        generator,
        states,
    })
}

/// Real coefficients convenience wrapper.
pub fn make_symmetric_real(coefficients: &[f64]) -> Result<SymmetricFamily> {
    let cs: Vec<C64> = coefficients.iter().map(|&x| cr(x)).collect();
    make_symmetric(&cs, cs.len())
}

impl SymmetricFamily {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest `|| U psi_j - psi_{j+1} ||` with wrap-around.
    pub fn cycle_residual(&self) -> f64 {
        let n = self.states.len();
        (0..n)
            .map(|j| (self.generator.apply(&self.states[j]) - self.states[(j + 1) % n].vector()).norm())
            .fold(0.0, f64::max)
    }

    /// `|c_k|^2`
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(C64::norm_sqr).collect()
    }
}

fn check_uniform(priors: Option<&[f64]>, n: usize) -> Result<()> {
    if let Some(p) = priors {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        let u = 1.0 / n as f64;
        if p.iter().any(|x| (x - u).abs() > DEFAULT_TOL) {
            return Err(Error::NonUniformPriors);
        }
    }
    Ok(())
}

fn frame_operator(states: &[Ket]) -> Result<Operator> {
    let first = states.first().ok_or(Error::Empty("state list"))?;
    let d = first.dim();
    let mut phi = CMatrix::zeros(d, d);
    for s in states {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
        phi += linalg::outer(s.vector(), s.vector());
    }
    Ok(Operator::from_square(phi))
}

/// Square-root measurement `Pi_j = |w_j><w_j|` with `|w_j> = Phi^{-1/2}|psi_j>`.
///
/// Only equal priors are accepted. When the states do not span the space an
/// extra element labelled `null` completes the identity on the orthogonal
/// complement.
pub fn square_root_measurement(states: &[Ket], priors: Option<&[f64]>) -> Result<Povm> {
    let phi = frame_operator(states)?;
    check_uniform(priors, states.len())?;
    let root = herm_inv_sqrt(&phi, PINV_CUTOFF)?;
    let mut elements: Vec<Operator> = states
        .iter()
        .map(|s| {
            let w = root.apply(s);
            Operator::from_square(linalg::outer(&w, &w))
        })
        .collect();
    let mut labels: Vec<String> = (0..states.len()).map(|j| j.to_string()).collect();

    let d = phi.dim();
    let complement = linalg::identity(d) - linalg::support_projector(phi.matrix(), PINV_CUTOFF);
    if linalg::max_abs(&complement) > DEFAULT_TOL {
        elements.push(Operator::from_square(complement));
        labels.push("null".into());
    }
    Povm::new(elements, labels)
}

/// `1 - (1/N) sum_j |<psi_j|Phi^{-1/2}|psi_j>|^2`
pub fn srm_error(states: &[Ket]) -> Result<f64> {
    let phi = frame_operator(states)?;
    let root = herm_inv_sqrt(&phi, PINV_CUTOFF)?;
    let n = states.len() as f64;
    let success: f64 = states
        .iter()
        .map(|s| linalg::inner(s.vector(), &root.apply(s)).norm_sqr())
        .sum::<f64>()
        / n;
    Ok((1.0 - success).max(0.0))
}

/// Three real qubit states `|<->`, `(-|<-> + sqrt3|b>)/2`, `(-|<-> - sqrt3|b>)/2`
/// at mutual angle 2 pi / 3, in the basis (horizontal, vertical).
pub fn trine_states() -> [Ket; 3] {
    let h = 3f64.sqrt() / 2.0;
    [
        Ket::from_unit(CVector::from_vec(vec![cr(1.0), cr(0.0)])),
        Ket::from_unit(CVector::from_vec(vec![cr(-0.5), cr(h)])),
        Ket::from_unit(CVector::from_vec(vec![cr(-0.5), cr(-h)])),
    ]
}

/// The trine POVM `Pi_j = (2/3)|psi_j><psi_j|`.
pub fn trine_povm() -> Povm {
    Povm::unlabelled(trine_states().iter().map(|s| s.projector().scale(2.0 / 3.0)).collect())
        .expect("trine elements resolve the identity")
}

/// Exhaustive search over projective measurements on the real plane spanned
/// by two pure states, stepping the basis angle by `resolution`.
///
/// Returns the smallest error probability found and the measurement that
/// achieves it (outcome 0 announces state 0). Ties resolve to the smallest
/// angle, so the result is independent of evaluation order.
pub fn brute_force_two_state(ens: &Ensemble, resolution: f64) -> Result<(f64, Povm)> {
    if ens.len() != 2 {
        return Err(Error::Invalid(format!("expected 2 states, got {}", ens.len())));
    }
    if !(resolution > 0.0 && resolution < PI) {
        return Err(Error::OutOfRange {
            what: "resolution",
            value: resolution,
            range: "(0, pi)",
        });
    }
    let kets = ens
        .kets()
        .ok_or_else(|| Error::Invalid("brute-force search needs pure states".into()))?;

    // orthonormal frame: e1 = psi_0, e2 from psi_1 with the relative phase removed
    let e1 = kets[0].vector().clone();
    let ov = linalg::inner(&e1, kets[1].vector());
    let phase = if ov.norm() > 0.0 {
        ov.conj() / ov.norm()
    } else {
        cr(1.0)
    };
    let psi1 = kets[1].vector() * phase;
    let s = ov.norm();
    let perp = &psi1 - &e1 * cr(s);
    let perp_norm = perp.norm();
    if perp_norm < 1e-8 {
        return Err(Error::LinearlyDependent(perp_norm * perp_norm));
    }
    let e2 = perp.unscale(perp_norm);
    let t = perp_norm;
    // real coordinates: psi_0 = (1, 0), psi_1 = (s, t)
    let (eta0, eta1) = (ens.priors()[0], ens.priors()[1]);
    let error_at = |phi: f64| {
        let (sn, cs) = phi.sin_cos();
        // w = (cs, sn) announces state 0, w_perp = (-sn, cs) announces state 1
        let miss0 = sn * sn;
        let miss1 = (s * cs + t * sn).powi(2);
        eta0 * miss0 + eta1 * miss1
    };

    let steps = (PI / resolution).ceil() as usize;
    let (best, idx) = (0..steps)
        .into_par_iter()
        .map(|i| (error_at(i as f64 * resolution), i))
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );

    let (sn, cs) = (idx as f64 * resolution).sin_cos();
    let w = &e1 * cr(cs) + &e2 * cr(sn);
    let w_perp = &e1 * cr(-sn) + &e2 * cr(cs);
    let povm = Povm::unlabelled(vec![
        Operator::from_square(linalg::outer(&w, &w)),
        Operator::from_square(linalg::outer(&w_perp, &w_perp)),
    ])?;
    Ok((best, povm))
}
