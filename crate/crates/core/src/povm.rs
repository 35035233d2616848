//! Generalized measurements: POVMs, Kraus operators, state updates, Naimark
//! dilations and unitary evolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::json::{self, JsonMatrix};
use crate::qcore::linalg::{self, cr, CMatrix};
use crate::qcore::{DensityOperator, Ket, Operator};
use crate::{DEFAULT_TOL, ZERO_PROB};

/// Positive operators `Pi_k` with `sum_k Pi_k = 1`, one per labelled outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmJson", into = "PovmJson")]
pub struct Povm {
    elements: Vec<Operator>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PovmJson {
    labels: Vec<String>,
    elements: Vec<Operator>,
}

impl TryFrom<PovmJson> for Povm {
    type Error = Error;
    fn try_from(j: PovmJson) -> Result<Self> {
        Povm::new(j.elements, j.labels)
    }
}

impl From<Povm> for PovmJson {
    fn from(p: Povm) -> Self {
        PovmJson {
            labels: p.labels,
            elements: p.elements,
        }
    }
}

impl Povm {
    pub fn new(elements: Vec<Operator>, labels: Vec<String>) -> Result<Self> {
        Self::with_tolerance(elements, labels, DEFAULT_TOL)
    }

    pub fn with_tolerance(elements: Vec<Operator>, labels: Vec<String>, tol: f64) -> Result<Self> {
        if elements.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: elements.len(),
                found: labels.len(),
            });
        }
        let povm = Self { elements, labels };
        povm.validate(tol)?;
        Ok(povm)
    }

    /// Elements labelled `0, 1, ...`.
    pub fn unlabelled(elements: Vec<Operator>) -> Result<Self> {
        let labels = (0..elements.len()).map(|k| k.to_string()).collect();
        Self::new(elements, labels)
    }

    /// Rank-one projective measurement onto an orthonormal basis.
    pub fn projective(basis: &[Ket]) -> Result<Self> {
        Self::unlabelled(basis.iter().map(Ket::projector).collect())
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let first = self.elements.first().ok_or(Error::Empty("POVM elements"))?;
        let d = first.dim();
        for el in &self.elements {
            if el.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: el.dim(),
                });
            }
            let herm = el.hermitian_deviation();
            if herm > tol {
                return Err(Error::NotHermitian(herm));
            }
            let lam = el.min_eigenvalue();
            if lam < -tol {
                return Err(Error::NotPositive(lam));
            }
        }
        let residual = self.completeness_residual();
        if residual > tol {
            return Err(Error::Incomplete(residual));
        }
        Ok(())
    }

    /// Largest entry of `sum_k Pi_k - 1`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let total = self
            .elements
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, el| acc + el.matrix());
        linalg::max_abs(&(total - linalg::identity(d)))
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, Operator::dim)
    }

    /// Copy of the elements with the `k`-th one replaced; skips validation so
    /// callers can probe what the validator rejects.
    pub fn with_element_unchecked(&self, k: usize, el: Operator) -> Self {
        let mut out = self.clone();
        out.elements[k] = el;
        out
    }
}

/// `P(w_k|rho) = Tr(rho Pi_k)` for every outcome.
pub fn outcome_probs(povm: &Povm, rho: &DensityOperator) -> Result<Vec<f64>> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: rho.dim(),
        });
    }
    Ok(povm
        .elements
        .iter()
        .map(|el| (rho.matrix() * el.matrix()).trace().re)
        .collect())
}

/// Transformation operators `A_k` with `sum_k A_k^dagger A_k = 1`. Operators may
/// map a `d`-dimensional input to a `d'`-dimensional output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KrausJson", into = "KrausJson")]
pub struct KrausSet {
    operators: Vec<CMatrix>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct KrausJson {
    labels: Vec<String>,
    operators: Vec<JsonMatrix>,
}

impl TryFrom<KrausJson> for KrausSet {
    type Error = Error;
    fn try_from(j: KrausJson) -> Result<Self> {
        let ops = j
            .operators
            .iter()
            .map(|m| json::matrix_from_json(m))
            .collect::<Result<Vec<_>>>()?;
        KrausSet::new(ops, j.labels)
    }
}

impl From<KrausSet> for KrausJson {
    fn from(k: KrausSet) -> Self {
        KrausJson {
            labels: k.labels,
            operators: k.operators.iter().map(json::matrix_to_json).collect(),
        }
    }
}

impl KrausSet {
    pub fn new(operators: Vec<CMatrix>, labels: Vec<String>) -> Result<Self> {
        let set = Self { operators, labels };
        set.validate(DEFAULT_TOL)?;
        Ok(set)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.operators.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.operators.len(),
                found: self.labels.len(),
            });
        }
        let first = self.operators.first().ok_or(Error::Empty("Kraus operators"))?;
        let (d_out, d_in) = first.shape();
        let mut total = CMatrix::zeros(d_in, d_in);
        for a in &self.operators {
            if a.shape() != (d_out, d_in) {
                return Err(Error::DimensionMismatch {
                    expected: d_in,
                    found: a.ncols(),
                });
            }
            total += a.adjoint() * a;
        }
        let residual = linalg::max_abs(&(total - linalg::identity(d_in)));
        if residual > tol {
            return Err(Error::Incomplete(residual));
        }
        Ok(())
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.operators.first().map_or(0, |a| a.ncols())
    }

    /// The POVM `{A_k^dagger A_k}` this set implements.
    pub fn effects(&self) -> Result<Povm> {
        let els = self
            .operators
            .iter()
            .map(|a| Operator::from_square(linalg::hermitian_part(&(a.adjoint() * a))))
            .collect();
        Povm::new(els, self.labels.clone())
    }
}

/// `A_k = U_k Pi_k^{1/2}`; `unitaries` defaults to the identity for every outcome.
pub fn kraus_from_povm(povm: &Povm, unitaries: Option<&[Operator]>) -> Result<KrausSet> {
    if let Some(us) = unitaries {
        if us.len() != povm.len() {
            return Err(Error::DimensionMismatch {
                expected: povm.len(),
                found: us.len(),
            });
        }
        for u in us {
            if u.dim() != povm.dim() {
                return Err(Error::DimensionMismatch {
                    expected: povm.dim(),
                    found: u.dim(),
                });
            }
            let dev = u.unitary_deviation();
            if dev > DEFAULT_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
    }
    let operators = povm
        .elements
        .iter()
        .enumerate()
        .map(|(k, el)| {
            let root = linalg::psd_sqrt(el.matrix());
            match unitaries {
                Some(us) => us[k].matrix() * root,
                None => root,
            }
        })
        .collect();
    KrausSet::new(operators, povm.labels.clone())
}

/// Conditional state `A rho A^dagger / P` and its probability
/// `P = Tr(A rho A^dagger)`.
///
/// Outcomes with probability below [`ZERO_PROB`] are reported as impossible.
pub fn post_state(a: &CMatrix, rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
    if a.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: rho.dim(),
        });
    }
    let unnorm = a * rho.matrix() * a.adjoint();
    let p = unnorm.trace().re;
    if p < ZERO_PROB {
        return Err(Error::ImpossibleOutcome(p));
    }
    Ok((DensityOperator::from_unnormalized(unnorm), p))
}

/// State after a measurement whose result is not recorded:
/// `sum_k A_k rho A_k^dagger`.
pub fn unread_update(kraus: &KrausSet, rho: &DensityOperator) -> Result<DensityOperator> {
    if kraus.input_dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: kraus.input_dim(),
            found: rho.dim(),
        });
    }
    let d_out = kraus.operators[0].nrows();
    let total = kraus.operators.iter().fold(CMatrix::zeros(d_out, d_out), |acc, a| {
        acc + a * rho.matrix() * a.adjoint()
    });
    Ok(DensityOperator::from_trusted(linalg::hermitian_part(&total)))
}

/// Realization of a POVM as a joint unitary on system (x) ancilla followed by
/// a projective measurement of the ancilla.
///
/// The joint space is ordered system first, so the input is
/// `rho (x) |init><init|` with `init = |0>` of the ancilla.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaimarkDilation {
    pub system_dim: usize,
    pub ancilla_dim: usize,
    pub joint_unitary: Operator,
    pub ancilla_basis: Vec<Ket>,
    pub ancilla_init: Ket,
    pub labels: Vec<String>,
}

/// Builds the isometry `V = sum_k Pi_k^{1/2} (x) |k>` and completes it to a
/// unitary whose columns `|i>|0>` reproduce `V|i>`.
pub fn naimark_dilate(povm: &Povm) -> Result<NaimarkDilation> {
    povm.validate(DEFAULT_TOL)?;
    let d = povm.dim();
    let k_dim = povm.len();
    let n = d * k_dim;

    let mut isometry = CMatrix::zeros(n, d);
    for (k, el) in povm.elements.iter().enumerate() {
        let root = linalg::psd_sqrt(el.matrix());
        for i in 0..d {
            for j in 0..d {
                isometry[(i * k_dim + k, j)] = root[(i, j)];
            }
        }
    }
    // orthonormalize away the O(tol) completeness residual
    let polar = isometry.clone().svd(true, true);
    let isometry = polar.u.expect("u requested") * polar.v_t.expect("v_t requested");

    let completed = linalg::complete_to_unitary(&isometry);
    let mut unitary = CMatrix::zeros(n, n);
    let mut extra = d;
    for col in 0..n {
        let (i, a) = (col / k_dim, col % k_dim);
        let src = if a == 0 {
            i
        } else {
            extra += 1;
            extra - 1
        };
        unitary.set_column(col, &completed.column(src));
    }

    Ok(NaimarkDilation {
        system_dim: d,
        ancilla_dim: k_dim,
        joint_unitary: Operator::from_square(unitary),
        ancilla_basis: (0..k_dim).map(|k| Ket::basis(k_dim, k)).collect(),
        ancilla_init: Ket::basis(k_dim, 0),
        labels: povm.labels.clone(),
    })
}

impl NaimarkDilation {
    fn joint_output(&self, rho: &DensityOperator) -> Result<CMatrix> {
        if rho.dim() != self.system_dim {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim,
                found: rho.dim(),
            });
        }
        let input = linalg::kron(rho.matrix(), self.ancilla_init.density().matrix());
        let u = self.joint_unitary.matrix();
        Ok(u * input * u.adjoint())
    }

    fn ancilla_projector(&self, k: usize) -> CMatrix {
        linalg::kron(
            &linalg::identity(self.system_dim),
            self.ancilla_basis[k].projector().matrix(),
        )
    }

    /// Outcome statistics of the ancilla measurement.
    pub fn outcome_probs(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        let out = self.joint_output(rho)?;
        Ok((0..self.ancilla_dim)
            .map(|k| (self.ancilla_projector(k) * &out).trace().re)
            .collect())
    }

    /// Reduced system state conditioned on ancilla outcome `k`.
    pub fn conditional_state(&self, rho: &DensityOperator, k: usize) -> Result<(DensityOperator, f64)> {
        let out = self.joint_output(rho)?;
        let proj = self.ancilla_projector(k);
        let branch = &proj * out * &proj;
        let p = branch.trace().re;
        if p < ZERO_PROB {
            return Err(Error::ImpossibleOutcome(p));
        }
        let (d, ka) = (self.system_dim, self.ancilla_dim);
        let reduced = CMatrix::from_fn(d, d, |i, j| {
            (0..ka).fold(cr(0.0), |acc, a| acc + branch[(i * ka + a, j * ka + a)])
        });
        Ok((DensityOperator::from_unnormalized(reduced), p))
    }
}

/// `rho(t) = U rho U^dagger` with `U = exp(-i H t)` (hbar = 1).
pub fn evolve(rho: &DensityOperator, hamiltonian: &Operator, t: f64) -> Result<DensityOperator> {
    if hamiltonian.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: hamiltonian.dim(),
        });
    }
    linalg::ensure_hermitian(hamiltonian.matrix(), DEFAULT_TOL)?;
    let generator = hamiltonian.matrix() * crate::qcore::linalg::c(0.0, -t);
    let u = Operator::from_square(generator.exp());
    Ok(DensityOperator::from_trusted(linalg::hermitian_part(
        rho.conjugate_by(&u).matrix(),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::pauli;

    fn z_basis() -> Povm {
        Povm::projective(&[Ket::basis(2, 0), Ket::basis(2, 1)]).unwrap()
    }

    #[test]
    fn projective_on_eigenstate() {
        let p = outcome_probs(&z_basis(), &Ket::basis(2, 0).density()).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn maximally_mixed_gives_normalized_traces() {
        let povm = z_basis();
        let rho = DensityOperator::maximally_mixed(2);
        for (p, el) in outcome_probs(&povm, &rho).unwrap().iter().zip(povm.elements()) {
            assert!((p - el.trace().re / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn scaled_element_rejected() {
        let povm = z_basis();
        let bad = povm.with_element_unchecked(0, povm.elements()[0].scale(1.01));
        assert!(matches!(bad.validate(DEFAULT_TOL), Err(Error::Incomplete(_))));
    }

    #[test]
    fn dimension_mismatch() {
        let err = outcome_probs(&z_basis(), &DensityOperator::maximally_mixed(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn projector_kraus_is_idempotent() {
        let k = kraus_from_povm(&z_basis(), None).unwrap();
        for a in k.operators() {
            assert!(linalg::max_abs(&(a * a - a)) < 1e-14);
        }
    }

    #[test]
    fn single_element_povm_lifts_to_the_unitary() {
        let povm = Povm::unlabelled(vec![Operator::identity(2)]).unwrap();
        let u = pauli()[1].clone();
        let k = kraus_from_povm(&povm, Some(std::slice::from_ref(&u))).unwrap();
        assert!(linalg::max_abs(&(&k.operators()[0] - u.matrix())) < 1e-14);
        let not_unitary = Operator::identity(2).scale(2.0);
        assert!(matches!(
            kraus_from_povm(&povm, Some(&[not_unitary])),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn post_state_eigenstate_and_orthogonal() {
        let rho = Ket::basis(2, 0).density();
        let p0 = Ket::basis(2, 0).projector();
        let (post, p) = post_state(p0.matrix(), &rho).unwrap();
        assert!((p - 1.0).abs() < 1e-15 && post.distance(&rho) < 1e-15);
        let p1 = Ket::basis(2, 1).projector();
        assert!(matches!(
            post_state(p1.matrix(), &rho),
            Err(Error::ImpossibleOutcome(_))
        ));
    }

    #[test]
    fn unread_projective_keeps_diagonal() {
        let rho = DensityOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[cr(0.7), linalg::c(0.1, 0.2), linalg::c(0.1, -0.2), cr(0.3)],
        ))
        .unwrap();
        let out = unread_update(&kraus_from_povm(&z_basis(), None).unwrap(), &rho).unwrap();
        assert!(
            out.distance(
                &DensityOperator::new(CMatrix::from_row_slice(2, 2, &[cr(0.7), cr(0.0), cr(0.0), cr(0.3)])).unwrap()
            ) < 1e-15
        );
    }

    #[test]
    fn unread_single_unitary_conjugates() {
        let rho = Ket::basis(2, 0).density();
        let u = pauli()[0].clone();
        let k = KrausSet::new(vec![u.matrix().clone()], vec!["u".into()]).unwrap();
        let out = unread_update(&k, &rho).unwrap();
        assert!(out.distance(&rho.conjugate_by(&u)) < 1e-15);
    }

    #[test]
    fn projective_dilation_records_outcome() {
        let dil = naimark_dilate(&z_basis()).unwrap();
        assert!(dil.joint_unitary.is_unitary(1e-12));
        let s = 1.0 / 2f64.sqrt();
        let rho = Ket::from_real(&[s, s]).unwrap().density();
        let p = dil.outcome_probs(&rho).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-14 && (p[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn evolve_trivial_cases() {
        let rho = Ket::from_real(&[0.6, 0.8]).unwrap().density();
        let out = evolve(&rho, &Operator::zeros(2), 3.0).unwrap();
        assert!(out.distance(&rho) < 1e-15);
        // commuting Hamiltonian
        let diag = Ket::basis(2, 1).density();
        let out = evolve(&diag, &pauli()[2], 1.234).unwrap();
        assert!(out.distance(&diag) < 1e-14);
        let skew = Operator::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert!(matches!(evolve(&rho, &skew, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn json_round_trip_with_labels() {
        let povm = z_basis();
        let s = serde_json::to_string(&povm).unwrap();
        assert!(s.starts_with("{\"labels\":[\"0\",\"1\"]"));
        assert_eq!(serde_json::from_str::<Povm>(&s).unwrap(), povm);
        let k = kraus_from_povm(&povm, None).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(serde_json::from_str::<KrausSet>(&s).unwrap(), k);
    }
}
