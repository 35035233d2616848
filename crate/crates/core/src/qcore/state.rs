//! Pure states, operators, density operators and the qubit Bloch picture.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::json::{self, JsonMatrix, JsonVector};
use super::linalg::{self, c, cr, CMatrix, CVector, C64};
use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// A normalized pure state `|psi>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JsonVector", into = "JsonVector")]
pub struct Ket(CVector);

impl Ket {
    /// Wraps `amplitudes`, rejecting vectors whose squared norm differs from
    /// one by more than [`DEFAULT_TOL`].
    pub fn new(amplitudes: CVector) -> Result<Self> {
        Self::with_tolerance(amplitudes, DEFAULT_TOL)
    }

    pub fn with_tolerance(amplitudes: CVector, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("ket amplitudes"));
        }
        let n2 = amplitudes.norm_squared();
        if (n2 - 1.0).abs() > tol {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self(amplitudes))
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalize(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if amplitudes.is_empty() || n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Ok(Self(amplitudes.unscale(n)))
    }

    pub fn from_complex(amplitudes: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&x| cr(x)),
        ))
    }

    /// Computational basis state `|i>` of a `d`-dimensional space.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = CVector::zeros(d);
        v[i] = cr(1.0);
        Self(v)
    }

    pub(crate) fn from_unit(v: CVector) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Ket) -> C64 {
        linalg::inner(&self.0, &other.0)
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &Ket) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> Operator {
        Operator(linalg::outer(&self.0, &self.0))
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator(linalg::outer(&self.0, &self.0))
    }

    /// Same state with the first non-negligible amplitude real and positive.
    pub fn canonical(mut self) -> Self {
        linalg::canonical_phase(&mut self.0);
        self
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket(linalg::kron_vec(&self.0, &other.0))
    }
}

impl TryFrom<JsonVector> for Ket {
    type Error = Error;
    fn try_from(v: JsonVector) -> Result<Self> {
        Ket::new(json::vector_from_json(&v))
    }
}

impl From<Ket> for JsonVector {
    fn from(k: Ket) -> Self {
        json::vector_to_json(&k.0)
    }
}

/// A general square operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JsonMatrix", into = "JsonMatrix")]
pub struct Operator(CMatrix);

impl Operator {
    pub fn new(m: CMatrix) -> Result<Self> {
        linalg::ensure_square(&m)?;
        Ok(Self(m))
    }

    pub fn identity(d: usize) -> Self {
        Self(linalg::identity(d))
    }

    pub fn zeros(d: usize) -> Self {
        Self(CMatrix::zeros(d, d))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMatrix::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| cr(rows[i][j]));
        Self::new(m)
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self(CMatrix::from_fn(
            n,
            n,
            |i, j| if i == j { cr(entries[i]) } else { cr(0.0) },
        ))
    }

    pub(crate) fn from_square(m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dagger(&self) -> Operator {
        Operator(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Operator {
        Operator(self.0.scale(s))
    }

    pub fn apply(&self, ket: &Ket) -> CVector {
        &self.0 * ket.vector()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        linalg::hermitian_deviation(&self.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn unitary_deviation(&self) -> f64 {
        linalg::unitary_deviation(&self.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.0)
    }

    /// Largest entrywise distance to `other`.
    pub fn distance(&self, other: &Operator) -> f64 {
        linalg::max_abs(&(&self.0 - &other.0))
    }

    pub fn tensor(&self, other: &Operator) -> Operator {
        Operator(linalg::kron(&self.0, &other.0))
    }

    /// Principal square root of a PSD operator (negative round-off clamped).
    pub fn psd_sqrt(&self) -> Operator {
        Operator(linalg::psd_sqrt(&self.0))
    }
}

impl TryFrom<JsonMatrix> for Operator {
    type Error = Error;
    fn try_from(rows: JsonMatrix) -> Result<Self> {
        Operator::new(json::matrix_from_json(&rows)?)
    }
}

impl From<Operator> for JsonMatrix {
    fn from(op: Operator) -> Self {
        json::matrix_to_json(&op.0)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl std::iter::Sum for Operator {
    fn sum<I: Iterator<Item = Operator>>(mut iter: I) -> Operator {
        let first = iter.next().expect("sum of an empty operator list");
        iter.fold(first, |acc, op| Operator(acc.0 + op.0))
    }
}

/// Hermitian, positive semi-definite, unit-trace operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JsonMatrix", into = "JsonMatrix")]
pub struct DensityOperator(CMatrix);

impl DensityOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        let rho = Self(m);
        rho.validate(tol)?;
        Ok(rho)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(linalg::identity(d).unscale(d as f64))
    }

    /// Convex mixture `sum_r p_r |psi_r><psi_r|`.
    pub fn mixture(weights: &[f64], kets: &[Ket]) -> Result<Self> {
        let d = kets.first().ok_or(Error::Empty("mixture components"))?.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, k) in weights.iter().zip(kets) {
            if k.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: k.dim(),
                });
            }
            m += linalg::outer(k.vector(), k.vector()).scale(*w);
        }
        Self::new(m)
    }

    /// Hermitize and renormalize a matrix that is a density operator up to
    /// round-off.
    pub(crate) fn from_unnormalized(m: CMatrix) -> Self {
        let h = linalg::hermitian_part(&m);
        let tr = h.trace().re;
        Self(h.unscale(tr))
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        linalg::ensure_square(&self.0)?;
        let herm = linalg::hermitian_deviation(&self.0);
        if herm > tol {
            return Err(Error::NotHermitian(herm));
        }
        let tr = self.0.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidTrace(tr.re));
        }
        let lam = linalg::min_eigenvalue(&self.0);
        if lam < -tol {
            return Err(Error::NotPositive(lam));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn as_operator(&self) -> Operator {
        Operator(self.0.clone())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.0)
    }

    /// `Tr rho^2`
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        linalg::entropy_bits(self.eigenvalues().into_iter().map(|x| x.max(0.0)))
    }

    /// `<psi|rho|psi>`
    pub fn fidelity_with(&self, ket: &Ket) -> f64 {
        linalg::inner(ket.vector(), &(&self.0 * ket.vector())).re
    }

    pub fn distance(&self, other: &DensityOperator) -> f64 {
        linalg::max_abs(&(&self.0 - &other.0))
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator(linalg::kron(&self.0, &other.0))
    }

    /// `U rho U^dagger` for a unitary (or isometric) `U`.
    pub fn conjugate_by(&self, u: &Operator) -> DensityOperator {
        DensityOperator(u.matrix() * &self.0 * u.matrix().adjoint())
    }
}

impl TryFrom<JsonMatrix> for DensityOperator {
    type Error = Error;
    fn try_from(rows: JsonMatrix) -> Result<Self> {
        DensityOperator::new(json::matrix_from_json(&rows)?)
    }
}

impl From<DensityOperator> for JsonMatrix {
    fn from(rho: DensityOperator) -> Self {
        json::matrix_to_json(&rho.0)
    }
}

impl From<&Ket> for DensityOperator {
    fn from(k: &Ket) -> Self {
        k.density()
    }
}

/// `Tr(rho obs)`.
pub fn expectation(rho: &DensityOperator, obs: &Operator) -> Result<C64> {
    if rho.dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: obs.dim(),
        });
    }
    Ok((rho.matrix() * obs.matrix()).trace())
}

/// Pauli operators in the `|+>, |->` (spin up, spin down) basis, acting as
/// `sigma_x|+-> = |-+>`, `sigma_y|+-> = +-i|-+>`, `sigma_z|+-> = +-|+->`.
pub fn pauli() -> [Operator; 3] {
    let z = cr(0.0);
    let one = cr(1.0);
    let i = c(0.0, 1.0);
    [
        Operator(CMatrix::from_row_slice(2, 2, &[z, one, one, z])),
        Operator(CMatrix::from_row_slice(2, 2, &[z, -i, i, z])),
        Operator(CMatrix::from_row_slice(2, 2, &[one, z, z, -one])),
    ]
}

/// Inverse square root on the support of a Hermitian PSD operator.
///
/// Eigenvalues at or below `cutoff` times the largest eigenvalue are treated
/// as kernel and mapped to zero, so `R op R` is the projector onto the support.
pub fn herm_inv_sqrt(op: &Operator, cutoff: f64) -> Result<Operator> {
    linalg::ensure_hermitian(op.matrix(), DEFAULT_TOL)?;
    Ok(Operator(linalg::inv_sqrt_on_support(op.matrix(), cutoff)))
}

/// Real 3-vector `a` with `rho = (1 + a.sigma) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(a: [f64; 3]) -> Result<Self> {
        let v = Self(a);
        if v.norm() > 1.0 + DEFAULT_TOL {
            return Err(Error::OutOfRange {
                what: "|a|",
                value: v.norm(),
                range: "[0, 1]",
            });
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn scaled(&self, s: f64) -> BlochVector {
        BlochVector(self.0.map(|x| x * s))
    }

    pub fn to_density(&self) -> DensityOperator {
        let mut m = linalg::identity(2);
        for (a, s) in self.0.iter().zip(pauli()) {
            m += s.matrix().scale(*a);
        }
        DensityOperator(m.scale(0.5))
    }

    /// `a_k = Tr(sigma_k rho)`; only defined for qubits.
    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: rho.dim(),
            });
        }
        let p = pauli();
        Ok(Self([0, 1, 2].map(|k| (rho.matrix() * p[k].matrix()).trace().re)))
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}
