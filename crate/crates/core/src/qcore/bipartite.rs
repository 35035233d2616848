//! Pure states of two subsystems and their Schmidt form.

use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::json;
use super::linalg::{self, CMatrix, CVector};
use super::state::{DensityOperator, Ket};
use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// Which factor of `H_A (x) H_B` an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl FromStr for Subsystem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Subsystem::A),
            "B" | "b" => Ok(Subsystem::B),
            other => Err(Error::InvalidSelector(other.to_string())),
        }
    }
}

/// `sum_jk b_jk |j>_A |k>_B`, with the amplitudes stored as a `d_A x d_B`
/// matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BipartiteJson", into = "BipartiteJson")]
pub struct BipartiteState {
    amplitudes: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct BipartiteJson {
    dims: [usize; 2],
    amplitudes: json::JsonMatrix,
}

impl TryFrom<BipartiteJson> for BipartiteState {
    type Error = Error;
    fn try_from(j: BipartiteJson) -> Result<Self> {
        let m = json::matrix_from_json(&j.amplitudes)?;
        if m.shape() != (j.dims[0], j.dims[1]) {
            return Err(Error::Invalid(format!(
                "amplitude matrix is {}x{}, dims say {}x{}",
                m.nrows(),
                m.ncols(),
                j.dims[0],
                j.dims[1]
            )));
        }
        BipartiteState::new(m)
    }
}

impl From<BipartiteState> for BipartiteJson {
    fn from(s: BipartiteState) -> Self {
        BipartiteJson {
            dims: [s.amplitudes.nrows(), s.amplitudes.ncols()],
            amplitudes: json::matrix_to_json(&s.amplitudes),
        }
    }
}

impl BipartiteState {
    pub fn new(amplitudes: CMatrix) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("bipartite amplitudes"));
        }
        let n2 = amplitudes.norm_squared();
        if (n2 - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero amplitude matrix to unit norm.
    pub fn normalize(amplitudes: CMatrix) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Self::new(amplitudes.unscale(n))
    }

    /// From a joint vector indexed as `j * d_B + k`.
    pub fn from_joint(v: &CVector, dims: (usize, usize)) -> Result<Self> {
        if v.len() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch {
                expected: dims.0 * dims.1,
                found: v.len(),
            });
        }
        Self::new(CMatrix::from_fn(dims.0, dims.1, |j, k| v[j * dims.1 + k]))
    }

    pub fn product(a: &Ket, b: &Ket) -> Self {
        Self {
            amplitudes: a.vector() * b.vector().transpose(),
        }
    }

    /// `sum_j c_j |alpha_j>|beta_j>`.
    pub fn from_schmidt(coefficients: &[f64], basis_a: &[Ket], basis_b: &[Ket]) -> Result<Self> {
        let (da, db) = match (basis_a.first(), basis_b.first()) {
            (Some(a), Some(b)) => (a.dim(), b.dim()),
            _ => return Err(Error::Empty("Schmidt bases")),
        };
        let mut m = CMatrix::zeros(da, db);
        for ((c, a), b) in coefficients.iter().zip(basis_a).zip(basis_b) {
            m += (a.vector() * b.vector().transpose()).scale(*c);
        }
        Self::new(m)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.amplitudes.shape()
    }

    pub fn amplitudes(&self) -> &CMatrix {
        &self.amplitudes
    }

    pub fn joint_vector(&self) -> CVector {
        let (da, db) = self.dims();
        CVector::from_fn(da * db, |i, _| self.amplitudes[(i / db, i % db)])
    }

    pub fn joint_ket(&self) -> Ket {
        Ket::from_unit(self.joint_vector())
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &BipartiteState) -> f64 {
        linalg::inner(&self.joint_vector(), &other.joint_vector()).norm_sqr()
    }
}

/// Schmidt form: non-negative coefficients in descending order with
/// orthonormal bases on each side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub basis_a: Vec<Ket>,
    pub basis_b: Vec<Ket>,
}

impl SchmidtDecomposition {
    pub fn rank(&self, cutoff: f64) -> usize {
        let top = self.coefficients.first().copied().unwrap_or(0.0);
        self.coefficients
            .iter()
            .filter(|&&c| c * c > cutoff * top * top && c > 0.0)
            .count()
    }

    pub fn reconstruct(&self) -> Result<BipartiteState> {
        BipartiteState::from_schmidt(&self.coefficients, &self.basis_a, &self.basis_b)
    }

    /// Squared coefficients, i.e. the spectrum of either reduced state.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }
}

/// Schmidt decomposition from the singular value decomposition of the
/// amplitude matrix.
pub fn schmidt(psi: &BipartiteState) -> SchmidtDecomposition {
    let (da, db) = psi.dims();
    let r = da.min(db);
    let svd = psi.amplitudes.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");

    let mut terms: Vec<(f64, CVector, CVector)> = (0..r)
        .map(|l| {
            let mut a = u.column(l).into_owned();
            let mut b = v_t.row(l).transpose();
            // canonical phase on A, compensating phase on B keeps a (x) b fixed
            let phase = linalg::canonical_phase(&mut a);
            b.apply(|z| *z /= phase);
            (svd.singular_values[l].max(0.0), a, b)
        })
        .collect();

    terms.sort_by(|x, y| {
        let by_value = y.0.partial_cmp(&x.0).unwrap_or(Ordering::Equal);
        if (x.0 - y.0).abs() > 1e-12 {
            return by_value;
        }
        lexicographic(&x.1, &y.1)
    });

    SchmidtDecomposition {
        coefficients: terms.iter().map(|t| t.0).collect(),
        basis_a: terms.iter().map(|t| Ket::from_unit(t.1.clone())).collect(),
        basis_b: terms.iter().map(|t| Ket::from_unit(t.2.clone())).collect(),
    }
}

fn lexicographic(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = y.re.total_cmp(&x.re).then_with(|| y.im.total_cmp(&x.im));
        if (x - y).norm() > 1e-12 && ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Reduced state of subsystem `keep`: `rho_A = Tr_B |psi><psi|` for
/// [`Subsystem::A`] and `rho_B = Tr_A |psi><psi|` for [`Subsystem::B`].
pub fn partial_trace(psi: &BipartiteState, keep: Subsystem) -> DensityOperator {
    let m = &psi.amplitudes;
    let reduced = match keep {
        Subsystem::A => m * m.adjoint(),
        Subsystem::B => m.transpose() * m.conjugate(),
    };
    DensityOperator::from_unnormalized(reduced)
}

/// Entropy of entanglement in ebits, `-sum_j c_j^2 log2 c_j^2`.
pub fn entanglement_entropy(psi: &BipartiteState) -> f64 {
    linalg::entropy_bits(schmidt(psi).weights())
}
