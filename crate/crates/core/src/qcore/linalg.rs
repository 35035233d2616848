//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Amplitudes smaller than this are skipped when fixing the global phase.
const PHASE_FLOOR: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `|a><b|`
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// `<a|b>`
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitary_deviation(m: &CMatrix) -> f64 {
    let d = m.nrows();
    max_abs(&(m.adjoint() * m - identity(d)))
}

/// `(m + m^dagger) / 2`
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let dev = hermitian_deviation(m);
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `m`: eigenvalues ascending,
/// eigenvectors as the matching columns.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigvalsh(m).first().copied().unwrap_or(0.0)
}

/// Rebuild `V f(diag) V^dagger` from an eigendecomposition.
pub fn spectral_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = vectors.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (i, &lam) in values.iter().enumerate() {
        let w = f(lam);
        if w == 0.0 {
            continue;
        }
        let v = vectors.column(i).into_owned();
        out += outer(&v, &v).scale(w);
    }
    out
}

/// Square root of a PSD operator. Eigenvalues at or below
/// `PINV_CUTOFF * lambda_max` (including small negative round-off) are set to
/// zero first, so numerical zeros do not turn into `1e-8` amplitudes.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = eigh(m);
    let floor = crate::PINV_CUTOFF * values.iter().copied().fold(0.0_f64, f64::max);
    spectral_map(&values, &vectors, |x| if x > floor { x.sqrt() } else { 0.0 })
}

/// Pseudo-inverse square root. Eigenvalues at or below `cutoff * lambda_max`
/// span the kernel, which is mapped to zero.
pub fn inv_sqrt_on_support(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (values, vectors) = eigh(m);
    let lam_max = values.iter().copied().fold(0.0_f64, f64::max);
    let floor = cutoff * lam_max;
    spectral_map(&values, &vectors, |x| {
        if x > floor && x > 0.0 {
            1.0 / x.sqrt()
        } else {
            0.0
        }
    })
}

/// Orthogonal projector onto the eigenvectors whose eigenvalues exceed
/// `cutoff * lambda_max`.
pub fn support_projector(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (values, vectors) = eigh(m);
    let lam_max = values.iter().copied().fold(0.0_f64, f64::max);
    let floor = cutoff * lam_max;
    spectral_map(&values, &vectors, |x| if x > floor && x > 0.0 { 1.0 } else { 0.0 })
}

/// Number of eigenvalues above `cutoff * lambda_max`.
pub fn numerical_rank(m: &CMatrix, cutoff: f64) -> usize {
    let values = eigvalsh(m);
    let lam_max = values.iter().copied().fold(0.0_f64, f64::max);
    values.iter().filter(|&&x| x > cutoff * lam_max && x > 0.0).count()
}

/// Gram matrix `G_ij = <v_i|v_j>`.
pub fn gram(vectors: &[CVector]) -> CMatrix {
    let n = vectors.len();
    CMatrix::from_fn(n, n, |i, j| inner(&vectors[i], &vectors[j]))
}

/// Multiply by a global phase so that the first non-negligible amplitude is
/// real and non-negative. Returns the phase factor that was applied.
pub fn canonical_phase(v: &mut CVector) -> C64 {
    let scale = v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let floor = PHASE_FLOOR * scale.max(1e-300);
    let Some(first) = v.iter().find(|z| z.norm() > floor).copied() else {
        return cr(1.0);
    };
    let phase = first.conj() / first.norm();
    v.apply(|z| *z *= phase);
    // remove the residual imaginary part left by rounding
    if let Some(z) = v.iter_mut().find(|z| z.norm() > floor) {
        z.im = 0.0;
    }
    phase
}

/// Extend an isometry (orthonormal columns) to a square unitary by
/// Gram-Schmidt over the standard basis, greedily taking the candidate with
/// the largest residual.
pub fn complete_to_unitary(isometry: &CMatrix) -> CMatrix {
    let n = isometry.nrows();
    let mut cols: Vec<CVector> = isometry.column_iter().map(|c| c.into_owned()).collect();
    while cols.len() < n {
        let mut best: Option<(f64, CVector)> = None;
        for i in 0..n {
            let mut v = CVector::zeros(n);
            v[i] = cr(1.0);
            // two passes of classical Gram-Schmidt
            for _ in 0..2 {
                for q in &cols {
                    let proj = inner(q, &v);
                    v -= q * proj;
                }
            }
            let norm = v.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("n > 0");
        cols.push(v.unscale(norm));
    }
    CMatrix::from_columns(&cols)
}

/// `|<a|b>|^2` for normalized vectors.
pub fn pure_fidelity(a: &CVector, b: &CVector) -> f64 {
    inner(a, b).norm_sqr()
}

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn entropy_bits(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_ascending_and_reconstructs() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(2.0), c(0.0, -1.0), c(0.0, 1.0), cr(2.0)]);
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let rebuilt = spectral_map(&vals, &vecs, |x| x);
        assert!(max_abs(&(rebuilt - m)) < 1e-12);
    }

    #[test]
    fn completion_is_unitary() {
        let s = 1.0 / 2f64.sqrt();
        let iso = CMatrix::from_column_slice(3, 1, &[cr(s), c(0.0, s), cr(0.0)]);
        let u = complete_to_unitary(&iso);
        assert!(unitary_deviation(&u) < 1e-12);
        assert!((u.column(0) - iso.column(0)).norm() < 1e-15);
    }

    #[test]
    fn canonical_phase_makes_leading_amplitude_real() {
        let mut v = CVector::from_vec(vec![cr(0.0), c(0.0, 0.6), c(0.8, 0.0)]);
        canonical_phase(&mut v);
        assert_eq!(v[1], cr(0.6));
        assert!((v[2] - c(0.0, -0.8)).norm() < 1e-15);
    }

    #[test]
    fn entropy_ignores_zero_weights() {
        assert_eq!(entropy_bits([1.0, 0.0]), 0.0);
        assert!((entropy_bits([0.25; 4]) - 2.0).abs() < 1e-15);
    }
}
