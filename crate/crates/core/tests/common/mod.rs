//! Random inputs and independent numerical oracles shared by the integration
//! tests. Nothing here calls into the library's own linear algebra.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use qsd::{BipartiteState, DensityOperator, Ket};

pub type M = DMatrix<Complex64>;
pub type V = DVector<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_vector(r: &mut ChaCha8Rng, d: usize) -> V {
    let v = V::from_fn(d, |_, _| gaussian(r));
    let n = v.norm();
    v.unscale(n)
}

pub fn random_ket(r: &mut ChaCha8Rng, d: usize) -> Ket {
    Ket::normalize(random_vector(r, d)).unwrap()
}

/// Random mixed state of rank up to `d` (Ginibre construction).
pub fn random_density(r: &mut ChaCha8Rng, d: usize) -> DensityOperator {
    let g = M::from_fn(d, d, |_, _| gaussian(r));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    DensityOperator::new(rho / tr).unwrap()
}

pub fn random_bipartite(r: &mut ChaCha8Rng, da: usize, db: usize) -> BipartiteState {
    let m = M::from_fn(da, db, |_, _| gaussian(r));
    BipartiteState::normalize(m).unwrap()
}

/// Uniform point on the Bloch sphere: `cos(theta)` uniform, `phi` uniform.
pub fn haar_qubit(r: &mut ChaCha8Rng) -> Ket {
    let z: f64 = r.random_range(-1.0..=1.0);
    let phi: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let th = z.clamp(-1.0, 1.0).acos();
    let (s, c) = (th / 2.0).sin_cos();
    Ket::new(V::from_vec(vec![
        Complex64::new(c, 0.0),
        Complex64::new(s * phi.cos(), s * phi.sin()),
    ]))
    .unwrap()
}

/// Random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(r: &mut ChaCha8Rng, d: usize) -> M {
    let g = M::from_fn(d, d, |_, _| gaussian(r));
    let qr = g.qr();
    let (q, rr) = (qr.q(), qr.r());
    let phases = M::from_diagonal(&V::from_fn(d, |i, _| {
        let x = rr[(i, i)];
        if x.norm() > 0.0 {
            x / x.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }));
    q * phases
}

/// Eigenvalues of a Hermitian matrix via its real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `h` doubled.
pub fn real_embedded_eigenvalues(h: &M) -> Vec<f64> {
    let d = h.nrows();
    let mut big = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = 0.5 * (h[(i, j)] + h[(j, i)].conj());
            big[(i, j)] = z.re;
            big[(i + d, j + d)] = z.re;
            big[(i, j + d)] = -z.im;
            big[(i + d, j)] = z.im;
        }
    }
    let mut ev: Vec<f64> = big.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

pub fn min_eig(h: &M) -> f64 {
    real_embedded_eigenvalues(h)[0]
}

/// `exp(-i H t)` by scaling and squaring of a truncated Taylor series.
pub fn expm_taylor(h: &M, t: f64) -> M {
    let d = h.nrows();
    let a = h * Complex64::new(0.0, -t);
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let a = a.unscale(2f64.powi(squarings));
    let mut term = M::identity(d, d);
    let mut sum = M::identity(d, d);
    for k in 1..30 {
        term = &term * &a / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Reduced state of subsystem A by explicit index summation.
pub fn reduce_a(psi: &BipartiteState) -> M {
    let m = psi.amplitudes();
    let (da, db) = psi.dims();
    M::from_fn(da, da, |i, j| (0..db).map(|k| m[(i, k)] * m[(j, k)].conj()).sum())
}

pub fn reduce_b(psi: &BipartiteState) -> M {
    let m = psi.amplitudes();
    let (da, db) = psi.dims();
    M::from_fn(db, db, |i, j| (0..da).map(|k| m[(k, i)] * m[(k, j)].conj()).sum())
}

pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 1e-300).map(|&x| -x * x.log2()).sum()
}

/// Inconclusive element for uniform success `p`, built from reciprocal
/// vectors obtained by solving `G c = e_j` with an LU factorization.
pub fn inconclusive_oracle(states: &[Ket], p: f64) -> M {
    let d = states[0].dim();
    let n = states.len();
    let g = M::from_fn(n, n, |i, j| states[i].vector().dotc(states[j].vector()));
    let lu = g.lu();
    let mut out = M::identity(d, d);
    for j in 0..n {
        let mut e = V::zeros(n);
        e[j] = Complex64::new(1.0, 0.0);
        let coef = lu.solve(&e).expect("independent states");
        let mut perp = V::zeros(d);
        for k in 0..n {
            perp += states[k].vector() * coef[k];
        }
        let ov = perp.dotc(states[j].vector()).norm_sqr();
        out -= &perp * perp.adjoint() * Complex64::new(p / ov, 0.0);
    }
    out
}

/// Largest uniform success probability keeping the inconclusive element
/// positive, found by bisection on the sign of its smallest eigenvalue.
pub fn feasibility_boundary(states: &[Ket]) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if min_eig(&inconclusive_oracle(states, mid)) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn random_simplex(r: &mut ChaCha8Rng, n: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| floor + r.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}
