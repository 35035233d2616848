//! Closed-form limits for multi-copy discrimination, exact cloning, state
//! separation, state estimation and universal cloning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{BlochVector, DensityOperator, Ket};

/// Overlap modulus `|<psi+|psi->|` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct OverlapScalar(f64);

impl OverlapScalar {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange {
                what: "overlap",
                value: s,
                range: "[0, 1]",
            });
        }
        Ok(Self(s))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Overlap of `M` copies, `s^M`.
    pub fn copies(self, m: u32) -> Self {
        Self(self.0.powi(m as i32))
    }
}

impl TryFrom<f64> for OverlapScalar {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<OverlapScalar> for f64 {
    fn from(s: OverlapScalar) -> f64 {
        s.0
    }
}

/// Depolarizing map `rho -> S rho + (1 - S) 1/2` on a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ShrinkChannel(f64);

impl ShrinkChannel {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange {
                what: "shrinking factor",
                value: s,
                range: "[0, 1]",
            });
        }
        Ok(Self(s))
    }

    pub fn factor(self) -> f64 {
        self.0
    }

    /// Two channels in sequence shrink by the product of their factors.
    pub fn then(self, next: ShrinkChannel) -> ShrinkChannel {
        ShrinkChannel(self.0 * next.0)
    }

    pub fn apply_bloch(self, a: &BlochVector) -> BlochVector {
        a.scaled(self.0)
    }
}

impl TryFrom<f64> for ShrinkChannel {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<ShrinkChannel> for f64 {
    fn from(s: ShrinkChannel) -> f64 {
        s.0
    }
}

fn check_copies(what: &'static str, m: u32) -> Result<()> {
    if m < 1 {
        return Err(Error::OutOfRange {
            what,
            value: m as f64,
            range: ">= 1",
        });
    }
    Ok(())
}

fn check_order(m: u32, n: u32) -> Result<()> {
    check_copies("M", m)?;
    if n < m {
        return Err(Error::OutOfRange {
            what: "N",
            value: n as f64,
            range: ">= M",
        });
    }
    Ok(())
}

/// Best unambiguous success probability from `M` copies: `1 - s^M`.
pub fn multicopy_discrimination(m: u32, s: OverlapScalar) -> Result<f64> {
    check_copies("M", m)?;
    Ok(1.0 - s.copies(m).get())
}

/// Best probability of turning `M` copies into `N` exact copies:
/// `(1 - s^M) / (1 - s^N)`.
pub fn clone_probability(m: u32, n: u32, s: OverlapScalar) -> Result<f64> {
    check_order(m, n)?;
    if m == n {
        return Ok(1.0);
    }
    if s.get() >= 1.0 {
        return Err(Error::OutOfRange {
            what: "overlap",
            value: s.get(),
            range: "[0, 1) when M != N",
        });
    }
    Ok((1.0 - s.copies(m).get()) / (1.0 - s.copies(n).get()))
}

/// Best probability of mapping a pair with overlap `s1` onto a pair with
/// smaller overlap `s2`: `(1 - s1) / (1 - s2)`.
pub fn separation_probability(s1: OverlapScalar, s2: OverlapScalar) -> Result<f64> {
    if s2.get() >= s1.get() {
        return Err(Error::Invalid(format!(
            "target overlap {} must be below source overlap {}",
            s2.get(),
            s1.get()
        )));
    }
    Ok((1.0 - s1.get()) / (1.0 - s2.get()))
}

/// Mean fidelity of the best guess from `M` copies of an unknown qubit:
/// `(M + 1) / (M + 2)`.
pub fn estimation_fidelity(m: u32) -> Result<f64> {
    check_copies("M", m)?;
    let m = m as f64;
    Ok((m + 1.0) / (m + 2.0))
}

/// Shrinking factor of the best guess: `M / (M + 2)`.
pub fn estimation_shrink(m: u32) -> Result<f64> {
    check_copies("M", m)?;
    let m = m as f64;
    Ok(m / (m + 2.0))
}

/// Universal `M -> N` cloner shrinking factor `M (N + 2) / (N (M + 2))`.
pub fn ucm_shrink(m: u32, n: u32) -> Result<f64> {
    check_order(m, n)?;
    let (m, n) = (m as f64, n as f64);
    Ok(m * (n + 2.0) / (n * (m + 2.0)))
}

/// Universal `M -> N` cloner fidelity `(M + N + M N) / (N (M + 2))`.
pub fn ucm_fidelity(m: u32, n: u32) -> Result<f64> {
    check_order(m, n)?;
    let (m, n) = (m as f64, n as f64);
    Ok((m + n + m * n) / (n * (m + 2.0)))
}

/// `S |psi><psi| + (1 - S) 1/2` for a qubit `psi`.
pub fn apply_shrink(ch: ShrinkChannel, psi: &Ket) -> Result<DensityOperator> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: psi.dim(),
        });
    }
    let a = BlochVector::from_density(&psi.density())?;
    Ok(ch.apply_bloch(&a).to_density())
}

/// One row of the cloning/separation table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloningRow {
    pub m: u32,
    pub n: u32,
    pub overlap: f64,
    pub clone_probability: f64,
    pub multicopy_m: f64,
    pub multicopy_n: f64,
    /// `P_{M,inf} - P_{MN} P_{N,inf}`, zero at the optimum.
    pub chain_residual: f64,
    /// `P_{MN}` minus the separation probability for `s^M -> s^N`.
    pub separation_residual: f64,
}

pub fn cloning_row(m: u32, n: u32, s: OverlapScalar) -> Result<CloningRow> {
    let p_mn = clone_probability(m, n, s)?;
    let p_m = multicopy_discrimination(m, s)?;
    let p_n = multicopy_discrimination(n, s)?;
    let separation_residual = if m == n {
        0.0
    } else {
        p_mn - separation_probability(s.copies(m), s.copies(n))?
    };
    Ok(CloningRow {
        m,
        n,
        overlap: s.get(),
        clone_probability: p_mn,
        multicopy_m: p_m,
        multicopy_n: p_n,
        chain_residual: p_m - p_mn * p_n,
        separation_residual,
    })
}

/// One row of the estimation/universal-cloning table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalRow {
    pub m: u32,
    pub n: u32,
    pub estimation_fidelity: f64,
    pub estimation_shrink: f64,
    pub ucm_shrink: f64,
    pub ucm_fidelity: f64,
    /// `F_MN - (1 + S_MN)/2`
    pub fidelity_residual: f64,
    /// `S_MN - S_M / S_N`
    pub ratio_residual: f64,
}

pub fn universal_row(m: u32, n: u32) -> Result<UniversalRow> {
    let s_mn = ucm_shrink(m, n)?;
    let f_mn = ucm_fidelity(m, n)?;
    let s_m = estimation_shrink(m)?;
    let s_n = estimation_shrink(n)?;
    Ok(UniversalRow {
        m,
        n,
        estimation_fidelity: estimation_fidelity(m)?,
        estimation_shrink: s_m,
        ucm_shrink: s_mn,
        ucm_fidelity: f_mn,
        fidelity_residual: f_mn - 0.5 * (1.0 + s_mn),
        ratio_residual: s_mn - s_m / s_n,
    })
}
