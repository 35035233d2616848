use std::f64::consts::FRAC_PI_4;

use crate::CliError;

/// Inputs this far above pi/4 are read as pi/4, so that rounded values such
/// as 0.7854 are accepted.
const ANGLE_SNAP: f64 = 5e-5;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..=15).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

pub fn angle(x: f64, degrees: bool) -> f64 {
    let rad = if degrees { x.to_radians() } else { x };
    if rad > FRAC_PI_4 && rad <= FRAC_PI_4 + ANGLE_SNAP {
        FRAC_PI_4
    } else {
        rad
    }
}

/// `i (pi/4) / n` for `i = 1..=n`.
pub fn quarter_grid(n: usize) -> Result<Vec<f64>, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    Ok((1..=n).map(|i| i as f64 * FRAC_PI_4 / n as f64).collect())
}

/// Parses `uniform` or a comma-separated list, renormalized to unit length.
pub fn coefficients(list: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let raw: Vec<f64> = if list.trim().eq_ignore_ascii_case("uniform") {
        if n == 0 {
            return Err(CliError::Usage("--n must be at least 1".into()));
        }
        vec![1.0; n]
    } else {
        list.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("invalid coefficient `{}`", t.trim())))
            })
            .collect::<Result<_, _>>()?
    };
    if raw.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(CliError::Usage("coefficients must be finite and non-negative".into()));
    }
    let norm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(CliError::Usage("coefficients must not all be zero".into()));
    }
    Ok(raw.into_iter().map(|c| c / norm).collect())
}
