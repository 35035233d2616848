//! Shared JSON convention: a complex number is `[re, im]`, a ket is an array
//! of complex numbers and an operator is a row-major array of rows.

use super::linalg::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

pub type JsonComplex = [f64; 2];
pub type JsonVector = Vec<JsonComplex>;
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn complex_to_json(z: C64) -> JsonComplex {
    [z.re, z.im]
}

pub fn vector_to_json(v: &CVector) -> JsonVector {
    v.iter().map(|z| complex_to_json(*z)).collect()
}

pub fn vector_from_json(v: &[JsonComplex]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|[re, im]| C64::new(*re, *im)))
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    m.row_iter()
        .map(|row| row.iter().map(|z| complex_to_json(*z)).collect())
        .collect()
}

pub fn matrix_from_json(rows: &[Vec<JsonComplex>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            expected: ncols,
            found: bad.len(),
        });
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

/// Serde adapter for fields holding a raw matrix.
pub mod matrix {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_json(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let rows = JsonMatrix::deserialize(d)?;
        matrix_from_json(&rows).map_err(serde::de::Error::custom)
    }
}
