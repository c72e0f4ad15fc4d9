//! Wire-format helpers. Complex scalars are `[re, im]` pairs and matrices
//! are row-major arrays of such pairs.

use num_complex::Complex64;

use crate::numlin::CMatrix;

pub type Rows = Vec<Vec<Complex64>>;

pub fn matrix_to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Inverse of [`matrix_to_rows`]. An empty outer list gives a `0 x 0` matrix.
pub fn rows_to_matrix(rows: &Rows) -> Result<CMatrix, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(format!("ragged matrix: row {bad} has {} entries, expected {ncols}", rows[bad].len()));
    }
    if rows.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err("matrix has non-finite entries".into());
    }
    Ok(CMatrix::from_row_iterator(nrows, ncols, rows.iter().flatten().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::c;

    #[test]
    fn rows_round_trip_and_ragged_rejection() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.0, 0.0), c(-1.0, 0.5), c(3.0, -3.0)]);
        let back = rows_to_matrix(&matrix_to_rows(&m)).unwrap();
        assert_eq!(m, back);
        let json = serde_json::to_string(&matrix_to_rows(&m)).unwrap();
        assert_eq!(json, "[[[1.0,2.0],[0.0,0.0]],[[-1.0,0.5],[3.0,-3.0]]]");
        assert!(rows_to_matrix(&vec![vec![c(1.0, 0.0)], vec![]]).is_err());
        assert_eq!(rows_to_matrix(&vec![]).unwrap().shape(), (0, 0));
    }
}
