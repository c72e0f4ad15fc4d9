use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FunctionError, Point2, Result};
use crate::json::{matrix_to_rows, rows_to_matrix};
use crate::numlin::CMatrix;

/// Bivariate polynomial `sum c[i,j] z1^i z2^j`, stored as a
/// `(d1 + 1) x (d2 + 1)` table with trailing zero rows/columns trimmed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CoeffTable", try_from = "CoeffTable")]
pub struct Poly2 {
    coeffs: CMatrix,
}

/// `{"deg": [d1, d2], "coeffs": [[[re, im], ...], ...]}`, row-major in `i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct CoeffTable {
    pub deg: [usize; 2],
    pub coeffs: Vec<Vec<Complex64>>,
}

impl CoeffTable {
    pub(crate) fn into_matrix(self) -> Result<CMatrix> {
        let m = rows_to_matrix(&self.coeffs).map_err(FunctionError::Malformed)?;
        if m.shape() != (self.deg[0] + 1, self.deg[1] + 1) {
            return Err(FunctionError::Malformed(format!(
                "deg {:?} does not match a {}x{} table",
                self.deg,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    }
}

impl From<Poly2> for CoeffTable {
    fn from(p: Poly2) -> Self {
        let (d1, d2) = p.degree();
        CoeffTable { deg: [d1, d2], coeffs: matrix_to_rows(&p.coeffs) }
    }
}

impl TryFrom<CoeffTable> for Poly2 {
    type Error = FunctionError;
    fn try_from(t: CoeffTable) -> Result<Self> {
        Ok(Poly2::new(t.into_matrix()?))
    }
}

impl Poly2 {
    pub fn new(coeffs: CMatrix) -> Self {
        let mut rows = coeffs.nrows().max(1);
        let mut cols = coeffs.ncols().max(1);
        if coeffs.nrows() == 0 || coeffs.ncols() == 0 {
            return Poly2 { coeffs: CMatrix::zeros(1, 1) };
        }
        let zero = Complex64::default();
        while rows > 1 && coeffs.row(rows - 1).iter().all(|&z| z == zero) {
            rows -= 1;
        }
        while cols > 1 && coeffs.column(cols - 1).iter().take(rows).all(|&z| z == zero) {
            cols -= 1;
        }
        Poly2 { coeffs: coeffs.view((0, 0), (rows, cols)).into_owned() }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        Ok(Self::new(rows_to_matrix(&rows).map_err(FunctionError::Malformed)?))
    }

    pub fn constant(c: Complex64) -> Self {
        Poly2 { coeffs: CMatrix::from_element(1, 1, c) }
    }

    pub fn monomial(i: usize, j: usize, c: Complex64) -> Self {
        let mut m = CMatrix::zeros(i + 1, j + 1);
        m[(i, j)] = c;
        Self::new(m)
    }

    pub fn degree(&self) -> (usize, usize) {
        (self.coeffs.nrows() - 1, self.coeffs.ncols() - 1)
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    /// Coefficient of `z1^i z2^j` (zero outside the stored table).
    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i < self.coeffs.nrows() && j < self.coeffs.ncols() {
            self.coeffs[(i, j)]
        } else {
            Complex64::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| *z == Complex64::default())
    }

    /// Sum of coefficient moduli; bounds `|p|` on the closed bidisc.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }

    pub fn eval(&self, z: Point2) -> Complex64 {
        let mut acc = Complex64::default();
        for i in (0..self.coeffs.nrows()).rev() {
            let mut row = Complex64::default();
            for j in (0..self.coeffs.ncols()).rev() {
                row = row * z[1] + self.coeffs[(i, j)];
            }
            acc = acc * z[0] + row;
        }
        acc
    }

    /// Coefficients in `z1` of `p(., z2)`.
    pub fn section_in_z1(&self, z2: Complex64) -> Vec<Complex64> {
        (0..self.coeffs.nrows())
            .map(|i| (0..self.coeffs.ncols()).rev().fold(Complex64::default(), |acc, j| acc * z2 + self.coeffs[(i, j)]))
            .collect()
    }

    /// Coefficients in `z2` of `p(z1, .)`.
    pub fn section_in_z2(&self, z1: Complex64) -> Vec<Complex64> {
        (0..self.coeffs.ncols())
            .map(|j| (0..self.coeffs.nrows()).rev().fold(Complex64::default(), |acc, i| acc * z1 + self.coeffs[(i, j)]))
            .collect()
    }

    /// Coefficient reversal with conjugation: `p~[i,j] = conj(p[d1-i, d2-j])`,
    /// i.e. `z1^d1 z2^d2 conj(p(1/conj z1, 1/conj z2))`.
    pub fn reflect(&self) -> Result<Poly2> {
        if self.is_zero() {
            return Err(FunctionError::ZeroPolynomial);
        }
        let (r, c) = self.coeffs.shape();
        let m = CMatrix::from_fn(r, c, |i, j| self.coeffs[(r - 1 - i, c - 1 - j)].conj());
        Ok(Poly2::new(m))
    }

    pub fn scale(&self, c: Complex64) -> Poly2 {
        Poly2::new(self.coeffs.map(|z| z * c))
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let (a1, a2) = self.degree();
        let (b1, b2) = other.degree();
        let mut out = CMatrix::zeros(a1 + b1 + 1, a2 + b2 + 1);
        for i in 0..=a1 {
            for j in 0..=a2 {
                let x = self.coeffs[(i, j)];
                if x == Complex64::default() {
                    continue;
                }
                for k in 0..=b1 {
                    for l in 0..=b2 {
                        out[(i + k, j + l)] += x * other.coeffs[(k, l)];
                    }
                }
            }
        }
        Poly2::new(out)
    }
}
