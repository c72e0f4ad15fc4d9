use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::CoeffTable;
use super::{Evaluable2, FunctionError, Point2, Poly2, Result};
use crate::json::matrix_to_rows;
use crate::numlin::CMatrix;

/// Taylor coefficients `phi[i,j]` for `i <= n1`, `j <= n2`.
///
/// Coefficients beyond the truncation are unknown, not zero: accessors return
/// `None` there and comparisons only look at the common truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CoeffTable", try_from = "CoeffTable")]
pub struct PowerSeries2 {
    coeffs: CMatrix,
}

impl From<PowerSeries2> for CoeffTable {
    fn from(s: PowerSeries2) -> Self {
        let (n1, n2) = s.orders();
        CoeffTable { deg: [n1, n2], coeffs: matrix_to_rows(&s.coeffs) }
    }
}

impl TryFrom<CoeffTable> for PowerSeries2 {
    type Error = FunctionError;
    fn try_from(t: CoeffTable) -> Result<Self> {
        PowerSeries2::new(t.into_matrix()?)
    }
}

impl PowerSeries2 {
    /// `coeffs` is `(n1 + 1) x (n2 + 1)`; no trimming is applied.
    pub fn new(coeffs: CMatrix) -> Result<Self> {
        if coeffs.nrows() == 0 || coeffs.ncols() == 0 {
            return Err(FunctionError::Malformed("series needs at least the constant term".into()));
        }
        Ok(PowerSeries2 { coeffs })
    }

    pub fn zeros(n1: usize, n2: usize) -> Self {
        PowerSeries2 { coeffs: CMatrix::zeros(n1 + 1, n2 + 1) }
    }

    /// Exact expansion of a polynomial, truncated (or zero-padded) to `(n1, n2)`.
    pub fn from_poly(p: &Poly2, n1: usize, n2: usize) -> Self {
        PowerSeries2 { coeffs: CMatrix::from_fn(n1 + 1, n2 + 1, |i, j| p.coeff(i, j)) }
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.coeffs.nrows() - 1, self.coeffs.ncols() - 1)
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> Option<Complex64> {
        (i < self.coeffs.nrows() && j < self.coeffs.ncols()).then(|| self.coeffs[(i, j)])
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.coeffs[(i, j)] = v;
    }

    pub fn truncate(&self, n1: usize, n2: usize) -> PowerSeries2 {
        let (m1, m2) = self.orders();
        let (n1, n2) = (n1.min(m1), n2.min(m2));
        PowerSeries2 { coeffs: self.coeffs.view((0, 0), (n1 + 1, n2 + 1)).into_owned() }
    }

    /// Evaluates the truncation only.
    pub fn eval_truncated(&self, z: Point2) -> Complex64 {
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

    /// `max |a[i,j] - b[i,j]|` over the common truncation.
    pub fn max_abs_diff(&self, other: &PowerSeries2) -> f64 {
        let (a1, a2) = self.orders();
        let (b1, b2) = other.orders();
        let mut worst = 0.0f64;
        for i in 0..=a1.min(b1) {
            for j in 0..=a2.min(b2) {
                worst = worst.max((self.coeffs[(i, j)] - other.coeffs[(i, j)]).norm());
            }
        }
        worst
    }

    /// Cauchy product on the common truncation.
    pub fn mul(&self, other: &PowerSeries2) -> PowerSeries2 {
        let (a1, a2) = self.orders();
        let (b1, b2) = other.orders();
        let (n1, n2) = (a1.min(b1), a2.min(b2));
        let mut out = CMatrix::zeros(n1 + 1, n2 + 1);
        for i in 0..=n1 {
            for j in 0..=n2 {
                let mut acc = Complex64::default();
                for k in 0..=i {
                    for l in 0..=j {
                        acc += self.coeffs[(k, l)] * other.coeffs[(i - k, j - l)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        PowerSeries2 { coeffs: out }
    }

    /// Drops the first `p` rows (division by `z1^p`); the new order in `z1` is `n1 - p`.
    pub fn shift_z1(&self, p: usize) -> Option<PowerSeries2> {
        let (n1, n2) = self.orders();
        (p <= n1).then(|| PowerSeries2 { coeffs: self.coeffs.view((p, 0), (n1 + 1 - p, n2 + 1)).into_owned() })
    }

    /// Drops the first `p` columns (division by `z2^p`).
    pub fn shift_z2(&self, p: usize) -> Option<PowerSeries2> {
        let (n1, n2) = self.orders();
        (p <= n2).then(|| PowerSeries2 { coeffs: self.coeffs.view((0, p), (n1 + 1, n2 + 1 - p)).into_owned() })
    }

    pub fn transpose(&self) -> PowerSeries2 {
        PowerSeries2 { coeffs: self.coeffs.transpose() }
    }
}

impl Evaluable2 for PowerSeries2 {
    fn eval(&self, z: Point2) -> Result<Complex64> {
        Ok(self.eval_truncated(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::{c, cr};

    #[test]
    fn truncation_semantics() {
        let p = Poly2::from_rows(vec![vec![cr(1.0), cr(2.0)], vec![cr(3.0), cr(4.0)]]).unwrap();
        let s = PowerSeries2::from_poly(&p, 3, 0);
        assert_eq!(s.orders(), (3, 0));
        assert_eq!(s.coeff(1, 0), Some(cr(3.0)));
        assert_eq!(s.coeff(0, 1), None);
        assert_eq!(s.coeff(3, 0), Some(cr(0.0)));
    }

    #[test]
    fn product_of_geometric_series() {
        // 1/(1 - z1) * 1/(1 - z2): all coefficients are 1.
        let mut g1 = PowerSeries2::zeros(4, 4);
        let mut g2 = PowerSeries2::zeros(4, 4);
        for k in 0..=4 {
            g1.set(k, 0, cr(1.0));
            g2.set(0, k, cr(1.0));
        }
        let prod = g1.mul(&g2);
        assert!(prod.coeffs().iter().all(|z| (*z - cr(1.0)).norm() < 1e-15));
        let z = [c(0.2, 0.1), c(-0.1, 0.3)];
        assert!((prod.eval_truncated(z) - g1.eval_truncated(z) * g2.eval_truncated(z)).norm() < 0.01);
    }

    #[test]
    fn comparison_uses_common_truncation() {
        let a = PowerSeries2::from_poly(&Poly2::constant(cr(1.0)), 2, 2);
        let mut b = PowerSeries2::zeros(5, 1);
        b.set(0, 0, cr(1.0));
        b.set(4, 0, cr(7.0));
        assert_eq!(a.max_abs_diff(&b), 0.0);
    }

    #[test]
    fn shifts_drop_leading_rows_and_columns() {
        let s = PowerSeries2::from_poly(&Poly2::monomial(1, 2, cr(1.0)), 3, 3);
        let t = s.shift_z1(1).unwrap().shift_z2(2).unwrap();
        assert_eq!(t.orders(), (2, 1));
        assert_eq!(t.coeff(0, 0), Some(cr(1.0)));
        assert!(s.shift_z1(4).is_none());
    }
}
