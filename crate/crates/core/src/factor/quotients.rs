use num_complex::Complex64;
use serde::Serialize;

use super::Result;
use crate::colligation::Colligation;
use crate::function::Point2;
use crate::kernels::agler::state_row;
use crate::numlin::{cr, CMatrix};

/// Largest deviation of each operator of a structured colligation from its
/// difference-quotient action on the functions `w -> H_i(w) x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceQuotientReport {
    /// `(f(w) - f(0)) / w1` against `H1(w) D1 x`.
    pub d1: f64,
    /// `(g(w1, 0) - g(0)) / w1` against `H1(w) D2 x`.
    pub d2: f64,
    /// `(g(w) - g(w1, 0)) / w2` against `H2(w) D4 x`.
    pub d4: f64,
    /// `(phi(w1, 0) - phi(0)) / w1` against `H1(w) C1`.
    pub c1: f64,
    /// `(phi(w) - phi(w1, 0)) / w2` against `H2(w) C2`.
    pub c2: f64,
    /// `f(0)` against `B1 x` and `g(0)` against `B2 x`.
    pub b: f64,
    pub points: usize,
}

impl DifferenceQuotientReport {
    pub fn max(&self) -> f64 {
        [self.d1, self.d2, self.d4, self.c1, self.c2, self.b].into_iter().fold(0.0, f64::max)
    }
}

/// Evaluates the model-space formulas for the blocks of a structured
/// two-variable colligation on the state functions `H(w) = B (I - E(w) D)^{-1}`.
/// Points with a vanishing coordinate are skipped.
pub fn difference_quotient_check(v: &Colligation, points: &[Point2]) -> Result<DifferenceQuotientReport> {
    let bl = v.blocks()?;
    let h1 = bl.d1.nrows();
    let h = v.h();
    let zero = cr(0.0);
    let row = |z: Point2| -> Result<CMatrix> { Ok(state_row(v, &z)?) };
    let phi = |z: Point2| -> Result<Complex64> { Ok(v.transfer_2d(z)?) };
    let h0 = row([zero, zero])?;
    let phi0 = phi([zero, zero])?;

    let mut report = DifferenceQuotientReport { d1: 0.0, d2: 0.0, d4: 0.0, c1: 0.0, c2: 0.0, b: 0.0, points: 0 };
    for k in 0..h {
        report.b = report.b.max((h0[(0, k)] - v.b()[(0, k)]).norm());
    }
    for &w in points.iter().filter(|w| w[0] != zero && w[1] != zero) {
        report.points += 1;
        let hw = row(w)?;
        let hs = row([w[0], zero])?;
        let first = hw.columns(0, h1);
        let second = hw.columns(h1, h - h1);
        for k in 0..h1 {
            let quotient = (hw[(0, k)] - h0[(0, k)]) / w[0];
            report.d1 = report.d1.max((quotient - (first * bl.d1.column(k))[(0, 0)]).norm());
        }
        for k in 0..h - h1 {
            let g = |m: &CMatrix| m[(0, h1 + k)];
            let q2 = (g(&hs) - g(&h0)) / w[0];
            report.d2 = report.d2.max((q2 - (first * bl.d2.column(k))[(0, 0)]).norm());
            let q4 = (g(&hw) - g(&hs)) / w[1];
            report.d4 = report.d4.max((q4 - (second * bl.d4.column(k))[(0, 0)]).norm());
        }
        let phi_s = phi([w[0], zero])?;
        let qc1 = (phi_s - phi0) / w[0];
        let qc2 = (phi(w)? - phi_s) / w[1];
        let c1 = if h1 > 0 { (first * &bl.c1)[(0, 0)] } else { zero };
        let c2 = if h > h1 { (second * &bl.c2)[(0, 0)] } else { zero };
        report.c1 = report.c1.max((qc1 - c1).norm());
        report.c2 = report.c2.max((qc2 - c2).norm());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::{model_colligation, Blaschke};
    use crate::factor::{compose_colligations, split_colligation};
    use crate::function::{Ambient, PointGrid};
    use crate::numlin::{c, DEFAULT_TOL};

    #[test]
    fn composed_blaschke_blocks_are_difference_quotients() {
        let b1 = Blaschke::new(cr(1.0), vec![c(0.3, -0.2), c(0.6, 0.1)]).unwrap();
        let b2 = Blaschke::new(cr(-1.0), vec![c(-0.4, 0.4), c(0.1, 0.2), c(0.5, 0.0)]).unwrap();
        let v = compose_colligations(&model_colligation(&b1).unwrap(), &model_colligation(&b2).unwrap(), DEFAULT_TOL)
            .unwrap();
        let pts: Vec<Point2> = PointGrid::random(Ambient::Bidisc, 25, 17).points2().collect();
        let r = difference_quotient_check(&v, &pts).unwrap();
        assert_eq!(r.points, 25);
        assert!(r.max() < 1e-12, "{r:?}");

        // the split factors inherit exactly these state operators
        let s = split_colligation(&v, DEFAULT_TOL).unwrap();
        let bl = v.blocks().unwrap();
        assert_eq!(s.v1.d(), &bl.d1);
        assert_eq!(s.v2.d(), &bl.d4);
    }

    #[test]
    fn unstructured_colligations_break_the_formulas() {
        let s = 0.75f64.sqrt();
        let v_t = Colligation::from_block(
            &CMatrix::from_row_slice(3, 3, &[-0.5, s, 0.0, 0.0, 0.0, 1.0, s, 0.5, 0.0].map(cr)),
            vec![1, 1],
        )
        .unwrap();
        let pts: Vec<Point2> = PointGrid::random(Ambient::Bidisc, 10, 3).points2().collect();
        assert!(difference_quotient_check(&v_t, &pts).unwrap().max() > 1e-3);
    }
}
