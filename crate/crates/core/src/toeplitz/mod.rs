//! Truncated block Toeplitz operators with a two-variable symbol and the
//! structured inner-function certificate built on them.

mod certify;
mod diagnostics;

pub use certify::{certify_inner, CertifyEvidence, CertifyReport, InnerVerdict, CERTIFY_GRID, DEFECT_ORDERS};
pub use diagnostics::{proof_diagnostics, ProofDiagnostics, SERIES_MAX_TERMS, SERIES_TERM_FLOOR};

use serde::Serialize;
use thiserror::Error;

use crate::colligation::{Colligation, ColligationError};
use crate::function::PowerSeries2;
use crate::numlin::{cr, fro, CMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToeplitzError {
    #[error("series truncated at orders {have:?} is too short for Toeplitz order {needed}")]
    InsufficientTruncation { have: (usize, usize), needed: usize },
    #[error("window {window} exceeds half the order {order}")]
    WindowTooLarge { window: usize, order: usize },
    #[error("order must be positive")]
    ZeroOrder,
    #[error(transparent)]
    Colligation(#[from] ColligationError),
}

impl ToeplitzError {
    /// Variant name used in reports; wrapped errors report their own name.
    pub fn name(&self) -> &'static str {
        match self {
            ToeplitzError::InsufficientTruncation { .. } => "InsufficientTruncation",
            ToeplitzError::WindowTooLarge { .. } => "WindowTooLarge",
            ToeplitzError::ZeroOrder => "ZeroOrder",
            ToeplitzError::Colligation(e) => e.name(),
        }
    }
}

pub type Result<T, E = ToeplitzError> = std::result::Result<T, E>;

/// Leading `M^2 x M^2` compression of `T_phi`: block `(i, k)` is `Phi_{i-k}`
/// and `(Phi_k)_{j,l} = phi_{k, j-l}`, both lower triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzTruncation {
    blocks: Vec<CMatrix>,
    t: CMatrix,
}

/// Block columns `Y_0, ..., Y_{M-1}` of a truncation, each `M^2 x M`.
#[derive(Debug, Clone, PartialEq)]
pub struct YColumns {
    pub columns: Vec<CMatrix>,
}

impl ToeplitzTruncation {
    fn from_coeffs(coeff: impl Fn(usize, usize) -> num_complex::Complex64, m: usize) -> Self {
        let blocks: Vec<CMatrix> =
            (0..m).map(|k| CMatrix::from_fn(m, m, |j, l| if j >= l { coeff(k, j - l) } else { cr(0.0) })).collect();
        let mut t = CMatrix::zeros(m * m, m * m);
        for i in 0..m {
            for k in 0..=i {
                t.view_mut((i * m, k * m), (m, m)).copy_from(&blocks[i - k]);
            }
        }
        ToeplitzTruncation { blocks, t }
    }

    pub fn order(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn y_columns(&self) -> YColumns {
        let m = self.order();
        YColumns { columns: (0..m).map(|j| self.t.view((0, j * m), (m * m, m)).into_owned()).collect() }
    }

    /// Largest entrywise gap between two truncations of the same order.
    pub fn max_abs_diff(&self, other: &ToeplitzTruncation) -> f64 {
        assert_eq!(self.order(), other.order(), "orders differ");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}

pub fn toeplitz_truncate(s: &PowerSeries2, m: usize) -> Result<ToeplitzTruncation> {
    if m == 0 {
        return Err(ToeplitzError::ZeroOrder);
    }
    let (n1, n2) = s.orders();
    if n1 + 1 < m || n2 + 1 < m {
        return Err(ToeplitzError::InsufficientTruncation { have: (n1, n2), needed: m });
    }
    Ok(ToeplitzTruncation::from_coeffs(|k, j| s.coeffs()[(k, j)], m))
}

/// Blocks read directly off a structured colligation: the first column of
/// `Phi_0` is `(a, B2 C2, B2 D3 C2, ...)` and that of `Phi_k`, `k >= 1`, is
/// `(B1 D1^{k-1} C1, B1 D1^{k-1} D2 C2, B1 D1^{k-1} D2 D3 C2, ...)`.
pub fn phi_blocks_from_colligation(v: &Colligation, m: usize, tol: f64) -> Result<ToeplitzTruncation> {
    if m == 0 {
        return Err(ToeplitzError::ZeroOrder);
    }
    let bl = v.blocks()?;
    let defect = fro(&bl.lower_left);
    if defect > tol {
        return Err(ColligationError::NotStructured { defect }.into());
    }
    let scalar = |x: CMatrix| if x.is_empty() { cr(0.0) } else { x[(0, 0)] };
    // column vectors D3^{j-1} C2 and row vectors B1 D1^{k-1}
    let mut tails = vec![bl.c2.clone()];
    for _ in 1..m {
        let next = bl.d3() * tails.last().expect("nonempty");
        tails.push(next);
    }
    let mut heads = vec![bl.b1.clone()];
    for _ in 1..m {
        let next = heads.last().expect("nonempty") * &bl.d1;
        heads.push(next);
    }
    let mut table = CMatrix::zeros(m, m);
    table[(0, 0)] = v.a();
    for j in 1..m {
        table[(0, j)] = scalar(&bl.b2 * &tails[j - 1]);
    }
    for k in 1..m {
        table[(k, 0)] = scalar(&heads[k - 1] * &bl.c1);
        let row = &heads[k - 1] * &bl.d2;
        for j in 1..m {
            table[(k, j)] = scalar(&row * &tails[j - 1]);
        }
    }
    Ok(ToeplitzTruncation::from_coeffs(|k, j| table[(k, j)], m))
}

/// `max_{i,j < window} || Y_i[:, :window]^* Y_j[:, :window] - delta_ij I ||_F`.
///
/// All `M^2` rows enter each product; only the leading `window` block
/// columns and inner columns are compared, which keeps the compared entries
/// away from the truncation edge.
pub fn isometry_defect(t: &ToeplitzTruncation, window: usize) -> Result<f64> {
    let m = t.order();
    if window == 0 || 2 * window > m {
        return Err(ToeplitzError::WindowTooLarge { window, order: m });
    }
    let ys: Vec<CMatrix> = (0..window).map(|j| t.matrix().view((0, j * m), (m * m, window)).into_owned()).collect();
    let mut worst = 0.0f64;
    for i in 0..window {
        for j in 0..window {
            let mut g = ys[i].adjoint() * &ys[j];
            if i == j {
                for d in 0..window {
                    g[(d, d)] -= cr(1.0);
                }
            }
            worst = worst.max(fro(&g));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectAtOrder {
    pub order: usize,
    pub window: usize,
    pub defect: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{series_of, Poly2, RationalFunction2};
    use crate::numlin::{c, DEFAULT_TOL};
    use proptest::prelude::*;

    fn series_from_poly(p: &Poly2, m: usize) -> PowerSeries2 {
        PowerSeries2::from_poly(p, m - 1, m - 1)
    }

    #[test]
    fn z1z2_blocks() {
        let t = toeplitz_truncate(&series_from_poly(&Poly2::monomial(1, 1, cr(1.0)), 3), 3).unwrap();
        assert!(t.blocks()[0].iter().all(|z| z.norm() == 0.0));
        assert!(t.blocks()[2].iter().all(|z| z.norm() == 0.0));
        let shift = CMatrix::from_fn(3, 3, |j, l| if j == l + 1 { cr(1.0) } else { cr(0.0) });
        assert_eq!(t.blocks()[1], shift);
        // partial permutation: every row and column has at most one 1
        let m = t.matrix();
        for r in 0..9 {
            assert!(m.row(r).iter().filter(|z| z.norm() > 0.0).count() <= 1);
            assert!(m.column(r).iter().filter(|z| z.norm() > 0.0).count() <= 1);
        }
        assert_eq!(
            isometry_defect(&toeplitz_truncate(&series_from_poly(&Poly2::monomial(1, 1, cr(1.0)), 8), 8).unwrap(), 4)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn constant_and_z2() {
        let c0 = c(0.3, 0.4);
        let t = toeplitz_truncate(&series_from_poly(&Poly2::constant(c0), 4), 4).unwrap();
        assert_eq!(*t.matrix(), CMatrix::identity(16, 16) * c0);
        let t = toeplitz_truncate(&series_from_poly(&Poly2::monomial(0, 1, cr(1.0)), 4), 4).unwrap();
        let shift = CMatrix::from_fn(4, 4, |j, l| if j == l + 1 { cr(1.0) } else { cr(0.0) });
        assert_eq!(t.blocks()[0], shift);
        assert!(t.blocks()[1..].iter().all(|b| b.iter().all(|z| z.norm() == 0.0)));
    }

    #[test]
    fn insufficient_truncation_and_window() {
        let s = PowerSeries2::zeros(3, 5);
        assert!(matches!(toeplitz_truncate(&s, 5), Err(ToeplitzError::InsufficientTruncation { .. })));
        let t = toeplitz_truncate(&s, 4).unwrap();
        assert!(matches!(isometry_defect(&t, 3), Err(ToeplitzError::WindowTooLarge { .. })));
    }

    #[test]
    fn y_columns_are_shifts_of_y0() {
        let p = Poly2::from_rows(vec![vec![c(0.1, 0.2), cr(0.3)], vec![cr(-0.5), c(0.0, 0.7)]]).unwrap();
        let t = toeplitz_truncate(&series_from_poly(&p, 5), 5).unwrap();
        let y = t.y_columns();
        for j in 1..5 {
            // S^j shifts by j blocks of 5 rows
            let rows = 25 - 5 * j;
            assert_eq!(y.columns[j].view((5 * j, 0), (rows, 5)), y.columns[0].view((0, 0), (rows, 5)));
            assert!(y.columns[j].view((0, 0), (5 * j, 5)).iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn half_z1_defect() {
        let t = toeplitz_truncate(&series_from_poly(&Poly2::monomial(1, 0, cr(0.5)), 16), 16).unwrap();
        let d = isometry_defect(&t, 8).unwrap();
        assert!((d - 0.75 * 8f64.sqrt()).abs() < 1e-12);
        assert!(d >= 0.7);
    }

    #[test]
    fn phi_t_defect_shrinks_with_order() {
        let p = Poly2::from_rows(vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(-0.5)]]).unwrap();
        let f = RationalFunction2::new((0, 0), p).unwrap();
        let defects: Vec<f64> = [16, 24, 48]
            .iter()
            .map(|&m| {
                isometry_defect(&toeplitz_truncate(&series_of(&f, m - 1, m - 1).unwrap(), m).unwrap(), 8).unwrap()
            })
            .collect();
        assert!(defects[1] <= 0.05, "{defects:?}");
        assert!(defects[0] >= defects[1] && defects[1] >= defects[2], "{defects:?}");
    }

    #[test]
    fn colligation_path_matches_series_path() {
        let mut v = CMatrix::zeros(3, 3);
        v[(0, 1)] = cr(1.0);
        v[(1, 2)] = cr(1.0);
        v[(2, 0)] = cr(1.0);
        let perm = Colligation::from_block(&v, vec![1, 1]).unwrap();
        let a = phi_blocks_from_colligation(&perm, 3, DEFAULT_TOL).unwrap();
        let b = toeplitz_truncate(&series_from_poly(&Poly2::monomial(1, 1, cr(1.0)), 3), 3).unwrap();
        assert_eq!(a, b);

        let k = Colligation::constant(c(0.0, 1.0), 2);
        let t = phi_blocks_from_colligation(&k, 3, DEFAULT_TOL).unwrap();
        assert_eq!(t.blocks()[0], CMatrix::identity(3, 3) * c(0.0, 1.0));
        assert!(t.blocks()[1..].iter().all(|b| b.iter().all(|z| z.norm() == 0.0)));
    }

    fn coeff() -> impl Strategy<Value = num_complex::Complex64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
    }

    fn poly3() -> impl Strategy<Value = Poly2> {
        proptest::collection::vec(coeff(), 16).prop_map(|v| Poly2::new(CMatrix::from_row_slice(4, 4, &v)))
    }

    proptest! {
        #[test]
        fn truncation_is_multiplicative(p in poly3(), q in poly3()) {
            let m = 8;
            let tp = toeplitz_truncate(&series_from_poly(&p, m), m).unwrap();
            let tq = toeplitz_truncate(&series_from_poly(&q, m), m).unwrap();
            let tpq = toeplitz_truncate(&series_from_poly(&p.mul(&q), m), m).unwrap();
            let prod = tp.matrix() * tq.matrix();
            let w = m / 2;
            for i in 0..w {
                for k in 0..w {
                    let lhs = tpq.matrix().view((i * m, k * m), (w, w)).into_owned();
                    let rhs = prod.view((i * m, k * m), (w, w)).into_owned();
                    prop_assert!(fro(&(lhs - rhs)) < 1e-12);
                }
            }
        }
    }
}
