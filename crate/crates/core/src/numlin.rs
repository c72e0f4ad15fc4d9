//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Every tolerance here is relative: a quantity is compared against
//! `tol * (1 + ||A||_F)` unless stated otherwise.

use nalgebra::{DMatrix, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Dense complex matrix. Row/column conventions follow nalgebra.
pub type CMatrix = DMatrix<Complex64>;

/// Default absolute/relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (||A - A*||_F = {defect:.3e})")]
    NonHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (lambda_min = {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("leading block P is not invertible (condition estimate {condition:.3e})")]
    PNotInvertible { condition: f64 },
    #[error("Schur complement S - R P^-1 Q is not invertible (condition estimate {condition:.3e}); the block matrix is singular")]
    DeltaNotInvertible { condition: f64 },
    #[error("non-conformable blocks: {0}")]
    Dimension(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

impl LinalgError {
    /// Variant name used in reports; wrapped errors report their own name.
    pub fn name(&self) -> &'static str {
        match self {
            LinalgError::NonSquare { .. } => "NonSquare",
            LinalgError::NonHermitian { .. } => "NonHermitian",
            LinalgError::NotPsd { .. } => "NotPsd",
            LinalgError::PNotInvertible { .. } => "PNotInvertible",
            LinalgError::DeltaNotInvertible { .. } => "DeltaNotInvertible",
            LinalgError::Dimension(_) => "Dimension",
            LinalgError::NonFinite => "NonFinite",
            LinalgError::NoConvergence => "NoConvergence",
        }
    }
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Frobenius norm.
#[inline]
pub fn fro(a: &CMatrix) -> f64 {
    a.norm()
}

/// Threshold `tol * (1 + ||A||_F)` used for every relative decision.
#[inline]
pub fn scaled_tol(a: &CMatrix, tol: f64) -> f64 {
    tol * (1.0 + fro(a))
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn require_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NonSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(())
}

fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

fn require_hermitian(a: &CMatrix, tol: f64) -> Result<()> {
    require_square(a)?;
    if !is_finite(a) {
        return Err(LinalgError::NonFinite);
    }
    let defect = fro(&(a - a.adjoint()));
    if defect > scaled_tol(a, tol) {
        return Err(LinalgError::NonHermitian { defect });
    }
    Ok(())
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdReport {
    pub psd: bool,
    /// Smallest eigenvalue of the Hermitian part; `None` for an empty matrix.
    pub min_eigenvalue: Option<f64>,
}

/// PSD test through the Hermitian eigendecomposition.
///
/// `A` must be Hermitian up to `tol * (1 + ||A||_F)`; the test then passes
/// when `lambda_min >= -tol * (1 + ||A||_F)`.
pub fn is_psd(a: &CMatrix, tol: f64) -> Result<PsdReport> {
    require_hermitian(a, tol)?;
    if a.nrows() == 0 {
        return Ok(PsdReport { psd: true, min_eigenvalue: None });
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PsdReport { psd: min >= -scaled_tol(a, tol), min_eigenvalue: Some(min) })
}

/// Low-rank factor `A ~ F F*` from a truncated eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdFactorization {
    pub rank: usize,
    /// `n x rank`; columns are `v_k * sqrt(lambda_k)`, ordered by decreasing eigenvalue.
    pub factor: CMatrix,
    /// `||A - F F*||_F`.
    pub residual: f64,
}

pub fn psd_factor(a: &CMatrix, tol: f64) -> Result<PsdFactorization> {
    let report = is_psd(a, tol)?;
    if !report.psd {
        return Err(LinalgError::NotPsd { min_eigenvalue: report.min_eigenvalue.unwrap_or(0.0) });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(PsdFactorization { rank: 0, factor: CMatrix::zeros(0, 0), residual: 0.0 });
    }
    let cut = scaled_tol(a, tol);
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > cut).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let rank = order.len();
    let mut factor = CMatrix::zeros(n, rank);
    for (col, &k) in order.iter().enumerate() {
        let s = eig.eigenvalues[k].sqrt();
        factor.set_column(col, &eig.eigenvectors.column(k).scale(s));
    }
    let residual = fro(&(a - &factor * factor.adjoint()));
    Ok(PsdFactorization { rank, factor, residual })
}

/// Isometry class of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub isometry: bool,
    pub coisometry: bool,
    pub unitary: bool,
    pub contraction: bool,
}

pub fn classify(v: &CMatrix, tol: f64) -> Classification {
    let (rows, cols) = v.shape();
    let isometry = fro(&(v.adjoint() * v - CMatrix::identity(cols, cols))) <= tol * (cols as f64).sqrt();
    let coisometry = fro(&(v * v.adjoint() - CMatrix::identity(rows, rows))) <= tol * (rows as f64).sqrt();
    let contraction = largest_singular_value(v) <= 1.0 + tol;
    Classification { isometry, coisometry, unitary: isometry && coisometry, contraction }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    SVD::new(m.clone(), false, false).singular_values.iter().copied().collect()
}

pub fn largest_singular_value(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// `sigma_max / sigma_min`; infinite for singular input, 1 for an empty matrix.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    if sv.is_empty() {
        return 1.0;
    }
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn eigenvalues(d: &CMatrix) -> Result<Vec<Complex64>> {
    require_square(d)?;
    if d.nrows() == 0 {
        return Ok(Vec::new());
    }
    if !is_finite(d) {
        return Err(LinalgError::NonFinite);
    }
    let schur = Schur::try_new(d.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or(LinalgError::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(d: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(d)?.into_iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn guarded_inverse(m: &CMatrix, tol: f64) -> std::result::Result<CMatrix, f64> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let condition = condition_number(m);
    if !condition.is_finite() || condition > 1.0 / (100.0 * tol) {
        return Err(condition);
    }
    m.clone().try_inverse().ok_or(f64::INFINITY)
}

/// Inverse of `[[P, Q], [R, S]]` through the Schur complement `S - R P^-1 Q`.
pub fn block_inverse_2x2(p: &CMatrix, q: &CMatrix, r: &CMatrix, s: &CMatrix, tol: f64) -> Result<CMatrix> {
    let m = p.nrows();
    let n = s.nrows();
    require_square(p)?;
    require_square(s)?;
    if q.shape() != (m, n) || r.shape() != (n, m) {
        return Err(LinalgError::Dimension(format!("P {m}x{m}, Q {:?}, R {:?}, S {n}x{n}", q.shape(), r.shape())));
    }
    let p_inv = guarded_inverse(p, tol).map_err(|condition| LinalgError::PNotInvertible { condition })?;
    let delta = s - r * &p_inv * q;
    let delta_inv = guarded_inverse(&delta, tol).map_err(|condition| LinalgError::DeltaNotInvertible { condition })?;

    let p_inv_q = &p_inv * q;
    let r_p_inv = r * &p_inv;
    let mut out = CMatrix::zeros(m + n, m + n);
    out.view_mut((0, 0), (m, m)).copy_from(&(&p_inv + &p_inv_q * &delta_inv * &r_p_inv));
    out.view_mut((0, m), (m, n)).copy_from(&(-(&p_inv_q * &delta_inv)));
    out.view_mut((m, 0), (n, m)).copy_from(&(-(&delta_inv * &r_p_inv)));
    out.view_mut((m, m), (n, n)).copy_from(&delta_inv);
    Ok(out)
}

/// Polar (nearest-isometry) factor `U V*` of `m = U S V*`, for `rows >= cols`.
pub fn nearest_isometry(m: &CMatrix) -> CMatrix {
    let (rows, cols) = m.shape();
    assert!(rows >= cols, "nearest_isometry needs rows >= cols");
    if cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    u * v_t
}

/// Orthonormal basis (as columns) of the orthogonal complement of the
/// column span of `q`, using a singular value cutoff of `tol * (1 + ||q||_F)`.
pub fn orthonormal_complement(q: &CMatrix, tol: f64) -> CMatrix {
    let n = q.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let width = q.ncols().max(n);
    let mut padded = CMatrix::zeros(n, width);
    padded.view_mut((0, 0), (n, q.ncols())).copy_from(q);
    let svd = SVD::new(padded, true, false);
    let u = svd.u.expect("u requested");
    let cut = scaled_tol(q, tol);
    let keep: Vec<usize> = (0..n).filter(|&k| svd.singular_values[k] <= cut).collect();
    let mut out = CMatrix::zeros(n, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        out.set_column(col, &u.column(k));
    }
    out
}

/// Numerical rank with the relative cutoff used throughout.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    let cut = scaled_tol(m, tol);
    singular_values(m).into_iter().filter(|&s| s > cut).count()
}

/// Matrix power by repeated squaring.
pub fn matrix_power(d: &CMatrix, mut k: usize) -> CMatrix {
    let n = d.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = d.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    result
}

/// Roots of `c[0] + c[1] z + ... + c[n] z^n` from the companion matrix.
///
/// Trailing coefficients with modulus `<= tol * max|c|` are dropped first, so
/// a degree drop behaves like roots escaping to infinity.
pub fn polynomial_roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= tol * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut companion = CMatrix::zeros(deg, deg);
    for k in 1..deg {
        companion[(k, k - 1)] = cr(1.0);
    }
    for k in 0..deg {
        companion[(k, deg - 1)] = -coeffs[k] / lead;
    }
    eigenvalues(&companion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| cr(x)))
    }

    #[test]
    fn identity_is_psd() {
        let r = is_psd(&CMatrix::identity(2, 2), 1e-10).unwrap();
        assert!(r.psd);
        assert_abs_diff_eq!(r.min_eigenvalue.unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn indefinite_symmetric_is_rejected() {
        let r = is_psd(&real(2, 2, &[1.0, 2.0, 2.0, 1.0]), 1e-10).unwrap();
        assert!(!r.psd);
        assert_abs_diff_eq!(r.min_eigenvalue.unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_errors() {
        assert_eq!(is_psd(&CMatrix::zeros(2, 3), 1e-9).unwrap_err(), LinalgError::NonSquare { rows: 2, cols: 3 });
        let skew = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(is_psd(&skew, 1e-9), Err(LinalgError::NonHermitian { .. })));
        let bad = real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(psd_factor(&bad, 1e-9), Err(LinalgError::NotPsd { .. })));
    }

    #[test]
    fn factor_of_zero_and_rank_one() {
        let z = psd_factor(&CMatrix::zeros(3, 3), 1e-9).unwrap();
        assert_eq!(z.rank, 0);
        assert_eq!(z.factor.ncols(), 0);

        let v = CMatrix::from_column_slice(2, 1, &[cr(1.0), c(0.0, 1.0)]);
        let a = &v * v.adjoint();
        let f = psd_factor(&a, 1e-9).unwrap();
        assert_eq!(f.rank, 1);
        assert!(fro(&(&f.factor * f.factor.adjoint() - &a)) <= 1e-12);
        assert!(f.residual <= 1e-12);
    }

    #[test]
    fn classify_examples() {
        let all = classify(&CMatrix::identity(2, 2), 1e-12);
        assert!(all.isometry && all.coisometry && all.unitary && all.contraction);

        let col = real(2, 1, &[1.0, 0.0]);
        let k = classify(&col, 1e-12);
        assert!(k.isometry && !k.coisometry && !k.unitary && k.contraction);

        let h = 3f64.sqrt() / 2.0;
        let refl = real(2, 2, &[0.5, h, h, -0.5]);
        assert!(classify(&refl, 1e-12).unitary);

        let big = real(1, 1, &[1.5]);
        assert!(!classify(&big, 1e-9).contraction);
    }

    #[test]
    fn spectral_radius_examples() {
        assert_eq!(spectral_radius(&real(2, 2, &[0.0, 1.0, 0.0, 0.0])).unwrap(), 0.0);
        assert_abs_diff_eq!(spectral_radius(&real(1, 1, &[1.0])).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(spectral_radius(&real(2, 2, &[0.0, 1.0, 0.25, 0.0])).unwrap(), 0.5, epsilon = 1e-12);
        assert!(matches!(spectral_radius(&CMatrix::zeros(1, 2)), Err(LinalgError::NonSquare { .. })));
    }

    #[test]
    fn block_inverse_examples() {
        let one = real(1, 1, &[1.0]);
        let zero = real(1, 1, &[0.0]);
        let id = block_inverse_2x2(&one, &zero, &zero, &one, 1e-9).unwrap();
        assert!(fro(&(id - CMatrix::identity(2, 2))) < 1e-15);

        let inv = block_inverse_2x2(&one, &one, &zero, &one, 1e-9).unwrap();
        assert!(fro(&(inv - real(2, 2, &[1.0, -1.0, 0.0, 1.0]))) < 1e-15);

        assert!(matches!(block_inverse_2x2(&one, &one, &one, &one, 1e-9), Err(LinalgError::DeltaNotInvertible { .. })));
        assert!(matches!(block_inverse_2x2(&zero, &one, &one, &one, 1e-9), Err(LinalgError::PNotInvertible { .. })));
        assert!(matches!(
            block_inverse_2x2(&one, &CMatrix::zeros(1, 2), &zero, &one, 1e-9),
            Err(LinalgError::Dimension(_))
        ));
    }

    #[test]
    fn complement_spans_the_rest() {
        let col = real(3, 1, &[1.0, 1.0, 0.0]);
        let comp = orthonormal_complement(&col, 1e-12);
        assert_eq!(comp.ncols(), 2);
        assert!(fro(&(comp.adjoint() * &col)) < 1e-12);
        assert!(classify(&comp, 1e-12).isometry);
    }

    #[test]
    fn roots_of_quadratic() {
        // (z - 0.5)(z + 2i) = z^2 + (2i - 0.5) z - i
        let mut r = polynomial_roots(&[c(0.0, -1.0), c(-0.5, 2.0), cr(1.0)], 1e-14).unwrap();
        r.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        assert!((r[0] - cr(0.5)).norm() < 1e-12);
        assert!((r[1] - c(0.0, -2.0)).norm() < 1e-12);
        assert!(polynomial_roots(&[cr(3.0), cr(0.0)], 1e-14).unwrap().is_empty());
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let d = real(2, 2, &[0.5, 0.25, -0.1, 0.3]);
        let p5 = matrix_power(&d, 5);
        let naive = &d * &d * &d * &d * &d;
        assert!(fro(&(p5 - naive)) < 1e-15);
        assert_eq!(matrix_power(&d, 0), CMatrix::identity(2, 2));
    }
}
