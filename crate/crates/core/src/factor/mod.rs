//! Factorization of two-variable Schur functions into one-variable factors:
//! separability tests, splitting and composing structured colligations, the
//! weak converse for rational inner functions, and kernel conditions.

mod agler;
mod converse;
mod quotients;
mod rational;

pub use agler::{agler_factorization_conditions, companion_grid, AglerConditions};
pub use converse::{weak_converse_check, WeakConverseReport};
pub use quotients::{difference_quotient_check, DifferenceQuotientReport};
pub use rational::{factor_rational, RationalFactorization};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::colligation::{Colligation, ColligationError};
use crate::function::{Ambient, Evaluable2, FunctionError, Point2, PointGrid};
use crate::kernels::KernelError;
use crate::numlin::{classify, cr, fro, CMatrix, LinalgError};

/// Size and seed of the grid on which split and composed transfer functions are compared.
pub const CERTIFICATE_POINTS: usize = 30;
pub const CERTIFICATE_SEED: u64 = 0x5eed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("phi(0,0) = {value} vanishes; strip the monomial factor first")]
    OriginZero { value: Complex64 },
    #[error("{reason}")]
    ConditionFailed { reason: String, defect: f64 },
    #[error("factors are not in the same class: {0}")]
    ClassMismatch(String),
    #[error("precondition {precondition} fails: {detail}")]
    PreconditionFailed { precondition: &'static str, detail: String },
    #[error("grid is not companioned: {0}")]
    GridNotCompanioned(String),
    #[error(transparent)]
    Colligation(#[from] ColligationError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl FactorError {
    /// Variant name used in reports; wrapped errors report their own name.
    pub fn name(&self) -> &'static str {
        match self {
            FactorError::OriginZero { .. } => "OriginZero",
            FactorError::ConditionFailed { .. } => "ConditionFailed",
            FactorError::ClassMismatch(_) => "ClassMismatch",
            FactorError::PreconditionFailed { .. } => "PreconditionFailed",
            FactorError::GridNotCompanioned(_) => "GridNotCompanioned",
            FactorError::Colligation(e) => e.name(),
            FactorError::Function(e) => e.name(),
            FactorError::Kernel(e) => e.name(),
            FactorError::Linalg(e) => e.name(),
        }
    }
}

pub type Result<T, E = FactorError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparabilityReport {
    pub separable: bool,
    /// `max |phi(z) phi(0) - phi(z1, 0) phi(0, z2)|` over the grid.
    pub residual: f64,
    pub argmax: Option<Point2>,
    pub phi0: Complex64,
    /// Samples of the first factor at each grid point's first coordinate.
    pub phi1: Vec<Complex64>,
    /// Samples of the second factor at each grid point's second coordinate.
    pub phi2: Vec<Complex64>,
}

/// Decides `phi(z) = phi1(z1) phi2(z2)` on a grid through
/// `phi(z) phi(0) = phi(z1, 0) phi(0, z2)`.
///
/// The factor samples are `phi(z1, 0) / c` and `phi(0, z2) c / phi(0)`, with
/// `|c|` the geometric mean of the bounds that keep both factors within the
/// unit disc on the grid and `arg c` making the first factor positive where
/// it is largest.
pub fn separability_test(phi: &dyn Evaluable2, grid: &PointGrid, tol: f64) -> Result<SeparabilityReport> {
    if grid.ambient().dimension() != 2 {
        return Err(FunctionError::WrongAmbient { expected: "bidisc".into(), found: grid.ambient().to_string() }.into());
    }
    let zero = cr(0.0);
    let phi0 = phi.eval([zero, zero])?;
    if phi0.norm() <= tol {
        return Err(FactorError::OriginZero { value: phi0 });
    }
    let mut residual = 0.0f64;
    let mut argmax = None;
    let mut first = Vec::with_capacity(grid.len());
    let mut second = Vec::with_capacity(grid.len());
    for z in grid.points2() {
        let s1 = phi.eval([z[0], zero])?;
        let s2 = phi.eval([zero, z[1]])?;
        let r = (phi.eval(z)? * phi0 - s1 * s2).norm();
        if argmax.is_none() || r > residual {
            residual = r;
            argmax = Some(z);
        }
        first.push(s1);
        second.push(s2);
    }
    let (peak, m1) =
        first.iter().fold((phi0, phi0.norm()), |acc, s| if s.norm() > acc.1 { (*s, s.norm()) } else { acc });
    let m2 = second.iter().map(|s| s.norm()).fold(phi0.norm(), f64::max);
    let modulus = (m1 * phi0.norm() / m2).sqrt();
    let c = peak / peak.norm() * modulus;
    Ok(SeparabilityReport {
        separable: residual <= tol,
        residual,
        argmax,
        phi0,
        phi1: first.iter().map(|s| s / c).collect(),
        phi2: second.iter().map(|s| s * c / phi0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition4Report {
    pub holds: bool,
    pub coisometric: bool,
    /// `||V V^* - I||_F`.
    pub coisometry_defect: f64,
    pub lower_left_zero: bool,
    pub lower_left_defect: f64,
    /// `||a D2 - C1 B2||_F`.
    pub intertwining_defect: f64,
}

impl Condition4Report {
    /// First failing requirement, phrased for reports.
    pub fn failure(&self, tol: f64) -> Option<(String, f64)> {
        if !self.lower_left_zero {
            Some(("lower-left block nonzero".into(), self.lower_left_defect))
        } else if !self.coisometric {
            Some(("colligation is not co-isometric".into(), self.coisometry_defect))
        } else if self.intertwining_defect > tol {
            Some(("a D2 differs from C1 B2".into(), self.intertwining_defect))
        } else {
            None
        }
    }
}

pub fn condition_4_report(v: &Colligation, tol: f64) -> Result<Condition4Report> {
    let bl = v.blocks()?;
    let block = v.block();
    let n = block.nrows();
    let coisometric = classify(&block.adjoint(), tol).isometry;
    let coisometry_defect = fro(&(&block * block.adjoint() - CMatrix::identity(n, n)));
    let lower_left_defect = fro(&bl.lower_left);
    let intertwining_defect = fro(&(&bl.d2 * v.a() - &bl.c1 * &bl.b2));
    let lower_left_zero = lower_left_defect <= tol;
    Ok(Condition4Report {
        holds: coisometric && lower_left_zero && intertwining_defect <= tol,
        coisometric,
        coisometry_defect,
        lower_left_zero,
        lower_left_defect,
        intertwining_defect,
    })
}

/// Co-isometric, zero lower-left block and `a D2 = C1 B2`. False for
/// colligations that are not two-variable.
pub fn check_condition_4(v: &Colligation, tol: f64) -> bool {
    condition_4_report(v, tol).is_ok_and(|r| r.holds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationResult {
    pub v1: Colligation,
    pub v2: Colligation,
    pub y: Complex64,
    pub x: Complex64,
    /// `max |tau_V(z) - tau_V1(z1) tau_V2(z2)|` over the certificate grid.
    pub certificate: f64,
    pub v1_coisometric: bool,
    pub v2_coisometric: bool,
}

/// `max |f(z) - tau_V1(z1) tau_V2(z2)|` over `grid`.
pub fn product_residual(f: &dyn Evaluable2, v1: &Colligation, v2: &Colligation, grid: &PointGrid) -> Result<f64> {
    let mut worst = 0.0f64;
    for z in grid.points2() {
        let product = v1.transfer_1d(z[0])? * v2.transfer_1d(z[1])?;
        worst = worst.max((f.eval(z)? - product).norm());
    }
    Ok(worst)
}

pub fn certificate_grid() -> PointGrid {
    PointGrid::random(Ambient::Bidisc, CERTIFICATE_POINTS, CERTIFICATE_SEED)
}

/// Splits a colligation satisfying the structural factorization condition
/// into `V1 = [[y, B1], [C1 / x, D1]]` and `V2 = [[x, B2 / y], [C2, D4]]`
/// with `y = sqrt(1 - B1 B1^*) > 0` and `x = a / y`.
pub fn split_colligation(v: &Colligation, tol: f64) -> Result<FactorizationResult> {
    let report = condition_4_report(v, tol)?;
    let a = v.a();
    if a.norm() <= tol {
        return Err(FactorError::OriginZero { value: a });
    }
    if let Some((reason, defect)) = report.failure(tol) {
        return Err(FactorError::ConditionFailed { reason, defect });
    }
    let bl = v.blocks()?;
    let y = cr((1.0 - bl.b1.norm_squared()).max(0.0).sqrt());
    let x = a / y;
    let v1 = one_variable(y, bl.b1.clone(), &bl.c1 / x, bl.d1.clone())?;
    let v2 = one_variable(x, &bl.b2 / y, bl.c2.clone(), bl.d4.clone())?;
    let certificate = product_residual(v, &v1, &v2, &certificate_grid())?;
    Ok(FactorizationResult {
        v1_coisometric: classify(&v1.block().adjoint(), tol).isometry,
        v2_coisometric: classify(&v2.block().adjoint(), tol).isometry,
        v1,
        v2,
        y,
        x,
        certificate,
    })
}

fn one_variable(a: Complex64, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Colligation> {
    let h = d.nrows();
    Ok(Colligation::new(a, b, c, d, vec![h])?)
}

/// Cascade `[[a1 a2, B1, a1 B2], [a2 C1, D1, C1 B2], [C2, 0, D2]]` realizing
/// `tau_V1(z1) tau_V2(z2)`. Both inputs must be isometric or both co-isometric.
pub fn compose_colligations(v1: &Colligation, v2: &Colligation, tol: f64) -> Result<Colligation> {
    for v in [v1, v2] {
        if v.nvars() != 1 {
            return Err(ColligationError::WrongVariables { expected: 1, found: v.nvars() }.into());
        }
    }
    let (c1, c2) = (classify(&v1.block(), tol), classify(&v2.block(), tol));
    let shared = (c1.isometry && c2.isometry) || (c1.coisometry && c2.coisometry);
    if !shared {
        let name = |k: &crate::numlin::Classification| match (k.isometry, k.coisometry) {
            (true, _) => "isometric",
            (_, true) => "co-isometric",
            _ => "neither isometric nor co-isometric",
        };
        return Err(FactorError::ClassMismatch(format!("first factor is {}, second is {}", name(&c1), name(&c2))));
    }
    let (h1, h2) = (v1.h(), v2.h());
    let (a1, a2) = (v1.a(), v2.a());
    let mut m = CMatrix::zeros(1 + h1 + h2, 1 + h1 + h2);
    m[(0, 0)] = a1 * a2;
    m.view_mut((0, 1), (1, h1)).copy_from(v1.b());
    m.view_mut((0, 1 + h1), (1, h2)).copy_from(&(v2.b() * a1));
    m.view_mut((1, 0), (h1, 1)).copy_from(&(v1.c() * a2));
    m.view_mut((1, 1), (h1, h1)).copy_from(v1.d());
    m.view_mut((1, 1 + h1), (h1, h2)).copy_from(&(v1.c() * v2.b()));
    m.view_mut((1 + h1, 0), (h2, 1)).copy_from(v2.c());
    m.view_mut((1 + h1, 1 + h1), (h2, h2)).copy_from(v2.d());
    Ok(Colligation::from_block(&m, vec![h1, h2])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::{model_colligation, Blaschke};
    use crate::function::{FnEval, RationalFunction2};
    use crate::numlin::{c, DEFAULT_TOL};

    fn swap() -> Colligation {
        Colligation::from_block(&CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]), vec![1]).unwrap()
    }

    fn mobius(p: f64) -> Colligation {
        model_colligation(&Blaschke::new(cr(1.0), vec![cr(-p)]).unwrap()).unwrap()
    }

    fn mobius_fn(p: f64) -> impl Fn(Complex64) -> Complex64 {
        move |z| (z + p) / (1.0 + p * z)
    }

    fn v_t(t: f64) -> Colligation {
        let s = (1.0 - t * t).sqrt();
        let m =
            CMatrix::from_row_slice(3, 3, &[cr(-t), cr(s), cr(0.0), cr(0.0), cr(0.0), cr(1.0), cr(s), cr(t), cr(0.0)]);
        Colligation::from_block(&m, vec![1, 1]).unwrap()
    }

    #[test]
    fn swap_composes_to_the_permutation() {
        let v = compose_colligations(&swap(), &swap(), DEFAULT_TOL).unwrap();
        let expected = CMatrix::from_row_slice(3, 3, &[0., 1., 0., 0., 0., 1., 1., 0., 0.].map(cr));
        assert_eq!(v.block(), expected);
        assert_eq!(v.partition(), &[1, 1]);
    }

    #[test]
    fn mobius_product_composition() {
        let v = compose_colligations(&mobius(0.5), &mobius(-1.0 / 3.0), DEFAULT_TOL).unwrap();
        let (f1, f2) = (mobius_fn(0.5), mobius_fn(-1.0 / 3.0));
        for z in certificate_grid().points2() {
            assert!((v.transfer_2d(z).unwrap() - f1(z[0]) * f2(z[1])).norm() < 1e-11);
        }
        assert!(check_condition_4(&v, DEFAULT_TOL));
        assert!(classify(&v.block(), DEFAULT_TOL).unitary);
    }

    #[test]
    fn constants_compose_to_their_product() {
        let (a, b) = (Colligation::constant(c(0.6, 0.8), 1), Colligation::constant(cr(-1.0), 1));
        let v = compose_colligations(&a, &b, DEFAULT_TOL).unwrap();
        assert_eq!(v.h(), 0);
        assert_eq!(v.a(), c(-0.6, -0.8));
        assert!(check_condition_4(&v, DEFAULT_TOL));
    }

    #[test]
    fn class_mismatch() {
        let half = Colligation::from_block(&(CMatrix::identity(2, 2) * cr(0.5)), vec![1]).unwrap();
        assert!(matches!(compose_colligations(&swap(), &half, DEFAULT_TOL), Err(FactorError::ClassMismatch(_))));
    }

    #[test]
    fn split_recovers_mobius_factors() {
        let v = compose_colligations(&mobius(0.5), &mobius(-1.0 / 3.0), DEFAULT_TOL).unwrap();
        let r = split_colligation(&v, DEFAULT_TOL).unwrap();
        assert!(r.certificate <= 1e-10, "{}", r.certificate);
        assert!(r.v1_coisometric && r.v2_coisometric);
        assert!((r.x * r.y - v.a()).norm() < 1e-15);
        assert!(r.y.im == 0.0 && r.y.re > 0.0);
        let bl = v.blocks().unwrap();
        assert!((r.y.norm_sqr() - (v.a().norm_sqr() + bl.b2.norm_squared())).abs() < 1e-12);
        assert!((r.y.norm_sqr() - (1.0 - bl.b1.norm_squared())).abs() < 1e-12);
        // factors agree with the originals up to a constant gauge
        let (f1, f2) = (mobius_fn(0.5), mobius_fn(-1.0 / 3.0));
        let g1 = r.v1.transfer_1d(cr(0.3)).unwrap() / f1(cr(0.3));
        let g2 = r.v2.transfer_1d(cr(-0.2)).unwrap() / f2(cr(-0.2));
        assert!((g1 * g2 - cr(1.0)).norm() < 1e-12);
        for z in [cr(0.0), c(0.1, 0.7), cr(-0.8)] {
            assert!((r.v1.transfer_1d(z).unwrap() / f1(z) - g1).norm() < 1e-10);
        }
    }

    #[test]
    fn split_failures() {
        let v = compose_colligations(&swap(), &swap(), DEFAULT_TOL).unwrap();
        assert!(matches!(split_colligation(&v, DEFAULT_TOL), Err(FactorError::OriginZero { .. })));
        match split_colligation(&v_t(0.5), DEFAULT_TOL) {
            Err(FactorError::ConditionFailed { reason, .. }) => assert_eq!(reason, "lower-left block nonzero"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(!check_condition_4(&v_t(0.5), DEFAULT_TOL));
        assert!(check_condition_4(&Colligation::constant(cr(1.0), 2), DEFAULT_TOL));
        assert!(!check_condition_4(&mobius(0.5), DEFAULT_TOL));
    }

    #[test]
    fn separability_examples() {
        let g = certificate_grid();
        let (f1, f2) = (mobius_fn(0.5), mobius_fn(-1.0 / 3.0));
        let product = FnEval(move |z: Point2| f1(z[0]) * f2(z[1]));
        let r = separability_test(&product, &g, DEFAULT_TOL).unwrap();
        assert!(r.separable);
        assert!(r.residual <= 1e-12);
        for (k, z) in g.points2().enumerate() {
            assert!((r.phi1[k] * r.phi2[k] - product.eval(z).unwrap()).norm() < 1e-12);
            assert!(r.phi1[k].norm() <= 1.0 && r.phi2[k].norm() <= 1.0);
        }

        let den = crate::function::Poly2::from_rows(vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(-0.5)]]).unwrap();
        let phi_t = RationalFunction2::new((0, 0), den).unwrap();
        assert!(!separability_test(&phi_t, &g, DEFAULT_TOL).unwrap().separable);

        let constant = FnEval(|_: Point2| c(0.0, 0.4));
        assert!(separability_test(&constant, &g, DEFAULT_TOL).unwrap().separable);

        let z1z2 = FnEval(|z: Point2| z[0] * z[1]);
        assert!(matches!(separability_test(&z1z2, &g, DEFAULT_TOL), Err(FactorError::OriginZero { .. })));
    }

    #[test]
    fn gauge_leaves_the_product_unchanged() {
        let v = compose_colligations(&mobius(0.5), &mobius(-1.0 / 3.0), DEFAULT_TOL).unwrap();
        let r = split_colligation(&v, DEFAULT_TOL).unwrap();
        let rotate = |w: &Colligation, u: Complex64| {
            let mut m = w.block();
            for j in 0..m.ncols() {
                m[(0, j)] *= u;
            }
            Colligation::from_block(&m, w.partition().to_vec()).unwrap()
        };
        let (g1, g2) = (rotate(&r.v1, c(0.0, 1.0)), rotate(&r.v2, c(0.0, -1.0)));
        for z in certificate_grid().points2() {
            let before = r.v1.transfer_1d(z[0]).unwrap() * r.v2.transfer_1d(z[1]).unwrap();
            let after = g1.transfer_1d(z[0]).unwrap() * g2.transfer_1d(z[1]).unwrap();
            assert_eq!(before, after);
        }
    }
}
