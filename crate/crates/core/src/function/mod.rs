//! Functions on the bidisc: polynomials, rational inner functions in Rudin
//! form, truncated power series, and the sample grids they are tested on.

mod grid;
mod poly;
mod rational;
mod series;

pub use grid::{Ambient, PointGrid, INTERIOR_RADIUS};
pub use poly::Poly2;
pub use rational::{series_of, RationalFunction2, ZERO_FREE_ANGLES, ZERO_FREE_RADII};
pub use series::PowerSeries2;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::numlin::LinalgError;

/// A point of the bidisc (or of its closure).
pub type Point2 = [Complex64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("the zero polynomial has no reflection")]
    ZeroPolynomial,
    #[error("evaluation point {point:?} is too close to a pole (|denominator| = {modulus:.3e})")]
    NearPole { point: Vec<Complex64>, modulus: f64 },
    #[error("resolvent is ill-conditioned at {point:?} (condition {condition:.3e})")]
    ResolventIllConditioned { point: Vec<Complex64>, condition: f64 },
    #[error("denominator vanishes on the closed bidisc near {point:?} (|p| = {modulus:.3e})")]
    ZeroOnClosedBidisc { point: Vec<Complex64>, modulus: f64 },
    #[error("grid is empty")]
    EmptyGrid,
    #[error("expected a {expected} grid, got {found}")]
    WrongAmbient { expected: String, found: String },
    #[error("point {point:?} is outside the {ambient} domain")]
    OutsideDomain { point: Vec<Complex64>, ambient: String },
    #[error("unknown ambient domain '{0}'")]
    UnknownAmbient(String),
    #[error("malformed coefficient table: {0}")]
    Malformed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl FunctionError {
    /// Variant name used in reports; wrapped errors report their own name.
    pub fn name(&self) -> &'static str {
        match self {
            FunctionError::ZeroPolynomial => "ZeroPolynomial",
            FunctionError::NearPole { .. } => "NearPole",
            FunctionError::ResolventIllConditioned { .. } => "ResolventIllConditioned",
            FunctionError::ZeroOnClosedBidisc { .. } => "ZeroOnClosedBidisc",
            FunctionError::EmptyGrid => "EmptyGrid",
            FunctionError::WrongAmbient { .. } => "WrongAmbient",
            FunctionError::OutsideDomain { .. } => "OutsideDomain",
            FunctionError::UnknownAmbient(_) => "UnknownAmbient",
            FunctionError::Malformed(_) => "Malformed",
            FunctionError::Linalg(e) => e.name(),
        }
    }
}

pub type Result<T, E = FunctionError> = std::result::Result<T, E>;

/// Anything that can be evaluated pointwise on the bidisc.
pub trait Evaluable2 {
    fn eval(&self, z: Point2) -> Result<Complex64>;
}

impl<T: Evaluable2 + ?Sized> Evaluable2 for &T {
    fn eval(&self, z: Point2) -> Result<Complex64> {
        (**self).eval(z)
    }
}

/// Adapter turning a closure into an [`Evaluable2`].
pub struct FnEval<F>(pub F);

impl<F: Fn(Point2) -> Complex64> Evaluable2 for FnEval<F> {
    fn eval(&self, z: Point2) -> Result<Complex64> {
        Ok((self.0)(z))
    }
}

/// Pointwise product of two functions.
pub struct Product<A, B>(pub A, pub B);

impl<A: Evaluable2, B: Evaluable2> Evaluable2 for Product<A, B> {
    fn eval(&self, z: Point2) -> Result<Complex64> {
        Ok(self.0.eval(z)? * self.1.eval(z)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub pass: bool,
    /// `max | |f(z)| - 1 |` over the grid.
    pub max_deviation: f64,
    pub argmax: Point2,
}

/// Unimodularity test on a grid of the distinguished boundary.
pub fn boundary_modulus_test(f: &dyn Evaluable2, grid: &PointGrid, tol: f64) -> Result<BoundaryReport> {
    if grid.ambient() != Ambient::Torus2 {
        return Err(FunctionError::WrongAmbient { expected: "torus2".into(), found: grid.ambient().to_string() });
    }
    if grid.is_empty() {
        return Err(FunctionError::EmptyGrid);
    }
    let mut max_deviation = -1.0;
    let mut argmax = [Complex64::default(); 2];
    for z in grid.points2() {
        let dev = (f.eval(z)?.norm() - 1.0).abs();
        if dev > max_deviation {
            max_deviation = dev;
            argmax = z;
        }
    }
    Ok(BoundaryReport { pass: max_deviation <= tol, max_deviation, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::{c, cr};

    fn phi_t(t: f64) -> RationalFunction2 {
        let p = Poly2::from_rows(vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(-t)]]).unwrap();
        RationalFunction2::new((0, 0), p).unwrap()
    }

    #[test]
    fn monomial_is_unimodular() {
        let f = FnEval(|z: Point2| z[0] * z[1]);
        let r = boundary_modulus_test(&f, &PointGrid::torus2(64), 1e-12).unwrap();
        assert!(r.pass);
        assert!(r.max_deviation < 1e-15);
    }

    #[test]
    fn phi_t_is_unimodular_on_torus() {
        let r = boundary_modulus_test(&phi_t(0.5), &PointGrid::torus2(64), 1e-12).unwrap();
        assert!(r.pass, "deviation {}", r.max_deviation);
    }

    #[test]
    fn half_z1_fails() {
        let f = FnEval(|z: Point2| z[0] * 0.5);
        let r = boundary_modulus_test(&f, &PointGrid::torus2(8), 1e-9).unwrap();
        assert!(!r.pass);
        assert!((r.max_deviation - 0.5).abs() < 1e-15);
    }

    #[test]
    fn boundary_test_requires_torus() {
        let f = FnEval(|_z: Point2| cr(1.0));
        let g = PointGrid::random(Ambient::Bidisc, 3, 1);
        assert!(matches!(boundary_modulus_test(&f, &g, 1e-9), Err(FunctionError::WrongAmbient { .. })));
    }

    #[test]
    fn product_evaluates_pointwise() {
        let f = Product(FnEval(|z: Point2| z[0]), FnEval(|z: Point2| z[1] + 1.0));
        assert_eq!(f.eval([c(0.5, 0.0), c(0.0, 1.0)]).unwrap(), c(0.5, 0.5));
    }
}
