use num_complex::Complex64;
use serde::Serialize;

use super::{
    certificate_grid, check_condition_4, compose_colligations, separability_test, split_colligation,
    FactorizationResult, Result, SeparabilityReport,
};
use crate::colligation::{model_colligation, Blaschke, Colligation};
use crate::function::{Evaluable2, RationalFunction2};
use crate::numlin::{cr, polynomial_roots};

const ROOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalFactorization {
    /// Exponents of the monomial factor `z1^m1 z2^m2`.
    pub monomial: [usize; 2],
    pub separable: bool,
    /// Why the function has no one-variable factorization, when it has none.
    pub reason: Option<String>,
    /// Separability of the function with the monomial removed.
    pub separability: Option<SeparabilityReport>,
    /// One-variable factors, monomial included.
    pub first: Option<Blaschke>,
    pub second: Option<Blaschke>,
    /// Cascade of the model colligations of the two factors.
    pub colligation: Option<Colligation>,
    pub condition_4: bool,
    /// Split of the cascade for the function with the monomial removed.
    pub split: Option<FactorizationResult>,
    /// `max |f(z) - tau_V(z)|` over the certificate grid.
    pub realization_residual: Option<f64>,
}

fn disc_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(polynomial_roots(coeffs, ROOT_TOL)?.into_iter().filter(|r| r.norm() < 1.0).collect())
}

fn with_origin_zeros(mut zeros: Vec<Complex64>, count: usize) -> Vec<Complex64> {
    zeros.extend(std::iter::repeat_n(cr(0.0), count));
    zeros
}

/// Factors a rational inner function into one-variable Blaschke products.
///
/// The monomial factor is reported separately and the rest is tested for
/// separability. When separable, the factor zeros are the disc roots of the
/// numerator sections through the origin, and the factors are realized by
/// model colligations whose cascade is checked against `f`.
pub fn factor_rational(f: &RationalFunction2, tol: f64) -> Result<RationalFactorization> {
    let (m1, m2) = f.monomial();
    let reduced = f.with_monomial((0, 0));
    let mut out = RationalFactorization {
        monomial: [m1, m2],
        separable: false,
        reason: None,
        separability: None,
        first: None,
        second: None,
        colligation: None,
        condition_4: false,
        split: None,
        realization_residual: None,
    };
    let zero = cr(0.0);
    let phi0 = reduced.eval([zero, zero])?;
    if phi0.norm() <= tol {
        out.reason = Some("the function divided by its monomial factor still vanishes at the origin".into());
        return Ok(out);
    }
    let grid = certificate_grid();
    let sep = separability_test(&reduced, &grid, tol)?;
    out.separable = sep.separable;
    if !sep.separable {
        out.reason = Some(format!("phi(z) phi(0) differs from phi(z1, 0) phi(0, z2) by {:.3e}", sep.residual));
        out.separability = Some(sep);
        return Ok(out);
    }
    out.separability = Some(sep);

    let numerator = reduced.numerator();
    let zeros1 = disc_roots(&numerator.section_in_z1(zero))?;
    let zeros2 = disc_roots(&numerator.section_in_z2(zero))?;
    let base1 = Blaschke::new(cr(1.0), zeros1.clone())?;
    let base2 = Blaschke::new(cr(1.0), zeros2.clone())?;
    let lambda = phi0 / (base1.eval(zero) * base2.eval(zero));
    let lambda = lambda / lambda.norm();

    let reduced1 = Blaschke::new(lambda, zeros1.clone())?;
    let reduced_v = compose_colligations(&model_colligation(&reduced1)?, &model_colligation(&base2)?, tol)?;
    out.split = Some(split_colligation(&reduced_v, tol)?);

    let first = Blaschke::new(lambda, with_origin_zeros(zeros1, m1))?;
    let second = Blaschke::new(cr(1.0), with_origin_zeros(zeros2, m2))?;
    let v = compose_colligations(&model_colligation(&first)?, &model_colligation(&second)?, tol)?;
    let mut worst = 0.0f64;
    for z in grid.points2() {
        worst = worst.max((f.eval(z)? - v.transfer_2d(z)?).norm());
    }
    out.condition_4 = check_condition_4(&v, tol);
    out.realization_residual = Some(worst);
    out.first = Some(first);
    out.second = Some(second);
    out.colligation = Some(v);
    Ok(out)
}
