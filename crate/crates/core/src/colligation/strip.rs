use serde::Serialize;

use super::{ColligationError, Result};
use crate::function::{PowerSeries2, RationalFunction2};

/// `phi = z_k^p * reduced`, decided on Taylor coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stripped {
    pub p: usize,
    pub reduced: PowerSeries2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrippedRational {
    pub p: usize,
    pub reduced: RationalFunction2,
}

fn strip_rows(series: &PowerSeries2, tol: f64, variable: usize) -> Result<Stripped> {
    let (n1, _) = series.orders();
    let row_is_zero = |i: usize| series.coeffs().row(i).iter().all(|z| z.norm() <= tol);
    let p = (0..=n1).take_while(|&i| row_is_zero(i)).count();
    if p == 0 {
        if series.coeffs()[(0, 0)].norm() > tol {
            return Ok(Stripped { p: 0, reduced: series.clone() });
        }
        let other = 3 - variable;
        return Err(ColligationError::NotDivisible {
            variable,
            p: 0,
            reason: format!("phi(0,0) = 0 but no power of z{variable} factors out; try stripping z{other}"),
        });
    }
    if p > n1 {
        return Err(ColligationError::NotDivisible {
            variable,
            p,
            reason: "all coefficients vanish within the truncation".into(),
        });
    }
    let reduced = series.shift_z1(p).expect("p <= n1");
    if reduced.coeffs()[(0, 0)].norm() <= tol {
        let other = 3 - variable;
        return Err(ColligationError::NotDivisible {
            variable,
            p,
            reason: format!("the quotient by z{variable}^{p} still vanishes at the origin; z{other} divides it too"),
        });
    }
    Ok(Stripped { p, reduced })
}

/// Largest `p` with `z1^p | phi` (up to the truncation) and the quotient,
/// which must not vanish at the origin.
pub fn strip_monomial(series: &PowerSeries2, tol: f64) -> Result<Stripped> {
    strip_rows(series, tol, 1)
}

/// Same as [`strip_monomial`] with the roles of the variables exchanged.
pub fn strip_monomial_z2(series: &PowerSeries2, tol: f64) -> Result<Stripped> {
    let out = strip_rows(&series.transpose(), tol, 2)?;
    Ok(Stripped { p: out.p, reduced: out.reduced.transpose() })
}

// In Rudin form `p~` never has a monomial factor (its constant row/column is the
// conjugated top row/column of `p`), so the exponent of z_k is exactly `m_k`.
fn strip_rational(f: &RationalFunction2, variable: usize) -> Result<StrippedRational> {
    let (m1, m2) = f.monomial();
    let (p, remaining) = if variable == 1 { (m1, m2) } else { (m2, m1) };
    if remaining > 0 {
        let other = 3 - variable;
        return Err(ColligationError::NotDivisible {
            variable,
            p,
            reason: format!("z{other}^{remaining} divides the function as well; strip z{other} first"),
        });
    }
    let monomial = if variable == 1 { (0, m2) } else { (m1, 0) };
    Ok(StrippedRational { p, reduced: f.with_monomial(monomial) })
}

pub fn strip_monomial_rational(f: &RationalFunction2) -> Result<StrippedRational> {
    strip_rational(f, 1)
}

pub fn strip_monomial_rational_z2(f: &RationalFunction2) -> Result<StrippedRational> {
    strip_rational(f, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{series_of, Poly2};
    use crate::numlin::{c, cr, DEFAULT_TOL};

    fn phi_t_den(t: f64) -> Poly2 {
        Poly2::from_rows(vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(-t)]]).unwrap()
    }

    #[test]
    fn z1z2_is_not_divisible_in_z1_alone() {
        let s = PowerSeries2::from_poly(&Poly2::monomial(1, 1, cr(1.0)), 4, 4);
        match strip_monomial(&s, DEFAULT_TOL) {
            Err(ColligationError::NotDivisible { variable: 1, p: 1, reason }) => assert!(reason.contains("z2")),
            other => panic!("unexpected {other:?}"),
        }
        let f = RationalFunction2::new((1, 1), Poly2::constant(cr(1.0))).unwrap();
        assert!(matches!(strip_monomial_rational(&f), Err(ColligationError::NotDivisible { p: 1, .. })));
    }

    #[test]
    fn z1_times_phi_t() {
        let f = RationalFunction2::new((1, 0), phi_t_den(0.5)).unwrap();
        let s = series_of(&f, 6, 6).unwrap();
        let out = strip_monomial(&s, DEFAULT_TOL).unwrap();
        assert_eq!(out.p, 1);
        let phi_t = series_of(&RationalFunction2::new((0, 0), phi_t_den(0.5)).unwrap(), 5, 6).unwrap();
        assert!(out.reduced.max_abs_diff(&phi_t) < 1e-14);
        assert_eq!(out.reduced.orders(), (5, 6));

        let r = strip_monomial_rational(&f).unwrap();
        assert_eq!(r.p, 1);
        assert_eq!(r.reduced.monomial(), (0, 0));
    }

    #[test]
    fn nonvanishing_at_origin_is_untouched() {
        let s = PowerSeries2::from_poly(&Poly2::from_rows(vec![vec![c(0.5, 0.1), cr(1.0)]]).unwrap(), 3, 3);
        let out = strip_monomial(&s, DEFAULT_TOL).unwrap();
        assert_eq!(out.p, 0);
        assert_eq!(out.reduced, s);
    }

    #[test]
    fn z2_stripping_is_symmetric() {
        let f = RationalFunction2::new((0, 2), phi_t_den(0.3)).unwrap();
        let s = series_of(&f, 5, 5).unwrap();
        let out = strip_monomial_z2(&s, DEFAULT_TOL).unwrap();
        assert_eq!(out.p, 2);
        assert!((out.reduced.coeff(0, 0).unwrap() - cr(-0.3)).norm() < 1e-15);
        assert!(matches!(strip_monomial(&s, DEFAULT_TOL), Err(ColligationError::NotDivisible { p: 0, .. })));
        assert_eq!(strip_monomial_rational_z2(&f).unwrap().p, 2);
    }

    #[test]
    fn zero_series_is_not_divisible() {
        let s = PowerSeries2::zeros(3, 3);
        assert!(matches!(strip_monomial(&s, DEFAULT_TOL), Err(ColligationError::NotDivisible { .. })));
    }
}
