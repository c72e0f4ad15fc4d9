use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Evaluable2, FunctionError, Point2, Poly2, PowerSeries2, Result};
use crate::numlin::{cr, polynomial_roots};

/// Angular resolution of the closed-bidisc zero-freeness scan.
pub const ZERO_FREE_ANGLES: usize = 50;
/// Radial resolution of the closed-bidisc zero-freeness scan (radii `k / (n-1)`).
pub const ZERO_FREE_RADII: usize = 10;

/// Roots of a `z1`-section closer than this to the closed disc count as zeros.
const ROOT_MARGIN: f64 = 1e-9;
/// Relative size of `|p|` below which an evaluation is treated as a pole.
const POLE_TOL: f64 = 1e-12;

/// Rational inner function in Rudin form
/// `z1^m1 z2^m2 * c * p~(z) / p(z)` with `p~` the reflection of `p` and `|c| = 1`.
///
/// The unimodular constant is folded into the stored numerator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RationalJson", try_from = "RationalJson")]
pub struct RationalFunction2 {
    monomial: (usize, usize),
    numerator: Poly2,
    denominator: Poly2,
    unimodular: Complex64,
}

/// `{"monomial": [m1, m2], "denominator": <poly>, "unimodular": [re, im]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RationalJson {
    monomial: [usize; 2],
    denominator: Poly2,
    #[serde(default = "one")]
    unimodular: Complex64,
}

fn one() -> Complex64 {
    cr(1.0)
}

impl From<RationalFunction2> for RationalJson {
    fn from(f: RationalFunction2) -> Self {
        RationalJson { monomial: [f.monomial.0, f.monomial.1], denominator: f.denominator, unimodular: f.unimodular }
    }
}

impl TryFrom<RationalJson> for RationalFunction2 {
    type Error = FunctionError;
    fn try_from(j: RationalJson) -> Result<Self> {
        RationalFunction2::with_unimodular((j.monomial[0], j.monomial[1]), j.denominator, j.unimodular)
    }
}

impl RationalFunction2 {
    pub fn new(monomial: (usize, usize), denominator: Poly2) -> Result<Self> {
        Self::with_unimodular(monomial, denominator, cr(1.0))
    }

    pub fn with_unimodular(monomial: (usize, usize), denominator: Poly2, unimodular: Complex64) -> Result<Self> {
        if (unimodular.norm() - 1.0).abs() > 1e-12 {
            return Err(FunctionError::Malformed(format!("unimodular constant has modulus {}", unimodular.norm())));
        }
        check_zero_free(&denominator)?;
        let numerator = denominator.reflect()?.scale(unimodular);
        Ok(RationalFunction2 { monomial, numerator, denominator, unimodular })
    }

    pub fn monomial(&self) -> (usize, usize) {
        self.monomial
    }

    pub fn numerator(&self) -> &Poly2 {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly2 {
        &self.denominator
    }

    pub fn unimodular(&self) -> Complex64 {
        self.unimodular
    }

    /// Same function with the monomial exponents replaced.
    pub fn with_monomial(&self, monomial: (usize, usize)) -> RationalFunction2 {
        RationalFunction2 { monomial, ..self.clone() }
    }
}

impl Evaluable2 for RationalFunction2 {
    fn eval(&self, z: Point2) -> Result<Complex64> {
        let den = self.denominator.eval(z);
        if den.norm() <= POLE_TOL * self.denominator.l1_norm() {
            return Err(FunctionError::NearPole { point: z.to_vec(), modulus: den.norm() });
        }
        let mono = z[0].powu(self.monomial.0 as u32) * z[1].powu(self.monomial.1 as u32);
        Ok(mono * self.numerator.eval(z) / den)
    }
}

/// Numerical check that `p` has no zero on the closed bidisc.
///
/// `z2` runs over a polar grid of the closed disc (`ZERO_FREE_ANGLES` angles
/// by `ZERO_FREE_RADII` radii, boundary included); for each `z2` the roots of
/// the one-variable section `p(., z2)` are located exactly and must lie
/// outside the closed disc.
pub fn check_zero_free(p: &Poly2) -> Result<()> {
    if p.is_zero() {
        return Err(FunctionError::ZeroPolynomial);
    }
    let scale = p.l1_norm();
    for ri in 0..ZERO_FREE_RADII {
        let r = ri as f64 / (ZERO_FREE_RADII - 1) as f64;
        let angles = if ri == 0 { 1 } else { ZERO_FREE_ANGLES };
        for k in 0..angles {
            let z2 = Complex64::from_polar(r, TAU * k as f64 / ZERO_FREE_ANGLES as f64);
            let section = p.section_in_z1(z2);
            let size = section.iter().map(|a| a.norm()).fold(0.0, f64::max);
            if size <= POLE_TOL * scale {
                return Err(FunctionError::ZeroOnClosedBidisc { point: vec![cr(0.0), z2], modulus: size });
            }
            for root in polynomial_roots(&section, 1e-14)? {
                if root.norm() <= 1.0 + ROOT_MARGIN {
                    let modulus = p.eval([root, z2]).norm();
                    return Err(FunctionError::ZeroOnClosedBidisc { point: vec![root, z2], modulus });
                }
            }
        }
    }
    Ok(())
}

/// Taylor coefficients at the origin up to `(n1, n2)`, from the recursion
/// `p * phi = z^m * p~` solved coefficient by coefficient.
pub fn series_of(f: &RationalFunction2, n1: usize, n2: usize) -> Result<PowerSeries2> {
    let p = f.denominator();
    let p00 = p.coeff(0, 0);
    if p00.norm() <= POLE_TOL * p.l1_norm() {
        return Err(FunctionError::NearPole { point: vec![cr(0.0), cr(0.0)], modulus: p00.norm() });
    }
    let (m1, m2) = f.monomial();
    let (d1, d2) = p.degree();
    let num = |i: usize, j: usize| {
        if i >= m1 && j >= m2 {
            f.numerator().coeff(i - m1, j - m2)
        } else {
            Complex64::default()
        }
    };
    let mut s = PowerSeries2::zeros(n1, n2);
    for i in 0..=n1 {
        for j in 0..=n2 {
            let mut acc = num(i, j);
            for k in 0..=i.min(d1) {
                for l in 0..=j.min(d2) {
                    if k == 0 && l == 0 {
                        continue;
                    }
                    acc -= p.coeff(k, l) * s.coeffs()[(i - k, j - l)];
                }
            }
            s.set(i, j, acc / p00);
        }
    }
    Ok(s)
}
