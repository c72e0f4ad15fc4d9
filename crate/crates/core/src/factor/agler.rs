use num_complex::Complex64;
use serde::Serialize;

use super::{FactorError, Result};
use crate::function::{Evaluable2, Point2, PointGrid};
use crate::kernels::{KernelError, SampledKernel};
use crate::numlin::cr;

/// `G1 x G2` with the origin added to both factors when missing.
pub fn companion_grid(first: &[Complex64], second: &[Complex64]) -> Result<PointGrid> {
    let with_zero = |pts: &[Complex64]| {
        let mut out = pts.to_vec();
        if !out.contains(&cr(0.0)) {
            out.insert(0, cr(0.0));
        }
        out
    };
    Ok(PointGrid::product(&with_zero(first), &with_zero(second))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AglerConditions {
    pub cond2: bool,
    /// `max |K1(z, w) - K1((z1, 0), (w1, 0))|`: dependence of `K1` on the second coordinates.
    pub k1_invariance_defect: f64,
    /// `max |conj(phi(0)) K2(z, (w1, 0)) - conj(phi(w1, 0)) K2(z, 0)|`.
    pub section_defect: f64,
}

/// Kernel form of the factorization condition: `K1` depends only on
/// `(z1, conj(w1))` and `conj(phi(0)) K2(., (w1, 0)) = conj(phi(w1, 0)) K2(., 0)`.
///
/// The grid must contain the origin, every section point `(z1, 0)`, and at
/// least two second coordinates for each first coordinate.
pub fn agler_factorization_conditions(
    phi: &dyn Evaluable2,
    k1: &SampledKernel,
    k2: &SampledKernel,
    tol: f64,
) -> Result<AglerConditions> {
    k1.require_compatible(k2)?;
    let grid = k1.grid();
    if k1.dim() != 1 || grid.ambient().dimension() != 2 {
        return Err(KernelError::GridMismatch.into());
    }
    let zero = cr(0.0);
    let phi0 = phi.eval([zero, zero])?;
    if phi0.norm() <= tol {
        return Err(FactorError::OriginZero { value: phi0 });
    }
    let pts: Vec<Point2> = grid.points2().collect();
    let origin =
        grid.index_of(&[zero, zero]).ok_or_else(|| FactorError::GridNotCompanioned("the origin is missing".into()))?;
    let section = pts
        .iter()
        .map(|z| {
            grid.index_of(&[z[0], zero])
                .ok_or_else(|| FactorError::GridNotCompanioned(format!("section point ({}, 0) is missing", z[0])))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(lonely) = pts.iter().find(|z| !pts.iter().any(|w| w[0] == z[0] && w[1] != z[1])) {
        return Err(FactorError::GridNotCompanioned(format!("first coordinate {} has a single companion", lonely[0])));
    }

    let phi_section = section.iter().map(|&s| phi.eval(pts[s])).collect::<Result<Vec<_>, _>>()?;
    let n = pts.len();
    let mut k1_invariance_defect = 0.0f64;
    let mut section_defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (k1.value(i, j)[(0, 0)] - k1.value(section[i], section[j])[(0, 0)]).norm();
            k1_invariance_defect = k1_invariance_defect.max(d);
            let lhs = phi0.conj() * k2.value(i, section[j])[(0, 0)];
            let rhs = phi_section[j].conj() * k2.value(i, origin)[(0, 0)];
            section_defect = section_defect.max((lhs - rhs).norm());
        }
    }
    Ok(AglerConditions {
        cond2: k1_invariance_defect <= tol && section_defect <= tol,
        k1_invariance_defect,
        section_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::{model_colligation, Blaschke, Colligation};
    use crate::factor::compose_colligations;
    use crate::kernels::agler_kernels_of;
    use crate::numlin::{c, CMatrix, DEFAULT_TOL};

    fn grid() -> PointGrid {
        companion_grid(&[c(0.3, 0.1), c(-0.5, 0.2), c(0.0, -0.6)], &[c(0.4, -0.4), c(0.1, 0.5)]).unwrap()
    }

    #[test]
    fn separable_kernels_satisfy_the_conditions() {
        let b1 = Blaschke::new(cr(1.0), vec![c(0.5, 0.1), c(-0.3, 0.3)]).unwrap();
        let b2 = Blaschke::new(c(0.0, 1.0), vec![c(0.2, -0.6)]).unwrap();
        let v = compose_colligations(&model_colligation(&b1).unwrap(), &model_colligation(&b2).unwrap(), DEFAULT_TOL)
            .unwrap();
        let g = grid();
        let (k1, k2) = agler_kernels_of(&v, &g, DEFAULT_TOL).unwrap();
        let r = agler_factorization_conditions(&v, &k1, &k2, DEFAULT_TOL).unwrap();
        assert!(r.cond2, "{r:?}");

        // the closed-form kernels built from the factors
        let pts: Vec<Point2> = g.points2().collect();
        for (i, z) in pts.iter().enumerate() {
            for (j, w) in pts.iter().enumerate() {
                let e1 = (1.0 - b1.eval(z[0]) * b1.eval(w[0]).conj()) / (1.0 - z[0] * w[0].conj());
                assert!((k1.value(i, j)[(0, 0)] - e1).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_t_kernels_fail() {
        let s = 0.75f64.sqrt();
        let m = CMatrix::from_row_slice(3, 3, &[-0.5, s, 0.0, 0.0, 0.0, 1.0, s, 0.5, 0.0].map(cr));
        let v = Colligation::from_block(&m, vec![1, 1]).unwrap();
        let (k1, k2) = agler_kernels_of(&v, &grid(), DEFAULT_TOL).unwrap();
        let r = agler_factorization_conditions(&v, &k1, &k2, DEFAULT_TOL).unwrap();
        assert!(!r.cond2);
    }

    #[test]
    fn grids_must_be_companioned() {
        let v = Colligation::constant(cr(0.5), 2);
        let g = PointGrid::product(&[c(0.3, 0.0)], &[c(0.1, 0.0), c(0.2, 0.0)]).unwrap();
        let k = SampledKernel::constant(&g, 1, cr(0.0)).unwrap();
        assert!(matches!(
            agler_factorization_conditions(&v, &k, &k, DEFAULT_TOL),
            Err(FactorError::GridNotCompanioned(_))
        ));
        let z = Colligation::constant(cr(0.0), 2);
        let k = SampledKernel::constant(&grid(), 1, cr(0.0)).unwrap();
        assert!(matches!(agler_factorization_conditions(&z, &k, &k, DEFAULT_TOL), Err(FactorError::OriginZero { .. })));
    }
}
