use serde::Serialize;

use super::{split_colligation, FactorError, FactorizationResult, Result};
use crate::colligation::Colligation;
use crate::numlin::{block_inverse_2x2, classify, fro, singular_values, CMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakConverseReport {
    pub pass: bool,
    /// `||D^* - a (a D - C B)^{-1}||_F`.
    pub identity_defect: f64,
    /// `||D^* - a^{-1} (a D - C B)^{-1}||_F`, the form with the scalar inverted.
    pub inverted_scalar_defect: f64,
    /// `||V^{-1} - V^*||_F` with `V^{-1}` from the Schur complement of `a`.
    pub inverse_vs_adjoint: f64,
    /// Block-inverse against direct inversion of `a D - C B`.
    pub block_vs_direct: f64,
    /// `||(a D2 - C1 B2) D3^*||_F`.
    pub annihilation_defect: f64,
    pub d3_min_singular_value: f64,
    /// `||a D2 - C1 B2||_F`.
    pub intertwining_defect: f64,
    pub split: Option<FactorizationResult>,
}

fn precondition(name: &'static str, detail: String) -> FactorError {
    FactorError::PreconditionFailed { precondition: name, detail }
}

/// Runs the weak-converse argument on a unitary structured colligation:
/// inverts `a D - C B` blockwise, checks `D^* = a (a D - C B)^{-1}`,
/// reads off `a D2 = C1 B2` and hands over to [`split_colligation`].
pub fn weak_converse_check(v: &Colligation, tol: f64) -> Result<WeakConverseReport> {
    let bl = v.blocks()?;
    let block = v.block();
    let cls = classify(&block, tol);
    if !cls.unitary {
        let n = block.nrows();
        let defect = fro(&(block.adjoint() * &block - CMatrix::identity(n, n)));
        return Err(precondition("unitary", format!("||V*V - I||_F = {defect:.3e}")));
    }
    let a = v.a();
    if a.norm() <= tol {
        return Err(precondition("a_nonzero", format!("|a| = {:.3e}", a.norm())));
    }
    let structure = v.structure_report(tol)?;
    if !structure.lower_left_zero {
        return Err(precondition("lower_left_zero", format!("lower-left norm {:.3e}", structure.lower_left_defect)));
    }
    if let Some(k) = (0..2).find(|&k| !structure.c0dot[k]) {
        let detail = format!("diagonal block {} has spectral radius {:.6}", k + 1, structure.c0dot_blocks[k]);
        return Err(precondition("c0dot", detail));
    }

    let (h1, h2) = (bl.d1.nrows(), bl.d4.nrows());
    let schur = v.d() * a - v.c() * v.b();
    let direct = schur.clone().try_inverse();
    let inverse = if h1 == 0 || h2 == 0 {
        direct.clone().ok_or_else(|| precondition("invertible", "a D - C B is singular".into()))?
    } else {
        let p = &bl.d1 * a - &bl.c1 * &bl.b1;
        let q = &bl.d2 * a - &bl.c1 * &bl.b2;
        let r = -(&bl.c2 * &bl.b1);
        let s = &bl.d4 * a - &bl.c2 * &bl.b2;
        block_inverse_2x2(&p, &q, &r, &s, tol)?
    };
    let block_vs_direct = direct.map_or(f64::INFINITY, |d| fro(&(d - &inverse)));
    let identity_defect = fro(&(v.d().adjoint() - &inverse * a));
    let inverted_scalar_defect = fro(&(v.d().adjoint() - &inverse / a));
    let scalar = CMatrix::from_element(1, 1, a);
    let inverse_vs_adjoint = match block_inverse_2x2(&scalar, v.b(), v.c(), v.d(), tol) {
        Ok(inv) => fro(&(inv - block.adjoint())),
        Err(_) => f64::INFINITY,
    };
    let q = &bl.d2 * a - &bl.c1 * &bl.b2;
    let annihilation_defect = fro(&(&q * bl.d4.adjoint()));
    let d3_min_singular_value = singular_values(&bl.d4).into_iter().fold(f64::INFINITY, f64::min);
    let intertwining_defect = fro(&q);
    let pass = identity_defect <= tol && intertwining_defect <= tol;
    let split = if pass { Some(split_colligation(v, tol)?) } else { None };
    Ok(WeakConverseReport {
        pass,
        identity_defect,
        inverted_scalar_defect,
        inverse_vs_adjoint,
        block_vs_direct,
        annihilation_defect,
        d3_min_singular_value,
        intertwining_defect,
        split,
    })
}
