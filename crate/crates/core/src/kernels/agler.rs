use num_complex::Complex64;
use serde::Serialize;

use super::{KernelError, Result, SampledKernel};
use crate::colligation::{Colligation, ColligationError, RESOLVENT_CONDITION_LIMIT};
use crate::function::{Evaluable2, Point2, PointGrid};
use crate::numlin::{condition_number, fro, CMatrix};

/// `H(z) = B (I - E(z) D)^{-1}` as a `1 x h` row.
pub(crate) fn state_row(v: &Colligation, z: &[Complex64]) -> Result<CMatrix> {
    let h = v.h();
    if h == 0 {
        return Ok(CMatrix::zeros(1, 0));
    }
    let mut m = CMatrix::identity(h, h);
    let mut offset = 0;
    for (&block, &zk) in v.partition().iter().zip(z) {
        for i in offset..offset + block {
            for j in 0..h {
                m[(i, j)] -= zk * v.d()[(i, j)];
            }
        }
        offset += block;
    }
    let condition = condition_number(&m);
    let ill = || ColligationError::ResolventIllConditioned { point: z.to_vec(), condition };
    if !condition.is_finite() || condition > RESOLVENT_CONDITION_LIMIT {
        return Err(ill().into());
    }
    let x = m.transpose().lu().solve(&v.b().transpose()).ok_or_else(ill)?;
    Ok(x.transpose())
}

/// Agler kernels of a co-isometric two-variable colligation:
/// `K_i(z, w) = H(z) P_i H(w)^*` with `P_i` the projection onto the `i`-th
/// state block. The decomposition identity is checked before returning.
pub fn agler_kernels_of(v: &Colligation, grid: &PointGrid, tol: f64) -> Result<(SampledKernel, SampledKernel)> {
    if v.nvars() != 2 {
        return Err(ColligationError::WrongVariables { expected: 2, found: v.nvars() }.into());
    }
    let block = v.block();
    let defect = fro(&(&block * block.adjoint() - CMatrix::identity(block.nrows(), block.nrows())));
    if defect > tol * (block.nrows() as f64).sqrt() {
        return Err(KernelError::NotCoisometric { defect });
    }
    let h1 = v.partition()[0];
    let rows = grid.points().iter().map(|z| state_row(v, z)).collect::<Result<Vec<_>>>()?;
    let n = grid.len();
    let part = |i: usize, j: usize, first: bool| {
        let (lo, hi) = if first { (0, h1) } else { (h1, v.h()) };
        let mut acc = Complex64::default();
        for k in lo..hi {
            acc += rows[i][(0, k)] * rows[j][(0, k)].conj();
        }
        CMatrix::from_element(1, 1, acc)
    };
    let pairs = || (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)));
    let k1 = SampledKernel::new(grid.clone(), 1, pairs().map(|(i, j)| part(i, j, true)).collect())?;
    let k2 = SampledKernel::new(grid.clone(), 1, pairs().map(|(i, j)| part(i, j, false)).collect())?;

    let check = verify_agler_decomposition(v, &k1, &k2, tol)?;
    if check.max_residual > tol {
        return Err(KernelError::IdentityViolated { residual: check.max_residual });
    }
    Ok((k1, k2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AglerCheck {
    pub pass: bool,
    pub max_residual: f64,
    pub argmax: Option<(Point2, Point2)>,
    pub k1_psd: bool,
    pub k2_psd: bool,
    pub k1_min_eigenvalue: Option<f64>,
    pub k2_min_eigenvalue: Option<f64>,
}

/// `1 - phi(z) conj(phi(w)) = (1 - z1 conj(w1)) K1 + (1 - z2 conj(w2)) K2` at every
/// grid pair, together with positivity of both kernels.
pub fn verify_agler_decomposition(
    phi: &dyn Evaluable2,
    k1: &SampledKernel,
    k2: &SampledKernel,
    tol: f64,
) -> Result<AglerCheck> {
    k1.require_compatible(k2)?;
    if k1.dim() != 1 || k1.grid().ambient().dimension() != 2 {
        return Err(KernelError::GridMismatch);
    }
    let pts: Vec<Point2> = k1.grid().points2().collect();
    let values = pts.iter().map(|&z| phi.eval(z)).collect::<Result<Vec<_>, _>>()?;
    let mut max_residual = 0.0f64;
    let mut argmax = None;
    for (i, z) in pts.iter().enumerate() {
        for (j, w) in pts.iter().enumerate() {
            let lhs = 1.0 - values[i] * values[j].conj();
            let rhs = (1.0 - z[0] * w[0].conj()) * k1.value(i, j)[(0, 0)]
                + (1.0 - z[1] * w[1].conj()) * k2.value(i, j)[(0, 0)];
            let r = (lhs - rhs).norm();
            if argmax.is_none() || r > max_residual {
                max_residual = r;
                argmax = Some((*z, *w));
            }
        }
    }
    let p1 = k1.psd_report(tol)?;
    let p2 = k2.psd_report(tol)?;
    Ok(AglerCheck {
        pass: max_residual <= tol && p1.psd && p2.psd,
        max_residual,
        argmax,
        k1_psd: p1.psd,
        k2_psd: p2.psd,
        k1_min_eigenvalue: p1.min_eigenvalue,
        k2_min_eigenvalue: p2.min_eigenvalue,
    })
}
