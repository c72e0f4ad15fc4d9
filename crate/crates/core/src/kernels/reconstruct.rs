use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dbr::dbr_test_disc;
use super::{KernelError, Result, SampledKernel};
use crate::colligation::{ColligationError, RESOLVENT_CONDITION_LIMIT};
use crate::function::PointGrid;
use crate::json::{matrix_to_rows, rows_to_matrix, Rows};
use crate::numlin::{
    classify, condition_number, fro, nearest_isometry, orthonormal_complement, psd_factor, scaled_tol, CMatrix,
};

/// Largest total state-plus-input dimension a reconstruction may produce.
pub const RANK_CAP: usize = 256;

/// `Theta(z) = A^* + z C^* (I - z D^*)^{-1} B^*` for an isometry
/// `V = [[A, B], [C, D]] : C^e + C^h -> C^f + C^h`, so that `Theta(z)` is `e x f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ThetaJson", try_from = "ThetaJson")]
pub struct ThetaRealization {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ThetaJson {
    /// `[e, f, h]`; needed to restore empty blocks.
    dims: [usize; 3],
    #[serde(rename = "A")]
    a: Rows,
    #[serde(rename = "B")]
    b: Rows,
    #[serde(rename = "C")]
    c: Rows,
    #[serde(rename = "D")]
    d: Rows,
}

impl From<ThetaRealization> for ThetaJson {
    fn from(t: ThetaRealization) -> Self {
        ThetaJson {
            dims: [t.output_dim(), t.input_dim(), t.state_dim()],
            a: matrix_to_rows(&t.a),
            b: matrix_to_rows(&t.b),
            c: matrix_to_rows(&t.c),
            d: matrix_to_rows(&t.d),
        }
    }
}

impl TryFrom<ThetaJson> for ThetaRealization {
    type Error = KernelError;
    fn try_from(j: ThetaJson) -> Result<Self> {
        let [e, f, h] = j.dims;
        let parse = |rows: &Rows, shape: (usize, usize)| -> Result<CMatrix> {
            let m = rows_to_matrix(rows).map_err(KernelError::Malformed)?;
            Ok(if m.is_empty() && shape.0 * shape.1 == 0 { CMatrix::zeros(shape.0, shape.1) } else { m })
        };
        ThetaRealization::new(parse(&j.a, (f, e))?, parse(&j.b, (f, h))?, parse(&j.c, (h, e))?, parse(&j.d, (h, h))?)
    }
}

impl ThetaRealization {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let (f, e) = a.shape();
        let h = d.nrows();
        if b.shape() != (f, h) || c.shape() != (h, e) || d.shape() != (h, h) {
            return Err(KernelError::Malformed(format!(
                "A {:?}, B {:?}, C {:?}, D {:?} are not conformable",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        Ok(ThetaRealization { a, b, c, d })
    }

    /// Splits `V` with input dimension `e` (so state dimension `cols - e`).
    pub fn from_isometry(v: &CMatrix, e: usize) -> Result<Self> {
        let h = v.ncols().checked_sub(e).ok_or_else(|| KernelError::Malformed("e exceeds the column count".into()))?;
        let f = v.nrows().checked_sub(h).ok_or_else(|| KernelError::Malformed("state exceeds the row count".into()))?;
        ThetaRealization::new(
            v.view((0, 0), (f, e)).into_owned(),
            v.view((0, e), (f, h)).into_owned(),
            v.view((f, 0), (h, e)).into_owned(),
            v.view((f, e), (h, h)).into_owned(),
        )
    }

    pub fn output_dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn input_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn state_dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn block(&self) -> CMatrix {
        let (f, e, h) = (self.input_dim(), self.output_dim(), self.state_dim());
        let mut v = CMatrix::zeros(f + h, e + h);
        v.view_mut((0, 0), (f, e)).copy_from(&self.a);
        v.view_mut((0, e), (f, h)).copy_from(&self.b);
        v.view_mut((f, 0), (h, e)).copy_from(&self.c);
        v.view_mut((f, e), (h, h)).copy_from(&self.d);
        v
    }

    /// `V^*` is a co-isometry, i.e. `V` is an isometry.
    pub fn is_coisometric(&self, tol: f64) -> bool {
        classify(&self.block(), tol).isometry
    }

    pub fn eval(&self, z: Complex64) -> Result<CMatrix> {
        let h = self.state_dim();
        let a_star = self.a.adjoint();
        if h == 0 {
            return Ok(a_star);
        }
        let m = CMatrix::identity(h, h) - self.d.adjoint() * z;
        let condition = condition_number(&m);
        let ill = || ColligationError::ResolventIllConditioned { point: vec![z], condition };
        if !condition.is_finite() || condition > RESOLVENT_CONDITION_LIMIT {
            return Err(ill().into());
        }
        let x = m.lu().solve(&self.b.adjoint()).ok_or_else(ill)?;
        Ok(a_star + self.c.adjoint() * x * z)
    }

    /// `K_Theta(z, w) = (I - Theta(z) Theta(w)^*) / (1 - z conj(w))` on a disc grid.
    pub fn kernel(&self, grid: &PointGrid) -> Result<SampledKernel> {
        let e = self.output_dim();
        let values = grid.points1().map(|z| self.eval(z)).collect::<Result<Vec<_>>>()?;
        let pts: Vec<Complex64> = grid.points1().collect();
        SampledKernel::from_fn(grid, e, |z, w| {
            let i = pts.iter().position(|p| *p == z[0]).expect("grid point");
            let j = pts.iter().position(|p| *p == w[0]).expect("grid point");
            (CMatrix::identity(e, e) - &values[i] * values[j].adjoint()) / (1.0 - z[0] * w[0].conj())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    pub theta: ThetaRealization,
    /// `max ||K - K_Theta||_F` over grid pairs.
    pub residual: f64,
    pub allowed: f64,
    pub rank_f: usize,
    pub rank_g: usize,
    /// Codomain directions added to complete the isometry.
    pub padding: usize,
    /// First input coordinate of `Theta` belonging to the padding.
    pub padding_offset: usize,
}

impl Reconstruction {
    /// Same reconstruction with the domain complement sent to the padding
    /// through the unitary `w` instead of the identity.
    pub fn regauge_padding(&self, w: &CMatrix) -> Result<Reconstruction> {
        if w.shape() != (self.padding, self.padding) {
            return Err(KernelError::Malformed(format!("gauge is {:?}, padding is {}", w.shape(), self.padding)));
        }
        let mut v = self.theta.block();
        let rows = v.rows(self.padding_offset, self.padding).into_owned();
        v.rows_mut(self.padding_offset, self.padding).copy_from(&(w * rows));
        let theta = ThetaRealization::from_isometry(&v, self.theta.output_dim())?;
        Ok(Reconstruction { theta, ..self.clone() })
    }
}

/// Realizes a disc kernel passing [`dbr_test_disc`] as `K_Theta` on its grid.
///
/// Factor `I - (1 - z conj(w)) K = F F^*` and `K = G G^*`; the map
/// `[eta; conj(w) G(w)^* eta] -> [F(w)^* eta; G(w)^* eta]` is isometric on its
/// domain and is extended by sending the domain complement to fresh codomain
/// directions. `h` equals the rank of the Gram of `K`.
pub fn dbr_reconstruct_disc(k: &SampledKernel, tol: f64) -> Result<Reconstruction> {
    let test = dbr_test_disc(k, tol)?;
    if !test.kernel_psd {
        return Err(KernelError::KernelNotPsd { min_eigenvalue: test.kernel_min_eigenvalue.unwrap_or(0.0) });
    }
    if !test.is_dbr {
        return Err(KernelError::NotDbr { min_eigenvalue: test.min_eigenvalue.unwrap_or(0.0) });
    }
    let (n, e) = (k.len(), k.dim());
    let pts: Vec<Complex64> = k.grid().points1().collect();
    let residual_gram = k.hadamard(|z, w| z[0] * w[0].conj() - 1.0, |_, _| Complex64::new(1.0, 0.0)).gram();
    let f = psd_factor(&residual_gram, tol)?.factor;
    let g = psd_factor(&k.gram(), tol)?.factor;
    let (rf, rg) = (f.ncols(), g.ncols());

    let mut dom = CMatrix::zeros(e + rg, n * e);
    let mut cod = CMatrix::zeros(rf + rg, n * e);
    for (i, w) in pts.iter().enumerate() {
        let gi = g.view((i * e, 0), (e, rg)).adjoint();
        let fi = f.view((i * e, 0), (e, rf)).adjoint();
        dom.view_mut((0, i * e), (e, e)).copy_from(&CMatrix::identity(e, e));
        dom.view_mut((e, i * e), (rg, e)).copy_from(&(&gi * w.conj()));
        cod.view_mut((0, i * e), (rf, e)).copy_from(&fi);
        cod.view_mut((rf, i * e), (rg, e)).copy_from(&gi);
    }

    let svd = dom.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let cut = scaled_tol(&dom, tol);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&s| svd.singular_values[s] > cut).collect();
    let rho = keep.len();
    let mut u_range = CMatrix::zeros(e + rg, rho);
    for (col, &s) in keep.iter().enumerate() {
        u_range.set_column(col, &u.column(s));
    }
    let u_perp = orthonormal_complement(&u_range, tol);
    let pad = u_perp.ncols();
    let extra = rho.saturating_sub(rf + rg);
    let f_dim = rf + extra + pad;
    if f_dim + rg > RANK_CAP {
        return Err(KernelError::RankOverflow { needed: f_dim + rg, cap: RANK_CAP });
    }

    // Procrustes fit of the range map; extra zero rows keep it tall.
    let x = u_range.adjoint() * &dom;
    let mut target = CMatrix::zeros(rf + extra + rg, rho);
    let fit = &cod * x.adjoint();
    target.view_mut((0, 0), (rf, rho)).copy_from(&fit.view((0, 0), (rf, rho)));
    target.view_mut((rf + extra, 0), (rg, rho)).copy_from(&fit.view((rf, 0), (rg, rho)));
    let w = nearest_isometry(&target);

    let mut v = CMatrix::zeros(f_dim + rg, e + rg);
    let on_range = &w * u_range.adjoint();
    v.view_mut((0, 0), (rf + extra, e + rg)).copy_from(&on_range.view((0, 0), (rf + extra, e + rg)));
    v.view_mut((f_dim, 0), (rg, e + rg)).copy_from(&on_range.view((rf + extra, 0), (rg, e + rg)));
    v.view_mut((rf + extra, 0), (pad, e + rg)).copy_from(&u_perp.adjoint());

    let theta = ThetaRealization::from_isometry(&v, e)?;
    let rebuilt = theta.kernel(k.grid())?;
    let residual = k.max_diff(&rebuilt)?;
    let allowed = 10.0 * tol * (1.0 + fro(&k.gram()));
    if residual > allowed {
        return Err(KernelError::ContractViolated { residual, allowed });
    }
    Ok(Reconstruction { theta, residual, allowed, rank_f: rf, rank_g: rg, padding: pad, padding_offset: rf + extra })
}
