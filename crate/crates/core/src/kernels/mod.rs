//! Kernels sampled on finite grids: Agler decompositions of two-variable
//! Schur functions and de Branges–Rovnyak tests on the disc, polydisc and ball.

pub(crate) mod agler;
mod dbr;
mod reconstruct;

pub use agler::{agler_kernels_of, verify_agler_decomposition, AglerCheck};
pub use dbr::{dbr_test_ball, dbr_test_disc, dbr_test_nf, dbr_test_polydisc, DbrReport, NfReport, PolydiscReport};
pub use reconstruct::{dbr_reconstruct_disc, Reconstruction, ThetaRealization, RANK_CAP};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::function::{Ambient, FunctionError, PointGrid};
use crate::json::{matrix_to_rows, rows_to_matrix, Rows};
use crate::numlin::{cr, fro, is_psd, CMatrix, LinalgError, PsdReport};

/// Kernels with a larger value dimension are refused.
pub const MAX_VALUE_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("colligation is not co-isometric (defect {defect:.3e})")]
    NotCoisometric { defect: f64 },
    #[error("Agler identity violated: max residual {residual:.3e}")]
    IdentityViolated { residual: f64 },
    #[error("kernels live on different grids or value dimensions")]
    GridMismatch,
    #[error("kernel is not a de Branges-Rovnyak kernel (lambda_min {min_eigenvalue:.3e})")]
    NotDbr { min_eigenvalue: f64 },
    #[error("kernel itself is not positive (lambda_min {min_eigenvalue:.3e})")]
    KernelNotPsd { min_eigenvalue: f64 },
    #[error("reconstruction needs {needed} state dimensions, cap is {cap}")]
    RankOverflow { needed: usize, cap: usize },
    #[error("reconstructed kernel misses the input by {residual:.3e} (allowed {allowed:.3e})")]
    ContractViolated { residual: f64, allowed: f64 },
    #[error("malformed kernel: {0}")]
    Malformed(String),
    #[error("expected a {expected} grid, got {found}")]
    WrongAmbient { expected: String, found: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Colligation(#[from] crate::colligation::ColligationError),
}

impl KernelError {
    /// Variant name used in reports; wrapped errors report their own name.
    pub fn name(&self) -> &'static str {
        match self {
            KernelError::NotCoisometric { .. } => "NotCoisometric",
            KernelError::IdentityViolated { .. } => "IdentityViolated",
            KernelError::GridMismatch => "GridMismatch",
            KernelError::NotDbr { .. } => "NotDbr",
            KernelError::KernelNotPsd { .. } => "KernelNotPsd",
            KernelError::RankOverflow { .. } => "RankOverflow",
            KernelError::ContractViolated { .. } => "ContractViolated",
            KernelError::Malformed(_) => "Malformed",
            KernelError::WrongAmbient { .. } => "WrongAmbient",
            KernelError::Linalg(e) => e.name(),
            KernelError::Function(e) => e.name(),
            KernelError::Colligation(e) => e.name(),
        }
    }
}

pub type Result<T, E = KernelError> = std::result::Result<T, E>;

/// `K(z_i, z_j)` for every ordered pair of grid points, each `dim x dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "KernelJson", try_from = "KernelJson")]
pub struct SampledKernel {
    grid: PointGrid,
    dim: usize,
    values: Vec<CMatrix>,
}

/// `values[i * n + j]` holds `K(z_i, z_j)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct KernelJson {
    grid: PointGrid,
    dim: usize,
    values: Vec<Rows>,
}

impl From<SampledKernel> for KernelJson {
    fn from(k: SampledKernel) -> Self {
        KernelJson { grid: k.grid, dim: k.dim, values: k.values.iter().map(matrix_to_rows).collect() }
    }
}

impl TryFrom<KernelJson> for SampledKernel {
    type Error = KernelError;
    fn try_from(j: KernelJson) -> Result<Self> {
        let values =
            j.values.iter().map(|r| rows_to_matrix(r).map_err(KernelError::Malformed)).collect::<Result<Vec<_>>>()?;
        SampledKernel::new(j.grid, j.dim, values)
    }
}

impl SampledKernel {
    pub fn new(grid: PointGrid, dim: usize, values: Vec<CMatrix>) -> Result<Self> {
        let n = grid.len();
        if dim == 0 || dim > MAX_VALUE_DIM {
            return Err(KernelError::Malformed(format!("value dimension {dim} outside 1..={MAX_VALUE_DIM}")));
        }
        if values.len() != n * n {
            return Err(KernelError::Malformed(format!("{} values for {n} grid points", values.len())));
        }
        if let Some(bad) = values.iter().position(|v| v.shape() != (dim, dim)) {
            return Err(KernelError::Malformed(format!(
                "value {bad} is {:?}, expected {dim}x{dim}",
                values[bad].shape()
            )));
        }
        Ok(SampledKernel { grid, dim, values })
    }

    pub fn from_fn(grid: &PointGrid, dim: usize, f: impl Fn(&[Complex64], &[Complex64]) -> CMatrix) -> Result<Self> {
        let pts = grid.points();
        let values = pts.iter().flat_map(|z| pts.iter().map(|w| f(z, w))).collect();
        SampledKernel::new(grid.clone(), dim, values)
    }

    pub fn scalar_from_fn(grid: &PointGrid, f: impl Fn(&[Complex64], &[Complex64]) -> Complex64) -> Self {
        SampledKernel::from_fn(grid, 1, |z, w| CMatrix::from_element(1, 1, f(z, w))).expect("scalar values are 1x1")
    }

    /// `c * I` at every pair.
    pub fn constant(grid: &PointGrid, dim: usize, c: Complex64) -> Result<Self> {
        SampledKernel::from_fn(grid, dim, |_, _| CMatrix::identity(dim, dim) * c)
    }

    /// Szegő kernel `prod_i 1 / (1 - z_i conj(w_i))` on a disc or polydisc grid.
    pub fn szego(grid: &PointGrid) -> Result<Self> {
        if !grid.ambient().is_polydisc_like() {
            return Err(KernelError::WrongAmbient {
                expected: "disc or polydisc".into(),
                found: grid.ambient().to_string(),
            });
        }
        Ok(SampledKernel::scalar_from_fn(grid, |z, w| 1.0 / polydisc_factor(z, w)))
    }

    /// Drury–Arveson kernel `1 / (1 - <z, w>)` on a ball grid.
    pub fn drury_arveson(grid: &PointGrid) -> Result<Self> {
        if !matches!(grid.ambient(), Ambient::Ball(_)) {
            return Err(KernelError::WrongAmbient { expected: "ball".into(), found: grid.ambient().to_string() });
        }
        Ok(SampledKernel::scalar_from_fn(grid, |z, w| 1.0 / (1.0 - inner(z, w))))
    }

    pub fn grid(&self) -> &PointGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn value(&self, i: usize, j: usize) -> &CMatrix {
        &self.values[i * self.len() + j]
    }

    /// Block Gram matrix `[K(z_i, z_j)]_{i,j}`.
    pub fn gram(&self) -> CMatrix {
        let (n, d) = (self.len(), self.dim);
        let mut g = CMatrix::zeros(n * d, n * d);
        for i in 0..n {
            for j in 0..n {
                g.view_mut((i * d, j * d), (d, d)).copy_from(self.value(i, j));
            }
        }
        g
    }

    /// `max ||K(z,w) - K(w,z)^*||_F` over the grid.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| fro(&(self.value(i, j) - self.value(j, i).adjoint())))
            .fold(0.0, f64::max)
    }

    pub fn psd_report(&self, tol: f64) -> Result<PsdReport> {
        Ok(is_psd(&self.gram(), tol)?)
    }

    /// New kernel `s(z, w) * K(z, w)` (Hadamard product with a scalar kernel),
    /// optionally plus `c(z, w) * I`.
    pub fn hadamard(
        &self,
        scale: impl Fn(&[Complex64], &[Complex64]) -> Complex64,
        shift: impl Fn(&[Complex64], &[Complex64]) -> Complex64,
    ) -> SampledKernel {
        let n = self.len();
        let pts = self.grid.points();
        let eye = CMatrix::identity(self.dim, self.dim);
        let values = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.value(i, j) * scale(&pts[i], &pts[j]) + &eye * shift(&pts[i], &pts[j]))
            .collect();
        SampledKernel { grid: self.grid.clone(), dim: self.dim, values }
    }

    /// `max ||K(z,w) - L(z,w)||_F`.
    pub fn max_diff(&self, other: &SampledKernel) -> Result<f64> {
        self.require_compatible(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| fro(&(a - b))).fold(0.0, f64::max))
    }

    pub(crate) fn require_compatible(&self, other: &SampledKernel) -> Result<()> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(KernelError::GridMismatch);
        }
        Ok(())
    }
}

/// `prod_i (1 - z_i conj(w_i))`.
pub(crate) fn polydisc_factor(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).fold(cr(1.0), |acc, (a, b)| acc * (1.0 - a * b.conj()))
}

/// `<z, w> = sum_i z_i conj(w_i)`.
pub(crate) fn inner(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}
