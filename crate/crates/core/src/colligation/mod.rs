//! Colligations `V = [[a, B], [C, D]]` and their transfer functions.

mod model;
mod strip;

pub use model::{model_colligation, Blaschke};
pub use strip::{
    strip_monomial, strip_monomial_rational, strip_monomial_rational_z2, strip_monomial_z2, Stripped, StrippedRational,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::function::{Evaluable2, FunctionError, Point2, PowerSeries2};
use crate::json::{matrix_to_rows, rows_to_matrix, Rows};
use crate::numlin::{classify, condition_number, fro, spectral_radius, CMatrix, LinalgError};

/// Resolvents `I - E(z) D` with a larger condition number are refused.
pub const RESOLVENT_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColligationError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("expected a {expected}-variable colligation, partition has {found} blocks")]
    WrongVariables { expected: usize, found: usize },
    #[error("lower-left D block is not zero (norm {defect:.3e})")]
    NotStructured { defect: f64 },
    #[error("resolvent is ill-conditioned at {point:?} (condition {condition:.3e})")]
    ResolventIllConditioned { point: Vec<Complex64>, condition: f64 },
    #[error("point {point:?} lies outside the closed polydisc")]
    OutsideDomain { point: Vec<Complex64> },
    #[error("Blaschke zero {zero} is not strictly inside the disc")]
    ZeroOnBoundary { zero: Complex64 },
    #[error("unimodular constant has modulus {0}")]
    NotUnimodular(f64),
    #[error("not divisible in z{variable}: {reason}")]
    NotDivisible { variable: usize, p: usize, reason: String },
    #[error("colligation has non-finite entries")]
    NonFinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

impl ColligationError {
    /// Variant name used in reports; wrapped errors report their own name.
    pub fn name(&self) -> &'static str {
        match self {
            ColligationError::Dimension(_) => "Dimension",
            ColligationError::WrongVariables { .. } => "WrongVariables",
            ColligationError::NotStructured { .. } => "NotStructured",
            ColligationError::ResolventIllConditioned { .. } => "ResolventIllConditioned",
            ColligationError::OutsideDomain { .. } => "OutsideDomain",
            ColligationError::ZeroOnBoundary { .. } => "ZeroOnBoundary",
            ColligationError::NotUnimodular(_) => "NotUnimodular",
            ColligationError::NotDivisible { .. } => "NotDivisible",
            ColligationError::NonFinite => "NonFinite",
            ColligationError::Linalg(e) => e.name(),
            ColligationError::Function(e) => e.name(),
        }
    }
}

pub type Result<T, E = ColligationError> = std::result::Result<T, E>;

/// `V = [[a, B], [C, D]]` on `C + H`, with `H` split by `partition`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ColligationJson", try_from = "ColligationJson")]
pub struct Colligation {
    a: Complex64,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
    partition: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ColligationJson {
    a: Complex64,
    #[serde(rename = "B")]
    b: Rows,
    #[serde(rename = "C")]
    c: Rows,
    #[serde(rename = "D")]
    d: Rows,
    partition: Vec<usize>,
}

impl From<Colligation> for ColligationJson {
    fn from(v: Colligation) -> Self {
        ColligationJson {
            a: v.a,
            b: vec![(0..v.h()).map(|j| v.b[(0, j)]).collect()],
            c: matrix_to_rows(&v.c),
            d: matrix_to_rows(&v.d),
            partition: v.partition,
        }
    }
}

impl TryFrom<ColligationJson> for Colligation {
    type Error = ColligationError;
    fn try_from(j: ColligationJson) -> Result<Self> {
        let h: usize = j.partition.iter().sum();
        let parse = |rows: &Rows, name: &str, shape: (usize, usize)| -> Result<CMatrix> {
            let m = rows_to_matrix(rows).map_err(|e| ColligationError::Dimension(format!("{name}: {e}")))?;
            if m.is_empty() && shape.0 * shape.1 == 0 {
                return Ok(CMatrix::zeros(shape.0, shape.1));
            }
            Ok(m)
        };
        let b = parse(&j.b, "B", (1, h))?;
        let c = parse(&j.c, "C", (h, 1))?;
        let d = parse(&j.d, "D", (h, h))?;
        Colligation::new(j.a, b, c, d, j.partition)
    }
}

/// Named sub-blocks of a two-variable colligation.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    pub b1: CMatrix,
    pub b2: CMatrix,
    pub c1: CMatrix,
    pub c2: CMatrix,
    pub d1: CMatrix,
    pub d2: CMatrix,
    /// Lower-left block; zero in the structured form.
    pub lower_left: CMatrix,
    /// Lower-right block (`D3` in the structured form, `D4` in the general 2x2 split).
    pub d4: CMatrix,
}

impl Blocks {
    /// Lower-right block under its structured-form name.
    pub fn d3(&self) -> &CMatrix {
        &self.d4
    }
}

impl Colligation {
    pub fn new(a: Complex64, b: CMatrix, c: CMatrix, d: CMatrix, partition: Vec<usize>) -> Result<Self> {
        let h: usize = partition.iter().sum();
        if partition.is_empty() {
            return Err(ColligationError::Dimension("partition must have at least one block".into()));
        }
        if b.shape() != (1, h) || c.shape() != (h, 1) || d.shape() != (h, h) {
            return Err(ColligationError::Dimension(format!(
                "partition sums to {h} but B is {:?}, C is {:?}, D is {:?}",
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        let finite = |m: &CMatrix| m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !(a.re.is_finite() && a.im.is_finite() && finite(&b) && finite(&c) && finite(&d)) {
            return Err(ColligationError::NonFinite);
        }
        Ok(Colligation { a, b, c, d, partition })
    }

    /// Splits a `(1 + h) x (1 + h)` block matrix.
    pub fn from_block(v: &CMatrix, partition: Vec<usize>) -> Result<Self> {
        let h: usize = partition.iter().sum();
        if v.shape() != (h + 1, h + 1) {
            return Err(ColligationError::Dimension(format!(
                "V is {:?}, partition needs {}x{}",
                v.shape(),
                h + 1,
                h + 1
            )));
        }
        Colligation::new(
            v[(0, 0)],
            v.view((0, 1), (1, h)).into_owned(),
            v.view((1, 0), (h, 1)).into_owned(),
            v.view((1, 1), (h, h)).into_owned(),
            partition,
        )
    }

    /// Constant function `a` with trivial state space in `nvars` variables.
    pub fn constant(a: Complex64, nvars: usize) -> Self {
        Colligation {
            a,
            b: CMatrix::zeros(1, 0),
            c: CMatrix::zeros(0, 1),
            d: CMatrix::zeros(0, 0),
            partition: vec![0; nvars.max(1)],
        }
    }

    pub fn block(&self) -> CMatrix {
        let h = self.h();
        let mut v = CMatrix::zeros(h + 1, h + 1);
        v[(0, 0)] = self.a;
        v.view_mut((0, 1), (1, h)).copy_from(&self.b);
        v.view_mut((1, 0), (h, 1)).copy_from(&self.c);
        v.view_mut((1, 1), (h, h)).copy_from(&self.d);
        v
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn h(&self) -> usize {
        self.d.nrows()
    }

    pub fn nvars(&self) -> usize {
        self.partition.len()
    }

    fn require_vars(&self, n: usize) -> Result<()> {
        if self.nvars() == n {
            Ok(())
        } else {
            Err(ColligationError::WrongVariables { expected: n, found: self.nvars() })
        }
    }

    /// Sub-blocks for a two-variable partition `[h1, h2]`.
    pub fn blocks(&self) -> Result<Blocks> {
        self.require_vars(2)?;
        let (h1, h2) = (self.partition[0], self.partition[1]);
        Ok(Blocks {
            b1: self.b.view((0, 0), (1, h1)).into_owned(),
            b2: self.b.view((0, h1), (1, h2)).into_owned(),
            c1: self.c.view((0, 0), (h1, 1)).into_owned(),
            c2: self.c.view((h1, 0), (h2, 1)).into_owned(),
            d1: self.d.view((0, 0), (h1, h1)).into_owned(),
            d2: self.d.view((0, h1), (h1, h2)).into_owned(),
            lower_left: self.d.view((h1, 0), (h2, h1)).into_owned(),
            d4: self.d.view((h1, h1), (h2, h2)).into_owned(),
        })
    }

    /// Diagonal of `E(z)`: each coordinate repeated over its partition block.
    fn e_diag(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.partition.iter().zip(z).flat_map(|(&k, &zk)| std::iter::repeat_n(zk, k)).collect()
    }

    /// `a + B (I - E(z) D)^{-1} E(z) C` for any number of variables.
    pub fn transfer(&self, z: &[Complex64]) -> Result<Complex64> {
        self.require_vars(z.len())?;
        if z.iter().any(|x| x.norm() > 1.0 + 1e-12) {
            return Err(ColligationError::OutsideDomain { point: z.to_vec() });
        }
        let h = self.h();
        if h == 0 {
            return Ok(self.a);
        }
        let e = self.e_diag(z);
        let mut m = CMatrix::identity(h, h);
        let mut rhs = CMatrix::zeros(h, 1);
        for i in 0..h {
            for j in 0..h {
                m[(i, j)] -= e[i] * self.d[(i, j)];
            }
            rhs[(i, 0)] = e[i] * self.c[(i, 0)];
        }
        let condition = condition_number(&m);
        if !condition.is_finite() || condition > RESOLVENT_CONDITION_LIMIT {
            return Err(ColligationError::ResolventIllConditioned { point: z.to_vec(), condition });
        }
        let x = m.lu().solve(&rhs).ok_or(ColligationError::ResolventIllConditioned { point: z.to_vec(), condition })?;
        Ok(self.a + (&self.b * x)[(0, 0)])
    }

    /// `a + z B (I - z D)^{-1} C`.
    pub fn transfer_1d(&self, z: Complex64) -> Result<Complex64> {
        self.require_vars(1)?;
        self.transfer(&[z])
    }

    /// `a + B (I - E(z) D)^{-1} E(z) C` with `E(z) = z1 I ⊕ z2 I`.
    pub fn transfer_2d(&self, z: Point2) -> Result<Complex64> {
        self.require_vars(2)?;
        self.transfer(&z)
    }

    /// Taylor coefficients of a structured (zero lower-left block) colligation
    /// from the closed-form block expansion.
    pub fn series_2d(&self, n1: usize, n2: usize, tol: f64) -> Result<PowerSeries2> {
        let bl = self.blocks()?;
        let defect = fro(&bl.lower_left);
        if defect > tol {
            return Err(ColligationError::NotStructured { defect });
        }
        let mut s = PowerSeries2::zeros(n1, n2);
        s.set(0, 0, self.a);
        // rows[i-1] = B1 D1^{i-1}, cols[j-1] = D3^{j-1} C2
        let mut rows = Vec::with_capacity(n1);
        let mut acc = bl.b1.clone();
        for _ in 0..n1 {
            rows.push(acc.clone());
            acc = &acc * &bl.d1;
        }
        let mut cols = Vec::with_capacity(n2);
        let mut acc = bl.c2.clone();
        for _ in 0..n2 {
            cols.push(acc.clone());
            acc = &bl.d4 * &acc;
        }
        let scalar = |m: CMatrix| if m.is_empty() { Complex64::default() } else { m[(0, 0)] };
        for i in 1..=n1 {
            s.set(i, 0, scalar(&rows[i - 1] * &bl.c1));
        }
        for j in 1..=n2 {
            s.set(0, j, scalar(&bl.b2 * &cols[j - 1]));
        }
        for i in 1..=n1 {
            let left = &rows[i - 1] * &bl.d2;
            for j in 1..=n2 {
                s.set(i, j, scalar(&left * &cols[j - 1]));
            }
        }
        Ok(s)
    }

    /// Taylor coefficients of `tau_V` for an arbitrary two-variable colligation,
    /// from the word expansion of `(I - E D)^{-1} E C`.
    pub fn taylor_2d(&self, n1: usize, n2: usize) -> Result<PowerSeries2> {
        self.require_vars(2)?;
        let h = self.h();
        let h1 = self.partition[0];
        let proj = |v: &CMatrix, first: bool| {
            let mut out = v.clone();
            for i in 0..h {
                if (i < h1) != first {
                    out[(i, 0)] = Complex64::default();
                }
            }
            out
        };
        let mut s = PowerSeries2::zeros(n1, n2);
        s.set(0, 0, self.a);
        if h == 0 {
            return Ok(s);
        }
        let mut x: Vec<Vec<CMatrix>> = vec![vec![CMatrix::zeros(h, 1); n2 + 1]; n1 + 1];
        for total in 1..=(n1 + n2) {
            for i in 0..=total.min(n1) {
                let j = total - i;
                if j > n2 {
                    continue;
                }
                let v = if total == 1 {
                    proj(&self.c, i == 1)
                } else {
                    let mut v = CMatrix::zeros(h, 1);
                    if i > 0 {
                        v += proj(&(&self.d * &x[i - 1][j]), true);
                    }
                    if j > 0 {
                        v += proj(&(&self.d * &x[i][j - 1]), false);
                    }
                    v
                };
                s.set(i, j, (&self.b * &v)[(0, 0)]);
                x[i][j] = v;
            }
        }
        Ok(s)
    }

    pub fn structure_report(&self, tol: f64) -> Result<StructureReport> {
        let bl = self.blocks()?;
        let cls = classify(&self.block(), tol);
        let radii = [spectral_radius(&bl.d1)?, spectral_radius(&bl.d4)?];
        let factorization_defect = fro(&(&bl.d2 * self.a - &bl.c1 * &bl.b2));
        let lower_left_defect = fro(&bl.lower_left);
        Ok(StructureReport {
            is_isometry: cls.isometry,
            is_coisometry: cls.coisometry,
            is_unitary: cls.unitary,
            is_contraction: cls.contraction,
            lower_left_zero: lower_left_defect <= tol,
            lower_left_defect,
            c0dot_blocks: radii,
            c0dot: [radii[0] < 1.0 - tol, radii[1] < 1.0 - tol],
            factorization_condition: factorization_defect <= tol,
            factorization_defect,
        })
    }
}

impl Evaluable2 for Colligation {
    fn eval(&self, z: Point2) -> crate::function::Result<Complex64> {
        self.transfer_2d(z).map_err(|e| match e {
            ColligationError::ResolventIllConditioned { point, condition } => {
                FunctionError::ResolventIllConditioned { point, condition }
            }
            ColligationError::OutsideDomain { point } => {
                FunctionError::OutsideDomain { point, ambient: "closed bidisc".into() }
            }
            other => FunctionError::Malformed(other.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub is_isometry: bool,
    pub is_coisometry: bool,
    pub is_unitary: bool,
    pub is_contraction: bool,
    pub lower_left_zero: bool,
    pub lower_left_defect: f64,
    /// Spectral radii of the two diagonal blocks of `D`.
    pub c0dot_blocks: [f64; 2],
    pub c0dot: [bool; 2],
    pub factorization_condition: bool,
    pub factorization_defect: f64,
}
