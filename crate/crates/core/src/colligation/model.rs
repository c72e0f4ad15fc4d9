use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Colligation, ColligationError, Result};
use crate::numlin::{cr, CMatrix};

/// Finite Blaschke product `c * prod (z - a_k) / (1 - conj(a_k) z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Blaschke {
    pub unimodular: Complex64,
    pub zeros: Vec<Complex64>,
}

impl Blaschke {
    pub fn new(unimodular: Complex64, zeros: Vec<Complex64>) -> Result<Self> {
        let b = Blaschke { unimodular, zeros };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if (self.unimodular.norm() - 1.0).abs() > 1e-12 {
            return Err(ColligationError::NotUnimodular(self.unimodular.norm()));
        }
        match self.zeros.iter().find(|a| a.norm().partial_cmp(&1.0) != Some(std::cmp::Ordering::Less)) {
            Some(&zero) => Err(ColligationError::ZeroOnBoundary { zero }),
            None => Ok(()),
        }
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(self.unimodular, |acc, &a| acc * (z - a) / (1.0 - a.conj() * z))
    }
}

/// Unitary realization of a finite Blaschke product on its model space,
/// written in the Takenaka–Malmquist basis
/// `e_k = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} b_j`.
///
/// Entries follow from residue calculus on the basis:
/// `B_k = e_k(0)`, `C_k = <(b - b(0)) / z, e_k>`, `D_jk = <S* e_k, e_j>`.
pub fn model_colligation(b: &Blaschke) -> Result<Colligation> {
    b.validate()?;
    let n = b.degree();
    let zeros = &b.zeros;
    let weight: Vec<f64> = zeros.iter().map(|a| (1.0 - a.norm_sqr()).sqrt()).collect();
    // prod_{l in range} (-a_l)
    let neg_prod = |range: std::ops::Range<usize>| range.fold(cr(1.0), |acc, l| acc * -zeros[l]);

    let a = b.unimodular * neg_prod(0..n);
    let mut bm = CMatrix::zeros(1, n);
    let mut cm = CMatrix::zeros(n, 1);
    let mut dm = CMatrix::zeros(n, n);
    for k in 0..n {
        bm[(0, k)] = weight[k] * neg_prod(0..k);
        cm[(k, 0)] = b.unimodular * weight[k] * neg_prod(k + 1..n);
        dm[(k, k)] = zeros[k].conj();
        for j in 0..k {
            dm[(j, k)] = weight[j] * weight[k] * neg_prod(j + 1..k);
        }
    }
    Colligation::new(a, bm, cm, dm, vec![n])
}
