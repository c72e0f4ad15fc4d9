use num_complex::Complex64;
use serde::Serialize;

use super::Result;
use crate::colligation::{Blocks, Colligation, ColligationError};
use crate::numlin::{cr, fro, CMatrix};

/// Maximum number of terms in every truncated geometric sum.
pub const SERIES_MAX_TERMS: usize = 64;
/// Summation stops once a term drops below this norm.
pub const SERIES_TERM_FLOOR: f64 = 1e-14;

/// Entries of `Y_0^* Y_0` and `Y_p^* Y_0` computed from the colligation blocks
/// rather than from a Toeplitz truncation. For an isometric structured
/// colligation whose diagonal blocks have spectral radius below one,
/// `y[0] = 1` and everything else vanishes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofDiagnostics {
    /// `y[k] = sum_{i,j} phi_{i,j} conj(phi_{i,j+k})`, `k = 0..=k_max`.
    pub y: Vec<Complex64>,
    /// `max |c(p, d)|` over `1 <= p <= k_max`, `|d| <= k_max`.
    pub c_max: f64,
    /// `|| sum_{m<M} D1*^m B1* B1 D1^m - I ||_F` for the truncated sum.
    pub gram_defect_first: f64,
    /// `|| sum_{m<M} D3*^m (B2* B2 + D2* D2) D3^m - I ||_F`.
    pub gram_defect_second: f64,
    /// Terms actually used in the state-space Gram sum.
    pub gram_terms: usize,
}

fn scalar(m: CMatrix) -> Complex64 {
    if m.is_empty() {
        cr(0.0)
    } else {
        m[(0, 0)]
    }
}

/// `sum_{m} A*^m Q A^m` until the term is negligible or the cap is hit.
fn gram_sum(a: &CMatrix, q: &CMatrix) -> (CMatrix, usize) {
    let mut total = q.clone();
    let mut term = q.clone();
    let mut used = 1;
    while used < SERIES_MAX_TERMS {
        term = a.adjoint() * &term * a;
        if fro(&term) < SERIES_TERM_FLOOR {
            break;
        }
        total += &term;
        used += 1;
    }
    (total, used)
}

struct Sequences {
    /// `g_0 = a`, `g_j = B2 D3^{j-1} C2`
    g: Vec<Complex64>,
    /// `x_0 = C1`, `x_j = D2 D3^{j-1} C2`
    x: Vec<CMatrix>,
}

fn sequences(a: Complex64, bl: &Blocks, len: usize) -> Sequences {
    let mut g = vec![a];
    let mut x = vec![bl.c1.clone()];
    let mut tail = bl.c2.clone();
    for _ in 1..len {
        g.push(scalar(&bl.b2 * &tail));
        x.push(&bl.d2 * &tail);
        tail = bl.d3() * &tail;
    }
    Sequences { g, x }
}

pub fn proof_diagnostics(v: &Colligation, k_max: usize, tol: f64) -> Result<ProofDiagnostics> {
    let bl = v.blocks()?;
    let defect = fro(&bl.lower_left);
    if defect > tol {
        return Err(ColligationError::NotStructured { defect }.into());
    }
    let (g1, gram_terms) = gram_sum(&bl.d1, &(bl.b1.adjoint() * &bl.b1));
    let h1 = bl.d1.nrows();
    let gram_defect_first = fro(&(&g1 - CMatrix::identity(h1, h1)));
    let h2 = bl.d4.nrows();
    let (g2, _) = gram_sum(bl.d3(), &(bl.b2.adjoint() * &bl.b2 + bl.d2.adjoint() * &bl.d2));
    let gram_defect_second = fro(&(&g2 - CMatrix::identity(h2, h2)));

    let len = SERIES_MAX_TERMS + k_max + 1;
    let seq = sequences(v.a(), &bl, len);
    let small = |j: usize| seq.g[j].norm() < SERIES_TERM_FLOOR && seq.x[j].norm() < SERIES_TERM_FLOOR;

    let y = (0..=k_max)
        .map(|k| {
            let mut acc = cr(0.0);
            for j in 0..SERIES_MAX_TERMS {
                if j > 0 && small(j) && small(j + k) {
                    break;
                }
                acc += seq.g[j] * seq.g[j + k].conj() + scalar(seq.x[j + k].adjoint() * &g1 * &seq.x[j]);
            }
            acc
        })
        .collect();

    // c(p, d) = sum_j [conj(g_j) B1 D1^{p-1} + x_j^* G1 D1^p] x_{j+d}
    let mut c_max = 0.0f64;
    let mut d1_pow = CMatrix::identity(h1, h1);
    for _ in 1..=k_max {
        let head = &bl.b1 * &d1_pow;
        d1_pow = &d1_pow * &bl.d1;
        let g1_d1p = &g1 * &d1_pow;
        for d in -(k_max as i64)..=(k_max as i64) {
            let mut acc = cr(0.0);
            let start = (-d).max(0) as usize;
            for j in start..start + SERIES_MAX_TERMS {
                let jd = (j as i64 + d) as usize;
                if j > start && small(j) && small(jd) {
                    break;
                }
                acc += seq.g[j].conj() * scalar(&head * &seq.x[jd]) + scalar(seq.x[j].adjoint() * &g1_d1p * &seq.x[jd]);
            }
            c_max = c_max.max(acc.norm());
        }
    }

    Ok(ProofDiagnostics { y, c_max, gram_defect_first, gram_defect_second, gram_terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::{model_colligation, Blaschke};
    use crate::numlin::{c, DEFAULT_TOL};
    use crate::toeplitz::{phi_blocks_from_colligation, ToeplitzError};

    fn compose(v1: &Colligation, v2: &Colligation) -> Colligation {
        let (h1, h2) = (v1.h(), v2.h());
        let mut v = CMatrix::zeros(1 + h1 + h2, 1 + h1 + h2);
        v[(0, 0)] = v1.a() * v2.a();
        v.view_mut((0, 1), (1, h1)).copy_from(v1.b());
        v.view_mut((0, 1 + h1), (1, h2)).copy_from(&(v2.b() * v1.a()));
        v.view_mut((1, 0), (h1, 1)).copy_from(&(v1.c() * v2.a()));
        v.view_mut((1, 1), (h1, h1)).copy_from(v1.d());
        v.view_mut((1, 1 + h1), (h1, h2)).copy_from(&(v1.c() * v2.b()));
        v.view_mut((1 + h1, 0), (h2, 1)).copy_from(v2.c());
        v.view_mut((1 + h1, 1 + h1), (h2, h2)).copy_from(v2.d());
        Colligation::from_block(&v, vec![h1, h2]).unwrap()
    }

    fn fixture() -> Colligation {
        let v1 = model_colligation(&Blaschke::new(cr(1.0), vec![c(0.3, 0.1), c(-0.2, 0.4)]).unwrap()).unwrap();
        let v2 = model_colligation(&Blaschke::new(c(0.0, 1.0), vec![c(0.5, -0.1)]).unwrap()).unwrap();
        compose(&v1, &v2)
    }

    #[test]
    fn isometric_structured_colligation_has_clean_diagnostics() {
        let d = proof_diagnostics(&fixture(), 8, DEFAULT_TOL).unwrap();
        assert!((d.y[0] - cr(1.0)).norm() < 1e-12);
        assert!(d.y[1..].iter().all(|y| y.norm() < 1e-12), "{:?}", d.y);
        assert!(d.c_max < 1e-12);
        assert!(d.gram_defect_first < 1e-12 && d.gram_defect_second < 1e-12);
    }

    #[test]
    fn y_matches_the_toeplitz_entries() {
        // The scaled colligation is no longer isometric, so y_k carries information.
        let v = fixture();
        let scaled =
            Colligation::new(v.a() * 0.8, v.b() * cr(0.8), v.c().clone(), v.d() * cr(0.9), v.partition().to_vec())
                .unwrap();
        let d = proof_diagnostics(&scaled, 4, DEFAULT_TOL).unwrap();
        let m = 80;
        let t = phi_blocks_from_colligation(&scaled, m, DEFAULT_TOL).unwrap();
        let phi = |i: usize, j: usize| t.blocks()[i][(j, 0)];
        for k in 0..=4 {
            let mut direct = cr(0.0);
            for i in 0..m {
                for j in 0..m - k {
                    direct += phi(i, j) * phi(i, j + k).conj();
                }
            }
            assert!((direct - d.y[k]).norm() < 1e-10, "k = {k}: {direct} vs {}", d.y[k]);
        }
    }

    #[test]
    fn closed_form_y_agrees_for_k_positive() {
        let v = fixture();
        let scaled =
            Colligation::new(v.a(), v.b() * cr(0.7), v.c() * cr(0.9), v.d() * cr(0.8), v.partition().to_vec()).unwrap();
        let bl = scaled.blocks().unwrap();
        let d = proof_diagnostics(&scaled, 3, DEFAULT_TOL).unwrap();
        let (g1, _) = gram_sum(&bl.d1, &(bl.b1.adjoint() * &bl.b1));
        let (g2, _) = gram_sum(bl.d3(), &(bl.b2.adjoint() * &bl.b2 + bl.d2.adjoint() * &g1 * &bl.d2));
        let d3a = bl.d3().adjoint();
        let mut pow = CMatrix::identity(bl.d4.nrows(), bl.d4.nrows());
        for k in 1..=3 {
            // pow = D3*^{k-1}
            let lead = bl.c2.adjoint() * &pow;
            let closed = scalar(&lead * bl.b2.adjoint()) * scaled.a()
                + scalar(&lead * bl.d2.adjoint() * &g1 * &bl.c1)
                + scalar(&lead * &d3a * &g2 * &bl.c2);
            assert!((closed - d.y[k]).norm() < 1e-10, "k = {k}");
            pow = &pow * &d3a;
        }
    }

    #[test]
    fn unstructured_input_is_rejected() {
        let s = 0.75f64.sqrt();
        let v = CMatrix::from_row_slice(
            3,
            3,
            &[cr(-0.5), cr(s), cr(0.0), cr(0.0), cr(0.0), cr(1.0), cr(s), cr(0.5), cr(0.0)],
        );
        let vt = Colligation::from_block(&v, vec![1, 1]).unwrap();
        assert!(matches!(proof_diagnostics(&vt, 2, DEFAULT_TOL), Err(ToeplitzError::Colligation(_))));
    }
}
