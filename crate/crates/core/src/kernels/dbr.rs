use num_complex::Complex64;
use serde::Serialize;

use super::{inner, polydisc_factor, KernelError, Result, SampledKernel};
use crate::function::Ambient;
use crate::numlin::{cr, fro};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DbrReport {
    pub is_dbr: bool,
    /// Smallest eigenvalue of the Gram of `I - (1 - <z,w>) K`.
    pub min_eigenvalue: Option<f64>,
    pub kernel_psd: bool,
    pub kernel_min_eigenvalue: Option<f64>,
}

fn require_ambient(k: &SampledKernel, ok: bool, expected: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(KernelError::WrongAmbient { expected: expected.into(), found: k.grid().ambient().to_string() })
    }
}

/// Shared test: `K >= 0` and `I - s(z, w) K(z, w) >= 0` on the grid.
fn hadamard_test(
    k: &SampledKernel,
    s: impl Fn(&[Complex64], &[Complex64]) -> Complex64,
    tol: f64,
) -> Result<DbrReport> {
    let kernel = k.psd_report(tol)?;
    let residual = k.hadamard(|z, w| -s(z, w), |_, _| cr(1.0));
    let r = residual.psd_report(tol)?;
    Ok(DbrReport {
        is_dbr: kernel.psd && r.psd,
        min_eigenvalue: r.min_eigenvalue,
        kernel_psd: kernel.psd,
        kernel_min_eigenvalue: kernel.min_eigenvalue,
    })
}

/// Disc test: `I - (1 - z conj(w)) K(z, w)` has a PSD Gram (and so does `K`).
pub fn dbr_test_disc(k: &SampledKernel, tol: f64) -> Result<DbrReport> {
    require_ambient(k, k.grid().ambient() == Ambient::Disc, "disc")?;
    hadamard_test(k, |z, w| 1.0 - z[0] * w[0].conj(), tol)
}

/// Ball test: `I - (1 - <z, w>) K(z, w)` has a PSD Gram (and so does `K`).
pub fn dbr_test_ball(k: &SampledKernel, tol: f64) -> Result<DbrReport> {
    require_ambient(k, matches!(k.grid().ambient(), Ambient::Ball(_)), "ball")?;
    hadamard_test(k, |z, w| 1.0 - inner(z, w), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NfReport {
    /// Gram of `S - K` is PSD.
    pub below_szego: bool,
    /// Gram of `(1 - z conj(w)) K` is PSD.
    pub szego_quotient_psd: bool,
    pub below_szego_min_eigenvalue: Option<f64>,
    pub szego_quotient_min_eigenvalue: Option<f64>,
}

impl NfReport {
    pub fn pass(&self) -> bool {
        self.below_szego && self.szego_quotient_psd
    }
}

/// The two positivity conditions characterising `Theta(z) Theta(w)^* / (1 - z conj(w))`.
pub fn dbr_test_nf(k: &SampledKernel, tol: f64) -> Result<NfReport> {
    require_ambient(k, k.grid().ambient() == Ambient::Disc, "disc")?;
    let szego_minus = k.hadamard(|_, _| cr(-1.0), |z, w| 1.0 / (1.0 - z[0] * w[0].conj()));
    let quotient = k.hadamard(|z, w| 1.0 - z[0] * w[0].conj(), |_, _| cr(0.0));
    let a = szego_minus.psd_report(tol)?;
    let b = quotient.psd_report(tol)?;
    Ok(NfReport {
        below_szego: a.psd,
        szego_quotient_psd: b.psd,
        below_szego_min_eigenvalue: a.min_eigenvalue,
        szego_quotient_min_eigenvalue: b.min_eigenvalue,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolydiscReport {
    pub pass: bool,
    pub components_psd: Vec<bool>,
    /// `max ||K - sum_i K_i / prod_{j != i} (1 - z_j conj(w_j))||_F`.
    pub sum_residual: f64,
    pub hadamard_psd: bool,
    pub hadamard_min_eigenvalue: Option<f64>,
}

/// Certificate check on the polydisc: positive components `K_i` summing to
/// `K` in the displayed form, and `I - S_n^{-1} K >= 0`.
pub fn dbr_test_polydisc(k: &SampledKernel, components: &[SampledKernel], tol: f64) -> Result<PolydiscReport> {
    let n = k.grid().ambient().dimension();
    require_ambient(k, matches!(k.grid().ambient(), Ambient::Bidisc | Ambient::Polydisc(_)) && n >= 2, "polydisc")?;
    if components.len() != n {
        return Err(KernelError::GridMismatch);
    }
    for c in components {
        k.require_compatible(c)?;
    }
    let components_psd = components.iter().map(|c| c.psd_report(tol).map(|r| r.psd)).collect::<Result<Vec<_>>>()?;

    let pts = k.grid().points();
    let mut sum_residual = 0.0f64;
    for (a, z) in pts.iter().enumerate() {
        for (b, w) in pts.iter().enumerate() {
            let mut total = k.value(a, b).clone();
            for (i, c) in components.iter().enumerate() {
                let others: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 - z[j] * w[j].conj()).product();
                total -= c.value(a, b) / others;
            }
            sum_residual = sum_residual.max(fro(&total));
        }
    }
    let had = k.hadamard(|z, w| -polydisc_factor(z, w), |_, _| cr(1.0)).psd_report(tol)?;
    let sum_ok = sum_residual <= tol * (1.0 + fro(&k.gram()));
    Ok(PolydiscReport {
        pass: components_psd.iter().all(|&p| p) && sum_ok && had.psd,
        components_psd,
        sum_residual,
        hadamard_psd: had.psd,
        hadamard_min_eigenvalue: had.min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::PointGrid;
    use crate::numlin::{c, DEFAULT_TOL};

    fn disc_grid() -> PointGrid {
        PointGrid::random(Ambient::Disc, 12, 21)
    }

    #[test]
    fn disc_examples() {
        let g = disc_grid();
        let one = SampledKernel::constant(&g, 1, cr(1.0)).unwrap();
        assert!(dbr_test_disc(&one, DEFAULT_TOL).unwrap().is_dbr);
        let two_szego = SampledKernel::szego(&g).unwrap().hadamard(|_, _| cr(2.0), |_, _| cr(0.0));
        let r = dbr_test_disc(&two_szego, DEFAULT_TOL).unwrap();
        assert!(!r.is_dbr);
        assert!(r.min_eigenvalue.unwrap() <= -1.0 + 1e-9);
        let theta = |z: Complex64| (z + 0.5) / (1.0 + 0.5 * z);
        let k_theta = SampledKernel::scalar_from_fn(&g, |z, w| {
            (1.0 - theta(z[0]) * theta(w[0]).conj()) / (1.0 - z[0] * w[0].conj())
        });
        assert!(dbr_test_disc(&k_theta, DEFAULT_TOL).unwrap().is_dbr);
    }

    #[test]
    fn nf_examples() {
        let g = disc_grid();
        let sz = SampledKernel::szego(&g).unwrap();
        assert!(dbr_test_nf(&sz, DEFAULT_TOL).unwrap().pass());
        let zero = SampledKernel::constant(&g, 1, cr(0.0)).unwrap();
        assert!(dbr_test_nf(&zero, DEFAULT_TOL).unwrap().pass());
        let r = dbr_test_nf(&sz.hadamard(|_, _| cr(2.0), |_, _| cr(0.0)), DEFAULT_TOL).unwrap();
        assert_eq!((r.below_szego, r.szego_quotient_psd), (false, true));
    }

    #[test]
    fn polydisc_examples() {
        let g = PointGrid::random(Ambient::Bidisc, 10, 5);
        let s2 = SampledKernel::szego(&g).unwrap();
        let k1 = SampledKernel::scalar_from_fn(&g, |z, w| 1.0 / (1.0 - z[0] * w[0].conj()));
        let zero = SampledKernel::constant(&g, 1, cr(0.0)).unwrap();
        let r = dbr_test_polydisc(&s2, &[k1.clone(), zero.clone()], DEFAULT_TOL).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(dbr_test_polydisc(&zero, &[zero.clone(), zero.clone()], DEFAULT_TOL).unwrap().pass);
        let double = |k: &SampledKernel| k.hadamard(|_, _| cr(2.0), |_, _| cr(0.0));
        let r = dbr_test_polydisc(&double(&s2), &[double(&k1), zero.clone()], DEFAULT_TOL).unwrap();
        assert!(!r.pass);
        assert!(r.sum_residual < 1e-12);
        assert!(!r.hadamard_psd);
        assert!(matches!(dbr_test_polydisc(&s2, &[k1], DEFAULT_TOL), Err(KernelError::GridMismatch)));
    }

    #[test]
    fn ball_examples() {
        let g = PointGrid::random(Ambient::Ball(2), 12, 6);
        let da = SampledKernel::drury_arveson(&g).unwrap();
        assert!(dbr_test_ball(&da, DEFAULT_TOL).unwrap().is_dbr);
        assert!(dbr_test_ball(&SampledKernel::constant(&g, 1, cr(1.0)).unwrap(), DEFAULT_TOL).unwrap().is_dbr);
        let r = dbr_test_ball(&da.hadamard(|_, _| cr(2.0), |_, _| cr(0.0)), DEFAULT_TOL).unwrap();
        assert!(!r.is_dbr);
    }

    #[test]
    fn adding_points_never_rescues_a_failure() {
        let small = PointGrid::new(Ambient::Disc, vec![vec![c(0.1, 0.0)], vec![c(0.0, 0.3)]]).unwrap();
        let mut pts = small.points().to_vec();
        pts.extend(disc_grid().points().iter().cloned());
        let big = PointGrid::new(Ambient::Disc, pts).unwrap();
        for g in [small, big] {
            let k = SampledKernel::szego(&g).unwrap().hadamard(|_, _| cr(2.0), |_, _| cr(0.0));
            assert!(!dbr_test_disc(&k, DEFAULT_TOL).unwrap().is_dbr);
        }
    }

    #[test]
    fn wrong_ambient_is_reported() {
        let g = PointGrid::random(Ambient::Bidisc, 3, 1);
        let k = SampledKernel::szego(&g).unwrap();
        assert!(matches!(dbr_test_disc(&k, DEFAULT_TOL), Err(KernelError::WrongAmbient { .. })));
    }
}
