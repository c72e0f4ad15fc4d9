//! Seeded fixtures: random unitaries, Blaschke products, the standard
//! colligations and one-variable realizations used across tests and the CLI.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::colligation::{model_colligation, Blaschke, Colligation};
use crate::factor::compose_colligations;
use crate::function::{Poly2, RationalFunction2};
use crate::kernels::ThetaRealization;
use crate::numlin::{cr, CMatrix, DEFAULT_TOL};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut FixtureRng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed `n x n` unitary (QR of a complex Gaussian matrix with
/// the phases of `R`'s diagonal moved into `Q`).
pub fn random_unitary(n: usize, rng: &mut FixtureRng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn random_unimodular(rng: &mut FixtureRng) -> Complex64 {
    Complex64::from_polar(1.0, TAU * rng.random::<f64>())
}

/// Blaschke product of the given degree with zero moduli uniform in `[r_min, r_max]`.
pub fn random_blaschke(rng: &mut FixtureRng, degree: usize, r_min: f64, r_max: f64) -> Blaschke {
    let zeros = (0..degree)
        .map(|_| Complex64::from_polar(rng.random_range(r_min..=r_max), TAU * rng.random::<f64>()))
        .collect();
    let unimodular = random_unimodular(rng);
    Blaschke::new(unimodular, zeros).expect("zeros inside the disc")
}

/// `(z + p) / (1 + p z)` for real `|p| < 1`.
pub fn mobius(p: f64) -> Blaschke {
    Blaschke::new(cr(1.0), vec![cr(-p)]).expect("|p| < 1")
}

/// `[[0,1,0],[0,0,1],[1,0,0]]`, realizing `z1 z2`.
pub fn permutation() -> Colligation {
    let m = CMatrix::from_row_slice(3, 3, &[0., 1., 0., 0., 0., 1., 1., 0., 0.].map(cr));
    Colligation::from_block(&m, vec![1, 1]).expect("valid block")
}

/// Unitary realization of `(z1 z2 - t) / (1 - t z1 z2)` whose lower-left block is `t`.
pub fn v_t(t: f64) -> Colligation {
    let s = (1.0 - t * t).sqrt();
    let m = CMatrix::from_row_slice(3, 3, &[-t, s, 0.0, 0.0, 0.0, 1.0, s, t, 0.0].map(cr));
    Colligation::from_block(&m, vec![1, 1]).expect("valid block")
}

/// `(z1 z2 - t) / (1 - t z1 z2)` in Rudin form.
pub fn phi_t(t: f64) -> RationalFunction2 {
    let den = Poly2::from_rows(vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(-t)]]).expect("rectangular");
    RationalFunction2::new((0, 0), den).expect("zero-free for t in (0, 1)")
}

/// Isometric colligation with transfer function `z1 / 2`.
pub fn half_z1() -> Colligation {
    let r = 0.75f64.sqrt();
    let m = CMatrix::from_row_slice(3, 3, &[0.0, 0.5, 0.0, 1.0, 0.0, 0.0, 0.0, r, 0.0].map(cr));
    Colligation::from_block(&m, vec![1, 1]).expect("valid block")
}

/// Cascade of the model colligations of two Blaschke products.
pub fn composed_blaschke(b1: &Blaschke, b2: &Blaschke) -> Colligation {
    let v1 = model_colligation(b1).expect("valid Blaschke product");
    let v2 = model_colligation(b2).expect("valid Blaschke product");
    compose_colligations(&v1, &v2, DEFAULT_TOL).expect("model colligations are unitary")
}

/// Random unitary two-variable colligation with state dimension `h`, split at a random point.
pub fn random_coisometric(rng: &mut FixtureRng, h: usize) -> Colligation {
    let v = random_unitary(1 + h, rng);
    let h1 = rng.random_range(0..=h);
    Colligation::from_block(&v, vec![h1, h - h1]).expect("valid block")
}

/// `Theta(z) = A^* + z C^* (I - z D^*)^{-1} B^*` from the first `e + h`
/// columns of a random `(f + h)`-unitary, so `V` is an isometry.
pub fn random_theta(rng: &mut FixtureRng, e: usize, f: usize, h: usize) -> ThetaRealization {
    assert!(f >= e, "an isometry needs f >= e");
    let u = random_unitary(f + h, rng);
    let v = u.columns(0, e + h).into_owned();
    ThetaRealization::from_isometry(&v, e).expect("conformable blocks")
}
