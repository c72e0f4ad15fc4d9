use num_complex::Complex64;
use proptest::prelude::*;

use bidisc_core::colligation::{model_colligation, Colligation};
use bidisc_core::factor::{
    agler_factorization_conditions, check_condition_4, companion_grid, compose_colligations, separability_test,
    split_colligation,
};
use bidisc_core::fixtures::{composed_blaschke, random_blaschke, random_theta, random_unitary, rng, v_t};
use bidisc_core::function::{Ambient, PointGrid};
use bidisc_core::kernels::{agler_kernels_of, dbr_test_disc, SampledKernel};
use bidisc_core::numlin::{cr, CMatrix};

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn contractive_colligations_map_into_the_closed_disc(seed in any::<u64>(), h in 0usize..6, s in 0.05f64..1.0) {
        let mut r = rng(seed);
        let v = random_unitary(1 + h, &mut r) * cr(s);
        let h1 = (seed % (h as u64 + 1)) as usize;
        let v = Colligation::from_block(&v, vec![h1, h - h1]).unwrap();
        for z in PointGrid::random(Ambient::Bidisc, 20, seed ^ 1).points2() {
            prop_assert!(v.transfer_2d(z).unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn split_then_compose_reproduces_the_transfer_function(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let mut r = rng(seed);
        let b1 = random_blaschke(&mut r, d1, 0.1, 0.9);
        let b2 = random_blaschke(&mut r, d2, 0.1, 0.9);
        let v = composed_blaschke(&b1, &b2);
        let split = split_colligation(&v, TOL).unwrap();
        let back = compose_colligations(&split.v1, &split.v2, TOL).unwrap();
        for z in PointGrid::random(Ambient::Bidisc, 50, seed ^ 2).points2() {
            let expected = b1.eval(z[0]) * b2.eval(z[1]);
            prop_assert!((back.transfer_2d(z).unwrap() - expected).norm() <= TOL);
            prop_assert!((v.transfer_2d(z).unwrap() - expected).norm() <= TOL);
        }
    }

    #[test]
    fn factorization_tests_agree(seed in any::<u64>(), t in 0.05f64..0.95, pick in any::<bool>()) {
        let v = if pick {
            let mut r = rng(seed);
            composed_blaschke(&random_blaschke(&mut r, 2, 0.1, 0.8), &random_blaschke(&mut r, 2, 0.1, 0.8))
        } else {
            v_t(t)
        };
        let first: Vec<Complex64> = PointGrid::random(Ambient::Disc, 4, seed ^ 3).points1().collect();
        let second: Vec<Complex64> = PointGrid::random(Ambient::Disc, 4, seed ^ 4).points1().collect();
        let grid = companion_grid(&first, &second).unwrap();
        let sep = separability_test(&v, &grid, TOL).unwrap().separable;
        let cond4 = check_condition_4(&v, TOL);
        let (k1, k2) = agler_kernels_of(&v, &grid, TOL).unwrap();
        let agler = agler_factorization_conditions(&v, &k1, &k2, TOL).unwrap().cond2;
        prop_assert_eq!(sep, pick);
        prop_assert_eq!(cond4, pick);
        prop_assert_eq!(agler, pick);
    }

    #[test]
    fn adding_points_never_rescues_a_failing_dbr_test(seed in any::<u64>(), n in 2usize..8, extra in 1usize..8, scale in 0.5f64..3.0) {
        let grid = PointGrid::random(Ambient::Disc, n + extra, seed);
        let mut r = rng(seed ^ 5);
        let g = random_unitary(n + extra, &mut r).columns(0, 2).into_owned() * cr(scale);
        let gram = &g * g.adjoint();
        let kernel = |m: usize| {
            let sub = PointGrid::new(Ambient::Disc, grid.points()[..m].to_vec()).unwrap();
            let values = (0..m * m).map(|k| CMatrix::from_element(1, 1, gram[(k / m, k % m)])).collect();
            SampledKernel::new(sub, 1, values).unwrap()
        };
        let small = dbr_test_disc(&kernel(n), TOL).unwrap().is_dbr;
        let large = dbr_test_disc(&kernel(n + extra), TOL).unwrap().is_dbr;
        prop_assert!(small || !large);
    }

    #[test]
    fn model_colligation_json_round_trip(seed in any::<u64>(), degree in 1usize..6) {
        let b = random_blaschke(&mut rng(seed), degree, 0.0, 0.9);
        let v = model_colligation(&b).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        let back: Colligation = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn theta_realization_json_round_trip(seed in any::<u64>(), e in 1usize..3, h in 0usize..4) {
        let th = random_theta(&mut rng(seed), e, e + 1, h);
        let text = serde_json::to_string(&th).unwrap();
        prop_assert_eq!(serde_json::from_str::<bidisc_core::kernels::ThetaRealization>(&text).unwrap(), th);
    }
}
