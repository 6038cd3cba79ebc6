use matgauge::linalg::{self, ComplexMatrix, C64};
use matgauge::space::{random_space, standard_spaces, RandomSpaceKind};
use matgauge::unitization::{order_unit_formula, u_feasible};
use matgauge::{
    gauge_h, gauge_nu, gauge_u, nu_max, nu_max_diag_oracle, sample_element, LevelElement, OperatorSpace, SampleMode,
    SolverConfig, UnitizedElement,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample(space: &OperatorSpace, n: usize, seed: u64, mode: SampleMode) -> LevelElement {
    sample_element(space, n, seed, mode)
        .or_else(|_| sample_element(space, n, seed, SampleMode::Generic))
        .unwrap()
}

fn unitized(space: &OperatorSpace, n: usize, seed: u64) -> UnitizedElement {
    let a = sample(space, n, seed, SampleMode::Generic);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
    let x = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
    UnitizedElement::new(a, x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nu_max_sits_between_nu_and_h_with_a_valid_witness(seed in any::<u64>(), which in 0usize..5, n in 1usize..=2) {
        let s = standard_spaces(seed % 8).swap_remove(which);
        let z = sample(&s, n, seed, SampleMode::Generic);
        let cfg = SolverConfig::default();
        let r = nu_max(&s, &z, &cfg).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.value <= gauge_h(&z) + 1e-12);
        prop_assert!(gauge_nu(&z) <= r.value + 1e-5);
        let p = r.witness.unwrap();
        prop_assert!(linalg::lambda_min(&p.real_part()).unwrap() >= -10.0 * cfg.feas_tol);
        prop_assert!(gauge_h(&z.add(&p).unwrap()) <= r.value + cfg.feas_tol + cfg.bisect_tol);
    }

    #[test]
    fn nu_max_agrees_with_the_grid_oracle(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_space(&mut rng, d, 2, RandomSpaceKind::Diagonal).unwrap();
        let z = sample(&s, 1, seed, SampleMode::Generic);
        let v = nu_max(&s, &z, &SolverConfig::default()).unwrap().value;
        let o = nu_max_diag_oracle(&s, &z, 200).unwrap();
        prop_assert!((v - o).abs() <= 5e-3, "nu_max {} oracle {}", v, o);
    }

    #[test]
    fn u_feasibility_is_monotone_and_bisection_is_sound(seed in any::<u64>(), which in 0usize..5, n in 1usize..=2, steps in prop::collection::vec(0.0f64..3.0, 4)) {
        let s = standard_spaces(seed % 8).swap_remove(which);
        let e = unitized(&s, n, seed);
        let cfg = SolverConfig::default();
        let u = gauge_u(&e, &cfg);
        let delta = cfg.unitization_bisect_tol;
        prop_assert!(u_feasible(&e, u + 2.0 * delta, &cfg));
        let floor = linalg::lambda_max(&linalg::real_part(e.x()).unwrap()).unwrap().max(0.0);
        if u - 2.0 * delta > floor {
            prop_assert!(!u_feasible(&e, u - 2.0 * delta, &cfg));
        }
        let mut t = u;
        for step in steps {
            t += step;
            prop_assert!(u_feasible(&e, t, &cfg));
        }
        prop_assert_eq!(gauge_u(&e, &cfg), u);
    }

    #[test]
    fn u_of_a_direct_sum_is_the_max(seed in any::<u64>(), which in 0usize..5, n in 1usize..=2, m in 1usize..=2) {
        let s = standard_spaces(seed % 8).swap_remove(which);
        let (a, b) = (unitized(&s, n, seed), unitized(&s, m, seed ^ 7));
        let cfg = SolverConfig::default();
        let sum = gauge_u(&a.direct_sum(&b).unwrap(), &cfg);
        prop_assert!((sum - gauge_u(&a, &cfg).max(gauge_u(&b, &cfg))).abs() <= 1e-5);
    }

    #[test]
    fn u_extends_nu_and_matches_the_order_unit_formula(seed in any::<u64>(), which in 0usize..5, n in 1usize..=2) {
        let s = standard_spaces(seed % 8).swap_remove(which);
        let cfg = SolverConfig::default();
        let a = sample(&s, n, seed, SampleMode::Generic);
        prop_assert!((gauge_u(&UnitizedElement::embed(a.clone()), &cfg) - gauge_nu(&a)).abs() <= 1e-6);
        let e = unitized(&s, n, seed);
        prop_assert!((gauge_u(&e, &cfg) - order_unit_formula(&e, &cfg)).abs() <= 1e-5);
    }
}
