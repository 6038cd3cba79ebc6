use matgauge::laws::{check_gauge_axioms, check_normality};
use matgauge::linalg::{self, ComplexMatrix, C64, I};
use matgauge::space::{random_space, standard_spaces, RandomSpaceKind};
use matgauge::{
    gauge_h, gauge_norm, gauge_nu, gauge_nu_e, is_accretive, membership, sample_element, star_closure, ConcreteGauge,
    GaugeKind, LevelElement, OperatorSpace, SampleMode, SolverConfig,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_of(seed: u64, which: usize) -> OperatorSpace {
    standard_spaces(seed).swap_remove(which % 5)
}

fn sample(space: &OperatorSpace, n: usize, seed: u64, mode: SampleMode) -> LevelElement {
    sample_element(space, n, seed, mode)
        .or_else(|_| sample_element(space, n, seed, SampleMode::Generic))
        .unwrap()
}

fn matrix(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    use rand::Rng;
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn membership_recovers_coefficients(seed in any::<u64>(), which in 0usize..5, n in 1usize..=3) {
        let s = space_of(seed % 16, which);
        let z = sample(&s, n, seed, SampleMode::Generic);
        let back = membership(&s, z.realized(), n, 1e-9).unwrap();
        for (a, b) in back.iter().zip(z.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn accretive_cone_is_a_matrix_cone(seed in any::<u64>(), which in 0usize..5, n in 1usize..=3, k in 1usize..=3, c in 0.0f64..5.0) {
        let s = space_of(seed % 16, which);
        let p = sample(&s, n, seed, SampleMode::Accretive);
        let q = sample(&s, n, seed ^ 1, SampleMode::Accretive);
        prop_assume!(is_accretive(&s, &p, 1e-9) && is_accretive(&s, &q, 1e-9));
        prop_assert!(is_accretive(&s, &p.add(&q).unwrap(), 1e-8));
        prop_assert!(is_accretive(&s, &p.scale_real(c), 1e-8));
        let x = matrix(seed ^ 2, n, k);
        let moved = p.congruence(&x).unwrap();
        prop_assert_eq!(moved.level(), k);
        prop_assert!(is_accretive(&s, &moved, 1e-8 * (1.0 + gauge_norm(&p))));
    }

    #[test]
    fn cone_is_c_proper(seed in any::<u64>(), which in 0usize..5, n in 1usize..=3, e in 0usize..3) {
        let s = space_of(seed % 16, which);
        let scale = [1e-12, 1e-3, 1.0][e];
        let z = sample(&s, n, seed, SampleMode::Accretive).scale_real(scale);
        let rotations = [C64::new(1.0, 0.0), I, C64::new(-1.0, 0.0), -I];
        if rotations.iter().all(|&r| is_accretive(&s, &z.scale(r), 1e-9)) {
            prop_assert!(linalg::spectral_norm(z.realized()) <= 1e-7);
        }
    }

    #[test]
    fn star_closure_is_idempotent(seed in any::<u64>(), which in 0usize..5) {
        let s = space_of(seed % 16, which);
        let once = star_closure(&s);
        let twice = star_closure(&once);
        prop_assert_eq!(once.dim(), twice.dim());
        for b in twice.basis() {
            prop_assert!(membership(&once, b, 1, 1e-9).is_ok());
        }
        for b in s.basis() {
            prop_assert!(membership(&once, &b.adjoint(), 1, 1e-9).is_ok());
        }
    }

    #[test]
    fn nu_vanishes_exactly_on_the_negative_cone(seed in any::<u64>(), which in 0usize..5, n in 1usize..=3, flip in any::<bool>()) {
        let s = space_of(seed % 16, which);
        let p = sample(&s, n, seed, SampleMode::Accretive);
        let z = if flip { p.neg() } else { p };
        for tol in [1e-12, 1e-9, 1e-6] {
            prop_assert_eq!(gauge_nu(&z) <= tol, is_accretive(&s, &z.neg(), tol));
        }
    }

    #[test]
    fn norm_h_and_nu_relations(seed in any::<u64>(), which in 0usize..5, n in 1usize..=3) {
        let s = space_of(seed % 16, which);
        let z = sample(&s, n, seed, SampleMode::Generic);
        prop_assert!((gauge_norm(&z) - linalg::spectral_norm(z.realized())).abs() <= 1e-9);
        prop_assert!((gauge_h(&z) - gauge_nu(&z).max(gauge_nu(&z.neg()))).abs() <= 1e-10);
    }

    #[test]
    fn nu_e_with_identity_unit_is_nu(seed in any::<u64>(), d in 2usize..=4, n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_space(&mut rng, d, 3, RandomSpaceKind::Unital).unwrap();
        let z = sample(&s, n, seed, SampleMode::Generic);
        prop_assert_eq!(gauge_nu_e(&s, &z).unwrap(), gauge_nu(&z));
    }
}

#[test]
fn reports_depend_only_on_their_inputs() {
    let s = space_of(3, 4);
    let g = ConcreteGauge::new(&s, GaugeKind::NuE, SolverConfig::default());
    assert_eq!(check_gauge_axioms(&g, 30, 5, 1e-8).unwrap(), check_gauge_axioms(&g, 30, 5, 1e-8).unwrap());
    assert_eq!(check_normality(&s, 3, 30, 5, 1e-8).unwrap(), check_normality(&s, 3, 30, 5, 1e-8).unwrap());
}
