use matgauge::linalg::{self, ComplexMatrix, C64};
use proptest::prelude::*;

fn square(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-3.0f64..3.0, 2 * n * n).prop_map(move |v| {
        ComplexMatrix::from_fn(n, n, |i, j| C64::new(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]))
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    square(n).prop_map(|m| (&m + &m.adjoint()).scale_real(0.5))
}

fn sized_hermitian() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=5).prop_flat_map(hermitian)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn positive_part_splits_hermitian(h in sized_hermitian()) {
        let p = linalg::positive_part(&h).unwrap();
        let q = linalg::positive_part(&h.scale_real(-1.0)).unwrap();
        prop_assert!(linalg::lambda_min(&p).unwrap() >= -1e-9);
        prop_assert!((&p - &q).max_abs_diff(&h) <= 1e-9);
    }

    #[test]
    fn spectral_norm_of_hermitian_is_extreme_eigenvalue(h in sized_hermitian()) {
        let eig = linalg::hermitian_eig(&h).unwrap();
        let want = eig.min().abs().max(eig.max().abs());
        prop_assert!((linalg::spectral_norm(&h) - want).abs() <= 1e-10 * (1.0 + want));
    }

    #[test]
    fn congruence_is_norm_submultiplicative((a, x) in (1usize..=4, 1usize..=4).prop_flat_map(|(n, k)| (square(n), square(n).prop_map(move |m| m.block(0, 0, m.rows(), k.min(m.cols())))))) {
        let xax = &(&x.adjoint() * &a) * &x;
        let bound = linalg::spectral_norm(&x).powi(2) * linalg::spectral_norm(&a);
        prop_assert!(linalg::spectral_norm(&xax) <= bound + 1e-9);
    }

    #[test]
    fn projections_are_idempotent_and_nonexpansive(
        (h, g, c) in (1usize..=4).prop_flat_map(|n| (hermitian(n), hermitian(n), hermitian(n))),
        radius in 0.0f64..3.0,
    ) {
        let psd = |m: &ComplexMatrix| linalg::project_psd(m).unwrap();
        let ball = |m: &ComplexMatrix| linalg::project_spectral_ball(m, &c, radius).unwrap();
        for proj in [&psd as &dyn Fn(&ComplexMatrix) -> ComplexMatrix, &ball] {
            let (ph, pg) = (proj(&h), proj(&g));
            prop_assert!(proj(&ph).max_abs_diff(&ph) <= 1e-9);
            prop_assert!((&ph - &pg).frobenius_norm() <= (&h - &g).frobenius_norm() + 1e-9);
        }
    }

    #[test]
    fn hermitian_vectorization_is_an_isometry(h in sized_hermitian(), g in sized_hermitian()) {
        prop_assume!(h.rows() == g.rows());
        let (vh, vg) = (linalg::hermitian_to_vec(&h), linalg::hermitian_to_vec(&g));
        let dot: f64 = vh.iter().zip(&vg).map(|(a, b)| a * b).sum();
        prop_assert!((dot - h.real_inner(&g)).abs() <= 1e-9 * (1.0 + h.frobenius_norm() * g.frobenius_norm()));
        prop_assert!(linalg::vec_to_hermitian(&vh, h.rows()).max_abs_diff(&h) <= 1e-12);
    }
}
