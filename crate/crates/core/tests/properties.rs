use hslab_core::bregman::{bregman_f, bregman_f_raw, bregman_h, codivergence_j, codivergence_j_minus, codivergence_j_plus, comparison_g, rounding_floor};
use hslab_core::quad::{gl16, hurwitz_zeta};
use hslab_core::semigroup::TestFunctionSpec;
use hslab_core::verify::{counterexample_closed_form, counterexample_scan};
use hslab_core::SemigroupModel;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![
        4 => -50.0..50.0f64,
        1 => Just(0.0),
        1 => (-3.0..3.0f64, prop::bool::ANY).prop_map(|(e, s)| if s { 10f64.powf(e) } else { -10f64.powf(e) }),
    ]
}

fn vec_n() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|n| (prop::collection::vec(coord(), n), prop::collection::vec(coord(), n)))
}

fn scale(w: &[f64], z: &[f64], p: f64) -> f64 {
    let m = w.iter().chain(z).map(|v| v.abs()).fold(0.0, f64::max);
    m.powf(p) + f64::MIN_POSITIVE
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn divergence_is_nonnegative((w, z) in vec_n(), p in 1.05..6.0f64) {
        prop_assert!(bregman_f(&w, &z, p) >= 0.0);
        prop_assert!(bregman_h(&w, &z, p) >= 0.0);
        prop_assert!(bregman_f_raw(&w, &z, p) >= -rounding_floor(&w, &z, p));
    }

    #[test]
    fn symmetrized_divergence_is_symmetric((w, z) in vec_n(), p in 1.05..6.0f64) {
        let (a, b) = (bregman_h(&w, &z, p), bregman_h(&z, &w, p));
        prop_assert!((a - b).abs() <= 1e-12 * scale(&w, &z, p), "{a} vs {b}");
    }

    #[test]
    fn quadratic_case_is_squared_distance((w, z) in vec_n()) {
        let d2: f64 = w.iter().zip(&z).map(|(a, b)| (b - a) * (b - a)).sum();
        prop_assert_eq!(bregman_f(&w, &z, 2.0), d2);
        prop_assert_eq!(comparison_g(&w, &z, 2.0), d2);
    }

    #[test]
    fn codivergence_at_two_is_a_product(w1 in coord(), w2 in coord(), z1 in coord(), z2 in coord()) {
        let j = codivergence_j([w1, w2], [z1, z2], 2.0);
        let prod = (z1 - w1) * (z2 - w2);
        prop_assert!((j - prod).abs() <= 1e-12 * (prod.abs() + (w1 * w2).abs() + (z1 * z2).abs() + 1e-300));
    }

    #[test]
    fn codivergence_on_the_diagonal_is_the_divergence(a in coord(), b in coord(), p in 1.5..5.0f64) {
        let j = codivergence_j([a, a], [b, b], p);
        let f = bregman_f_raw(&[a], &[b], p);
        prop_assert!((j - f).abs() <= 1e-11 * scale(&[a], &[b], p), "{j} vs {f}");
    }

    #[test]
    fn codivergence_splits_into_sign_parts(w1 in coord(), w2 in coord(), z1 in coord(), z2 in coord(), p in 2.0..5.0f64) {
        let (w, z) = ([w1, w2], [z1, z2]);
        let j = codivergence_j(w, z, p);
        let split = codivergence_j_plus(w, z, p) - codivergence_j_minus(w, z, p);
        let s = w1.abs().max(z1.abs()).max(1.0) * w2.abs().max(z2.abs()).max(1.0).powf(p - 1.0)
            * (1.0 + (z2 - w2).abs() + (z1 - w1).abs());
        prop_assert!((j - split).abs() <= 1e-11 * s, "{j} vs {split}");
    }

    #[test]
    fn scan_matches_closed_form(p in 1.1..2.95f64, k in 1u64..10_000) {
        prop_assume!((p - 2.0).abs() > 1e-3);
        let row = &counterexample_scan(p, &[k]).unwrap()[0];
        prop_assert!(row.rel_err <= 1e-9, "p = {p}, k = {k}: {}", row.rel_err);
        prop_assert_eq!(row.closed_form, counterexample_closed_form(p, k as f64));
    }

    #[test]
    fn hurwitz_zeta_satisfies_the_shift_relation(s in 1.1..8.0f64, a in 0.1..20.0f64) {
        let lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1.0);
        prop_assert!((lhs - a.powf(-s)).abs() <= 1e-12 * a.powf(-s).max(1.0));
    }

    #[test]
    fn gauss_legendre_is_exact_for_low_degree(c in prop::collection::vec(-3.0..3.0f64, 1..20), a in -2.0..0.0f64, b in 0.1..2.0f64) {
        let poly = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
        let anti = |x: f64| c.iter().enumerate().map(|(i, k)| k * x.powi(i as i32 + 1) / (i as f64 + 1.0)).sum::<f64>();
        let got = gl16().integrate(a, b, poly);
        let want = anti(b) - anti(a);
        prop_assert!((got - want).abs() <= 1e-11 * (1.0 + want.abs()));
    }

    #[test]
    fn test_function_specs_round_trip(c in -5.0..5.0f64, w in 0.1..3.0f64, a in -2.0..2.0f64) {
        let f = TestFunctionSpec::bump(vec![c], w, a);
        let back: TestFunctionSpec = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stable_kernels_are_even_and_positive(alpha in 0.3..1.9f64, t in 0.01..10.0f64, x in 0.0..20.0f64) {
        let m = SemigroupModel::stable(alpha, 1).unwrap();
        let a = m.kernel_density(t, &[x]).unwrap();
        let b = m.kernel_density(t, &[-x]).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }
}
