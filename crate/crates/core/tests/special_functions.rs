use std::f64::consts::PI;

use nonlocal::quadrature::composite;
use nonlocal::special_fn::{bessel_k, frac_laplacian_constant, gamma, gegenbauer, gegenbauer_norm, h_s, one_minus_cos_moment};
use proptest::prelude::*;

proptest! {
    #[test]
    fn gamma_recurrence(x in 0.01..19.0f64) {
        let (lhs, rhs) = (gamma(x + 1.0).unwrap(), x * gamma(x).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs(), "{x}: {lhs} vs {rhs}");
    }

    #[test]
    fn h_s_is_odd(t in -20.0..20.0f64, s in 0.05..0.95f64) {
        let (a, b) = (h_s(t, s).unwrap(), h_s(-t, s).unwrap());
        prop_assert!((a + b).abs() <= 1e-9 * (1.0 + a.abs()), "h({t}) = {a}, h(-{t}) = {b}");
    }

    #[test]
    fn bessel_k_recurrence(nu in 0.0..3.0f64, x in 0.05..30.0f64) {
        // K_{ν+1}(x) = K_{ν−1}(x) + (2ν/x) K_ν(x), with K_{−ν} = K_ν
        let lower = bessel_k((nu - 1.0).abs(), x).unwrap();
        let expected = lower + 2.0 * nu / x * bessel_k(nu, x).unwrap();
        let upper = bessel_k(nu + 1.0, x).unwrap();
        prop_assert!((upper - expected).abs() <= 1e-9 * upper, "nu {nu} x {x}: {upper} vs {expected}");
    }
}

#[test]
fn bessel_k_reference_value() {
    let v = bessel_k(1.5, 2.0).unwrap();
    assert!((v - 0.179906657952092171).abs() < 1e-14, "{v}");
}

#[test]
fn cosine_moment_matches_the_normalising_constant() {
    for s in [0.25, 0.5, 0.75] {
        let moment = one_minus_cos_moment(s).unwrap();
        let expected = 1.0 / (2.0 * frac_laplacian_constant(1, s).unwrap());
        assert!((moment - expected).abs() <= 1e-6 * expected, "s = {s}: {moment} vs {expected}");
    }
}

#[test]
fn gegenbauer_norm_against_direct_quadrature() {
    for n in 3..=5 {
        let nu = (n as f64 - 2.0) / 2.0;
        for l in 0..=10 {
            // t = cos θ turns the weight (1 − t²)^{(N−3)/2} into sin^{N−2} θ
            let direct = composite(0.0, PI, 16, 20, |th| {
                gegenbauer(l, nu, th.cos()).unwrap().powi(2) * th.sin().powi(n as i32 - 2)
            });
            let closed = gegenbauer_norm(l, n).unwrap();
            assert!((direct - closed).abs() <= 1e-8 * closed, "l {l} N {n}: {direct} vs {closed}");
        }
    }
}

#[test]
fn h_s_second_differences_are_bounded_and_odd() {
    for s in [0.2, 0.5, 0.7] {
        let second = |t: f64| {
            let d = 1e-3;
            (h_s(t + d, s).unwrap() - 2.0 * h_s(t, s).unwrap() + h_s(t - d, s).unwrap()) / (d * d)
        };
        let (left, right) = (second(-1.0), second(1.0));
        assert!(left.is_finite() && left.abs() < 10.0, "s {s}: {left}");
        assert!((left + right).abs() < 1e-5 * (1.0 + left.abs()), "s {s}: {left} vs {right}");
        assert!(second(0.0).abs() < 1e-6, "s {s}");
    }
}
