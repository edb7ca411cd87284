use nonlocal::liouville::{classify, default_suite, verify_solution, ClassifyOptions, Conclusion};
use nonlocal::measures::LevyMeasure;
use nonlocal::operator::CandidateSolution;
use nonlocal::polynomial::{ComplexPolynomial, Polynomial};
use nonlocal::sphere::SphereFunction;
use proptest::prelude::*;

fn quick() -> ClassifyOptions {
    ClassifyOptions { resolution: 64, ..ClassifyOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dichotomy_at_one_half(s in 0.05..0.95f64, dim in 1usize..=2, anisotropic in any::<bool>()) {
        let m = if anisotropic && dim == 2 {
            let a = SphereFunction::from_coefficients(2, vec![1.0, 0.0, 0.0, 0.3, 0.0]).unwrap();
            LevyMeasure::anisotropic(s, a).unwrap()
        } else {
            LevyMeasure::fractional_laplacian(dim, s).unwrap()
        };
        let r = classify(&m, &ComplexPolynomial::zero(dim), &quick()).unwrap();
        let expected = if s <= 0.5 { Conclusion::ConstantsOnly } else { Conclusion::Affine { drift: None } };
        prop_assert_eq!(r.conclusion, expected);
    }
}

#[test]
fn half_order_admits_constants_only() {
    let m = LevyMeasure::fractional_laplacian(1, 0.5).unwrap();
    let r = classify(&m, &ComplexPolynomial::zero(1), &quick()).unwrap();
    assert_eq!(r.conclusion, Conclusion::ConstantsOnly);
}

#[test]
fn ilw_solutions_are_affine_below_the_decay_bound() {
    let m = LevyMeasure::intermediate_long_wave(0.6).unwrap();
    let p = ComplexPolynomial::zero(1);
    let r = classify(&m, &p, &quick()).unwrap();
    assert_eq!(r.conclusion, Conclusion::PolynomialBelow { bound: 1.2 });
    let suite = default_suite(1).unwrap();
    for (terms, ok) in [
        (vec![([0, 0, 0], 2.0)], true),
        (vec![([1, 0, 0], 1.0), ([0, 0, 0], -0.5)], true),
        (vec![([2, 0, 0], 1.0)], false),
    ] {
        let u = CandidateSolution::polynomial(Polynomial::new(1, terms.clone()).unwrap());
        let v = verify_solution(&u, &m, &p, &suite).unwrap();
        if ok {
            assert!(v.verified, "{terms:?}: {v:?}");
        } else {
            assert!(v.max_residual > 1e-2, "{terms:?}: {v:?}");
        }
    }
}
