use nonlocal::error::Error;
use nonlocal_cli::spec::{Anisotropy, Candidate, Kind, MeasureSpec, Options};
use nonlocal_cli::{parse_spec, resolve, run, serialize_spec, Job, OperatorSpec};
use proptest::prelude::*;

fn errors(text: &str) -> Vec<(usize, String)> {
    match parse_spec(text) {
        Err(Error::Parse(errs)) => errs.into_iter().map(|e| (e.line, e.message)).collect(),
        other => panic!("expected parse errors, got {other:?}"),
    }
}

#[test]
fn missing_fields_are_reported() {
    let errs = errors("[operator]\nkind = relativistic\n\n[job]\nkind = symbol\n");
    assert!(errs.iter().any(|(l, m)| *l == 0 && m.contains("`dim`")), "{errs:?}");
    assert!(errs.iter().any(|(l, m)| *l == 2 && m.contains("requires `s`")), "{errs:?}");
}

#[test]
fn malformed_lines_are_reported() {
    let errs = errors("[operator]\nkind = ilw\nsigma = -1\nsigma = 2\njunk\n[extra]\n[job]\nkind = fly\n");
    let lines: Vec<usize> = errs.iter().map(|(l, _)| *l).collect();
    for line in [3, 4, 5, 6, 8] {
        assert!(lines.contains(&line), "line {line} missing from {errs:?}");
    }
}

#[test]
fn dimensions_must_agree() {
    let errs = errors("[operator]\nkind = fractional_laplacian\ndim = 2\ns = 0.5\n[polynomial]\ncoef[1] = 1\n[job]\nkind = classify\n");
    assert!(errs.iter().any(|(_, m)| m.contains("2 entries")), "{errs:?}");
}

#[test]
fn comments_and_complex_coefficients() {
    let spec = parse_spec(
        "# drift\n[operator]\nkind = fractional_laplacian # isotropic\ndim = 1\ns = 0.3\n[polynomial]\ncoef[1] = [0, 2.5]\n[job]\nkind = classify\n",
    )
    .unwrap();
    assert_eq!(spec.polynomial, vec![(vec![1], 0.0, 2.5)]);
    assert_eq!(spec.name, "operator");
}

#[test]
fn reports_are_deterministic_and_embed_options() {
    let spec = parse_spec("[operator]\nkind = fractional_laplacian\ndim = 1\ns = 0.6\n[polynomial]\ncoef[0] = -1\n[job]\nkind = classify\n").unwrap();
    let first = run(&spec);
    assert_eq!(first, run(&spec));
    assert!(first.report.contains("conclusion = span{cos(1x), sin(1x)}"), "{}", first.report);
    let embedded = first.report.split("\n[result]").next().unwrap();
    assert_eq!(parse_spec(embedded).unwrap(), resolve(&spec));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3, (1e-8..1e-1f64), Just(0.1), Just(-2.0)]
}

fn arb_spec() -> impl Strategy<Value = OperatorSpec> {
    let kinds = prop_oneof![
        Just(Kind::FractionalLaplacian),
        Just(Kind::Anisotropic),
        Just(Kind::Relativistic),
        Just(Kind::Ilw),
        Just(Kind::UserRadial)
    ];
    let jobs = prop_oneof![Just(Job::Symbol), Just(Job::Apply), Just(Job::Classify), Just(Job::Check), Just(Job::Duality)];
    (kinds, 1usize..=3, 0.01..0.99f64, proptest::option::of(0.1..3.0f64), jobs, any::<bool>())
        .prop_flat_map(|(kind, dim, s, sigma, job, reflect)| {
            let dim = match kind {
                Kind::Ilw => 1,
                Kind::Anisotropic => dim.max(2),
                _ => dim,
            };
            let index = proptest::collection::vec(0u32..2, dim);
            let poly = proptest::collection::vec((index.clone(), finite(), finite()), 0..4);
            let points = proptest::collection::vec(proptest::collection::vec(finite(), dim), 0..3);
            let cand = proptest::option::of((
                proptest::collection::vec((index, finite()), 0..3),
                proptest::collection::vec([finite(), finite(), finite()], 0..2),
            ));
            let opts = (
                proptest::option::of(1e-12..1.0f64),
                proptest::option::of(1usize..5000),
                proptest::option::of(0.5..50.0f64),
                proptest::option::of(any::<bool>()),
            );
            let aniso = prop_oneof![
                proptest::collection::vec(finite(), if dim == 2 { 5 } else { 9 }).prop_map(Anisotropy::Coefficients),
                finite().prop_map(Anisotropy::Cos2)
            ];
            (Just((kind, dim, s, sigma, job, reflect)), poly, points, cand, opts, aniso, "[a-z][a-z0-9_]{0,8}")
        })
        .prop_map(|((kind, dim, s, sigma, job, reflect), polynomial, points, cand, (tol, grid, half_width, verify), aniso, name)| {
            let measure = MeasureSpec {
                kind,
                dim,
                s: (kind != Kind::Ilw && kind != Kind::UserRadial).then_some(s),
                sigma: if kind == Kind::Ilw { sigma.or(Some(1.0)) } else { sigma },
                anisotropy: (kind == Kind::Anisotropic).then_some(aniso),
                alpha: (kind == Kind::UserRadial).then_some(2.0 * s),
                scale: (kind == Kind::UserRadial).then_some(1.5),
                rate: (kind == Kind::UserRadial).then_some(0.25),
                reflect,
            };
            let mut polynomial = polynomial;
            let mut seen = Vec::new();
            polynomial.retain(|(a, _, _)| !seen.contains(a) && { seen.push(a.clone()); true });
            let cand = cand.map(|(mut poly, trig)| {
                let mut seen = Vec::new();
                poly.retain(|(a, _)| !seen.contains(a) && { seen.push(a.clone()); true });
                Candidate { poly, trig }
            });
            OperatorSpec {
                name,
                measure,
                polynomial,
                job,
                points,
                center: Some(vec![0.5; dim]),
                width: Some(0.75),
                candidate: cand,
                options: Options { tol, grid, half_width, verify },
            }
        })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(spec in arb_spec()) {
        let text = serialize_spec(&spec);
        prop_assert_eq!(parse_spec(&text).unwrap(), spec);
    }
}
