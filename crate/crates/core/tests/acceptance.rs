//! One line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use nonlocal::liouville::{
    classify, default_suite, levy_drift_orthogonality, verify_solution, ClassifyOptions, Conclusion, RESIDUAL_TOL,
};
use nonlocal::measures::LevyMeasure;
use nonlocal::operator::{decay_bound_check, ray_points, CandidateSolution, TestFunction, TrigTerm};
use nonlocal::polynomial::{ComplexPolynomial, Polynomial};
use nonlocal::quadrature::composite;
use nonlocal::special_fn::{frac_laplacian_constant, gegenbauer, gegenbauer_norm, one_minus_cos_moment};
use nonlocal::sphere::{
    default_direction_grid, expand, funk_hecke_mu, mu_decay_report, positivity_check, real_spherical_harmonics,
    sobolev_check, zonal_integral, SphereFunction,
};
use nonlocal::symbols::{duality_check, symbol_closed_form, symbol_quadrature, DualityGrid};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lopsided() -> SphereFunction {
    SphereFunction::from_coefficients(2, vec![1.0, 0.2, -0.1, 0.3, 0.05]).unwrap()
}

fn symbol_cross_validation() -> Check {
    let start = Instant::now();
    let operators = [
        LevyMeasure::fractional_laplacian(1, 0.3).unwrap(),
        LevyMeasure::fractional_laplacian(2, 0.7).unwrap(),
        LevyMeasure::relativistic(1, 0.5, 0.5).unwrap(),
        LevyMeasure::relativistic(2, 0.75, 0.75).unwrap(),
        LevyMeasure::intermediate_long_wave(0.6).unwrap(),
        LevyMeasure::anisotropic(0.6, lopsided()).unwrap(),
    ];
    let mut worst = 0.0_f64;
    for m in &operators {
        let eta = symbol_closed_form(m).map_err(|e| e.to_string())?;
        for k in 0..30 {
            let r = 10f64.powf(-1.0 + 2.0 * k as f64 / 29.0);
            let xi = if m.dim() == 1 { vec![r] } else { vec![r * 0.4f64.cos(), r * 0.4f64.sin()] };
            let exact = eta.eval(&xi).map_err(|e| e.to_string())?;
            let quad = symbol_quadrature(m, &xi).map_err(|e| e.to_string())?;
            worst = worst.max((exact - quad).norm() / exact.norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-4 && secs <= 60.0, format!("max rel err {worst:.2e} over 6 operators x 30 frequencies in {secs:.1} s"))
}

fn constant_identity() -> Check {
    let mut worst = 0.0_f64;
    for s in [0.25, 0.5, 0.75] {
        let moment = one_minus_cos_moment(s).map_err(|e| e.to_string())?;
        let expected = 1.0 / (2.0 * frac_laplacian_constant(1, s).map_err(|e| e.to_string())?);
        worst = worst.max((moment - expected).abs() / expected);
    }
    ensure(worst <= 1e-6, format!("max rel err {worst:.2e}"))
}

fn fourier_duality() -> Check {
    let phi = TestFunction::gaussian(1, 1.0).unwrap();
    let mut summary = Vec::new();
    let mut ok = true;
    for s in [0.3, 0.5, 0.8] {
        let m = LevyMeasure::fractional_laplacian(1, s).unwrap();
        let ladder: Vec<f64> = [64, 128, 256, 512, 1024, 2048]
            .iter()
            .map(|&points| duality_check(&m, &phi, &DualityGrid { half_width: 20.0, points }).map(|r| r.max_rel_err))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let finest = *ladder.last().unwrap();
        // strictly better while the grid still under-resolves the Gaussian; after
        // that the error sits at the exterior-correction floor and must not grow
        let decreasing = ladder[1] < ladder[0] && ladder.windows(2).all(|w| w[1] <= w[0] * 1.01);
        ok &= finest <= 1e-3 && decreasing;
        summary.push(format!("s={s}: {finest:.2e} (64 pts {:.2e})", ladder[0]));
    }
    ensure(ok, summary.join(", "))
}

fn funk_hecke() -> Check {
    let s = 0.35;
    let kernels: [(&str, Box<dyn Fn(f64) -> f64>); 4] = [
        ("1", Box::new(|_| 1.0)),
        ("t", Box::new(|t| t)),
        ("t^2", Box::new(|t| t * t)),
        ("|t|^2s", Box::new(move |t: f64| t.abs().powf(2.0 * s))),
    ];
    let directions = [[0.0, 0.0, 1.0], [0.6, -0.48, 0.64], [-0.36, 0.48, -0.8]];
    let mut worst = 0.0_f64;
    for (_, h) in &kernels {
        for l in 0..=8 {
            let mu = funk_hecke_mu(h, l, 3).map_err(|e| e.to_string())?;
            for xi in &directions {
                let y = real_spherical_harmonics(l, xi);
                for index in l * l..(l + 1) * (l + 1) {
                    let direct =
                        zonal_integral(h, xi, |th| real_spherical_harmonics(l, th)[index]).map_err(|e| e.to_string())?;
                    let predicted = mu * y[index];
                    worst = worst.max((direct - predicted).abs() / predicted.abs().max(1e-6));
                }
            }
        }
    }
    let mu1 = funk_hecke_mu(|t| t, 1, 3).map_err(|e| e.to_string())?;
    let mu1_err = (mu1 - 4.0 * PI / 3.0).abs() / (4.0 * PI / 3.0);
    let degrees: Vec<usize> = (1..=32).collect();
    let mut bound_ok = true;
    for (_, h) in &kernels {
        bound_ok &= mu_decay_report(h, 3, &degrees).map_err(|e| e.to_string())?.passed;
    }
    ensure(
        worst <= 1e-8 && mu1_err <= 1e-8 && bound_ok,
        format!("identity max rel err {worst:.2e}, mu(1,3) err {mu1_err:.2e}, decay bound l<=32 {bound_ok}"),
    )
}

fn gegenbauer_norms() -> Check {
    let mut worst = 0.0_f64;
    for n in 3..=5 {
        let nu = (n as f64 - 2.0) / 2.0;
        for l in 0..=10 {
            let direct = composite(0.0, PI, 16, 20, |th| {
                gegenbauer(l, nu, th.cos()).unwrap().powi(2) * th.sin().powi(n as i32 - 2)
            });
            let closed = gegenbauer_norm(l, n).map_err(|e| e.to_string())?;
            worst = worst.max((direct - closed).abs() / closed);
        }
    }
    ensure(worst <= 1e-8, format!("max rel err {worst:.2e}"))
}

fn poly(dim: usize, terms: &[([u32; 3], f64)]) -> CandidateSolution {
    CandidateSolution::polynomial(Polynomial::new(dim, terms.to_vec()).unwrap())
}

fn residual(u: &CandidateSolution, m: &LevyMeasure, p: &ComplexPolynomial) -> Result<f64, String> {
    let suite = default_suite(m.dim()).map_err(|e| e.to_string())?;
    verify_solution(u, m, p, &suite).map(|r| r.max_residual).map_err(|e| e.to_string())
}

fn liouville_verifications() -> Check {
    let zero = |n| ComplexPolynomial::zero(n);
    let constant = |n| poly(n, &[([0; 3], 1.0)]);
    let relativistic = LevyMeasure::relativistic(2, 0.5, 1.2).unwrap();
    let frac = LevyMeasure::fractional_laplacian(2, 0.75).unwrap();
    let mut positives = vec![
        ("const FL", residual(&constant(2), &LevyMeasure::fractional_laplacian(2, 0.4).unwrap(), &zero(2))?),
        ("const aniso", residual(&constant(2), &LevyMeasure::anisotropic(0.6, lopsided()).unwrap(), &zero(2))?),
        ("const rel", residual(&constant(1), &LevyMeasure::relativistic(1, 0.5, 0.5).unwrap(), &zero(1))?),
        ("const ILW", residual(&constant(1), &LevyMeasure::intermediate_long_wave(0.6).unwrap(), &zero(1))?),
        ("affine", residual(&poly(2, &[([1, 0, 0], 3.0), ([0, 1, 0], -1.0), ([0; 3], -2.0)]), &frac, &zero(2))?),
        ("x^2-y^2 rel", residual(&poly(2, &[([2, 0, 0], 1.0), ([0, 2, 0], -1.0)]), &relativistic, &zero(2))?),
    ];
    for s in [0.4, 0.6] {
        let m = LevyMeasure::fractional_laplacian(1, s).unwrap();
        let p = ComplexPolynomial::constant(1, -1.0);
        for (cos_amp, sin_amp) in [(1.0, 0.0), (0.0, 1.0)] {
            let u = CandidateSolution::trig(vec![TrigTerm { freq: 1.0, cos_amp, sin_amp }]);
            positives.push(("trig", residual(&u, &m, &p)?));
        }
    }
    let drift = levy_drift_orthogonality(&[vec![0.0; 2], vec![0.0; 2]], &[1.0, 0.0], 0.75, &[1.0, 0.0])
        .map_err(|e| e.to_string())?
        .residual;
    let negatives = [
        ("x1 with drift e1", drift),
        ("x1^2 FL", residual(&poly(2, &[([2, 0, 0], 1.0)]), &frac, &zero(2))?),
        ("x^2 rel", residual(&poly(2, &[([2, 0, 0], 1.0)]), &relativistic, &zero(2))?),
    ];
    let worst_positive = positives.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let weakest_negative = negatives.iter().map(|(_, r)| *r).fold(f64::INFINITY, f64::min);
    ensure(
        worst_positive <= RESIDUAL_TOL && weakest_negative > 1e-2,
        format!("witness residuals <= {worst_positive:.2e}, controls >= {weakest_negative:.2e}"),
    )
}

fn classification_table() -> Check {
    let opts = ClassifyOptions::default();
    let run = |m: &LevyMeasure, p: &ComplexPolynomial| classify(m, p, &opts).map_err(|e| e.to_string());
    let mut failures = Vec::new();
    for dim in [1, 2] {
        for (s, want) in [(0.25, Conclusion::ConstantsOnly), (0.5, Conclusion::ConstantsOnly), (0.6, Conclusion::Affine { drift: None }), (0.9, Conclusion::Affine { drift: None })] {
            let got = run(&LevyMeasure::fractional_laplacian(dim, s).unwrap(), &ComplexPolynomial::zero(dim))?.conclusion;
            if got != want {
                failures.push(format!("FL N={dim} s={s}: {got}"));
            }
        }
    }
    let half = LevyMeasure::fractional_laplacian(1, 0.5).unwrap();
    let got = run(&half, &ComplexPolynomial::constant(1, 1.0))?.conclusion;
    if got != Conclusion::Zero {
        failures.push(format!("mass term: {got}"));
    }
    let helmholtz = run(&LevyMeasure::fractional_laplacian(1, 0.6).unwrap(), &ComplexPolynomial::constant(1, -1.0))?;
    let mut centres: Vec<f64> = helmholtz.zero_set.clusters.iter().map(|c| c.centroid[0]).collect();
    centres.sort_by(f64::total_cmp);
    let clusters_ok = centres.len() == 3 && (centres[0] + 1.0).abs() < 1e-6 && centres[1] == 0.0 && (centres[2] - 1.0).abs() < 1e-6;
    if !clusters_ok || helmholtz.conclusion != (Conclusion::TrigSpan { freq: 1.0 }) {
        failures.push(format!("Helmholtz: clusters {centres:?}, {}", helmholtz.conclusion));
    }
    let got = run(&LevyMeasure::relativistic(2, 0.5, 1.2).unwrap(), &ComplexPolynomial::zero(2))?.conclusion;
    if got != (Conclusion::HarmonicPolynomialBelow { bound: 2.4 }) {
        failures.push(format!("relativistic: {got}"));
    }
    let got = run(&LevyMeasure::intermediate_long_wave(0.6).unwrap(), &ComplexPolynomial::zero(1))?.conclusion;
    if got != (Conclusion::PolynomialBelow { bound: 1.2 }) {
        failures.push(format!("ILW: {got}"));
    }
    let zero_a = [vec![0.0; 2], vec![0.0; 2]];
    let drift_p = ComplexPolynomial::drift_diffusion(&zero_a, &[1.0, 0.0]).unwrap();
    let got = run(&LevyMeasure::fractional_laplacian(2, 0.75).unwrap(), &drift_p)?.conclusion;
    if got != (Conclusion::Affine { drift: Some(vec![1.0, 0.0]) }) {
        failures.push(format!("drift: {got}"));
    }
    let along = levy_drift_orthogonality(&zero_a, &[1.0, 0.0], 0.75, &[0.0, 1.0]).map_err(|e| e.to_string())?;
    let across = levy_drift_orthogonality(&zero_a, &[1.0, 0.0], 0.75, &[1.0, 0.0]).map_err(|e| e.to_string())?;
    if !(along.orthogonal && along.consistent && along.residual <= RESIDUAL_TOL && across.consistent && across.residual > 1e-2) {
        failures.push(format!("orthogonality: {:.2e} / {:.2e}", along.residual, across.residual));
    }
    if failures.is_empty() {
        Ok("dichotomy, u = 0, Helmholtz {0, +-1} trig span, harmonic, ILW polynomial, b.b* = 0".to_string())
    } else {
        Err(failures.join("; "))
    }
}

fn decay_bound() -> Check {
    let operators = [
        LevyMeasure::fractional_laplacian(1, 0.4).unwrap(),
        LevyMeasure::fractional_laplacian(2, 0.7).unwrap(),
        LevyMeasure::anisotropic(0.6, lopsided()).unwrap(),
        LevyMeasure::relativistic(1, 0.5, 0.5).unwrap(),
        LevyMeasure::intermediate_long_wave(0.6).unwrap(),
    ];
    let mut worst_change = 0.0_f64;
    let mut ok = true;
    for m in &operators {
        let phi = TestFunction::gaussian(m.dim(), 1.0).unwrap();
        let near = decay_bound_check(m, &phi, &ray_points(m.dim(), 20.0, 41)).map_err(|e| e.to_string())?;
        let far = decay_bound_check(m, &phi, &ray_points(m.dim(), 40.0, 81)).map_err(|e| e.to_string())?;
        let change = (far.sup_ratio - near.sup_ratio).abs() / near.sup_ratio;
        worst_change = worst_change.max(change);
        ok &= near.passed && !near.outer_growth && change < 0.05;
    }
    ensure(ok, format!("bounded, no outer growth; radius doubling changes sup by {worst_change:.1e} (relative)"))
}

fn anisotropic_consistency() -> Check {
    let s = 0.45;
    let flat = LevyMeasure::anisotropic(s, SphereFunction::constant(2, 1.0).unwrap()).unwrap();
    let mut symbol_err = 0.0_f64;
    for xi in [[0.3f64, 0.1], [1.0, -2.0], [-4.0, 3.0]] {
        let expected = (xi[0] * xi[0] + xi[1] * xi[1]).powf(s);
        let quad = symbol_quadrature(&flat, &xi).map_err(|e| e.to_string())?;
        symbol_err = symbol_err.max((quad.re - expected).abs().max(quad.im.abs()) / expected);
    }
    let grid = default_direction_grid(2).map_err(|e| e.to_string())?;
    let cos2 = |eps: f64, base: f64| SphereFunction::from_coefficients(2, vec![base, 0.0, 0.0, eps, 0.0]).unwrap();
    let small = positivity_check(&cos2(0.2, 1.0), s, &grid).map_err(|e| e.to_string())?.passed;
    let pure = positivity_check(&cos2(1.0, 0.0), s, &grid).map_err(|e| e.to_string())?.passed;
    let zonal = expand(3, |t: &[f64]| 1.0 + 0.3 * (1.5 * t[2] * t[2] - 0.5), 8).map_err(|e| e.to_string())?.function;
    let smooth_ok = sobolev_check(&cos2(0.3, 1.0), s).map_err(|e| e.to_string())?.passed
        && sobolev_check(&zonal, s).map_err(|e| e.to_string())?.passed
        && sobolev_check(&lopsided(), s).map_err(|e| e.to_string())?.passed;
    let mut rough = vec![0.0; 2 * 64 + 1];
    rough[0] = 1.0;
    for l in (1..=64).step_by(2) {
        rough[2 * l - 1] = 1.0 / l as f64;
    }
    let rough_fails = !sobolev_check(&SphereFunction::from_coefficients(2, rough).unwrap(), s).map_err(|e| e.to_string())?.passed;
    ensure(
        symbol_err <= 1e-4 && small && !pure && smooth_ok && rough_fails,
        format!(
            "a=1 symbol err {symbol_err:.2e}; positivity 1+0.2cos2t {small}, cos2t {pure}; sobolev smooth {smooth_ok}, l^-1 odd rejected {rough_fails}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("symbol cross-validation", symbol_cross_validation),
        ("constant identity", constant_identity),
        ("Fourier duality", fourier_duality),
        ("Funk-Hecke", funk_hecke),
        ("Gegenbauer norm", gegenbauer_norms),
        ("Liouville verifications", liouville_verifications),
        ("classification table", classification_table),
        ("decay bound", decay_bound),
        ("anisotropic consistency", anisotropic_consistency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (status, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {status} {name}: {detail} [{:.1} s]", i + 1, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
