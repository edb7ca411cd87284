//! Executes a parsed spec and renders the report.

use std::fmt::Write as _;

use nonlocal::error::Error;
use nonlocal::liouville::{check_hypotheses, classify, default_suite, verify_solution, ClassifyOptions, RESIDUAL_TOL};
use nonlocal::measures::{LevyMeasure, RadialProfile};
use nonlocal::operator::{apply_with, decay_bound_check, ray_points, ApplyOptions, CandidateSolution, TestFunction, TrigTerm};
use nonlocal::polynomial::{ComplexPolynomial, MultiIndex, Polynomial};
use nonlocal::quadrature::Tolerance;
use nonlocal::sphere::{expand, SphereFunction};
use nonlocal::symbols::{duality_check, symbol_closed_form, symbol_of, symbol_quadrature, DualityGrid};
use num_complex::Complex64;

use crate::spec::{serialize_spec, Anisotropy, Job, Kind, OperatorSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 1;
pub const EXIT_HYPOTHESIS: u8 = 2;
pub const EXIT_TOLERANCE: u8 = 3;

/// A rendered report and the process exit code that goes with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub exit_code: u8,
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::Domain(_) | Error::Unsupported(_) => EXIT_PARSE,
        Error::Hypothesis { .. } => EXIT_HYPOTHESIS,
        Error::ToleranceNotMet { .. }
        | Error::TailBoundExceeded { .. }
        | Error::Divergent(_)
        | Error::InsufficientGrid(_)
        | Error::BoundaryLeakage(_)
        | Error::Inconclusive(_) => EXIT_TOLERANCE,
    }
}

/// Fills in the job-dependent defaults so the report records every setting
/// that influenced the result.
pub fn resolve(spec: &OperatorSpec) -> OperatorSpec {
    let mut out = spec.clone();
    let o = &mut out.options;
    let dim = spec.measure.dim;
    match spec.job {
        Job::Symbol => {
            o.tol.get_or_insert(1e-4);
        }
        Job::Apply => {
            o.tol.get_or_insert(1e-11);
            out.center.get_or_insert_with(|| vec![0.0; dim]);
            out.width.get_or_insert(1.0);
        }
        Job::Classify => {
            o.tol.get_or_insert(1e-6);
            o.grid.get_or_insert(128);
            o.half_width.get_or_insert(4.0);
            o.verify.get_or_insert(false);
        }
        Job::Check => {
            o.tol.get_or_insert(RESIDUAL_TOL);
            o.grid.get_or_insert(41);
            o.half_width.get_or_insert(20.0);
            out.center.get_or_insert_with(|| vec![0.0; dim]);
            out.width.get_or_insert(1.0);
        }
        Job::Duality => {
            o.tol.get_or_insert(1e-3);
            o.grid.get_or_insert(if dim == 1 { 2048 } else { 64 });
            o.half_width.get_or_insert(20.0);
            out.center.get_or_insert_with(|| vec![0.0; dim]);
            out.width.get_or_insert(1.0);
        }
    }
    out
}

pub fn build_measure(spec: &OperatorSpec) -> Result<LevyMeasure, Error> {
    let m = &spec.measure;
    let missing = |field: &str| Error::Domain(format!("kind `{}` requires `{field}`", m.kind.name()));
    let s = m.s.ok_or_else(|| missing("s"));
    let measure = match m.kind {
        Kind::FractionalLaplacian => LevyMeasure::fractional_laplacian(m.dim, s?)?,
        Kind::Anisotropic => {
            let a = match m.anisotropy.as_ref().ok_or_else(|| missing("anisotropy"))? {
                Anisotropy::Coefficients(c) => SphereFunction::from_coefficients(m.dim, c.clone())?,
                Anisotropy::Cos2(eps) if m.dim == 2 => SphereFunction::from_coefficients(2, vec![1.0, 0.0, 0.0, *eps, 0.0])?,
                Anisotropy::Cos2(eps) => {
                    let eps = *eps;
                    let zonal = move |t: &[f64]| {
                        let z = t[2] / (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
                        1.0 + eps * 0.5 * (3.0 * z * z - 1.0)
                    };
                    expand(3, zonal, 8)?.function
                }
            };
            LevyMeasure::anisotropic(s?, a)?
        }
        Kind::Relativistic => {
            let s = s?;
            LevyMeasure::relativistic(m.dim, s, m.sigma.unwrap_or(s))?
        }
        Kind::Ilw => LevyMeasure::intermediate_long_wave(m.sigma.ok_or_else(|| missing("sigma"))?)?,
        Kind::UserRadial => {
            let alpha = m.alpha.ok_or_else(|| missing("alpha"))?;
            let scale = m.scale.ok_or_else(|| missing("scale"))?;
            let profile = RadialProfile::Tempered { scale, alpha, rate: m.rate.unwrap_or(0.0) };
            LevyMeasure::user_radial(m.dim, profile, alpha / 2.0, m.sigma.unwrap_or(alpha / 2.0))?
        }
    };
    Ok(if m.reflect { measure.reflect() } else { measure })
}

fn multi_index(a: &[u32]) -> MultiIndex {
    let mut out = [0; 3];
    out[..a.len()].copy_from_slice(a);
    out
}

pub fn build_polynomial(spec: &OperatorSpec) -> Result<ComplexPolynomial, Error> {
    let terms = spec.polynomial.iter().map(|(a, re, im)| (multi_index(a), Complex64::new(*re, *im))).collect();
    ComplexPolynomial::new(spec.measure.dim, terms)
}

fn test_function(spec: &OperatorSpec) -> Result<TestFunction, Error> {
    let dim = spec.measure.dim;
    let center = spec.center.clone().unwrap_or_else(|| vec![0.0; dim]);
    TestFunction::gaussian_poly(center, spec.width.unwrap_or(1.0), Polynomial::constant(dim, 1.0))
}

fn candidate(spec: &OperatorSpec) -> Result<Option<CandidateSolution>, Error> {
    let Some(c) = &spec.candidate else { return Ok(None) };
    if !c.trig.is_empty() {
        if !c.poly.is_empty() {
            return Err(Error::Unsupported("a candidate is either polynomial or trigonometric".into()));
        }
        let terms = c.trig.iter().map(|&[freq, cos_amp, sin_amp]| TrigTerm { freq, cos_amp, sin_amp }).collect();
        return Ok(Some(CandidateSolution::trig(terms)));
    }
    let terms = c.poly.iter().map(|(a, v)| (multi_index(a), *v)).collect();
    Ok(Some(CandidateSolution::polynomial(Polynomial::new(spec.measure.dim, terms)?)))
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn vector(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", items.join(", "))
}

/// Runs `spec` (already resolved) and appends the `[result]` section to `out`.
/// Returns the exit code.
fn execute(spec: &OperatorSpec, out: &mut String) -> Result<u8, Error> {
    let m = build_measure(spec)?;
    let p = build_polynomial(spec)?;
    let o = &spec.options;
    let tol = o.tol.unwrap_or(1e-6);
    let mut code = EXIT_OK;
    match spec.job {
        Job::Symbol => {
            if spec.points.is_empty() {
                return Err(Error::Domain("the symbol job needs `points`".into()));
            }
            let eta = symbol_of(&m);
            let has_closed_form = symbol_closed_form(&m).is_ok();
            let _ = writeln!(out, "provenance = {}", eta.provenance());
            let mut worst = 0.0_f64;
            for (i, xi) in spec.points.iter().enumerate() {
                let value = eta.eval(xi)? + if p.is_zero() { Complex64::new(0.0, 0.0) } else { p.eval_symbol(xi) };
                let _ = writeln!(out, "value.{} = xi {} re {} im {}", i + 1, vector(xi), num(value.re), num(value.im));
                if has_closed_form {
                    let closed = eta.eval(xi)?;
                    let quad = symbol_quadrature(&m, xi)?;
                    let rel = (closed - quad).norm() / closed.norm().max(f64::MIN_POSITIVE);
                    worst = worst.max(rel);
                }
            }
            if has_closed_form {
                let _ = writeln!(out, "quadrature_max_rel_diff = {}", num(worst));
                let passed = worst <= tol;
                let _ = writeln!(out, "passed = {passed}");
                if !passed {
                    code = EXIT_TOLERANCE;
                }
            }
        }
        Job::Apply => {
            if spec.points.is_empty() {
                return Err(Error::Domain("the apply job needs `points`".into()));
            }
            let phi = test_function(spec)?;
            let opts = ApplyOptions { tol: Tolerance::new(tol * 1e-2, tol), ..ApplyOptions::default() };
            for (i, x) in spec.points.iter().enumerate() {
                let v = apply_with(&m, &phi, x, &opts)?;
                let _ = writeln!(out, "value.{} = x {} L_phi {}", i + 1, vector(x), num(v));
            }
        }
        Job::Classify => {
            let opts = ClassifyOptions {
                half_width: o.half_width.unwrap_or(4.0),
                resolution: o.grid.unwrap_or(128),
                tol,
                verify: o.verify.unwrap_or(false),
            };
            let r = classify(&m, &p, &opts)?;
            let _ = writeln!(out, "operator_id = {}", r.operator_id);
            write_hypotheses(out, &r.hypotheses);
            let z = &r.zero_set;
            let centroids: Vec<String> = z.clusters.iter().map(|c| vector(&c.centroid)).collect();
            let _ = writeln!(out, "zero_set.clusters = [{}]", centroids.join(", "));
            let _ = writeln!(out, "zero_set.g_subset_origin = {}", z.g_subset_origin);
            let _ = writeln!(out, "zero_set.spacing = {}", num(z.spacing));
            let _ = writeln!(out, "zero_set.min_modulus_elsewhere = {}", num(z.min_modulus_elsewhere));
            let _ = writeln!(out, "zero_set.certificate = {}", z.certificate);
            let _ = writeln!(out, "conclusion = {}", r.conclusion);
            for res in &r.residuals {
                let _ = writeln!(out, "residual.{} = {}", res.candidate, num(res.residual));
            }
            let _ = writeln!(out, "caveat = {}", r.caveat);
        }
        Job::Check => {
            let h = check_hypotheses(&m)?;
            write_hypotheses(out, &h);
            let phi = test_function(spec)?;
            let points = ray_points(m.dim(), o.half_width.unwrap_or(20.0), o.grid.unwrap_or(41));
            let d = decay_bound_check(&m, &phi, &points)?;
            let _ = writeln!(out, "decay_bound.sup_ratio = {}", num(d.sup_ratio));
            let _ = writeln!(out, "decay_bound.bound = {}", num(d.constant * d.norm));
            let _ = writeln!(out, "decay_bound.outer_growth = {}", d.outer_growth);
            let _ = writeln!(out, "decay_bound.passed = {}", d.passed);
            let mut passed = d.passed;
            if let Some(u) = candidate(spec)? {
                let v = verify_solution(&u, &m, &p, &default_suite(m.dim())?)?;
                for (i, r) in v.residuals.iter().enumerate() {
                    let _ = writeln!(out, "candidate.residual.{} = {}", i + 1, num(*r));
                }
                let verified = v.max_residual <= tol;
                let _ = writeln!(out, "candidate.verified = {verified}");
                passed &= verified;
            }
            let failed: Vec<&str> = [
                (!h.mass_ok, "mass"),
                (!h.decay_ok, "decay"),
                (!h.regularity_proxy_ok, "regularity"),
                (h.positivity_ok == Some(false), "positivity"),
            ]
            .into_iter()
            .filter_map(|(f, name)| f.then_some(name))
            .collect();
            code = if !failed.is_empty() {
                EXIT_HYPOTHESIS
            } else if !passed {
                EXIT_TOLERANCE
            } else {
                EXIT_OK
            };
        }
        Job::Duality => {
            let phi = test_function(spec)?;
            let grid = DualityGrid { half_width: o.half_width.unwrap_or(20.0), points: o.grid.unwrap_or(2048) };
            let r = duality_check(&m, &phi, &grid)?;
            let _ = writeln!(out, "max_rel_err = {}", num(r.max_rel_err));
            let _ = writeln!(out, "worst_frequency = {}", vector(&r.worst_frequency));
            let _ = writeln!(out, "frequencies_checked = {}", r.frequencies_checked);
            let passed = r.max_rel_err <= tol;
            let _ = writeln!(out, "passed = {passed}");
            if !passed {
                code = EXIT_TOLERANCE;
            }
        }
    }
    Ok(code)
}

fn write_hypotheses(out: &mut String, h: &nonlocal::liouville::Hypotheses) {
    let _ = writeln!(out, "hypotheses.mass = {}", h.mass_ok);
    let _ = writeln!(out, "hypotheses.decay = {}", h.decay_ok);
    let _ = writeln!(out, "hypotheses.regularity = {}", h.regularity_proxy_ok);
    match h.positivity_ok {
        Some(ok) => {
            let _ = writeln!(out, "hypotheses.positivity = {ok}");
        }
        None => {
            let _ = writeln!(out, "hypotheses.positivity = not applicable");
        }
    }
}

/// Runs the spec's job. The report starts with the resolved spec, so it can
/// be fed back to reproduce the run, followed by a `[result]` section.
pub fn run(spec: &OperatorSpec) -> Outcome {
    let resolved = resolve(spec);
    let mut report = String::from("# nonlocal report\n");
    report.push_str(&serialize_spec(&resolved));
    report.push_str("\n[result]\n");
    let _ = writeln!(report, "job = {}", resolved.job.name());
    let exit_code = match execute(&resolved, &mut report) {
        Ok(code) => {
            let _ = writeln!(report, "status = {}", if code == EXIT_OK { "ok" } else { "failed" });
            code
        }
        Err(e) => {
            let _ = writeln!(report, "status = error");
            let _ = writeln!(report, "error = {}", e.to_string().replace('\n', "; "));
            exit_code(&e)
        }
    };
    Outcome { report, exit_code }
}
