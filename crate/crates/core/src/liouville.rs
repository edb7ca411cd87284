//! Liouville-type classification of `L_ν u + P(−∇) u = 0` in `L¹_σ`, and
//! residual checks of candidate solutions.
//!
//! `classify` checks the hypotheses on `ν`, scans the zero set of
//! `η + P(−i·)` and maps it to a solution class: when the set is `{0}` every
//! solution is a polynomial of degree below `2σ`; in one dimension the
//! Helmholtz-type zero set `{0, ±k}` gives `span{cos kx, sin kx}`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::measures::{LevyMeasure, MeasureKind};
use crate::operator::{pairing, sks_norm, CandidateSolution, Grid, TestFunction, TrigTerm};
use crate::polynomial::{ComplexPolynomial, Polynomial};
use crate::sphere::{default_direction_grid, positivity_check, sobolev_check};
use crate::symbols::{symbol_of, zero_set_scan, ZeroSetReport};

/// Normalized residuals at or below this verify a candidate.
pub const RESIDUAL_TOL: f64 = 1e-4;

pub const CAVEAT: &str =
    "the zero set is estimated by sampling; the conclusion is numerical evidence for the classification, not a proof";

#[derive(Debug, Clone, PartialEq)]
pub struct Hypotheses {
    pub mass_ok: bool,
    pub decay_ok: bool,
    pub regularity_proxy_ok: bool,
    /// Only checked for anisotropic measures.
    pub positivity_ok: Option<bool>,
}

impl Hypotheses {
    fn failed(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.mass_ok {
            out.push("mass".to_string());
        }
        if !self.decay_ok {
            out.push("decay".to_string());
        }
        if !self.regularity_proxy_ok {
            out.push("regularity".to_string());
        }
        if self.positivity_ok == Some(false) {
            out.push("positivity".to_string());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Conclusion {
    Zero,
    ConstantsOnly,
    /// `u = b_*·x + c`; with a first-order part `b·∇` in `P`, `b·b_* = 0`.
    Affine { drift: Option<Vec<f64>> },
    PolynomialBelow { bound: f64 },
    HarmonicPolynomialBelow { bound: f64 },
    TrigSpan { freq: f64 },
    Inconclusive { reason: String },
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "u = 0"),
            Self::ConstantsOnly => write!(f, "constants only"),
            Self::Affine { drift: None } => write!(f, "affine"),
            Self::Affine { drift: Some(b) } => write!(f, "affine, u = b*.x + c with b.b* = 0 for b = {b:?}"),
            Self::PolynomialBelow { bound } => write!(f, "polynomial of degree < {bound}"),
            Self::HarmonicPolynomialBelow { bound } => write!(f, "harmonic polynomial of degree < {bound}"),
            Self::TrigSpan { freq } => write!(
                f,
                "span{{cos({freq}x), sin({freq}x)}} (the cluster at 0 carries no constants since P(0) != 0)"
            ),
            Self::Inconclusive { reason } => write!(f, "inconclusive: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub candidate: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub operator_id: String,
    pub hypotheses: Hypotheses,
    pub zero_set: ZeroSetReport,
    pub conclusion: Conclusion,
    pub residuals: Vec<Residual>,
    pub caveat: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    /// Half-width of the frequency box scanned for zeros.
    pub half_width: f64,
    pub resolution: usize,
    pub tol: f64,
    /// Pair witnesses of the conclusion (and controls) against test functions.
    pub verify: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { half_width: 4.0, resolution: 128, tol: 1e-6, verify: false }
    }
}

/// A short name of the operator `L_ν + P(−∇)`.
pub fn operator_id(m: &LevyMeasure, p: &ComplexPolynomial) -> String {
    let mut id = format!("{}(N={}, s={}", m.kind().name(), m.dim(), m.order());
    if m.decay_order() != m.order() {
        id.push_str(&format!(", sigma={}", m.decay_order()));
    }
    if m.is_reflected() {
        id.push_str(", reflected");
    }
    id.push(')');
    if !p.is_zero() {
        let terms: Vec<String> = p.terms().iter().map(|(a, c)| format!("{c}*z^{:?}", &a[..p.dim()])).collect();
        id.push_str(&format!(" + P[{}]", terms.join(" + ")));
    }
    id
}

pub fn check_hypotheses(m: &LevyMeasure) -> Result<Hypotheses> {
    let mass_ok = m.total_mass().is_ok_and(f64::is_finite);
    let decay_ok = m.decay_check(&[2.0, 4.0, 8.0, 16.0, 32.0])?.passed;
    let (regularity_proxy_ok, positivity_ok) = match m.anisotropy() {
        Some(a) => {
            let regular = sobolev_check(a, m.order())?.passed;
            let positive = positivity_check(&a.even_part(), m.order(), &default_direction_grid(a.dim())?)?.passed;
            (regular, Some(positive))
        }
        None => (true, None),
    };
    Ok(Hypotheses { mass_ok, decay_ok, regularity_proxy_ok, positivity_ok })
}

fn first_order_drift(p: &ComplexPolynomial) -> Option<Vec<f64>> {
    let drift: Vec<f64> = (0..p.dim())
        .map(|i| {
            p.terms()
                .iter()
                .filter(|(a, _)| a.iter().sum::<u32>() == 1 && a[i] == 1)
                .map(|(_, c)| c.re)
                .sum()
        })
        .collect();
    drift.iter().any(|v| *v != 0.0).then_some(drift)
}

/// Maps a zero set contained in `{0}` to the admissible polynomial class.
fn polynomial_class(m: &LevyMeasure, p: &ComplexPolynomial) -> Conclusion {
    if p.eval_symbol(&vec![0.0; m.dim()]).norm() > 0.0 {
        return Conclusion::Zero;
    }
    let bound = 2.0 * m.decay_order();
    match m.kind() {
        MeasureKind::Relativistic if p.is_zero() => Conclusion::HarmonicPolynomialBelow { bound },
        MeasureKind::IntermediateLongWave if p.is_zero() => Conclusion::PolynomialBelow { bound },
        _ if bound <= 1.0 => Conclusion::ConstantsOnly,
        _ if bound <= 2.0 => Conclusion::Affine { drift: first_order_drift(p) },
        _ => Conclusion::PolynomialBelow { bound },
    }
}

/// The one-dimensional Helmholtz pattern: `|ξ|^{2s}` with `P ≡ −λ`, `λ > 0`,
/// and clusters exactly at `{0, ±λ^{1/(2s)}}`.
fn helmholtz_frequency(m: &LevyMeasure, p: &ComplexPolynomial, zs: &ZeroSetReport) -> Option<f64> {
    if m.dim() != 1 || !matches!(m.kind(), MeasureKind::FractionalLaplacian) {
        return None;
    }
    let c = p.as_constant()?;
    if c.im != 0.0 || c.re >= 0.0 {
        return None;
    }
    let k = (-c.re).powf(1.0 / (2.0 * m.order()));
    let mut centres: Vec<f64> = zs.clusters.iter().map(|c| c.centroid[0]).collect();
    centres.sort_by(f64::total_cmp);
    let near = |a: f64, b: f64| (a - b).abs() <= 2.0 * zs.spacing;
    (centres.len() == 3 && near(centres[0], -k) && near(centres[1], 0.0) && near(centres[2], k)).then_some(k)
}

fn monomial(dim: usize, alpha: [u32; 3], c: f64) -> Polynomial {
    Polynomial::new(dim, vec![(alpha, c)]).expect("valid monomial")
}

/// Members of the conclusion class, plus one function outside it, by name.
fn witnesses(m: &LevyMeasure, conclusion: &Conclusion) -> Vec<(String, CandidateSolution)> {
    let n = m.dim();
    let poly = |name: &str, p: Polynomial| (name.to_string(), CandidateSolution::polynomial(p));
    let one = poly("1", Polynomial::constant(n, 1.0));
    let x1 = poly("x1", monomial(n, [1, 0, 0], 1.0));
    let x1_sq = poly("x1^2", monomial(n, [2, 0, 0], 1.0));
    match conclusion {
        Conclusion::Zero => vec![one],
        Conclusion::ConstantsOnly => vec![one, x1],
        Conclusion::Affine { drift } => {
            let mut out = vec![one];
            match drift {
                // a direction orthogonal to the drift, and the drift itself
                Some(b) if n >= 2 => {
                    let perp: Vec<f64> = [-b[1], b[0], 0.0][..n].to_vec();
                    let lin = |v: &[f64]| Polynomial::affine(v, 0.0).expect("affine");
                    out.push(("b_perp.x".to_string(), CandidateSolution::polynomial(lin(&perp))));
                    out.push(("b.x".to_string(), CandidateSolution::polynomial(lin(b))));
                }
                Some(_) => out.push(x1),
                None => {
                    out.push(x1);
                    out.push(x1_sq);
                }
            }
            out
        }
        Conclusion::PolynomialBelow { bound } | Conclusion::HarmonicPolynomialBelow { bound } => {
            let mut out = vec![one];
            if *bound > 1.0 {
                out.push(x1);
            }
            if *bound > 2.0 && n >= 2 {
                let harmonic = Polynomial::new(n, vec![([2, 0, 0], 1.0), ([0, 2, 0], -1.0)]).expect("valid");
                out.push(poly("x1^2 - x2^2", harmonic));
                if matches!(conclusion, Conclusion::HarmonicPolynomialBelow { .. }) {
                    out.push(x1_sq);
                }
            }
            out
        }
        Conclusion::TrigSpan { freq } => vec![
            ("cos".to_string(), CandidateSolution::trig(vec![TrigTerm { freq: *freq, cos_amp: 1.0, sin_amp: 0.0 }])),
            ("sin".to_string(), CandidateSolution::trig(vec![TrigTerm { freq: *freq, cos_amp: 0.0, sin_amp: 1.0 }])),
            one,
        ],
        Conclusion::Inconclusive { .. } => Vec::new(),
    }
}

/// Checks the hypotheses, scans the zero set of `η + P(−i·)` and draws the
/// conclusion. Fails with [`Error::Hypothesis`] when a hypothesis check fails.
pub fn classify(m: &LevyMeasure, p: &ComplexPolynomial, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    if !p.is_zero() && p.dim() != m.dim() {
        return domain("measure and polynomial dimensions differ");
    }
    let hypotheses = check_hypotheses(m)?;
    let failed = hypotheses.failed();
    if !failed.is_empty() {
        return Err(Error::Hypothesis { failed });
    }
    let eta = symbol_of(m);
    let zero_set = zero_set_scan(&eta, p, opts.half_width, opts.resolution, opts.tol)?;
    let conclusion = if zero_set.g_subset_origin {
        polynomial_class(m, p)
    } else if let Some(freq) = helmholtz_frequency(m, p, &zero_set) {
        Conclusion::TrigSpan { freq }
    } else {
        let centres: Vec<String> = zero_set.clusters.iter().map(|c| format!("{:?}", c.centroid)).collect();
        Conclusion::Inconclusive { reason: format!("zero set has clusters at {}", centres.join(", ")) }
    };
    let mut residuals = Vec::new();
    if opts.verify {
        let suite = default_suite(m.dim())?;
        for (name, u) in witnesses(m, &conclusion) {
            let report = verify_solution(&u, m, p, &suite)?;
            residuals.push(Residual { candidate: name, residual: report.max_residual });
        }
    }
    Ok(ClassificationReport {
        operator_id: operator_id(m, p),
        hypotheses,
        zero_set,
        conclusion,
        residuals,
        caveat: CAVEAT,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// `|⟨u, L_ν̃ φ + P(−∇)φ⟩| / ‖φ‖_{k,σ}` per test function (∞ when `u` is
    /// outside `L¹_σ`).
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub verified: bool,
}

/// Two Gaussian test functions: a centred one and a shifted, tilted one.
pub fn default_suite(dim: usize) -> Result<Vec<TestFunction>> {
    let centre: Vec<f64> = [0.4, -0.3, 0.2][..dim].to_vec();
    let tilt = Polynomial::new(dim, vec![([0; 3], 1.0), ([1, 0, 0], 0.5)])?;
    Ok(vec![TestFunction::gaussian(dim, 1.0)?, TestFunction::gaussian_poly(centre, 0.8, tilt)?])
}

pub fn verify_solution(
    u: &CandidateSolution,
    m: &LevyMeasure,
    p: &ComplexPolynomial,
    phis: &[TestFunction],
) -> Result<VerificationReport> {
    if phis.is_empty() {
        return domain("verify_solution needs at least one test function");
    }
    let k = p.degree().max(2);
    let mut residuals = Vec::with_capacity(phis.len());
    for phi in phis {
        let value = match pairing(u, m, p, phi) {
            Ok(v) => v,
            Err(Error::Divergent(_)) => Complex64::new(f64::INFINITY, 0.0),
            Err(e) => return Err(e),
        };
        let norm = sks_norm(phi, k, m.decay_order(), &Grid::covering(phi)?)?;
        residuals.push(value.norm() / norm);
    }
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(VerificationReport { residuals, max_residual, verified: max_residual <= RESIDUAL_TOL })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub residual: f64,
    pub orthogonal: bool,
    /// The residual is small exactly when `b_* = 0`, or `b·b_* = 0` and `s > 1/2`.
    pub consistent: bool,
}

fn is_positive_semidefinite(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let symmetric = (0..n).all(|i| (0..n).all(|j| (a[i][j] - a[j][i]).abs() <= 1e-12 * (1.0 + a[i][j].abs())));
    if !symmetric {
        return false;
    }
    // every principal minor is nonnegative
    let det = |idx: &[usize]| -> f64 {
        match idx {
            [i] => a[*i][*i],
            [i, j] => a[*i][*i] * a[*j][*j] - a[*i][*j] * a[*j][*i],
            [i, j, k] => {
                a[*i][*i] * (a[*j][*j] * a[*k][*k] - a[*j][*k] * a[*k][*j])
                    - a[*i][*j] * (a[*j][*i] * a[*k][*k] - a[*j][*k] * a[*k][*i])
                    + a[*i][*k] * (a[*j][*i] * a[*k][*j] - a[*j][*j] * a[*k][*i])
            }
            _ => f64::NAN,
        }
    };
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    (1..(1usize << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        det(&idx) >= -1e-12 * scale.powi(idx.len() as i32)
    })
}

/// Checks `u = b_*·x` against `(−Δ)^s u − A:∇²u + b·∇u = 0`, i.e.
/// `P(z) = −z·Az + b·z`.
pub fn levy_drift_orthogonality(a: &[Vec<f64>], b: &[f64], s: f64, b_star: &[f64]) -> Result<DriftReport> {
    let n = b.len();
    if b_star.len() != n || a.len() != n || a.iter().any(|r| r.len() != n) {
        return domain("matrix, drift and b_* sizes disagree");
    }
    if !is_positive_semidefinite(a) {
        return domain("the diffusion matrix is not symmetric positive semidefinite");
    }
    let m = LevyMeasure::fractional_laplacian(n, s)?;
    let p = ComplexPolynomial::drift_diffusion(a, b)?;
    let u = CandidateSolution::polynomial(Polynomial::affine(b_star, 0.0)?);
    let residual = verify_solution(&u, &m, &p, &default_suite(n)?)?.max_residual;
    let dot: f64 = b.iter().zip(b_star).map(|(x, y)| x * y).sum();
    let size = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let orthogonal = dot.abs() <= 1e-12 * (size(b) * size(b_star)).max(1e-300);
    let trivial = b_star.iter().all(|v| *v == 0.0);
    let expected_small = trivial || (orthogonal && s > 0.5);
    let consistent = (residual <= RESIDUAL_TOL) == expected_small;
    Ok(DriftReport { residual, orthogonal, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereFunction;

    fn quick() -> ClassifyOptions {
        ClassifyOptions { resolution: 64, ..ClassifyOptions::default() }
    }

    #[test]
    fn dichotomy_at_one_half() {
        for (s, want) in [(0.3, Conclusion::ConstantsOnly), (0.5, Conclusion::ConstantsOnly), (0.75, Conclusion::Affine { drift: None })] {
            let m = LevyMeasure::fractional_laplacian(2, s).unwrap();
            let r = classify(&m, &ComplexPolynomial::zero(2), &quick()).unwrap();
            assert_eq!(r.conclusion, want, "s = {s}");
        }
    }

    #[test]
    fn positive_mass_term_kills_everything() {
        let m = LevyMeasure::fractional_laplacian(1, 0.4).unwrap();
        let r = classify(&m, &ComplexPolynomial::constant(1, 1.0), &quick()).unwrap();
        assert_eq!(r.conclusion, Conclusion::Zero);
    }

    #[test]
    fn helmholtz_on_the_line() {
        let m = LevyMeasure::fractional_laplacian(1, 0.6).unwrap();
        let r = classify(&m, &ComplexPolynomial::constant(1, -1.0), &quick()).unwrap();
        match r.conclusion {
            Conclusion::TrigSpan { freq } => assert!((freq - 1.0).abs() < 1e-12),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn named_kernels_with_declared_decay() {
        let rel = LevyMeasure::relativistic(2, 0.5, 1.2).unwrap();
        let r = classify(&rel, &ComplexPolynomial::zero(2), &quick()).unwrap();
        assert_eq!(r.conclusion, Conclusion::HarmonicPolynomialBelow { bound: 2.4 });
        let ilw = LevyMeasure::intermediate_long_wave(0.6).unwrap();
        let r = classify(&ilw, &ComplexPolynomial::zero(1), &quick()).unwrap();
        assert_eq!(r.conclusion, Conclusion::PolynomialBelow { bound: 1.2 });
    }

    #[test]
    fn failing_positivity_is_a_hypothesis_error() {
        let a = SphereFunction::from_coefficients(2, vec![0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let m = LevyMeasure::anisotropic(0.5, a).unwrap();
        match classify(&m, &ComplexPolynomial::zero(2), &quick()) {
            Err(Error::Hypothesis { failed }) => assert!(failed.contains(&"positivity".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semidefinite_matrices() {
        assert!(is_positive_semidefinite(&[vec![1.0, 0.0], vec![0.0, 0.0]]));
        assert!(!is_positive_semidefinite(&[vec![1.0, 2.0], vec![2.0, 1.0]]));
        assert!(!is_positive_semidefinite(&[vec![1.0, 0.5], vec![0.0, 1.0]]));
        assert!(levy_drift_orthogonality(&[vec![-1.0]], &[1.0], 0.75, &[0.0]).is_err());
    }

    #[test]
    fn zero_slope_is_always_consistent() {
        let r = levy_drift_orthogonality(&[vec![0.0]], &[1.0], 0.3, &[0.0]).unwrap();
        assert!(r.residual < 1e-8 && r.consistent, "{r:?}");
    }
}
