//! The weak pairing `⟨u, L_ν̃ φ + P(−∇) φ⟩ = ∫ u (L_ν̃ φ + P(−∇) φ) dx`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::measures::LevyMeasure;
use crate::polynomial::{ComplexPolynomial, Polynomial};
use crate::quadrature::{gauss_legendre, geometric_to_infinity, Graded, Tolerance};

use super::apply::{apply_with, length_scale, sphere_nodes, ApplyOptions};
use super::test_function::{CandidateSolution, TestFunction, TrigTerm};

/// Accuracy settings for [`pairing_with`].
#[derive(Debug, Clone, Copy)]
pub struct PairingOptions {
    /// Largest acceptable estimate for the part of the integral beyond the
    /// quadrature range.
    pub tail_tol: f64,
}

impl Default for PairingOptions {
    fn default() -> Self {
        Self { tail_tol: 1e-9 }
    }
}

pub fn pairing(u: &CandidateSolution, m: &LevyMeasure, p: &ComplexPolynomial, phi: &TestFunction) -> Result<Complex64> {
    pairing_with(u, m, p, phi, &PairingOptions::default())
}

/// Nodes and weights for `∫_{B(c, radius)} f`, resolving features of size `h`.
fn ball_nodes(c: &[f64], radius: f64, h: f64) -> Vec<([f64; 3], f64)> {
    let n = c.len();
    let rule = gauss_legendre(8);
    let panels = (radius / h).ceil().max(1.0) as usize;
    let dr = radius / panels as f64;
    let mut out = Vec::new();
    if n == 1 {
        for p in 0..2 * panels {
            let lo = c[0] - radius + p as f64 * dr;
            for (x, w) in rule.mapped(lo, lo + dr) {
                out.push(([x, 0.0, 0.0], w));
            }
        }
        return out;
    }
    for p in 0..panels {
        let (lo, hi) = (p as f64 * dr, (p + 1) as f64 * dr);
        let resolution = ((2.0 * PI * hi / h).ceil() as usize).max(16);
        let dirs = sphere_nodes(n, resolution);
        for (rho, wr) in rule.mapped(lo, hi) {
            for (theta, wt) in &dirs {
                let mut x = [0.0; 3];
                for i in 0..n {
                    x[i] = c[i] + rho * theta[i];
                }
                out.push((x, wr * wt * rho.powi(n as i32 - 1)));
            }
        }
    }
    out
}

fn p_minus_gradient(p: &ComplexPolynomial, phi: &TestFunction, x: &[f64]) -> Complex64 {
    p.minus_gradient_terms().map(|(a, c)| c * phi.derivative(&a, x)).sum()
}

pub fn pairing_with(
    u: &CandidateSolution,
    m: &LevyMeasure,
    p: &ComplexPolynomial,
    phi: &TestFunction,
    opts: &PairingOptions,
) -> Result<Complex64> {
    let n = m.dim();
    if u.dim() != n || phi.dim() != n || (!p.is_zero() && p.dim() != n) {
        return domain("solution, measure, symbol part and test function dimensions differ");
    }
    if !u.trig.is_empty() && n != 1 {
        return domain("trigonometric candidates are supported on the line only");
    }
    let Some((c, radius)) = phi.effective_support() else {
        return domain("the pairing needs a decaying test function");
    };
    if !u.in_weighted_l1(m.decay_order()) {
        return Err(Error::Divergent(format!(
            "a polynomial of degree {} is not in L¹ with weight order {}",
            u.degree(),
            m.decay_order()
        )));
    }
    let reflected = m.reflect();
    let apply_opts = ApplyOptions { tol: Tolerance::new(1e-12, 1e-10), density: 0.6 };
    let g = |x: &[f64]| apply_with(&reflected, phi, x, &apply_opts);

    // Region where L φ carries the full structure of φ.
    let inner = radius + 1.0;
    let scale = length_scale(phi);
    let mut local = Complex64::new(0.0, 0.0);
    for (x, w) in ball_nodes(&c, inner, 1.5 * scale) {
        let x = &x[..n];
        let ux = u.eval(x);
        if ux == 0.0 {
            continue;
        }
        local += w * ux * (g(x)? + p_minus_gradient(p, phi, x));
    }

    let angular_degree = m.anisotropy().map_or(0, |a| a.l_max());
    let outer_poly = outer_polynomial(&u.poly, &c, inner, &g, angular_degree, opts)?;
    let outer_trig = if u.trig.is_empty() { 0.0 } else { outer_trig(&u.trig, c[0], inner, &g, opts)? };
    Ok(local + outer_poly + outer_trig)
}

/// `∫_{|x−c| > inner} p(x) g(x) dx` by doubling radial panels.
fn outer_polynomial(
    p: &Polynomial,
    c: &[f64],
    inner: f64,
    g: &dyn Fn(&[f64]) -> Result<f64>,
    angular_degree: usize,
    opts: &PairingOptions,
) -> Result<f64> {
    if p.is_zero() {
        return Ok(0.0);
    }
    let n = c.len();
    let dirs = sphere_nodes(n, 24 + 2 * (p.degree() as usize + angular_degree));
    let cfg = Graded { tol: Tolerance::new(opts.tail_tol, 1e-8), points: 8, ..Graded::default() };
    let mut failure = None;
    let value = geometric_to_infinity(inner, &cfg, |rho| {
        let mut sum = 0.0;
        for (theta, w) in &dirs {
            let mut x = [0.0; 3];
            for i in 0..n {
                x[i] = c[i] + rho * theta[i];
            }
            match g(&x[..n]) {
                Ok(v) => sum += w * p.eval(&x[..n]) * v,
                Err(e) => failure = Some(e),
            }
        }
        sum * rho.powi(n as i32 - 1)
    });
    if let Some(e) = failure {
        return Err(e);
    }
    value.map_err(|e| match e {
        Error::ToleranceNotMet { estimate, requested, .. } => Error::TailBoundExceeded { bound: estimate, requested },
        other => other,
    })
}

/// `∫_{|x−c| > inner} Σ terms · g` on the line: half-period panels up to a
/// far point `A`, then three terms of integration by parts. `A` doubles until
/// the neglected term is below the tail tolerance.
fn outer_trig(terms: &[TrigTerm], c: f64, inner: f64, g: &dyn Fn(&[f64]) -> Result<f64>, opts: &PairingOptions) -> Result<f64> {
    if terms.iter().any(|t| t.freq == 0.0) && terms.iter().any(|t| t.freq != 0.0) {
        return Err(Error::Unsupported("mixing constant and oscillating terms in a trigonometric candidate".into()));
    }
    let k_min = terms.iter().map(|t| t.freq.abs()).filter(|k| *k > 0.0).fold(f64::INFINITY, f64::min);
    let k_max = terms.iter().map(|t| t.freq.abs()).fold(0.0, f64::max);
    if k_max == 0.0 {
        // constant terms only
        let sum: f64 = terms.iter().map(|t| t.cos_amp).sum();
        return outer_polynomial(&Polynomial::constant(1, sum), &[c], inner, g, 0, opts);
    }
    let width = (PI / k_max).min(2.0);
    let rule = gauss_legendre(12);
    let u = |x: f64| terms.iter().map(|t| t.cos_amp * (t.freq * x).cos() + t.sin_amp * (t.freq * x).sin()).sum::<f64>();
    let mut total = 0.0;
    let mut worst_tail: f64 = 0.0;
    for side in [1.0, -1.0] {
        // G(t) = g(c + side t); ∫_A^∞ e^{iωt} G = −e^{iωA} Σ_j (−1)^j G^{(j)}(A) / (iω)^{j+1}
        let mut a = inner;
        let mut reach = (200.0f64).max(40.0 * 2.0 * PI / k_min);
        let (tail, bound) = loop {
            let panels = ((reach - a) / width).ceil() as usize;
            for p in 0..panels {
                let lo = a + p as f64 * width;
                for (t, w) in rule.mapped(lo, lo + width) {
                    let x = c + side * t;
                    total += w * u(x) * g(&[x])?;
                }
            }
            a += panels as f64 * width;
            let h = 0.5;
            let gm = g(&[c + side * (a - h)])?;
            let g0 = g(&[c + side * a])?;
            let gp = g(&[c + side * (a + h)])?;
            let derivs = [g0, (gp - gm) / (2.0 * h), (gp - 2.0 * g0 + gm) / (h * h)];
            let mut tail = 0.0;
            let mut bound: f64 = 0.0;
            for t in terms {
                // a cos(k(c + σt)) + b sin(k(c + σt)) = Re[(a − ib) e^{ikc} e^{ikσ t}]
                let amp = Complex64::new(t.cos_amp, -t.sin_amp) * Complex64::from_polar(1.0, t.freq * c);
                let omega = t.freq * side;
                let iw = Complex64::new(0.0, omega);
                let mut series = Complex64::new(0.0, 0.0);
                let mut denom = iw;
                for (j, d) in derivs.iter().enumerate() {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    series += sign * d / denom;
                    denom *= iw;
                }
                tail += (amp * -Complex64::from_polar(1.0, omega * a) * series).re;
                bound = bound.max(derivs[2].abs() / omega.abs().powi(3) * amp.norm());
            }
            if bound <= opts.tail_tol || reach >= 1e5 {
                break (tail, bound);
            }
            reach *= 2.0;
        };
        total += tail;
        worst_tail = worst_tail.max(bound);
    }
    if worst_tail > opts.tail_tol {
        return Err(Error::TailBoundExceeded { bound: worst_tail, requested: opts.tail_tol });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_at(center: Vec<f64>, width: f64) -> TestFunction {
        let dim = center.len();
        TestFunction::gaussian_poly(center, width, Polynomial::constant(dim, 1.0)).unwrap()
    }

    #[test]
    fn constants_pair_to_zero_on_the_line() {
        let m = LevyMeasure::fractional_laplacian(1, 0.6).unwrap();
        let u = CandidateSolution::polynomial(Polynomial::constant(1, 1.0));
        let phi = gaussian_at(vec![0.3], 1.0);
        let v = pairing(&u, &m, &ComplexPolynomial::zero(1), &phi).unwrap();
        assert!(v.norm() < 1e-7, "{v}");
    }

    #[test]
    fn drift_pairing_picks_up_the_mean() {
        // P = −∂₁ acting as P(−∇) = ∂₁: ∫ x₁ ∂₁φ = −∫ φ
        let p = ComplexPolynomial::new(2, vec![([1, 0, 0], Complex64::new(-1.0, 0.0))]).unwrap();
        let m = LevyMeasure::fractional_laplacian(2, 0.75).unwrap();
        let u = CandidateSolution::polynomial(Polynomial::new(2, vec![([1, 0, 0], 1.0)]).unwrap());
        let phi = gaussian_at(vec![0.0, 0.0], 1.0);
        let v = pairing(&u, &m, &p, &phi).unwrap();
        assert!((v.re + 2.0 * PI).abs() < 1e-6, "{v}");
    }

    #[test]
    fn cosine_pairs_to_zero_with_matching_mass() {
        // η(1) = 1 for s = 0.6, so cos x solves L u − u = 0
        let m = LevyMeasure::fractional_laplacian(1, 0.6).unwrap();
        let u = CandidateSolution::trig(vec![TrigTerm { freq: 1.0, cos_amp: 1.0, sin_amp: 0.0 }]);
        let phi = gaussian_at(vec![0.4], 1.0);
        let v = pairing(&u, &m, &ComplexPolynomial::constant(1, -1.0), &phi).unwrap();
        assert!(v.norm() < 1e-7, "{v}");
        let w = pairing(&u, &m, &ComplexPolynomial::zero(1), &phi).unwrap();
        assert!(w.norm() > 0.1, "{w}");
    }
}
