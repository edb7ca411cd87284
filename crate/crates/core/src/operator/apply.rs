//! Pointwise evaluation of `L_ν φ(x) = ∫ (φ(x) − φ(x+y) − y·∇φ(x) 1_B(y)) dν(y)`.
//!
//! The unit ball is integrated in polar coordinates about `x` with the
//! compensated difference (a Taylor remainder very close to the origin). The
//! exterior splits as `φ(x) ν(B^c) − ∫_{B^c} φ(x+y) dν(y)`; the second piece
//! runs over the effective support of `φ` for decaying functions, through
//! half-line Fourier integrals for trigonometric sums, and through exact
//! moments for polynomials.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::measures::{sphere_area, LevyMeasure, RadialTail};
use crate::polynomial::{multi_indices, order, MultiIndex, Polynomial};
use crate::quadrature::{fourier_half_line, gauss_legendre, graded_from_zero, Graded, Tolerance};
use crate::special_fn::gamma;
use crate::sphere::orthonormal_frame;

use super::test_function::{TestFunction, TrigTerm};

/// Accuracy targets for [`apply_with`].
#[derive(Debug, Clone, Copy)]
pub struct ApplyOptions {
    pub tol: Tolerance,
    /// Multiplies the number of quadrature nodes per unit length.
    pub density: f64,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        Self { tol: Tolerance::new(1e-13, 1e-11), density: 1.0 }
    }
}

pub fn apply(m: &LevyMeasure, phi: &TestFunction, x: &[f64]) -> Result<f64> {
    apply_with(m, phi, x, &ApplyOptions::default())
}

pub fn apply_with(m: &LevyMeasure, phi: &TestFunction, x: &[f64], opts: &ApplyOptions) -> Result<f64> {
    let n = m.dim();
    if phi.dim() != n || x.len() != n {
        return domain(format!(
            "measure, function and point dimensions differ ({n}, {}, {})",
            phi.dim(),
            x.len()
        ));
    }
    match phi {
        TestFunction::Sum(parts) => parts
            .iter()
            .map(|(w, p)| apply_with(m, p, x, opts).map(|v| w * v))
            .sum(),
        TestFunction::Polynomial(p) => apply_polynomial(m, p, x),
        TestFunction::Trig(terms) => {
            let near = near_field(m, phi, x, opts)?;
            Ok(near + trig_far_field(m, terms, x[0])?)
        }
        TestFunction::GaussianPoly { .. } | TestFunction::Bump { .. } => {
            let near = near_field(m, phi, x, opts)?;
            let far = phi.value(x) * tail_mass(m)? - exterior_integral(m, phi, x, opts.density)?;
            Ok(near + far)
        }
    }
}

/// The length over which `φ` changes appreciably.
pub(crate) fn length_scale(phi: &TestFunction) -> f64 {
    match phi {
        TestFunction::GaussianPoly { width, poly, .. } => width / (1.0 + 0.25 * poly.degree() as f64),
        TestFunction::Bump { radius, .. } => radius / 4.0,
        TestFunction::Trig(terms) => {
            let k = terms.iter().map(|t| t.freq.abs()).fold(0.0, f64::max);
            if k > 0.0 {
                1.0 / k
            } else {
                1.0
            }
        }
        TestFunction::Polynomial(_) => 1.0,
        TestFunction::Sum(parts) => parts.iter().map(|(_, p)| length_scale(p)).fold(f64::INFINITY, f64::min),
    }
}

/// Quadrature on `S^{N−1}` with about `resolution` nodes per great circle.
pub(crate) fn sphere_nodes(dim: usize, resolution: usize) -> Vec<([f64; 3], f64)> {
    let k = resolution.div_ceil(4) * 4;
    match dim {
        1 => vec![([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0)],
        2 => (0..k)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / k as f64;
                ([t.cos(), t.sin(), 0.0], 2.0 * PI / k as f64)
            })
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(k * k / 2);
            for (z, wz) in gauss_legendre(k / 2).mapped(-1.0, 1.0) {
                let rho = (1.0 - z * z).sqrt();
                for j in 0..k {
                    let t = 2.0 * PI * j as f64 / k as f64;
                    out.push(([rho * t.cos(), rho * t.sin(), z], wz * 2.0 * PI / k as f64));
                }
            }
            out
        }
    }
}

/// [`sphere_nodes`] with the angular factor of `m` folded into the weights.
pub(crate) fn weighted_directions(m: &LevyMeasure, resolution: usize) -> Vec<([f64; 3], f64)> {
    let extra = m.anisotropy().map_or(0, |a| 2 * a.l_max() + 8);
    sphere_nodes(m.dim(), resolution + extra)
        .into_iter()
        .filter_map(|(theta, w)| {
            let a = m.angular(&theta[..m.dim()]);
            (a != 0.0).then_some((theta, w * a))
        })
        .collect()
}

fn shifted(x: &[f64], r: f64, theta: &[f64; 3]) -> [f64; 3] {
    let mut p = [0.0; 3];
    for i in 0..x.len() {
        p[i] = x[i] + r * theta[i];
    }
    p
}

/// `∫_{|y|<1} (φ(x) − φ(x+y) + y·∇φ(x)) dν(y)`.
fn near_field(m: &LevyMeasure, phi: &TestFunction, x: &[f64], opts: &ApplyOptions) -> Result<f64> {
    let n = m.dim();
    let scale = length_scale(phi);
    let dirs = weighted_directions(m, ((12.0 * opts.density / scale).ceil() as usize).max(24));
    let fx = phi.value(x);
    let grad = phi.gradient(x);
    // Below `switch` the difference is replaced by its Taylor polynomial of
    // order 4 at x; the neglected fifth-order term is below 1e-9 relative.
    let switch = 0.005 * scale.min(1.0);
    let derivs: Vec<(MultiIndex, f64)> = multi_indices(n, 4)
        .into_iter()
        .filter(|b| order(b) >= 2)
        .map(|b| {
            let fact: f64 = b.iter().map(|&k| (1..=k).product::<u32>() as f64).product();
            (b, phi.derivative(&b, x) / fact)
        })
        .collect();
    let taylor: Vec<[f64; 3]> = dirs
        .iter()
        .map(|(theta, _)| {
            let mut t = [0.0; 3];
            for (b, d) in &derivs {
                let mono: f64 = (0..n).map(|i| theta[i].powi(b[i] as i32)).product();
                t[order(b) as usize - 2] += d * mono;
            }
            t
        })
        .collect();
    let cfg = Graded { tol: opts.tol, max_width: scale.min(1.0), ..Graded::default() };
    graded_from_zero(1.0, &cfg, |r| {
        let mut sum = 0.0;
        for ((theta, w), t) in dirs.iter().zip(&taylor) {
            let v = if r < switch {
                -r * r * (t[0] + r * (t[1] + r * t[2]))
            } else {
                let p = shifted(x, r, theta);
                let drift: f64 = theta[..n].iter().zip(&grad).map(|(a, b)| a * b).sum();
                fx - phi.value(&p[..n]) + r * drift
            };
            sum += w * v;
        }
        sum * m.radial(r) * r.powi(n as i32 - 1)
    })
}

/// `∫_1^∞ f(r) κ₀(r) r^{N−1} dr` for integrands `f` that are bounded.
fn radial_exterior<F: FnMut(f64) -> f64>(m: &LevyMeasure, mut f: F, power_part: impl FnOnce(f64) -> Result<f64>) -> Result<f64> {
    let n = m.dim() as i32;
    match m.radial_tail() {
        RadialTail::Power { coef } => power_part(coef),
        RadialTail::Cutoff(c) => {
            let rule = gauss_legendre(16);
            let panels = (c - 1.0).ceil().max(1.0) as usize;
            let h = (c - 1.0) / panels as f64;
            Ok((0..panels)
                .map(|p| {
                    let lo = 1.0 + p as f64 * h;
                    rule.integrate(lo, lo + h, |r| f(r) * m.radial(r) * r.powi(n - 1))
                })
                .sum())
        }
    }
}

/// `∫_S a(θ) dθ`.
fn angular_mass(m: &LevyMeasure) -> f64 {
    match m.anisotropy() {
        None => sphere_area(m.dim()),
        Some(_) => weighted_directions(m, 64).iter().map(|(_, w)| w).sum(),
    }
}

/// `ν(B₁^c)`.
pub fn tail_mass(m: &LevyMeasure) -> Result<f64> {
    let s = m.order();
    let radial = radial_exterior(m, |_| 1.0, |coef| Ok(coef / (2.0 * s)))?;
    Ok(angular_mass(m) * radial)
}

/// `∫_{|y|>1} φ(x+y) dν(y)` for a decaying `φ`, over the rays from `x`
/// that meet its effective support.
fn exterior_integral(m: &LevyMeasure, phi: &TestFunction, x: &[f64], density: f64) -> Result<f64> {
    let n = m.dim();
    let (c, radius) = phi
        .effective_support()
        .ok_or_else(|| Error::Unsupported("exterior integral needs a decaying function".into()))?;
    let scale = length_scale(phi) / density;
    let axis: Vec<f64> = c.iter().zip(x).map(|(a, b)| a - b).collect();
    let d = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    let lo = (d - radius).max(1.0);
    let mut hi = d + radius;
    if let RadialTail::Cutoff(cut) = m.radial_tail() {
        hi = hi.min(cut);
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let rule = gauss_legendre(10);
    let panels = ((hi - lo) / scale).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        for (r, wr) in rule.mapped(lo + p as f64 * h, lo + (p + 1) as f64 * h) {
            let ang = sphere_slice(m, phi, x, r, &c, radius, scale);
            total += wr * ang * m.radial(r) * r.powi(n as i32 - 1);
        }
    }
    Ok(total)
}

/// `∫_S φ(x + rθ) a(θ) dθ`, restricted to the cone that sees the support ball
/// when `x` lies outside it.
#[allow(clippy::too_many_arguments)]
fn sphere_slice(m: &LevyMeasure, phi: &TestFunction, x: &[f64], r: f64, centre: &[f64], radius: f64, scale: f64) -> f64 {
    let axis: Vec<f64> = centre.iter().zip(x).map(|(a, b)| a - b).collect();
    let d = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n = m.dim();
    let eval = |theta: [f64; 3]| {
        let p = shifted(x, r, &theta);
        let dist2: f64 = centre.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
        if dist2 > radius * radius {
            return 0.0;
        }
        phi.value(&p[..n]) * m.angular(&theta[..n])
    };
    match n {
        1 => eval([1.0, 0.0, 0.0]) + eval([-1.0, 0.0, 0.0]),
        2 => {
            if d > radius {
                let half = (radius / d).min(1.0).asin();
                let centre = axis[1].atan2(axis[0]);
                let k = ((4.0 * half * r / scale).ceil() as usize + 12).min(600);
                gauss_legendre(k)
                    .mapped(centre - half, centre + half)
                    .map(|(t, w)| w * eval([t.cos(), t.sin(), 0.0]))
                    .sum()
            } else {
                let k = ((4.0 * PI * r / scale).ceil() as usize).max(32);
                (0..k)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / k as f64;
                        eval([t.cos(), t.sin(), 0.0])
                    })
                    .sum::<f64>()
                    * 2.0
                    * PI
                    / k as f64
            }
        }
        _ => {
            // cap of half-angle α about the axis, or the whole sphere
            let (u, cos_lo, half) = if d > radius {
                let a = (radius / d).min(1.0).asin();
                ([axis[0] / d, axis[1] / d, axis[2] / d], a.cos(), a)
            } else {
                ([0.0, 0.0, 1.0], -1.0, PI)
            };
            let (e1, e2) = orthonormal_frame(&u);
            let kz = ((2.0 * half * r / scale).ceil() as usize + 12).min(400);
            let kp = ((2.0 * PI * r * half.min(PI / 2.0).sin() * 2.0 / scale).ceil() as usize).max(24);
            let mut sum = 0.0;
            for (z, wz) in gauss_legendre(kz).mapped(cos_lo, 1.0) {
                let rho = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..kp {
                    let t = 2.0 * PI * j as f64 / kp as f64;
                    let (st, ct) = t.sin_cos();
                    let mut th = [0.0; 3];
                    for i in 0..3 {
                        th[i] = z * u[i] + rho * (ct * e1[i] + st * e2[i]);
                    }
                    sum += wz * eval(th);
                }
            }
            sum * 2.0 * PI / kp as f64
        }
    }
}

/// Exterior part for a trigonometric sum on the line: each term is an
/// eigenfunction of the exterior integral.
fn trig_far_field(m: &LevyMeasure, terms: &[TrigTerm], x: f64) -> Result<f64> {
    let q = 1.0 + 2.0 * m.order();
    let total = tail_mass(m)?;
    let (power, cutoff) = match m.radial_tail() {
        RadialTail::Power { coef } => (Some((coef, q)), f64::INFINITY),
        RadialTail::Cutoff(c) => (None, c),
    };
    let mut sum = 0.0;
    for t in terms {
        let f = fourier_half_line(1.0, t.freq, power, cutoff, 48.0, |r| m.radial(r));
        // ∫_{|y|>1} e^{ik(x+y)} κ(y) dy = e^{ikx} 2 Re F(k)
        let value = t.cos_amp * (t.freq * x).cos() + t.sin_amp * (t.freq * x).sin();
        sum += value * (total - 2.0 * f.re);
    }
    Ok(sum)
}

/// `∫_S θ^β a(θ) dθ`.
fn angular_moment(m: &LevyMeasure, beta: &MultiIndex) -> f64 {
    let n = m.dim();
    match m.anisotropy() {
        None => {
            if beta.iter().any(|b| b % 2 == 1) {
                return 0.0;
            }
            let num: f64 = (0..n).map(|i| gamma((beta[i] as f64 + 1.0) / 2.0).unwrap_or(f64::NAN)).product();
            2.0 * num / gamma((order(beta) as f64 + n as f64) / 2.0).unwrap_or(f64::NAN)
        }
        Some(_) => weighted_directions(m, 64 + 2 * order(beta) as usize)
            .iter()
            .map(|(th, w)| w * (0..n).map(|i| th[i].powi(beta[i] as i32)).product::<f64>())
            .sum(),
    }
}

/// `∫ r^{k+N−1} κ₀(r) dr` over `(0, ∞)` (`from_zero`) or `(1, ∞)`.
fn radial_moment(m: &LevyMeasure, k: u32, from_zero: bool) -> Result<f64> {
    let n = m.dim() as i32;
    let s = m.order();
    let near = if from_zero {
        graded_from_zero(1.0, &Graded::default(), |r| r.powi(k as i32 + n - 1) * m.radial(r))?
    } else {
        0.0
    };
    let far = radial_exterior(
        m,
        |r| r.powi(k as i32),
        |coef| {
            // coef ∫_1^∞ r^{k−1−2s} dr
            if (k as f64) < 2.0 * s {
                Ok(coef / (2.0 * s - k as f64))
            } else {
                Err(Error::Divergent(format!("moment of order {k} diverges for order {s}")))
            }
        },
    )?;
    Ok(near + far)
}

/// `L_ν p(x)` from the moments of `ν`; fails with `Divergent` when a
/// moment that the polynomial needs is infinite.
fn apply_polynomial(m: &LevyMeasure, p: &Polynomial, x: &[f64]) -> Result<f64> {
    let n = m.dim();
    let mut total = 0.0;
    for beta in multi_indices(n, p.degree()) {
        let k = order(&beta);
        if k == 0 {
            continue;
        }
        let d = p.derivative(&beta, x);
        if d == 0.0 {
            continue;
        }
        let a = angular_moment(m, &beta);
        if a.abs() < 1e-13 * angular_mass(m).abs() {
            continue;
        }
        let factorial: f64 = beta.iter().map(|&b| (1..=b).product::<u32>() as f64).product();
        total -= d / factorial * a * radial_moment(m, k, k >= 2)?;
    }
    Ok(total)
}
