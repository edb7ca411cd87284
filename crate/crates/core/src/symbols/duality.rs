//! Checks `F(L_ν̃ φ) = η φ̂` on a grid.
//!
//! `g = L_ν̃ φ` decays only like `|x|^{−N−2s}`, so a truncated transform is
//! wrong at low frequencies no matter how large the box. The leading tail
//! `−M₀ κ(x − c)` (with `M₀ = ∫φ`) is therefore removed outside a smooth window
//! and its transform added back exactly along rays; the faster-decaying
//! remainder is tabulated along rays beyond the box and continued on a grid
//! twice as wide before the discrete transform.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::measures::{LevyMeasure, RadialTail};
use crate::operator::{apply_with, ApplyOptions, TestFunction};
use crate::quadrature::{fourier_half_line, gauss_legendre, Tolerance};

use super::symbol_of;

/// A uniform grid of `points` nodes per axis on `[−half_width, half_width)^N`
/// about the centre of the test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityGrid {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub max_rel_err: f64,
    /// Frequency at which the maximum occurs.
    pub worst_frequency: Vec<f64>,
    pub frequencies_checked: usize,
}

/// `C^∞` step: 1 for `t ≤ 0`, 0 for `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    f(1.0 - t) / (f(1.0 - t) + f(t))
}

/// Chebyshev interpolant on `[0, 1]` from values at the first-kind nodes.
struct Chebyshev {
    coeffs: Vec<f64>,
}

impl Chebyshev {
    fn nodes(k: usize) -> Vec<f64> {
        (0..k).map(|j| 0.5 * (1.0 + (PI * (j as f64 + 0.5) / k as f64).cos())).collect()
    }

    fn fit(values: &[f64]) -> Self {
        let k = values.len();
        let coeffs = (0..k)
            .map(|m| {
                let sum: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * m as f64 * (j as f64 + 0.5) / k as f64).cos())
                    .sum();
                if m == 0 {
                    sum / k as f64
                } else {
                    2.0 * sum / k as f64
                }
            })
            .collect();
        Self { coeffs }
    }

    fn eval(&self, v: f64) -> f64 {
        let x = 2.0 * v - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for c in self.coeffs.iter().skip(1).rev() {
            let b = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b;
        }
        x * b1 - b2 + self.coeffs[0]
    }
}

/// Directions used to tabulate the remainder: `±1` on the line, equispaced
/// on the circle.
fn ray_angles(dim: usize, count: usize) -> Vec<[f64; 2]> {
    if dim == 1 {
        return vec![[1.0, 0.0], [-1.0, 0.0]];
    }
    (0..count)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / count as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

pub fn duality_check(m: &LevyMeasure, phi: &TestFunction, grid: &DualityGrid) -> Result<DualityReport> {
    let n = m.dim();
    if !(1..=2).contains(&n) {
        return Err(Error::Unsupported("the duality check runs in one or two dimensions".into()));
    }
    if phi.dim() != n {
        return domain("test function and measure dimensions differ");
    }
    let TestFunction::GaussianPoly { center, .. } = phi else {
        return domain("the duality check needs a Gaussian-times-polynomial test function");
    };
    if grid.points < 16 || grid.points % 2 == 1 || !(grid.half_width > 0.0) {
        return domain("the duality grid needs an even number (>= 16) of points and a positive width");
    }
    let (_, radius) = phi.effective_support().expect("Gaussian functions decay");
    let big_l = grid.half_width;
    if big_l < radius + 2.0 {
        return Err(Error::BoundaryLeakage(format!(
            "the test function is not negligible at the box boundary (support radius {radius:.2}, box half-width {big_l})"
        )));
    }
    let c = center.clone();
    let s = m.order();
    let weight_power = n as f64 + 2.0 * s;
    let reflected = m.reflect();
    let opts = ApplyOptions { tol: Tolerance::new(1e-12, 1e-10), density: 0.6 };
    let g = |y: &[f64]| -> Result<f64> {
        let x: Vec<f64> = y.iter().zip(&c).map(|(a, b)| a + b).collect();
        apply_with(&reflected, phi, &x, &opts)
    };
    let phi_hat0 = phi.fourier_transform(&vec![0.0; n]).expect("Gaussian transform").re;
    let mass = (2.0 * PI).powf(n as f64 / 2.0) * phi_hat0;
    // model tail, removed where the window has dropped
    let (l1, l2) = ((0.5 * big_l).max(1.0), 0.75 * big_l);
    let window = |r: f64| smooth_step((r - l1) / (l2 - l1));
    let model = |y: &[f64]| -> f64 {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r <= l1 || mass == 0.0 {
            return 0.0;
        }
        -mass * m.density(y).unwrap_or(0.0)
    };

    // remainder g − model along rays beyond the box, as r^{−N−2s} P(L/r)
    let angles = ray_angles(n, 32 + 4 * m.anisotropy().map_or(0, |a| a.l_max()));
    let vs = Chebyshev::nodes(24);
    let tables: Vec<Chebyshev> = angles
        .par_iter()
        .map(|th| -> Result<Chebyshev> {
            let values = vs
                .iter()
                .map(|&v| {
                    let r = big_l / v;
                    let y = [r * th[0], r * th[1]];
                    Ok((g(&y[..n])? - model(&y[..n])) * r.powf(weight_power))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(Chebyshev::fit(&values))
        })
        .collect::<Result<_>>()?;
    let modes = AngularModes::new(&tables);
    let remainder = |y: &[f64]| -> f64 {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let v = big_l / r;
        let p = match n {
            1 => tables[if y[0] > 0.0 { 0 } else { 1 }].eval(v),
            _ => modes.eval(v, y[1].atan2(y[0])),
        };
        p * r.powf(-weight_power)
    };

    // samples on a grid twice as wide: exact inside the box, tabulated outside
    let h = 2.0 * big_l / grid.points as f64;
    let wide = 2 * grid.points;
    let coord = |j: usize| -2.0 * big_l + j as f64 * h;
    let total = wide.pow(n as u32);
    let samples: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| -> Result<f64> {
            let y: Vec<f64> = if n == 1 { vec![coord(flat)] } else { vec![coord(flat % wide), coord(flat / wide)] };
            let inside = y.iter().all(|v| v.abs() < big_l);
            if inside {
                let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                Ok(g(&y)? - (1.0 - window(r)) * model(&y))
            } else {
                let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                let taper = smooth_step((r - 1.5 * big_l) / (0.5 * big_l));
                Ok(if taper == 0.0 { 0.0 } else { taper * remainder(&y) })
            }
        })
        .collect::<Result<_>>()?;

    // frequencies of the box grid where φ̂ is not negligible
    let dxi = PI / big_l;
    let half = grid.points as i64 / 2;
    let mut freqs: Vec<Vec<f64>> = Vec::new();
    let ks: Vec<i64> = (-half..half).collect();
    let peak = phi.fourier_transform(&vec![0.0; n]).map(|v| v.norm()).unwrap_or(1.0).max(1e-300);
    let mut max_hat: f64 = peak;
    let mut push = |xi: Vec<f64>| {
        let v = phi.fourier_transform(&xi).map(|v| v.norm()).unwrap_or(0.0);
        max_hat = max_hat.max(v);
        if xi.iter().any(|x| *x != 0.0) {
            freqs.push(xi);
        }
    };
    if n == 1 {
        ks.iter().for_each(|&k| push(vec![k as f64 * dxi]));
    } else {
        for &k2 in &ks {
            for &k1 in &ks {
                push(vec![k1 as f64 * dxi, k2 as f64 * dxi]);
            }
        }
    }
    freqs.retain(|xi| phi.fourier_transform(xi).map(|v| v.norm()).unwrap_or(0.0) > 1e-4 * max_hat);

    let symbol = symbol_of(m);
    let tail = TailTransform::new(m, l1, l2, &window);
    let norm = (2.0 * PI).powf(-(n as f64) / 2.0);
    let results: Vec<(f64, Vec<f64>)> = freqs
        .par_iter()
        .map(|xi| -> Result<(f64, Vec<f64>)> {
            let grid_sum = discrete_transform(&samples, wide, n, h, -2.0 * big_l, xi);
            let model_part = -mass * tail.eval(m, xi)?;
            let shift: f64 = c.iter().zip(xi).map(|(a, b)| a * b).sum();
            let lhs = norm * Complex64::from_polar(1.0, -shift) * (grid_sum + model_part);
            let rhs = symbol.eval(xi)? * phi.fourier_transform(xi).expect("Gaussian transform");
            let err = (lhs - rhs).norm() / rhs.norm().max(1e-300);
            Ok((err, xi.clone()))
        })
        .collect::<Result<_>>()?;
    let (max_rel_err, worst_frequency) = results
        .iter()
        .cloned()
        .fold((0.0, vec![0.0; n]), |acc, (e, xi)| if e > acc.0 { (e, xi) } else { acc });
    Ok(DualityReport { max_rel_err, worst_frequency, frequencies_checked: results.len() })
}

/// Trigonometric interpolation across equispaced rays, with each Fourier
/// mode stored as a Chebyshev series in the radial variable.
struct AngularModes {
    cos: Vec<Chebyshev>,
    sin: Vec<Chebyshev>,
}

impl AngularModes {
    fn new(tables: &[Chebyshev]) -> Self {
        let m = tables.len();
        let kmax = m / 2;
        let terms = tables[0].coeffs.len();
        let mode = |k: usize, trig: fn(f64) -> f64| -> Chebyshev {
            let scale = if k == 0 || (m % 2 == 0 && k == kmax) { 1.0 } else { 2.0 } / m as f64;
            let coeffs = (0..terms)
                .map(|i| {
                    let sum: f64 = tables
                        .iter()
                        .enumerate()
                        .map(|(j, t)| t.coeffs[i] * trig(2.0 * PI * (k * j) as f64 / m as f64))
                        .sum();
                    scale * sum
                })
                .collect();
            Chebyshev { coeffs }
        };
        Self { cos: (0..=kmax).map(|k| mode(k, f64::cos)).collect(), sin: (0..=kmax).map(|k| mode(k, f64::sin)).collect() }
    }

    fn eval(&self, v: f64, angle: f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(k, (c, s))| {
                let (st, ct) = (k as f64 * angle).sin_cos();
                c.eval(v) * ct + s.eval(v) * st
            })
            .sum()
    }
}

/// `h^N Σ_j f(y_j) e^{−i y_j·ξ}`, one axis at a time.
fn discrete_transform(samples: &[f64], wide: usize, n: usize, h: f64, start: f64, xi: &[f64]) -> Complex64 {
    let phases = |k: f64| -> Vec<Complex64> {
        (0..wide).map(|j| Complex64::from_polar(1.0, -(start + j as f64 * h) * k)).collect()
    };
    let p1 = phases(xi[0]);
    if n == 1 {
        return h * samples.iter().zip(&p1).map(|(v, p)| v * p).sum::<Complex64>();
    }
    let p2 = phases(xi[1]);
    let mut total = Complex64::new(0.0, 0.0);
    for (row, q) in samples.chunks(wide).zip(&p2) {
        let inner: Complex64 = row.iter().zip(&p1).map(|(v, p)| v * p).sum();
        total += inner * q;
    }
    h * h * total
}

/// `∫ (1 − χ(|y|)) κ(y) e^{−iy·ξ} dy` along rays.
struct TailTransform {
    l1: f64,
    l2: f64,
    window_nodes: Vec<(f64, f64)>,
}

impl TailTransform {
    fn new(m: &LevyMeasure, l1: f64, l2: f64, window: &dyn Fn(f64) -> f64) -> Self {
        let n = m.dim() as i32;
        let rule = gauss_legendre(16);
        let panels = (l2 - l1).ceil() as usize;
        let w = (l2 - l1) / panels as f64;
        let mut window_nodes = Vec::new();
        for p in 0..panels {
            for (r, wt) in rule.mapped(l1 + p as f64 * w, l1 + (p + 1) as f64 * w) {
                window_nodes.push((r, wt * (1.0 - window(r)) * m.radial(r) * r.powi(n - 1)));
            }
        }
        Self { l1, l2, window_nodes }
    }

    /// `∫_{l1}^∞ (1 − χ(r)) κ₀(r) r^{N−1} e^{−irt} dr`.
    fn radial(&self, m: &LevyMeasure, t: f64) -> Complex64 {
        let n = m.dim() as i32;
        let inner: Complex64 = self.window_nodes.iter().map(|(r, w)| Complex64::from_polar(*w, -r * t)).sum();
        let (power, cutoff) = match m.radial_tail() {
            RadialTail::Power { coef } => (Some((coef, 1.0 + 2.0 * m.order())), f64::INFINITY),
            RadialTail::Cutoff(c) => (None, c),
        };
        if cutoff <= self.l2 {
            return inner;
        }
        let outer = fourier_half_line(self.l2, t, power, cutoff, 48.0, |r| m.radial(r) * r.powi(n - 1));
        debug_assert!(self.l1 < self.l2);
        inner + outer.conj()
    }

    fn eval(&self, m: &LevyMeasure, xi: &[f64]) -> Result<Complex64> {
        if m.dim() == 1 {
            return Ok(self.radial(m, xi[0]) + self.radial(m, -xi[0]));
        }
        // the radial transform has a kink where ξ·θ = 0; integrate each half
        let base = xi[1].atan2(xi[0]);
        let rho = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        // the window part oscillates in angle at rate l2 ρ
        let rule = gauss_legendre(16 + (self.l2 * rho).ceil() as usize);
        let mut total = Complex64::new(0.0, 0.0);
        for (lo, hi) in [(base - PI / 2.0, base + PI / 2.0), (base + PI / 2.0, base + 1.5 * PI)] {
            for (a, w) in rule.mapped(lo, hi) {
                let theta = [a.cos(), a.sin()];
                let ang = m.angular(&theta);
                if ang != 0.0 {
                    total += w * ang * self.radial(m, rho * (a - base).cos());
                }
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_reproduces_smooth_functions() {
        let nodes = Chebyshev::nodes(24);
        let f = |v: f64| (2.0 * v).sin() + v * v;
        let cheb = Chebyshev::fit(&nodes.iter().map(|&v| f(v)).collect::<Vec<_>>());
        for v in [0.0, 0.13, 0.5, 1.0] {
            assert!((cheb.eval(v) - f(v)).abs() < 1e-13);
        }
    }

    #[test]
    fn angular_modes_interpolate_low_degree_data() {
        let f = |v: f64, a: f64| v * v + (1.0 - v) * (3.0 * a).cos() + 0.5 * (2.0 * a).sin();
        let nodes = Chebyshev::nodes(12);
        let tables: Vec<Chebyshev> = (0..16)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / 16.0;
                Chebyshev::fit(&nodes.iter().map(|&v| f(v, a)).collect::<Vec<_>>())
            })
            .collect();
        let modes = AngularModes::new(&tables);
        assert!((modes.eval(0.3, 0.4) - f(0.3, 0.4)).abs() < 1e-13);
    }

    #[test]
    fn fractional_laplacian_on_the_line() {
        let m = LevyMeasure::fractional_laplacian(1, 0.5).unwrap();
        let phi = TestFunction::gaussian(1, 1.0).unwrap();
        let report = duality_check(&m, &phi, &DualityGrid { half_width: 20.0, points: 2048 }).unwrap();
        assert!(report.max_rel_err <= 1e-3, "{report:?}");
    }

    #[test]
    fn small_box_leaks() {
        let m = LevyMeasure::fractional_laplacian(1, 0.5).unwrap();
        let phi = TestFunction::gaussian(1, 1.0).unwrap();
        let r = duality_check(&m, &phi, &DualityGrid { half_width: 5.0, points: 256 });
        assert!(matches!(r, Err(Error::BoundaryLeakage(_))));
    }
}
