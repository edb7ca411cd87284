use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::polynomial::{hermite_he, multi_indices, order, MultiIndex, Polynomial};

/// One term `a cos(kx) + b sin(kx)` of a trigonometric function on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub freq: f64,
    pub cos_amp: f64,
    pub sin_amp: f64,
}

impl TrigTerm {
    fn derivative(&self, k: u32, x: f64) -> f64 {
        // d^k/dx^k cos(fx) = f^k cos(fx + kπ/2)
        let phase = self.freq * x + k as f64 * PI / 2.0;
        self.freq.powi(k as i32) * (self.cos_amp * phase.cos() + self.sin_amp * phase.sin())
    }
}

/// Smooth functions with closed-form derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `p(x − c) exp(−|x − c|²/(2w²))`.
    GaussianPoly {
        center: Vec<f64>,
        width: f64,
        poly: Polynomial,
    },
    /// `A exp(−1/(1 − |x − c|²/R²))` inside the ball, 0 outside.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
    /// A finite trigonometric sum on the line; bounded but not decaying.
    Trig(Vec<TrigTerm>),
    /// A polynomial; evaluable pointwise only.
    Polynomial(Polynomial),
    /// A finite linear combination.
    Sum(Vec<(f64, TestFunction)>),
}

/// The largest derivative order the evaluators support.
pub const MAX_DERIVATIVE: u32 = 4;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

impl TestFunction {
    pub fn gaussian(dim: usize, width: f64) -> Result<Self> {
        Self::gaussian_poly(vec![0.0; dim], width, Polynomial::constant(dim, 1.0))
    }

    pub fn gaussian_poly(center: Vec<f64>, width: f64, poly: Polynomial) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return domain(format!("Gaussian width must be positive, got {width}"));
        }
        if poly.dim() != center.len() {
            return domain("polynomial and centre dimensions differ");
        }
        Ok(Self::GaussianPoly { center, width, poly })
    }

    pub fn bump(center: Vec<f64>, radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("bump radius must be positive, got {radius}"));
        }
        if center.is_empty() || center.len() > 3 {
            return domain("bump centre must have 1 to 3 coordinates");
        }
        Ok(Self::Bump { center, radius, amplitude })
    }

    pub fn trig(terms: Vec<TrigTerm>) -> Self {
        Self::Trig(terms)
    }

    pub fn cos(freq: f64) -> Self {
        Self::Trig(vec![TrigTerm { freq, cos_amp: 1.0, sin_amp: 0.0 }])
    }

    pub fn sum(parts: Vec<(f64, TestFunction)>) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return domain("an empty sum has no dimension");
        };
        let dim = first.dim();
        if parts.iter().any(|(_, p)| p.dim() != dim) {
            return domain("summands have different dimensions");
        }
        Ok(Self::Sum(parts))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::GaussianPoly { center, .. } | Self::Bump { center, .. } => center.len(),
            Self::Trig(_) => 1,
            Self::Polynomial(p) => p.dim(),
            Self::Sum(parts) => parts[0].1.dim(),
        }
    }

    /// True for the decaying families (members of every `S^k_s`).
    pub fn decays(&self) -> bool {
        match self {
            Self::GaussianPoly { .. } | Self::Bump { .. } => true,
            Self::Trig(_) | Self::Polynomial(_) => false,
            Self::Sum(parts) => parts.iter().all(|(_, p)| p.decays()),
        }
    }

    /// A ball outside of which the function and its derivatives up to
    /// order 4 are below 1e-17 relative to their size; `None` for the
    /// non-decaying families.
    pub fn effective_support(&self) -> Option<(Vec<f64>, f64)> {
        match self {
            Self::GaussianPoly { center, width, poly } => {
                Some((center.clone(), width * (9.5 + 1.5 * poly.degree() as f64)))
            }
            Self::Bump { center, radius, .. } => Some((center.clone(), *radius)),
            Self::Trig(_) | Self::Polynomial(_) => None,
            Self::Sum(parts) => {
                let (c0, _) = parts[0].1.effective_support()?;
                let mut r: f64 = 0.0;
                for (_, p) in parts {
                    let (c, rp) = p.effective_support()?;
                    let d = c.iter().zip(&c0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    r = r.max(d + rp);
                }
                Some((c0, r))
            }
        }
    }

    /// An upper bound for `sup |φ|`, or `None` if unbounded.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            Self::GaussianPoly { width, poly, .. } => {
                // |y^α| e^{−|y|²/2w²} ≤ (|α| w²)^{|α|/2} e^{−|α|/2}
                Some(
                    poly.terms()
                        .iter()
                        .map(|(a, c)| {
                            let k = order(a) as f64;
                            let m = if k == 0.0 { 1.0 } else { (k * width * width).powf(k / 2.0) * (-k / 2.0).exp() };
                            c.abs() * m
                        })
                        .sum(),
                )
            }
            Self::Bump { amplitude, .. } => Some(amplitude.abs() * (-1.0f64).exp()),
            Self::Trig(terms) => Some(terms.iter().map(|t| t.cos_amp.hypot(t.sin_amp)).sum()),
            Self::Polynomial(p) => (p.degree() == 0).then(|| p.eval(&[0.0; 3][..p.dim()]).abs()),
            Self::Sum(parts) => parts.iter().map(|(w, p)| p.sup_bound().map(|b| w.abs() * b)).sum(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::GaussianPoly { center, width, poly } => {
                let mut y = [0.0; 3];
                for (i, (a, b)) in x.iter().zip(center).enumerate() {
                    y[i] = a - b;
                }
                let r2: f64 = y.iter().map(|v| v * v).sum();
                let g = (-r2 / (2.0 * width * width)).exp();
                if g == 0.0 {
                    return 0.0;
                }
                poly.eval(&y[..center.len()]) * g
            }
            Self::Bump { center, radius, amplitude } => {
                let q = bump_q(x, center, *radius);
                if q >= 1.0 {
                    0.0
                } else {
                    amplitude * (-1.0 / (1.0 - q)).exp()
                }
            }
            Self::Trig(terms) => terms.iter().map(|t| t.derivative(0, x[0])).sum(),
            Self::Polynomial(p) => p.eval(x),
            Self::Sum(parts) => parts.iter().map(|(w, p)| w * p.value(x)).sum(),
        }
    }

    /// `∂^α φ(x)` for `|α| ≤ 4`.
    pub fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> f64 {
        if order(alpha) == 0 {
            return self.value(x);
        }
        match self {
            Self::GaussianPoly { center, width, poly } => {
                let dim = center.len();
                let y: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let r2: f64 = y.iter().map(|v| v * v).sum();
                let g = (-r2 / (2.0 * width * width)).exp();
                // ∂^γ of the Gaussian factor, per coordinate
                let herm: Vec<Vec<f64>> = (0..dim)
                    .map(|i| {
                        hermite_he(alpha[i] as usize, y[i] / width)
                            .iter()
                            .enumerate()
                            .map(|(n, h)| (-1.0 / width).powi(n as i32) * h)
                            .collect()
                    })
                    .collect();
                let mut total = 0.0;
                for beta in multi_indices(dim, order(alpha)) {
                    if (0..dim).any(|i| beta[i] > alpha[i]) {
                        continue;
                    }
                    let dp = poly.derivative(&beta, &y);
                    if dp == 0.0 {
                        continue;
                    }
                    let mut term = dp;
                    for i in 0..dim {
                        term *= binomial(alpha[i], beta[i]) * herm[i][(alpha[i] - beta[i]) as usize];
                    }
                    total += term;
                }
                total * g
            }
            Self::Bump { center, radius, amplitude } => {
                let q = bump_q(x, center, *radius);
                if q >= 1.0 {
                    return 0.0;
                }
                amplitude * bump_derivative(alpha, x, center, *radius, q)
            }
            Self::Trig(terms) => terms.iter().map(|t| t.derivative(alpha[0], x[0])).sum(),
            Self::Polynomial(p) => p.derivative(alpha, x),
            Self::Sum(parts) => parts.iter().map(|(w, p)| w * p.derivative(alpha, x)).sum(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let mut a = [0; 3];
                a[i] = 1;
                self.derivative(&a, x)
            })
            .collect()
    }

    /// The Hessian as a row-major `N × N` array.
    pub fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut a = [0; 3];
                a[i] += 1;
                a[j] += 1;
                let v = self.derivative(&a, x);
                h[i * n + j] = v;
                h[j * n + i] = v;
            }
        }
        h
    }

    /// `(2π)^{−N/2} ∫ e^{−ix·ξ} φ(x) dx` for the Gaussian family.
    pub fn fourier_transform(&self, xi: &[f64]) -> Option<Complex64> {
        match self {
            Self::GaussianPoly { center, width, poly } => {
                let w = *width;
                let n = center.len();
                let xi2: f64 = xi.iter().map(|v| v * v).sum();
                let envelope = w.powi(n as i32) * (-w * w * xi2 / 2.0).exp();
                let phase: f64 = -center.iter().zip(xi).map(|(c, k)| c * k).sum::<f64>();
                let mut total = Complex64::new(0.0, 0.0);
                for (alpha, c) in poly.terms() {
                    let mut term = Complex64::new(*c, 0.0) * Complex64::i().powu(order(alpha));
                    for i in 0..n {
                        let k = alpha[i] as usize;
                        term *= (-w).powi(k as i32) * hermite_he(k, w * xi[i])[k];
                    }
                    total += term;
                }
                Some(total * envelope * Complex64::from_polar(1.0, phase))
            }
            Self::Sum(parts) => parts
                .iter()
                .map(|(wt, p)| p.fourier_transform(xi).map(|v| v * *wt))
                .sum(),
            _ => None,
        }
    }

    /// `φ(· − h)`.
    pub fn translated(&self, h: &[f64]) -> Self {
        let shift = |c: &Vec<f64>| c.iter().zip(h).map(|(a, b)| a + b).collect::<Vec<f64>>();
        match self {
            Self::GaussianPoly { center, width, poly } => Self::GaussianPoly {
                center: shift(center),
                width: *width,
                poly: poly.clone(),
            },
            Self::Bump { center, radius, amplitude } => Self::Bump {
                center: shift(center),
                radius: *radius,
                amplitude: *amplitude,
            },
            Self::Trig(terms) => Self::Trig(
                terms
                    .iter()
                    .map(|t| {
                        // a cos(k(x−h)) + b sin(k(x−h))
                        let (s, c) = (t.freq * h[0]).sin_cos();
                        TrigTerm {
                            freq: t.freq,
                            cos_amp: t.cos_amp * c - t.sin_amp * s,
                            sin_amp: t.cos_amp * s + t.sin_amp * c,
                        }
                    })
                    .collect(),
            ),
            Self::Polynomial(_) => self.clone(),
            Self::Sum(parts) => Self::Sum(parts.iter().map(|(w, p)| (*w, p.translated(h))).collect()),
        }
    }
}

fn bump_q(x: &[f64], center: &[f64], radius: f64) -> f64 {
    x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (radius * radius)
}

/// `∂^α exp(−1/(1−q(x)))` with `q = |x−c|²/R²`, by Faà di Bruno over the
/// quadratic `q`: `G^{(j)}(q) = G(q) p_j(v)` with `v = 1/(1−q)`.
fn bump_derivative(alpha: &MultiIndex, x: &[f64], center: &[f64], radius: f64, q: f64) -> f64 {
    let k = order(alpha) as usize;
    let v = 1.0 / (1.0 - q);
    let g = (-v).exp();
    // p_{j+1}(v) = v² (p_j'(v) − p_j(v)), stored as coefficient vectors
    let mut p = vec![vec![1.0]];
    for j in 0..k {
        let cur = &p[j];
        let mut next = vec![0.0; cur.len() + 2];
        for (d, c) in cur.iter().enumerate() {
            next[d + 2] -= c;
            if d >= 1 {
                next[d + 1] += d as f64 * c;
            }
        }
        p.push(next);
    }
    let gj: Vec<f64> = p
        .iter()
        .map(|coeffs| g * coeffs.iter().rev().fold(0.0, |acc, c| acc * v + c))
        .collect();
    // Expand ∂^α G(q): each derivative either hits G (bringing a factor ∂_i q
    // and raising j) or an existing ∂_i q factor (turning it into 2/R²).
    // Track terms by (j, multiset of surviving linear factors).
    let r2 = radius * radius;
    let lin: Vec<f64> = x.iter().zip(center).map(|(a, b)| 2.0 * (a - b) / r2).collect();
    // state: (power of G derivative, counts of linear factors per coordinate, coefficient)
    let mut terms: Vec<(usize, [u32; 3], f64)> = vec![(0, [0; 3], 1.0)];
    for (i, &times) in alpha.iter().enumerate() {
        for _ in 0..times {
            let mut next = Vec::with_capacity(terms.len() * 2);
            for &(j, lf, c) in &terms {
                let mut raised = lf;
                raised[i] += 1;
                next.push((j + 1, raised, c));
                if lf[i] > 0 {
                    let mut lowered = lf;
                    lowered[i] -= 1;
                    next.push((j, lowered, c * lf[i] as f64 * 2.0 / r2));
                }
            }
            next.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
            terms.clear();
            for t in next {
                match terms.last_mut() {
                    Some(last) if last.0 == t.0 && last.1 == t.1 => last.2 += t.2,
                    _ => terms.push(t),
                }
            }
        }
    }
    terms
        .iter()
        .map(|&(j, lf, c)| {
            let mut v = c * gj[j];
            for (d, &e) in lf.iter().enumerate() {
                if e > 0 {
                    v *= lin[d].powi(e as i32);
                }
            }
            v
        })
        .sum()
}

/// A candidate solution `u = p + Σ trig terms` (trig part on the line only).
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    pub poly: Polynomial,
    pub trig: Vec<TrigTerm>,
}

impl CandidateSolution {
    pub fn polynomial(poly: Polynomial) -> Self {
        Self { poly, trig: Vec::new() }
    }

    pub fn trig(terms: Vec<TrigTerm>) -> Self {
        Self { poly: Polynomial::zero(1), trig: terms }
    }

    pub fn dim(&self) -> usize {
        if self.trig.is_empty() {
            self.poly.dim()
        } else {
            1
        }
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.poly.eval(x) + self.trig.iter().map(|t| t.derivative(0, x[0])).sum::<f64>()
    }

    /// `u ∈ L¹_σ`: `∫ |u| / (1 + |x|^{N+2σ}) < ∞`, i.e. polynomial degree
    /// below `2σ` (a nonzero trig part is bounded).
    pub fn in_weighted_l1(&self, sigma: f64) -> bool {
        self.poly.is_zero() || (self.poly.degree() as f64) < 2.0 * sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite;

    fn central_difference(f: &TestFunction, alpha: &MultiIndex, x: &[f64]) -> f64 {
        // one order down, then a symmetric difference in the first nonzero slot
        let i = (0..3).find(|&i| alpha[i] > 0).unwrap();
        let mut lower = *alpha;
        lower[i] -= 1;
        let h = 1e-5;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        (f.derivative(&lower, &xp) - f.derivative(&lower, &xm)) / (2.0 * h)
    }

    #[test]
    fn gaussian_poly_derivatives_match_differences() {
        let p = Polynomial::new(2, vec![([0, 0, 0], 1.0), ([1, 1, 0], 0.5), ([2, 0, 0], -0.3)]).unwrap();
        let f = TestFunction::gaussian_poly(vec![0.2, -0.1], 0.8, p).unwrap();
        let x = [0.35, 0.6];
        for alpha in multi_indices(2, 4).into_iter().filter(|a| order(a) > 0) {
            let exact = f.derivative(&alpha, &x);
            let fd = central_difference(&f, &alpha, &x);
            assert!((exact - fd).abs() < 1e-6 * (1.0 + exact.abs()), "{alpha:?}: {exact} vs {fd}");
        }
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let f = TestFunction::bump(vec![0.1, 0.0, -0.2], 1.5, 2.0).unwrap();
        let x = [0.4, 0.3, 0.1];
        for alpha in multi_indices(3, 4).into_iter().filter(|a| order(a) > 0) {
            let exact = f.derivative(&alpha, &x);
            let fd = central_difference(&f, &alpha, &x);
            assert!((exact - fd).abs() < 1e-6 * (1.0 + exact.abs()), "{alpha:?}: {exact} vs {fd}");
        }
        assert_eq!(f.value(&[2.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn trig_derivatives() {
        let f = TestFunction::trig(vec![TrigTerm { freq: 2.0, cos_amp: 1.0, sin_amp: 0.5 }]);
        let x = [0.3];
        // d²/dx² = −4 φ
        assert!((f.derivative(&[2, 0, 0], &x) + 4.0 * f.value(&x)).abs() < 1e-14);
        let moved = f.translated(&[0.7]);
        assert!((moved.value(&[1.0]) - f.value(&[0.3])).abs() < 1e-14);
    }

    #[test]
    fn gaussian_fourier_transform_matches_quadrature() {
        let p = Polynomial::new(1, vec![([0, 0, 0], 1.0), ([1, 0, 0], 0.7), ([3, 0, 0], -0.2)]).unwrap();
        let f = TestFunction::gaussian_poly(vec![0.4], 1.3, p).unwrap();
        for &k in &[0.0, 0.5, 1.7, -2.2] {
            let re = composite(-20.0, 20.0, 80, 16, |x| f.value(&[x]) * (k * x).cos());
            let im = composite(-20.0, 20.0, 80, 16, |x| -f.value(&[x]) * (k * x).sin());
            let num = Complex64::new(re, im) / (2.0 * PI).sqrt();
            let exact = f.fourier_transform(&[k]).unwrap();
            assert!((num - exact).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn candidate_growth_class() {
        let affine = CandidateSolution::polynomial(Polynomial::affine(&[3.0, 0.0], -2.0).unwrap());
        assert!(affine.in_weighted_l1(0.75));
        assert!(!affine.in_weighted_l1(0.5));
        assert!(CandidateSolution::trig(vec![TrigTerm { freq: 1.0, cos_amp: 1.0, sin_amp: 0.0 }])
            .in_weighted_l1(0.1));
    }
}
