//! Real and complex polynomials in up to three variables.

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Exponents `(α₁, α₂, α₃)`; unused coordinates stay zero.
pub type MultiIndex = [u32; 3];

pub const MAX_DIM: usize = 3;

pub fn order(alpha: &MultiIndex) -> u32 {
    alpha.iter().sum()
}

/// All multi-indices in `dim` variables with `|α| ≤ k`, graded by order.
pub fn multi_indices(dim: usize, k: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for total in 0..=k {
        let mut push = |a: MultiIndex| {
            if order(&a) == total {
                out.push(a);
            }
        };
        match dim {
            1 => push([total, 0, 0]),
            2 => (0..=total).rev().for_each(|i| push([i, total - i, 0])),
            _ => {
                for i in (0..=total).rev() {
                    for j in (0..=total - i).rev() {
                        push([i, j, total - i - j]);
                    }
                }
            }
        }
    }
    out
}

fn monomial(alpha: &MultiIndex, x: &[f64]) -> f64 {
    x.iter()
        .zip(alpha)
        .map(|(xi, &a)| xi.powi(a as i32))
        .product()
}

/// Falling factorial `a (a−1) ⋯ (a−k+1)`.
fn falling(a: u32, k: u32) -> f64 {
    (0..k).map(|j| (a - j) as f64).product()
}

/// A real polynomial `Σ c_α x^α` in `dim` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(MultiIndex, f64)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(MultiIndex, f64)>) -> Result<Self> {
        check_terms(dim, terms.iter().map(|(a, _)| a))?;
        let mut p = Self { dim, terms };
        p.normalize();
        Ok(p)
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self { dim, terms: vec![([0; 3], c)] };
        p.normalize();
        p
    }

    /// `Σ_i b_i x_i + c`.
    pub fn affine(b: &[f64], c: f64) -> Result<Self> {
        let mut terms = vec![([0; 3], c)];
        for (i, &bi) in b.iter().enumerate() {
            let mut a = [0; 3];
            a[i] = 1;
            terms.push((a, bi));
        }
        Self::new(b.len(), terms)
    }

    fn normalize(&mut self) {
        self.terms.sort_by_key(|(a, _)| (order(a), [u32::MAX - a[0], u32::MAX - a[1], a[2]]));
        let mut merged: Vec<(MultiIndex, f64)> = Vec::with_capacity(self.terms.len());
        for &(a, c) in &self.terms {
            match merged.last_mut() {
                Some((b, d)) if *b == a => *d += c,
                _ => merged.push((a, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        self.terms = merged;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(MultiIndex, f64)] {
        &self.terms
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(a, _)| order(a)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(a, c)| c * monomial(a, x)).sum()
    }

    /// `∂^β p` evaluated at `x`.
    pub fn derivative(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .filter(|(a, _)| (0..3).all(|i| a[i] >= beta[i]))
            .map(|(a, c)| {
                let mut v = *c;
                for i in 0..self.dim {
                    v *= falling(a[i], beta[i]) * x[i].powi((a[i] - beta[i]) as i32);
                }
                v
            })
            .sum()
    }

    /// The Laplacian as a new polynomial.
    pub fn laplacian(&self) -> Polynomial {
        let mut terms = Vec::new();
        for &(a, c) in &self.terms {
            for i in 0..self.dim {
                if a[i] >= 2 {
                    let mut b = a;
                    b[i] -= 2;
                    terms.push((b, c * (a[i] * (a[i] - 1)) as f64));
                }
            }
        }
        let mut p = Polynomial { dim: self.dim, terms };
        p.normalize();
        p
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        let mut p = Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|&(a, c)| (a, k * c)).collect(),
        };
        p.normalize();
        p
    }
}

fn check_terms<'a>(dim: usize, alphas: impl Iterator<Item = &'a MultiIndex>) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return domain(format!("dimension must be 1, 2 or 3, got {dim}"));
    }
    for a in alphas {
        if a[dim..].iter().any(|&e| e != 0) {
            return domain(format!("multi-index {a:?} uses a coordinate beyond dimension {dim}"));
        }
    }
    Ok(())
}

/// Largest degree supported for the constant-coefficient part `P`.
pub const MAX_SYMBOL_DEGREE: u32 = 4;

/// `P(z) = Σ c_α z^α` with complex coefficients. Acts on functions as
/// `P(∇)`; its multiplier on `e^{iξ·x}` under `P(−∇)` is `P(−iξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    dim: usize,
    terms: Vec<(MultiIndex, Complex64)>,
}

impl ComplexPolynomial {
    pub fn new(dim: usize, terms: Vec<(MultiIndex, Complex64)>) -> Result<Self> {
        check_terms(dim, terms.iter().map(|(a, _)| a))?;
        if let Some((a, _)) = terms.iter().find(|(a, _)| order(a) > MAX_SYMBOL_DEGREE) {
            return domain(format!(
                "degree of {a:?} exceeds the supported maximum {MAX_SYMBOL_DEGREE}"
            ));
        }
        let mut sorted = terms;
        sorted.sort_by_key(|(a, _)| (order(a), [u32::MAX - a[0], u32::MAX - a[1], a[2]]));
        let mut merged: Vec<(MultiIndex, Complex64)> = Vec::with_capacity(sorted.len());
        for (a, c) in sorted {
            match merged.last_mut() {
                Some((b, d)) if *b == a => *d += c,
                _ => merged.push((a, c)),
            }
        }
        merged.retain(|(_, c)| c.norm() != 0.0);
        Ok(Self { dim, terms: merged })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, vec![([0; 3], Complex64::new(c, 0.0))]).unwrap_or_else(|_| Self::zero(dim))
    }

    /// `P(z) = −z·Az + b·z`.
    pub fn drift_diffusion(a: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        let n = b.len();
        if a.len() != n || a.iter().any(|row| row.len() != n) {
            return domain("matrix and drift vector sizes disagree");
        }
        let mut terms = Vec::new();
        for i in 0..n {
            let mut e = [0; 3];
            e[i] = 1;
            terms.push((e, Complex64::new(b[i], 0.0)));
            for j in 0..n {
                let mut e = [0; 3];
                e[i] += 1;
                e[j] += 1;
                terms.push((e, Complex64::new(-a[i][j], 0.0)));
            }
        }
        Self::new(n, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(MultiIndex, Complex64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(a, _)| order(a)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when `P ≡ c`.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.terms.as_slice() {
            [] => Some(Complex64::new(0.0, 0.0)),
            [(a, c)] if order(a) == 0 => Some(*c),
            _ => None,
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(a, c)| {
                let mut v = *c;
                for i in 0..self.dim {
                    v *= z[i].powu(a[i]);
                }
                v
            })
            .sum()
    }

    /// `P(−iξ)`.
    pub fn eval_symbol(&self, xi: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = xi.iter().map(|&x| Complex64::new(0.0, -x)).collect();
        self.eval(&z)
    }

    /// Coefficients of `P(−∇) = Σ c_α (−1)^{|α|} ∂^α`.
    pub fn minus_gradient_terms(&self) -> impl Iterator<Item = (MultiIndex, Complex64)> + '_ {
        self.terms.iter().map(|&(a, c)| {
            let sign = if order(&a) % 2 == 0 { 1.0 } else { -1.0 };
            (a, c * sign)
        })
    }
}

/// Probabilists' Hermite polynomials `He_0(x), …, He_n(x)`.
pub fn hermite_he(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 2..=n {
        let v = x * out[k - 1] - (k - 1) as f64 * out[k - 2];
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_graded() {
        let idx = multi_indices(2, 2);
        assert_eq!(idx, vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [2, 0, 0], [1, 1, 0], [0, 2, 0]]);
        assert_eq!(multi_indices(3, 4).len(), 35);
    }

    #[test]
    fn derivative_of_monomials() {
        let p = Polynomial::new(2, vec![([2, 1, 0], 3.0), ([0, 0, 0], 1.0)]).unwrap();
        // ∂x∂y (3x²y) = 6x
        assert_eq!(p.derivative(&[1, 1, 0], &[2.0, 5.0]), 12.0);
        assert_eq!(p.laplacian().eval(&[2.0, 5.0]), 30.0);
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn harmonic_quadratic() {
        let p = Polynomial::new(2, vec![([2, 0, 0], 1.0), ([0, 2, 0], -1.0)]).unwrap();
        assert!(p.laplacian().is_zero());
    }

    #[test]
    fn symbol_of_first_order_terms() {
        // P(z) = z₁ gives P(−iξ) = −iξ₁
        let p = ComplexPolynomial::new(1, vec![([1, 0, 0], Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!(p.eval_symbol(&[2.0]), Complex64::new(0.0, -2.0));
        let q = ComplexPolynomial::drift_diffusion(&[vec![1.0]], &[0.0]).unwrap();
        // −z² at z = −iξ is ξ²
        assert!((q.eval_symbol(&[3.0]) - Complex64::new(9.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn degree_limit() {
        assert!(ComplexPolynomial::new(1, vec![([5, 0, 0], Complex64::new(1.0, 0.0))]).is_err());
        assert!(Polynomial::new(1, vec![([0, 1, 0], 1.0)]).is_err());
    }

    #[test]
    fn hermite_values() {
        let h = hermite_he(4, 2.0);
        assert_eq!(h, vec![1.0, 2.0, 3.0, 2.0, -5.0]);
    }
}
