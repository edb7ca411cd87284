//! The symbol `η(ξ) = ∫ (1 − e^{iξ·y} + iξ·y 1_B(y)) dν̃(y)`, by closed form
//! and by direct quadrature, plus the checks built on it.

mod duality;
mod zero_set;

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::measures::{LevyMeasure, MeasureKind, RadialTail};
use crate::quadrature::{fourier_half_line, gauss_legendre, graded_from_zero, Graded};
use crate::special_fn::{frac_laplacian_constant, one_minus_cos, sin_minus_identity};
use crate::sphere::{cosine_transform, im_symbol_transform, zonal_integral, SphereFunction};

pub use duality::{duality_check, DualityGrid, DualityReport};
pub use zero_set::{zero_set_scan, ZeroCluster, ZeroSetReport};

/// Where a symbol's values come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm(&'static str),
    Quadrature(&'static str),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ClosedForm(name) => write!(f, "closed_form({name})"),
            Self::Quadrature(name) => write!(f, "quadrature({name})"),
        }
    }
}

type Evaluator = dyn Fn(&[f64]) -> Result<Complex64> + Send + Sync;

/// A symbol `ξ ↦ η(ξ)` on `ℝ^N` of order `s`.
#[derive(Clone)]
pub struct Symbol {
    dim: usize,
    order: f64,
    provenance: Provenance,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl Symbol {
    /// Wraps an arbitrary evaluator.
    pub fn new(
        dim: usize,
        order: f64,
        provenance: Provenance,
        evaluator: impl Fn(&[f64]) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, order, provenance, evaluator: Arc::new(evaluator) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.dim {
            return domain(format!("frequency has {} coordinates, expected {}", xi.len(), self.dim));
        }
        (self.evaluator)(xi)
    }
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `ξ coth(πξ/2) − 2/π`, continued by 0 at the origin.
fn ilw_symbol(xi: f64) -> f64 {
    let z = PI * xi / 2.0;
    if z.abs() < 1e-4 {
        // z coth z = 1 + z²/3 − z⁴/45
        let z2 = z * z;
        return 2.0 / PI * (z2 / 3.0 - z2 * z2 / 45.0);
    }
    xi / z.tanh() - 2.0 / PI
}

/// The angular factor of the measure as a sphere function (the reflection
/// flips the odd part).
fn own_angular(m: &LevyMeasure, a: &SphereFunction) -> Result<SphereFunction> {
    if !m.is_reflected() {
        return Ok(a.clone());
    }
    let even = a.even_part();
    let odd = a.odd_part();
    let coeffs = even.coefficients().iter().zip(odd.coefficients()).map(|(e, o)| e - o).collect();
    SphereFunction::from_coefficients(a.dim(), coeffs)
}

/// The closed-form symbol of a named measure.
pub fn symbol_closed_form(m: &LevyMeasure) -> Result<Symbol> {
    let n = m.dim();
    let s = m.order();
    let symbol = match m.kind() {
        MeasureKind::FractionalLaplacian => Symbol::new(n, s, Provenance::ClosedForm("fractional_laplacian"), move |xi| {
            Ok(Complex64::new(norm(xi).powf(2.0 * s), 0.0))
        }),
        MeasureKind::Relativistic => Symbol::new(n, s, Provenance::ClosedForm("relativistic"), move |xi| {
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            // (1 + r²)^s − 1 without cancellation at small r
            Ok(Complex64::new((s * r2.ln_1p()).exp_m1(), 0.0))
        }),
        MeasureKind::IntermediateLongWave => {
            Symbol::new(1, s, Provenance::ClosedForm("ilw"), |xi| Ok(Complex64::new(ilw_symbol(xi[0]), 0.0)))
        }
        MeasureKind::Anisotropic(a) => {
            let a = own_angular(m, a)?;
            let re_factor = frac_laplacian_constant(n, s)? / (2.0 * frac_laplacian_constant(1, s)?);
            let im_factor = frac_laplacian_constant(n, s)?;
            let has_odd = !a.is_even();
            Symbol::new(n, s, Provenance::ClosedForm("anisotropic"), move |xi| {
                let rho = norm(xi);
                if rho == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let unit: Vec<f64> = xi.iter().map(|v| v / rho).collect();
                let re = re_factor * rho.powf(2.0 * s) * cosine_transform(&a, s, &unit)?;
                let im = if has_odd { im_factor * im_symbol_transform(&a, s, rho, &unit)? } else { 0.0 };
                Ok(Complex64::new(re, im))
            })
        }
        MeasureKind::UserRadial(_) => {
            return Err(Error::Unsupported("user radial kernels have no closed-form symbol; use quadrature".into()))
        }
    };
    Ok(symbol)
}

/// `∫_0^∞ (1 − e^{itr} + itr 1_{r<1}) κ₀(r) r^{N−1} dr`.
fn radial_symbol(m: &LevyMeasure, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = m.dim() as i32;
    let w = |r: f64| m.radial(r) * r.powi(n - 1);
    let cfg = Graded { max_width: (PI / t.abs()).min(1.0), ..Graded::default() };
    let near_re = graded_from_zero(1.0, &cfg, |r| one_minus_cos(t * r) * w(r))?;
    let near_im = graded_from_zero(1.0, &cfg, |r| -sin_minus_identity(t * r) * w(r))?;
    let s = m.order();
    let (power, cutoff, mass) = match m.radial_tail() {
        RadialTail::Power { coef } => (Some((coef, 1.0 + 2.0 * s)), f64::INFINITY, coef / (2.0 * s)),
        RadialTail::Cutoff(c) => {
            let rule = gauss_legendre(16);
            let panels = (c - 1.0).ceil().max(1.0) as usize;
            let h = (c - 1.0) / panels as f64;
            let mass = (0..panels).map(|p| rule.integrate(1.0 + p as f64 * h, 1.0 + (p + 1) as f64 * h, w)).sum();
            (None, c, mass)
        }
    };
    let far = fourier_half_line(1.0, t, power, cutoff, 48.0, w);
    Ok(Complex64::new(near_re + mass - far.re, near_im - far.im))
}

/// `η(ξ)` by quadrature of its defining integral, using the reflected
/// measure.
pub fn symbol_quadrature(m: &LevyMeasure, xi: &[f64]) -> Result<Complex64> {
    let n = m.dim();
    if xi.len() != n {
        return domain(format!("frequency has {} coordinates, expected {n}", xi.len()));
    }
    let rho = norm(xi);
    if rho == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if n == 1 {
        // radial kernels on the line are even
        let f = radial_symbol(m, rho)?;
        return Ok(Complex64::new(2.0 * f.re, 0.0));
    }
    let reflected = m.reflect();
    let cache: RefCell<HashMap<u64, Complex64>> = RefCell::new(HashMap::new());
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |u: f64| -> Complex64 {
        if let Some(v) = cache.borrow().get(&u.to_bits()) {
            return *v;
        }
        let v = radial_symbol(m, rho * u).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, f64::NAN)
        });
        cache.borrow_mut().insert(u.to_bits(), v);
        v
    };
    let g = |theta: &[f64]| reflected.angular(theta);
    let re = zonal_integral(|u| f(u).re, xi, g)?;
    let im = if m.is_even() { 0.0 } else { zonal_integral(|u| f(u).im, xi, g)? };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(Complex64::new(re, im))
}

/// A [`Symbol`] whose evaluator is [`symbol_quadrature`].
pub fn quadrature_symbol(m: &LevyMeasure) -> Symbol {
    let measure = m.clone();
    Symbol::new(m.dim(), m.order(), Provenance::Quadrature(m.kind().name()), move |xi| {
        symbol_quadrature(&measure, xi)
    })
}

/// The closed form when one exists, otherwise quadrature.
pub fn symbol_of(m: &LevyMeasure) -> Symbol {
    symbol_closed_form(m).unwrap_or_else(|_| quadrature_symbol(m))
}
