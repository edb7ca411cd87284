//! Functions on the circle and the 2-sphere, stored by harmonic degree.
//!
//! On the circle the coefficients are the plain Fourier coefficients
//! `[c₀, c₁, d₁, c₂, d₂, …]` of `c₀ + Σ c_l cos lθ + d_l sin lθ`. On the
//! 2-sphere they are coefficients of orthonormal real spherical harmonics,
//! ordered by degree and then by `m = −l, …, l`.

mod funk_hecke;
mod grids;

pub use funk_hecke::{
    cosine_eigenvalues, cosine_transform, default_direction_grid, funk_hecke_mu, im_symbol_transform,
    mu_decay_report, positivity_check, positivity_check_with_margin, zonal_integral, MuDecayReport,
    PositivityReport,
};
pub use grids::{circle_grid, icosahedral_grid};
pub(crate) use grids::orthonormal_frame;

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereFunction {
    dim: usize,
    l_max: usize,
    coeffs: Vec<f64>,
    /// Set when the coefficients come from sampling, so that a short
    /// expansion may hide unresolved higher degrees.
    sampled: bool,
}

fn degree_range(dim: usize, l: usize) -> std::ops::Range<usize> {
    match (dim, l) {
        (2, 0) => 0..1,
        (2, _) => 2 * l - 1..2 * l + 1,
        _ => l * l..(l + 1) * (l + 1),
    }
}

impl SphereFunction {
    /// Builds a function from an exact coefficient list; the degree is
    /// inferred from the length.
    pub fn from_coefficients(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        let l_max = match dim {
            2 if coeffs.len() % 2 == 1 => (coeffs.len() - 1) / 2,
            3 => {
                let r = (coeffs.len() as f64).sqrt().round() as usize;
                if r * r != coeffs.len() || r == 0 {
                    return domain(format!(
                        "a coefficient list on the 2-sphere needs a square length, got {}",
                        coeffs.len()
                    ));
                }
                r - 1
            }
            2 => {
                return domain(format!(
                    "a coefficient list on the circle needs odd length, got {}",
                    coeffs.len()
                ))
            }
            _ => return Err(Error::Unsupported(format!("sphere functions need N in {{2, 3}}, got {dim}"))),
        };
        if coeffs.iter().any(|c| !c.is_finite()) {
            return domain("coefficients must be finite");
        }
        Ok(Self { dim, l_max, coeffs, sampled: false })
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        let c0 = if dim == 3 { c * (4.0 * PI).sqrt() } else { c };
        Self::from_coefficients(dim, vec![c0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_sampled(&self) -> bool {
        self.sampled
    }

    pub fn degree_coefficients(&self, l: usize) -> &[f64] {
        if l > self.l_max {
            return &[];
        }
        &self.coeffs[degree_range(self.dim, l)]
    }

    pub fn degree_energy(&self, l: usize) -> f64 {
        self.degree_coefficients(l).iter().map(|c| c * c).sum()
    }

    fn keep_parity(&self, odd: bool) -> Self {
        let mut out = self.clone();
        for l in 0..=self.l_max {
            if (l % 2 == 1) != odd {
                for c in &mut out.coeffs[degree_range(self.dim, l)] {
                    *c = 0.0;
                }
            }
        }
        out
    }

    pub fn even_part(&self) -> Self {
        self.keep_parity(false)
    }

    pub fn odd_part(&self) -> Self {
        self.keep_parity(true)
    }

    pub fn is_even(&self) -> bool {
        (1..=self.l_max).step_by(2).all(|l| self.degree_energy(l) == 0.0)
    }

    /// The function at `theta`, which is normalised before use.
    pub fn eval(&self, theta: &[f64]) -> f64 {
        self.degree_values(theta).iter().sum()
    }

    /// The degree-`l` components `a_l(θ)` for `l = 0, …, l_max`.
    pub fn degree_values(&self, theta: &[f64]) -> Vec<f64> {
        let basis = basis_values(self.dim, self.l_max, theta);
        (0..=self.l_max)
            .map(|l| {
                let r = degree_range(self.dim, l);
                self.coeffs[r.clone()].iter().zip(&basis[r]).map(|(c, y)| c * y).sum()
            })
            .collect()
    }
}

/// Basis functions in storage order at the direction `theta`.
pub fn basis_values(dim: usize, l_max: usize, theta: &[f64]) -> Vec<f64> {
    if dim == 2 {
        let phi = theta[1].atan2(theta[0]);
        let mut out = Vec::with_capacity(2 * l_max + 1);
        out.push(1.0);
        for l in 1..=l_max {
            let (s, c) = (l as f64 * phi).sin_cos();
            out.push(c);
            out.push(s);
        }
        out
    } else {
        real_spherical_harmonics(l_max, theta)
    }
}

/// Orthonormal real spherical harmonics `Y_{l,m}` for `l ≤ l_max`, ordered by
/// degree then `m = −l, …, l` (sine-type for `m < 0`).
pub fn real_spherical_harmonics(l_max: usize, theta: &[f64]) -> Vec<f64> {
    let norm = (theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2]).sqrt();
    let z = (theta[2] / norm).clamp(-1.0, 1.0);
    let rho = (theta[0] * theta[0] + theta[1] * theta[1]).sqrt() / norm;
    let phi = theta[1].atan2(theta[0]);
    let size = l_max + 1;
    // normalised associated Legendre values p̄[l][m]
    let mut p = vec![vec![0.0; size]; size];
    p[0][0] = (0.25 / PI).sqrt();
    for m in 1..size {
        let mf = m as f64;
        p[m][m] = p[m - 1][m - 1] * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * rho;
    }
    for m in 0..size {
        if m + 1 < size {
            p[m + 1][m] = z * (2.0 * m as f64 + 3.0).sqrt() * p[m][m];
        }
        for l in m + 2..size {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[l][m] = a * (z * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    let mut out = Vec::with_capacity(size * size);
    for (l, row) in p.iter().enumerate() {
        for m in -(l as i64)..=(l as i64) {
            let am = m.unsigned_abs() as usize;
            let v = match m.cmp(&0) {
                std::cmp::Ordering::Equal => row[0],
                std::cmp::Ordering::Greater => 2f64.sqrt() * row[am] * (am as f64 * phi).cos(),
                std::cmp::Ordering::Less => 2f64.sqrt() * row[am] * (am as f64 * phi).sin(),
            };
            out.push(v);
        }
    }
    out
}

/// Result of projecting a sampled function onto harmonics.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub function: SphereFunction,
    /// Share of coefficient energy in the top degree.
    pub top_degree_share: f64,
    /// Set when the top degree carries more than 10% of the energy.
    pub aliasing_warning: bool,
}

/// Projects `f` onto harmonics of degree `≤ l_max` with a product rule that
/// is exact for band-limited inputs of degree `2·l_max`.
pub fn expand<F: Fn(&[f64]) -> f64>(dim: usize, f: F, l_max: usize) -> Result<Expansion> {
    let coeffs = match dim {
        2 => {
            let m = 8 * (l_max + 1);
            let mut c = vec![0.0; 2 * l_max + 1];
            for k in 0..m {
                let t = 2.0 * PI * k as f64 / m as f64;
                let v = f(&[t.cos(), t.sin()]);
                c[0] += v;
                for l in 1..=l_max {
                    let (s, co) = (l as f64 * t).sin_cos();
                    c[2 * l - 1] += 2.0 * v * co;
                    c[2 * l] += 2.0 * v * s;
                }
            }
            c.iter_mut().for_each(|x| *x /= m as f64);
            c
        }
        3 => {
            let rule = gauss_legendre(2 * l_max + 2);
            let m = 4 * l_max + 4;
            let mut c = vec![0.0; (l_max + 1) * (l_max + 1)];
            for (z, wz) in rule.mapped(-1.0, 1.0) {
                let rho = (1.0 - z * z).max(0.0).sqrt();
                for k in 0..m {
                    let phi = 2.0 * PI * k as f64 / m as f64;
                    let theta = [rho * phi.cos(), rho * phi.sin(), z];
                    let w = wz * 2.0 * PI / m as f64;
                    let v = f(&theta) * w;
                    for (ci, y) in c.iter_mut().zip(real_spherical_harmonics(l_max, &theta)) {
                        *ci += v * y;
                    }
                }
            }
            c
        }
        _ => return Err(Error::Unsupported(format!("sphere functions need N in {{2, 3}}, got {dim}"))),
    };
    let mut function = SphereFunction::from_coefficients(dim, coeffs)?;
    function.sampled = true;
    let total: f64 = (0..=l_max).map(|l| function.degree_energy(l)).sum();
    let top_degree_share = if total > 0.0 && l_max > 0 {
        function.degree_energy(l_max) / total
    } else {
        0.0
    };
    Ok(Expansion {
        function,
        top_degree_share,
        aliasing_warning: top_degree_share > 0.1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevReport {
    pub tau_even: f64,
    pub tau_odd: f64,
    pub norm_even: f64,
    pub norm_odd: f64,
    /// Share of each weighted series carried by the last quarter of degrees.
    pub tail_share_even: f64,
    pub tail_share_odd: f64,
    pub passed: bool,
}

/// Checks `a_even ∈ W^{(N−1)/2, 2}` and `a_odd ∈ W^{(N+2)/2 + 2s, 2}` using the
/// weights `(1 + l(l+N−2))^τ`. A series passes when its last quarter of
/// degrees carries under 10% of the weighted sum.
///
/// Coefficient lists given exactly describe finite expansions and are
/// treated as zero beyond their degree; sampled expansions must reach
/// degree 8 to say anything.
pub fn sobolev_check(a: &SphereFunction, s: f64) -> Result<SobolevReport> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s must lie in (0, 1), got {s}"));
    }
    if a.sampled && a.l_max < 8 {
        return Err(Error::Inconclusive(format!(
            "expansion of degree {} is too short to judge decay (need at least 8)",
            a.l_max
        )));
    }
    let n = a.dim as f64;
    let tau_even = (n - 1.0) / 2.0;
    let tau_odd = (n + 2.0) / 2.0 + 2.0 * s;
    let l_eff = a.l_max.max(8);
    let tail_start = (3 * l_eff).div_ceil(4);
    let energy: f64 = (0..=a.l_max).map(|l| a.degree_energy(l)).sum();
    let series = |odd: bool, tau: f64| -> (f64, f64) {
        let mut total = 0.0;
        let mut tail = 0.0;
        let mut raw = 0.0;
        for l in (0..=l_eff).filter(|l| (l % 2 == 1) == odd) {
            let lf = l as f64;
            raw += a.degree_energy(l);
            let term = (1.0 + lf * (lf + n - 2.0)).powf(tau) * a.degree_energy(l);
            total += term;
            if l >= tail_start {
                tail += term;
            }
        }
        // a parity carrying only rounding noise (as sampled expansions do) has no tail to judge
        let share = if total > 0.0 && raw > 1e-20 * energy { tail / total } else { 0.0 };
        (total.sqrt(), share)
    };
    let (norm_even, tail_share_even) = series(false, tau_even);
    let (norm_odd, tail_share_odd) = series(true, tau_odd);
    Ok(SobolevReport {
        tau_even,
        tau_odd,
        norm_even,
        norm_odd,
        tail_share_even,
        tail_share_odd,
        passed: tail_share_even < 0.1 && tail_share_odd < 0.1,
    })
}
