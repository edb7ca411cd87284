//! Zonal transforms: Funk–Hecke eigenvalues, the `2s`-cosine transform and
//! the odd `h_s` transform.

use std::f64::consts::{FRAC_PI_2, PI};

use super::grids::{circle_grid, icosahedral_grid, orthonormal_frame};
use super::SphereFunction;
use crate::error::{domain, Error, Result};
use crate::quadrature::{tanh_sinh_tol, Tolerance};
use crate::special_fn::{gamma, gegenbauer_unchecked, h_s_analytic};

const TOL: Tolerance = Tolerance::new(1e-15, 1e-13);

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("sphere transforms need N in {{2, 3}}, got {dim}")))
    }
}

/// The eigenvalue `μ(l, N)` of `Y ↦ ∫ h(ξ·θ) Y(θ) dθ` on degree-`l`
/// harmonics. On the circle this is `2∫_0^π h(cos t) cos(lt) dt`.
///
/// `h` may have a kink at 0 (as `|t|^{2s}` and `h_s` do); the quadrature is
/// split there.
pub fn funk_hecke_mu<H: Fn(f64) -> f64>(h: H, l: usize, dim: usize) -> Result<f64> {
    check_dim(dim)?;
    let lf = l as f64;
    if dim == 2 {
        // t = π/2 ∓ u puts the kink of h(cos t) at u = 0
        let upper = tanh_sinh_tol(0.0, FRAC_PI_2, TOL, |u| {
            h(u.sin()) * (lf * (FRAC_PI_2 - u)).cos()
        });
        let lower = tanh_sinh_tol(0.0, FRAC_PI_2, TOL, |u| {
            h(-u.sin()) * (lf * (FRAC_PI_2 + u)).cos()
        });
        return Ok(2.0 * (upper + lower));
    }
    let parity = if l % 2 == 0 { 1.0 } else { -1.0 };
    let integral = tanh_sinh_tol(0.0, 1.0, TOL, |u| {
        gegenbauer_unchecked(l, 0.5, u) * (h(u) + parity * h(-u))
    });
    Ok(2.0 * PI * integral)
}

/// `∫_{S^{N−1}} h(ξ·θ) g(θ) dθ` by direct quadrature in coordinates adapted
/// to `ξ`, independent of any harmonic expansion. `g` must be smooth; `h`
/// may have a kink at 0.
pub fn zonal_integral<H, G>(h: H, xi: &[f64], g: G) -> Result<f64>
where
    H: Fn(f64) -> f64,
    G: Fn(&[f64]) -> f64,
{
    let dim = xi.len();
    check_dim(dim)?;
    let xi = unit_vector(xi)?;
    if dim == 2 {
        let perp = [-xi[1], xi[0]];
        let point = |a: f64| {
            let (s, c) = a.sin_cos();
            [c * xi[0] + s * perp[0], c * xi[1] + s * perp[1]]
        };
        let f = |a: f64| h(a.cos()) * g(&point(a));
        let front = tanh_sinh_tol(-FRAC_PI_2, FRAC_PI_2, TOL, f);
        let back = tanh_sinh_tol(FRAC_PI_2, 3.0 * FRAC_PI_2, TOL, f);
        return Ok(front + back);
    }
    let (e1, e2) = orthonormal_frame(&xi);
    let m = 96;
    let ring = |t: f64| -> f64 {
        let r = (1.0 - t * t).max(0.0).sqrt();
        let mut sum = 0.0;
        for k in 0..m {
            let b = 2.0 * PI * k as f64 / m as f64;
            let (sb, cb) = b.sin_cos();
            let p: Vec<f64> = (0..3).map(|i| t * xi[i] + r * (cb * e1[i] + sb * e2[i])).collect();
            sum += g(&p);
        }
        sum * 2.0 * PI / m as f64
    };
    let f = |t: f64| h(t) * ring(t);
    Ok(tanh_sinh_tol(-1.0, 0.0, TOL, f) + tanh_sinh_tol(0.0, 1.0, TOL, f))
}

pub(crate) fn unit_vector(xi: &[f64]) -> Result<Vec<f64>> {
    let n = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return domain("direction must be a nonzero finite vector");
    }
    Ok(xi.iter().map(|x| x / n).collect())
}

fn require_unit(xi: &[f64], dim: usize) -> Result<()> {
    if xi.len() != dim {
        return domain(format!("direction has {} components, expected {dim}", xi.len()));
    }
    let n = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return domain(format!("direction must be a unit vector, |xi| = {n}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuDecayReport {
    pub kappa1: f64,
    pub kappa2: f64,
    /// `(∫ |h|² dμ^N)^{1/2}`.
    pub d_nh: f64,
    pub degrees: Vec<usize>,
    pub observed: Vec<f64>,
    pub bounds: Vec<f64>,
    /// Least-squares slope of `ln |μ(l)|` against `ln l` over the degrees
    /// where `μ` is not negligible; `None` with fewer than three such degrees.
    pub slope: Option<f64>,
    pub passed: bool,
}

/// Compares `|μ(l, N)|` with `κ₁ √κ₂ d_{N,h} l^{−(N−2)/2}` over `degrees`.
pub fn mu_decay_report<H: Fn(f64) -> f64>(h: H, dim: usize, degrees: &[usize]) -> Result<MuDecayReport> {
    if dim != 3 {
        return Err(Error::Unsupported(
            "the eigenvalue bound needs the Gegenbauer norm constant, available for N = 3".into(),
        ));
    }
    if degrees.iter().any(|&l| l == 0) {
        return domain("degrees must be at least 1");
    }
    let n = dim as f64;
    let half = (n - 2.0) / 2.0;
    let kappa1 = 2f64.powf(n - 2.0) * PI.powf(half) * gamma(half)?;
    let kappa2 = PI * 2f64.powf(3.0 - n) / gamma(half)?.powi(2);
    let weight = |t: f64| (1.0 - t * t).powf((n - 3.0) / 2.0);
    let d2 = tanh_sinh_tol(0.0, 1.0, TOL, |u| (h(u).powi(2) + h(-u).powi(2)) * weight(u));
    let d_nh = d2.sqrt();
    let mut observed = Vec::with_capacity(degrees.len());
    let mut bounds = Vec::with_capacity(degrees.len());
    for &l in degrees {
        observed.push(funk_hecke_mu(&h, l, dim)?.abs());
        bounds.push(kappa1 * kappa2.sqrt() * d_nh * (l as f64).powf(-half));
    }
    let passed = observed.iter().zip(&bounds).all(|(o, b)| *o <= *b * (1.0 + 1e-12));
    let peak = observed.iter().cloned().fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = degrees
        .iter()
        .zip(&observed)
        .filter(|(_, &o)| o > 1e-12 * peak && o > 0.0)
        .map(|(&l, &o)| ((l as f64).ln(), o.ln()))
        .collect();
    let slope = (pts.len() >= 3).then(|| {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(MuDecayReport {
        kappa1,
        kappa2,
        d_nh,
        degrees: degrees.to_vec(),
        observed,
        bounds,
        slope,
        passed,
    })
}

/// Eigenvalues of the `2s`-cosine transform for degrees `0..=l_max`
/// (odd degrees vanish).
pub fn cosine_eigenvalues(s: f64, dim: usize, l_max: usize) -> Result<Vec<f64>> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s must lie in (0, 1), got {s}"));
    }
    (0..=l_max)
        .map(|l| {
            if l % 2 == 1 {
                Ok(0.0)
            } else {
                funk_hecke_mu(|t| t.abs().powf(2.0 * s), l, dim)
            }
        })
        .collect()
}

fn diagonal_sum(a: &SphereFunction, mus: &[f64], xi: &[f64]) -> f64 {
    a.degree_values(xi).iter().zip(mus).map(|(v, m)| v * m).sum()
}

/// `∫_{S^{N−1}} |ξ·θ|^{2s} a(θ) dθ` for a unit vector `ξ`, summed degree by
/// degree.
pub fn cosine_transform(a: &SphereFunction, s: f64, xi: &[f64]) -> Result<f64> {
    require_unit(xi, a.dim())?;
    let mus = cosine_eigenvalues(s, a.dim(), a.l_max())?;
    Ok(diagonal_sum(a, &mus, xi))
}

/// `∫_{S^{N−1}} a(θ) h_s(ρ ζ·θ) dθ`; only the odd part of `a` contributes.
pub fn im_symbol_transform(a: &SphereFunction, s: f64, rho: f64, zeta: &[f64]) -> Result<f64> {
    require_unit(zeta, a.dim())?;
    if !(rho > 0.0) {
        return domain(format!("rho must be positive, got {rho}"));
    }
    h_s_analytic(1.0, s)?;
    let mut mus = vec![0.0; a.l_max() + 1];
    for l in (1..=a.l_max()).step_by(2) {
        if a.degree_energy(l) > 0.0 {
            mus[l] = funk_hecke_mu(|t| h_s_analytic(rho * t, s).unwrap_or(f64::NAN), l, a.dim())?;
        }
    }
    let v = diagonal_sum(a, &mus, zeta);
    if !v.is_finite() {
        return Err(Error::ToleranceNotMet {
            context: "h_s transform".into(),
            estimate: f64::INFINITY,
            requested: TOL.rel,
        });
    }
    Ok(v)
}

/// Directions used when no grid is given: 256 points on the circle, or the
/// thrice-refined icosahedron (642 points) on the 2-sphere.
pub fn default_direction_grid(dim: usize) -> Result<Vec<Vec<f64>>> {
    check_dim(dim)?;
    Ok(if dim == 2 { circle_grid(256) } else { icosahedral_grid(3) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub min_value: f64,
    pub max_value: f64,
    pub argmin: Vec<f64>,
    pub margin: f64,
    pub passed: bool,
}

/// Samples the cosine transform on `grid` and passes when
/// `min > 10⁻³ · max`.
pub fn positivity_check(a: &SphereFunction, s: f64, grid: &[Vec<f64>]) -> Result<PositivityReport> {
    positivity_check_with_margin(a, s, grid, 1e-3)
}

pub fn positivity_check_with_margin(
    a: &SphereFunction,
    s: f64,
    grid: &[Vec<f64>],
    margin: f64,
) -> Result<PositivityReport> {
    if grid.is_empty() {
        return domain("direction grid is empty");
    }
    let mus = cosine_eigenvalues(s, a.dim(), a.l_max())?;
    let mut min_value = f64::INFINITY;
    let mut max_value = f64::NEG_INFINITY;
    let mut argmin = grid[0].clone();
    for xi in grid {
        require_unit(xi, a.dim())?;
        let v = diagonal_sum(a, &mus, xi);
        if v < min_value {
            min_value = v;
            argmin = xi.clone();
        }
        max_value = max_value.max(v);
    }
    Ok(PositivityReport {
        min_value,
        max_value,
        argmin,
        margin,
        passed: min_value > margin * max_value && min_value > 0.0,
    })
}
