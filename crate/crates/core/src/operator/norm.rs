//! The weighted norms `‖φ‖_{k,s}` and the pointwise decay bound for `L_ν φ`.

use crate::error::{domain, Error, Result};
use crate::measures::LevyMeasure;
use crate::polynomial::multi_indices;

use super::apply::apply;
use super::test_function::{TestFunction, MAX_DERIVATIVE};

/// A uniform tensor grid on `[−half_width, half_width]^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl Grid {
    /// A grid covering the effective support of `phi`.
    pub fn covering(phi: &TestFunction) -> Result<Self> {
        let (c, r) = phi
            .effective_support()
            .ok_or_else(|| Error::Domain("the weighted norm needs a decaying function".into()))?;
        let reach = c.iter().map(|v| v.abs()).fold(0.0, f64::max) + 1.2 * r;
        let points_per_axis = match c.len() {
            1 => 4001,
            2 => 241,
            _ => 61,
        };
        Ok(Self { half_width: reach, points_per_axis })
    }

    fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + 2.0 * self.half_width * j as f64 / (self.points_per_axis - 1) as f64
    }
}

/// `sup_x (1 + |x|^{N+2s}) Σ_{|α|≤k} |∂^α φ(x)|` over the grid. Fails with
/// `InsufficientGrid` when the weighted summand on the grid boundary is not
/// below 1e-3 of the maximum.
pub fn sks_norm(phi: &TestFunction, k: u32, s: f64, grid: &Grid) -> Result<f64> {
    if k > MAX_DERIVATIVE {
        return domain(format!("derivatives above order {MAX_DERIVATIVE} are not available"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return domain(format!("s must be positive, got {s}"));
    }
    if grid.points_per_axis < 3 || !(grid.half_width > 0.0) {
        return domain("grid needs at least 3 points per axis and a positive width");
    }
    let n = phi.dim();
    let alphas = multi_indices(n, k);
    let power = n as f64 + 2.0 * s;
    let m = grid.points_per_axis;
    let total = m.pow(n as u32);
    let mut sup: f64 = 0.0;
    let mut boundary: f64 = 0.0;
    let mut x = vec![0.0; n];
    for flat in 0..total {
        let mut rest = flat;
        let mut on_edge = false;
        for xi in x.iter_mut() {
            let j = rest % m;
            rest /= m;
            on_edge |= j == 0 || j == m - 1;
            *xi = grid.coordinate(j);
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let sum: f64 = alphas.iter().map(|a| phi.derivative(a, &x).abs()).sum();
        let v = (1.0 + r.powf(power)) * sum;
        sup = sup.max(v);
        if on_edge {
            boundary = boundary.max(v);
        }
    }
    if !(sup.is_finite()) || boundary > 1e-3 * sup {
        return Err(Error::InsufficientGrid(format!(
            "weighted summand on the boundary is {boundary:.3e} against a maximum of {sup:.3e}"
        )));
    }
    Ok(sup)
}

/// Result of [`decay_bound_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecayBoundReport {
    /// `|L_ν φ(x)| (1 + |x|)^{N+2σ}` at each point.
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    /// `‖φ‖_{2,σ}`.
    pub norm: f64,
    /// `4 · 3^{N+2σ+1} · M(ν)`.
    pub constant: f64,
    /// The outer quarter of the radii shows a larger maximum than the quarter
    /// before it (by more than 5%).
    pub outer_growth: bool,
    pub passed: bool,
}

/// Checks `|L_ν φ(x)| ≤ C ‖φ‖_{2,σ} (1 + |x|)^{−N−2σ}` at the given points.
pub fn decay_bound_check(m: &LevyMeasure, phi: &TestFunction, points: &[Vec<f64>]) -> Result<DecayBoundReport> {
    if points.is_empty() {
        return domain("decay_bound_check needs at least one point");
    }
    let n = m.dim() as f64;
    let sigma = m.decay_order();
    let power = n + 2.0 * sigma;
    let norm = sks_norm(phi, 2, sigma, &Grid::covering(phi)?)?;
    let constant = 4.0 * 3f64.powf(power + 1.0) * m.total_mass()?;
    let mut ratios = Vec::with_capacity(points.len());
    let mut radii = Vec::with_capacity(points.len());
    for x in points {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        ratios.push(apply(m, phi, x)?.abs() * (1.0 + r).powf(power));
        radii.push(r);
    }
    let sup_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let shell_max = |lo: f64, hi: f64| {
        radii
            .iter()
            .zip(&ratios)
            .filter(|(r, _)| **r > lo * r_max && **r <= hi * r_max)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    };
    let outer = shell_max(0.75, 1.0);
    let inner = shell_max(0.5, 0.75);
    let outer_growth = inner > 0.0 && outer > 1.05 * inner;
    let passed = sup_ratio.is_finite() && sup_ratio <= constant * norm && !outer_growth;
    Ok(DecayBoundReport { ratios, sup_ratio, norm, constant, outer_growth, passed })
}

/// Points `t θ` with `t` uniform in `[0, r_max]` along `e₁`, `−e₁` and the
/// main diagonal.
pub fn ray_points(dim: usize, r_max: f64, count: usize) -> Vec<Vec<f64>> {
    let diag = 1.0 / (dim as f64).sqrt();
    let rays: Vec<Vec<f64>> = if dim == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        let mut e1 = vec![0.0; dim];
        e1[0] = 1.0;
        let minus: Vec<f64> = e1.iter().map(|v| -v).collect();
        vec![e1, minus, vec![diag; dim]]
    };
    let mut out = vec![vec![0.0; dim]];
    for j in 1..count {
        let t = r_max * j as f64 / (count - 1) as f64;
        for ray in &rays {
            out.push(ray.iter().map(|v| v * t).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_norm_of_order_zero() {
        // sup (1 + x²) e^{−x²/2} = 2e^{−1/2}, attained at |x| = 1
        let phi = TestFunction::gaussian(1, 1.0).unwrap();
        let grid = Grid::covering(&phi).unwrap();
        let v = sks_norm(&phi, 0, 0.5, &grid).unwrap();
        let f = |x: f64| (1.0 + x * x) * (-x * x / 2.0).exp();
        let want = (0..100_000).map(|j| f(j as f64 * 1e-4)).fold(0.0, f64::max);
        assert!((v - want).abs() < 1e-4, "{v} vs {want}");
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let phi = TestFunction::gaussian(1, 1.0).unwrap();
        let grid = Grid { half_width: 2.0, points_per_axis: 101 };
        assert!(matches!(sks_norm(&phi, 2, 0.5, &grid), Err(Error::InsufficientGrid(_))));
        let trig = TestFunction::cos(1.0);
        assert!(sks_norm(&trig, 0, 0.5, &grid).is_err());
    }

    #[test]
    fn decay_bound_for_fractional_laplacian() {
        let m = LevyMeasure::fractional_laplacian(1, 0.5).unwrap();
        let phi = TestFunction::gaussian(1, 1.0).unwrap();
        let report = decay_bound_check(&m, &phi, &ray_points(1, 20.0, 41)).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.sup_ratio > 0.5);
    }
}
