//! Lévy measures `dν = κ(y) dy` with the named kernels and user profiles.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::quadrature::{gauss_legendre, graded_from_zero, Graded};
use crate::special_fn::{bessel_k, frac_laplacian_constant, gamma};
use crate::sphere::SphereFunction;

/// Radial profile `κ₀(r)` of a user-supplied isotropic kernel.
#[derive(Clone)]
pub enum RadialProfile {
    /// `scale · r^{−N−α} e^{−rate·r}` with `α ∈ (0, 2)`, `rate ≥ 0`.
    Tempered { scale: f64, alpha: f64, rate: f64 },
    /// An arbitrary profile, treated as zero beyond `cutoff`.
    Custom {
        label: String,
        profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        cutoff: f64,
    },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Tempered { scale, alpha, rate } => f
                .debug_struct("Tempered")
                .field("scale", scale)
                .field("alpha", alpha)
                .field("rate", rate)
                .finish(),
            Self::Custom { label, cutoff, .. } => f
                .debug_struct("Custom")
                .field("label", label)
                .field("cutoff", cutoff)
                .finish(),
        }
    }
}

impl PartialEq for RadialProfile {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                Self::Tempered { scale, alpha, rate },
                Self::Tempered { scale: s2, alpha: a2, rate: r2 },
            ) => scale == s2 && alpha == a2 && rate == r2,
            (Self::Custom { profile, cutoff, .. }, Self::Custom { profile: p2, cutoff: c2, .. }) => {
                Arc::ptr_eq(profile, p2) && cutoff == c2
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    /// `c_{N,s} |y|^{−N−2s}`.
    FractionalLaplacian,
    /// `c_{N,s} |y|^{−N−2s} a(y/|y|)`.
    Anisotropic(SphereFunction),
    /// `c_{N,s} 2^{1−ρ}/Γ(ρ) |y|^{−ρ} K_ρ(|y|)` with `ρ = (N+2s)/2`; symbol
    /// `(|ξ|² + 1)^s − 1`.
    Relativistic,
    /// `1/(π sinh² y)` on the line; symbol `ξ coth(πξ/2) − 2/π`.
    IntermediateLongWave,
    UserRadial(RadialProfile),
}

impl MeasureKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FractionalLaplacian => "fractional_laplacian",
            Self::Anisotropic(_) => "anisotropic",
            Self::Relativistic => "relativistic",
            Self::IntermediateLongWave => "ilw",
            Self::UserRadial(_) => "user_radial",
        }
    }
}

/// How the radial profile behaves for large `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum RadialTail {
    /// Exactly `coef · r^{−N−2s}` for all `r ≥ 1`.
    Power { coef: f64 },
    /// Negligible (below 1e-17 relative) beyond the given radius.
    Cutoff(f64),
}

/// A Lévy measure on `ℝ^N`.
///
/// `order` is the singularity order `s` (`κ ~ |y|^{−N−2s}` at 0). For kernels
/// with exponential tails the decay order `σ` used in `(D_σ)`, the weighted
/// norms and `L¹_σ` is declared separately; for the homogeneous kernels it
/// equals `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyMeasure {
    kind: MeasureKind,
    dim: usize,
    order: f64,
    decay_order: f64,
    reflected: bool,
    /// Constant prefactor of the radial profile, cached.
    coef: f64,
}

fn check_order(s: f64, what: &str) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("{what} must lie in (0, 1), got {s}"));
    }
    Ok(())
}

/// Exponentially decaying kernels satisfy `(D_σ)` for every `σ > 0`.
fn check_decay_order(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return domain(format!("decay order sigma must be positive, got {sigma}"));
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return domain(format!("dimension must be 1, 2 or 3, got {dim}"));
    }
    Ok(())
}

/// Surface area of `S^{N−1}`.
pub fn sphere_area(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * PI.powf(n / 2.0) / gamma(n / 2.0).unwrap_or(f64::NAN)
}

impl LevyMeasure {
    pub fn fractional_laplacian(dim: usize, s: f64) -> Result<Self> {
        check_dim(dim)?;
        check_order(s, "order s")?;
        Ok(Self::build(MeasureKind::FractionalLaplacian, dim, s, s))
    }

    pub fn anisotropic(s: f64, a: SphereFunction) -> Result<Self> {
        check_order(s, "order s")?;
        let dim = a.dim();
        Ok(Self::build(MeasureKind::Anisotropic(a), dim, s, s))
    }

    /// The relativistic kernel; any `σ > 0` satisfies `(D_σ)` because the
    /// kernel decays exponentially.
    pub fn relativistic(dim: usize, s: f64, sigma: f64) -> Result<Self> {
        check_dim(dim)?;
        check_order(s, "order s")?;
        check_decay_order(sigma)?;
        Ok(Self::build(MeasureKind::Relativistic, dim, s, sigma))
    }

    pub fn intermediate_long_wave(sigma: f64) -> Result<Self> {
        check_decay_order(sigma)?;
        Ok(Self::build(MeasureKind::IntermediateLongWave, 1, 0.5, sigma))
    }

    /// A radial kernel from `profile`. For [`RadialProfile::Tempered`] the
    /// order is `α/2`; `sigma` may exceed it only when `rate > 0`.
    pub fn user_radial(dim: usize, profile: RadialProfile, order: f64, sigma: f64) -> Result<Self> {
        check_dim(dim)?;
        check_decay_order(sigma)?;
        let order = match &profile {
            RadialProfile::Tempered { scale, alpha, rate } => {
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    return domain(format!("tempered profile needs alpha in (0, 2), got {alpha}"));
                }
                if !(scale.is_finite() && *scale != 0.0) || !(*rate >= 0.0) {
                    return domain("tempered profile needs a finite nonzero scale and rate >= 0");
                }
                if *rate == 0.0 && sigma > alpha / 2.0 + 1e-12 {
                    return domain(format!(
                        "an untempered power kernel decays with order {}, below the declared {sigma}",
                        alpha / 2.0
                    ));
                }
                alpha / 2.0
            }
            RadialProfile::Custom { cutoff, .. } => {
                if !(*cutoff >= 1.0) {
                    return domain("custom profile cutoff must be at least 1");
                }
                check_order(order, "order s")?;
                order
            }
        };
        Ok(Self::build(MeasureKind::UserRadial(profile), dim, order, sigma))
    }

    fn build(kind: MeasureKind, dim: usize, order: f64, decay_order: f64) -> Self {
        let c = || frac_laplacian_constant(dim, order).unwrap_or(f64::NAN);
        let coef = match &kind {
            MeasureKind::FractionalLaplacian | MeasureKind::Anisotropic(_) => c(),
            MeasureKind::Relativistic => {
                let rho = (dim as f64 + 2.0 * order) / 2.0;
                c() * 2f64.powf(1.0 - rho) / gamma(rho).unwrap_or(f64::NAN)
            }
            _ => 1.0,
        };
        Self { kind, dim, order, decay_order, reflected: false, coef }
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The singularity order `s`.
    pub fn order(&self) -> f64 {
        self.order
    }

    /// The decay order `σ` of `(D_σ)`.
    pub fn decay_order(&self) -> f64 {
        self.decay_order
    }

    pub fn is_reflected(&self) -> bool {
        self.reflected
    }

    /// `ν̃(E) = ν(−E)`.
    pub fn reflect(&self) -> Self {
        let mut m = self.clone();
        m.reflected = !m.reflected;
        m
    }

    /// True when `κ(−y) = κ(y)`.
    pub fn is_even(&self) -> bool {
        match &self.kind {
            MeasureKind::Anisotropic(a) => a.is_even(),
            _ => true,
        }
    }

    pub fn anisotropy(&self) -> Option<&SphereFunction> {
        match &self.kind {
            MeasureKind::Anisotropic(a) => Some(a),
            _ => None,
        }
    }

    /// The radial factor `κ₀(r)` (the density along a direction where the
    /// angular factor is 1).
    pub fn radial(&self, r: f64) -> f64 {
        let n = self.dim as f64;
        let s = self.order;
        match &self.kind {
            MeasureKind::FractionalLaplacian | MeasureKind::Anisotropic(_) => self.coef * r.powf(-n - 2.0 * s),
            MeasureKind::Relativistic => {
                let rho = (n + 2.0 * s) / 2.0;
                self.coef * r.powf(-rho) * bessel_k(rho, r).unwrap_or(f64::NAN)
            }
            MeasureKind::IntermediateLongWave => {
                if r < 1.0 {
                    let sh = r.sinh();
                    1.0 / (PI * sh * sh)
                } else {
                    let e = (-2.0 * r).exp();
                    4.0 * e / (PI * (1.0 - e) * (1.0 - e))
                }
            }
            MeasureKind::UserRadial(RadialProfile::Tempered { scale, alpha, rate }) => {
                scale * r.powf(-n - alpha) * (-rate * r).exp()
            }
            MeasureKind::UserRadial(RadialProfile::Custom { profile, cutoff, .. }) => {
                if r > *cutoff {
                    0.0
                } else {
                    profile(r)
                }
            }
        }
    }

    /// The angular factor at the unit vector `theta` (1 for radial kernels).
    pub fn angular(&self, theta: &[f64]) -> f64 {
        match &self.kind {
            MeasureKind::Anisotropic(a) => {
                if self.reflected {
                    let minus: Vec<f64> = theta.iter().map(|t| -t).collect();
                    a.eval(&minus)
                } else {
                    a.eval(theta)
                }
            }
            _ => 1.0,
        }
    }

    pub(crate) fn radial_tail(&self) -> RadialTail {
        match &self.kind {
            MeasureKind::FractionalLaplacian | MeasureKind::Anisotropic(_) => RadialTail::Power { coef: self.coef },
            MeasureKind::Relativistic => RadialTail::Cutoff(45.0),
            MeasureKind::IntermediateLongWave => RadialTail::Cutoff(22.0),
            MeasureKind::UserRadial(RadialProfile::Tempered { scale, rate, .. }) => {
                if *rate == 0.0 {
                    RadialTail::Power { coef: *scale }
                } else {
                    // e^{−rate r} below 1e-17 of its value at r = 1
                    RadialTail::Cutoff(1.0 + 40.0 / rate)
                }
            }
            MeasureKind::UserRadial(RadialProfile::Custom { cutoff, .. }) => RadialTail::Cutoff(*cutoff),
        }
    }

    /// The signed density `κ(y)`; reflected measures evaluate at `−y`.
    pub fn density(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim {
            return domain(format!("point has {} coordinates, expected {}", y.len(), self.dim));
        }
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return domain("the density is singular at y = 0");
        }
        let theta: Vec<f64> = y.iter().map(|v| v / r).collect();
        Ok(self.radial(r) * self.angular(&theta))
    }

    /// `∫_{S^{N−1}} |a(θ)| dθ`, or the sphere area for radial kernels.
    fn angular_abs_mass(&self) -> f64 {
        match &self.kind {
            MeasureKind::Anisotropic(a) => match a.dim() {
                2 => {
                    let m = 8192;
                    (0..m)
                        .map(|k| {
                            let t = 2.0 * PI * k as f64 / m as f64;
                            a.eval(&[t.cos(), t.sin()]).abs()
                        })
                        .sum::<f64>()
                        * 2.0
                        * PI
                        / m as f64
                }
                _ => {
                    let rule = gauss_legendre(96);
                    let m = 192;
                    let mut sum = 0.0;
                    for (z, w) in rule.mapped(-1.0, 1.0) {
                        let rho = (1.0 - z * z).sqrt();
                        for k in 0..m {
                            let p = 2.0 * PI * k as f64 / m as f64;
                            sum += w * a.eval(&[rho * p.cos(), rho * p.sin(), z]).abs();
                        }
                    }
                    sum * 2.0 * PI / m as f64
                }
            },
            _ => sphere_area(self.dim),
        }
    }

    /// `M(ν) = ∫ min{1, |y|²} d|ν|(y)`.
    pub fn total_mass(&self) -> Result<f64> {
        let n = self.dim as i32;
        let cfg = Graded { max_width: 1.0, ..Graded::default() };
        // split off the leading singularity c₀ r^{−N−2s} and integrate it exactly
        let two_s = 2.0 * self.order;
        let r0: f64 = 1e-6;
        let c0 = r0.powf(n as f64 + two_s) * self.radial(r0).abs();
        let remainder = graded_from_zero(1.0, &cfg, |r| {
            if r < 1e-12 {
                return 0.0;
            }
            let full = r.powi(n + 1) * self.radial(r).abs();
            let diff = full - c0 * r.powf(1.0 - two_s);
            // pure power kernels leave only rounding noise
            if diff.abs() <= 1e-12 * full {
                0.0
            } else {
                diff
            }
        })?;
        let near = c0 / (2.0 - two_s) + remainder;
        let far = match self.radial_tail() {
            // ∫_1^∞ r^{N−1} c r^{−N−2s} dr
            RadialTail::Power { coef } => coef.abs() / (2.0 * self.order),
            RadialTail::Cutoff(c) => {
                let rule = gauss_legendre(16);
                let panels = (c - 1.0).ceil().max(1.0) as usize;
                let w = (c - 1.0) / panels as f64;
                (0..panels)
                    .map(|p| {
                        let lo = 1.0 + p as f64 * w;
                        rule.integrate(lo, lo + w, |r| r.powi(n - 1) * self.radial(r).abs())
                    })
                    .sum()
            }
        };
        let m = self.angular_abs_mass() * (near + far);
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Divergent(format!("M(nu) evaluated to {m}")));
        }
        Ok(m)
    }

    /// `|ν|(B₁(x))` by product quadrature in polar coordinates about `x`;
    /// needs `|x| ≥ 2` so that the singularity stays outside the ball.
    pub fn ball_mass(&self, x: &[f64]) -> Result<f64> {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if x.len() != self.dim || r < 2.0 {
            return domain("ball_mass needs a point of the right dimension with |x| >= 2");
        }
        let rule = gauss_legendre(24);
        let k = |y: &[f64]| self.density(y).map(f64::abs);
        match self.dim {
            1 => {
                let mut sum = 0.0;
                for (y, w) in rule.mapped(x[0] - 1.0, x[0] + 1.0) {
                    sum += w * k(&[y])?;
                }
                Ok(sum)
            }
            2 => {
                let m = 64;
                let mut sum = 0.0;
                for (rho, w) in rule.mapped(0.0, 1.0) {
                    for j in 0..m {
                        let t = 2.0 * PI * j as f64 / m as f64;
                        sum += w * rho * k(&[x[0] + rho * t.cos(), x[1] + rho * t.sin()])?;
                    }
                }
                Ok(sum * 2.0 * PI / m as f64)
            }
            _ => {
                let zrule = gauss_legendre(16);
                let m = 32;
                let mut sum = 0.0;
                for (rho, w) in rule.mapped(0.0, 1.0) {
                    for (z, wz) in zrule.mapped(-1.0, 1.0) {
                        let q = (1.0 - z * z).sqrt();
                        for j in 0..m {
                            let t = 2.0 * PI * j as f64 / m as f64;
                            let y = [x[0] + rho * q * t.cos(), x[1] + rho * q * t.sin(), x[2] + rho * z];
                            sum += w * wz * rho * rho * k(&y)?;
                        }
                    }
                }
                Ok(sum * 2.0 * PI / m as f64)
            }
        }
    }

    /// Empirical check of `(D_σ)`: `|ν|(B₁(x)) |x|^{N+2σ}` for `|x|` in
    /// `radii` must not grow by more than 20% from one radius to the next.
    /// Each ratio is the maximum over the directions `±e₁` (and `e₂`).
    pub fn decay_check(&self, radii: &[f64]) -> Result<DecayReport> {
        if radii.is_empty() || radii.iter().any(|&r| !(r >= 2.0)) {
            return domain("decay_check needs radii >= 2");
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return domain("decay_check needs increasing radii");
        }
        let mut dirs: Vec<Vec<f64>> = vec![unit_axis(self.dim, 0, 1.0), unit_axis(self.dim, 0, -1.0)];
        if self.dim >= 2 {
            dirs.push(unit_axis(self.dim, 1, 1.0));
        }
        let power = self.dim as f64 + 2.0 * self.decay_order;
        let mut ratios = Vec::with_capacity(radii.len());
        for &r in radii {
            let mut best: f64 = 0.0;
            for d in &dirs {
                let x: Vec<f64> = d.iter().map(|v| v * r).collect();
                best = best.max(self.ball_mass(&x)?);
            }
            ratios.push(best * r.powf(power));
        }
        let passed = ratios.iter().all(|r| r.is_finite())
            && ratios.windows(2).all(|w| w[1] <= 1.2 * w[0] || w[1] < 1e-300);
        Ok(DecayReport { radii: radii.to_vec(), ratios, passed })
    }
}

fn unit_axis(dim: usize, axis: usize, sign: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[axis] = sign;
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_laplacian_density_and_mass() {
        let m = LevyMeasure::fractional_laplacian(1, 0.5).unwrap();
        assert!((m.density(&[1.0]).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((m.total_mass().unwrap() - 4.0 / PI).abs() < 1e-10);
        assert!(m.density(&[0.0]).is_err());
    }

    #[test]
    fn closed_form_mass_all_dims() {
        for dim in 1..=3 {
            for &s in &[0.2, 0.5, 0.85] {
                let m = LevyMeasure::fractional_laplacian(dim, s).unwrap();
                let c = frac_laplacian_constant(dim, s).unwrap();
                let want = c * sphere_area(dim) * (1.0 / (2.0 - 2.0 * s) + 1.0 / (2.0 * s));
                let got = m.total_mass().unwrap();
                assert!(((got - want) / want).abs() < 1e-9, "N = {dim}, s = {s}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn ilw_density_value() {
        let m = LevyMeasure::intermediate_long_wave(0.5).unwrap();
        let want = 1.0 / (PI * 1f64.sinh().powi(2));
        assert!((m.density(&[1.0]).unwrap() - want).abs() < 1e-15);
        assert!((m.density(&[-1.0]).unwrap() - want).abs() < 1e-15);
        let far = 30.0f64;
        assert!((m.density(&[far]).unwrap() / (1.0 / (PI * far.sinh().powi(2))) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relativistic_matches_laplacian_near_zero() {
        let m = LevyMeasure::relativistic(2, 0.5, 0.5).unwrap();
        let f = LevyMeasure::fractional_laplacian(2, 0.5).unwrap();
        let r = 1e-4;
        let ratio = m.density(&[r, 0.0]).unwrap() / f.density(&[r, 0.0]).unwrap();
        assert!((ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reflection_of_odd_anisotropy() {
        let a = SphereFunction::from_coefficients(2, vec![1.0, 0.4, 0.0]).unwrap();
        let m = LevyMeasure::anisotropic(0.5, a).unwrap();
        let r = m.reflect();
        assert!((r.density(&[1.0, 0.0]).unwrap() - m.density(&[-1.0, 0.0]).unwrap()).abs() < 1e-15);
        assert_eq!(r.reflect(), m);
        assert!((m.total_mass().unwrap() - r.total_mass().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn decay_ratios_for_named_kernels() {
        let f = LevyMeasure::fractional_laplacian(2, 0.5).unwrap();
        let rep = f.decay_check(&[4.0, 8.0, 16.0]).unwrap();
        assert!(rep.passed);
        let limit = frac_laplacian_constant(2, 0.5).unwrap() * PI;
        assert!((rep.ratios[2] / limit - 1.0).abs() < 0.15);
        for m in [
            LevyMeasure::intermediate_long_wave(0.9).unwrap(),
            LevyMeasure::relativistic(1, 0.5, 0.9).unwrap(),
        ] {
            let rep = m.decay_check(&[4.0, 8.0, 16.0]).unwrap();
            assert!(rep.passed);
            assert!(rep.ratios[2] < rep.ratios[0] * 1e-3);
        }
    }

    #[test]
    fn power_profile_cannot_claim_faster_decay() {
        let p = RadialProfile::Tempered { scale: 1.0, alpha: 0.8, rate: 0.0 };
        assert!(LevyMeasure::user_radial(1, p.clone(), 0.0, 0.6).is_err());
        assert!(LevyMeasure::user_radial(1, p, 0.0, 0.4).is_ok());
    }
}
