//! One-dimensional quadrature building blocks.
//!
//! Everything multi-dimensional in the crate (polar near fields, chord far
//! fields, sphere rules) is assembled from the rules here.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        assert!(n > 0);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached Gauss–Legendre rule with `n` points.
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static GaussLegendre>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(GaussLegendre::compute(n))))
}

/// Composite Gauss–Legendre with `panels` equal panels of `n` points.
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, n: usize, mut f: F) -> f64 {
    let rule = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}

/// Absolute/relative tolerance pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn accepts(&self, error: f64, value: f64) -> bool {
        error <= self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-13, 1e-11)
    }
}

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for j in 0..7 {
        let x = h * GK_XK[j];
        let s = f(c - x) + f(c + x);
        kronrod += GK_WK[j] * s;
        if j % 2 == 1 {
            gauss += GK_WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) with global bisection of the worst interval.
pub fn adaptive<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
    mut f: F,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut intervals = vec![{
        let (v, e) = gk15(a, b, &mut f);
        (a, b, v, e)
    }];
    loop {
        let value: f64 = intervals.iter().map(|i| i.2).sum();
        let error: f64 = intervals.iter().map(|i| i.3).sum();
        if tol.accepts(error, value) {
            return Ok(value);
        }
        if intervals.len() >= max_intervals {
            return Err(Error::ToleranceNotMet {
                context: "adaptive Gauss-Kronrod".into(),
                estimate: error,
                requested: tol.abs.max(tol.rel * value.abs()),
            });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(lo, mid, &mut f);
        let (v2, e2) = gk15(mid, hi, &mut f);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]`; tolerates
/// integrable algebraic singularities at both endpoints.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(a: f64, b: f64, rel_tol: f64, f: F) -> f64 {
    tanh_sinh_tol(a, b, Tolerance::new(1e-300, rel_tol), f)
}

/// [`tanh_sinh`] with an absolute floor, for integrals that may cancel to 0.
pub fn tanh_sinh_tol<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: Tolerance, mut f: F) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let len = b - a;
    if len == 0.0 {
        return 0.0;
    }
    let t_max = 4.0;
    let mut eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.abs().sinh();
        let dist = len / ((2.0 * u).exp() + 1.0);
        if dist <= 0.0 || !dist.is_finite() {
            return 0.0;
        }
        let x = if t >= 0.0 { b - dist } else { a + dist };
        if x <= a || x >= b {
            return 0.0;
        }
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        w * f(x)
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..8 {
        h *= 0.5;
        let mut k = 1;
        let mut added = 0.0;
        while (k as f64) * h <= t_max {
            added += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        sum += added;
        let next = sum * h;
        let done = tol.accepts((next - estimate).abs() * 0.5 * len.abs(), next * 0.5 * len);
        estimate = next;
        if done {
            break;
        }
    }
    estimate * 0.5 * len
}

/// Settings for the geometrically graded integrators below.
#[derive(Debug, Clone, Copy)]
pub struct Graded {
    pub tol: Tolerance,
    /// Gauss–Legendre points per panel.
    pub points: usize,
    /// Panels wider than this are split into equal sub-panels.
    pub max_width: f64,
    pub max_panels: usize,
}

impl Default for Graded {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            points: 12,
            max_width: f64::INFINITY,
            max_panels: 80,
        }
    }
}

fn panel<F: FnMut(f64) -> f64>(lo: f64, hi: f64, cfg: &Graded, f: &mut F) -> f64 {
    let rule = gauss_legendre(cfg.points);
    let pieces = if cfg.max_width.is_finite() {
        (((hi - lo) / cfg.max_width).ceil() as usize).max(1)
    } else {
        1
    };
    let w = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|p| rule.integrate(lo + p as f64 * w, lo + (p + 1) as f64 * w, &mut *f))
        .sum()
}

/// Tracks panel contributions of a geometric sequence and extrapolates the
/// remainder as a geometric series once the panel ratio settles.
struct GeometricTail {
    sum: f64,
    prev: Option<f64>,
    prev_ratio: Option<f64>,
    zero_run: usize,
}

enum TailState {
    Continue,
    Done(f64),
}

impl GeometricTail {
    fn new() -> Self {
        Self {
            sum: 0.0,
            prev: None,
            prev_ratio: None,
            zero_run: 0,
        }
    }

    fn push(&mut self, value: f64, tol: Tolerance, index: usize) -> Result<TailState> {
        self.sum += value;
        if value == 0.0 || value.abs() < 1e-300 {
            self.zero_run += 1;
            if self.zero_run >= 2 {
                return Ok(TailState::Done(self.sum));
            }
            self.prev = Some(value);
            self.prev_ratio = None;
            return Ok(TailState::Continue);
        }
        self.zero_run = 0;
        let negligible = 1e-4 * tol.abs;
        if index >= 3 && value.abs() < negligible && self.prev.is_some_and(|p| p.abs() < negligible) {
            return Ok(TailState::Done(self.sum));
        }
        let mut state = TailState::Continue;
        if let Some(prev) = self.prev {
            if prev != 0.0 {
                let r = value / prev;
                if let Some(pr) = self.prev_ratio {
                    if index >= 3 && r > 0.0 && r < 1.0 && (r - pr).abs() <= 1e-3 + 0.02 * r {
                        let tail = value * r / (1.0 - r);
                        let tail_err = (value * (r / (1.0 - r) - pr / (1.0 - pr))).abs();
                        if tol.accepts(tail_err.max(1e-3 * tail.abs()), self.sum)
                            || tol.accepts(tail.abs(), self.sum)
                        {
                            state = TailState::Done(self.sum + tail);
                        }
                    }
                    if index >= 12 && r >= 1.0 && pr >= 1.0 {
                        return Err(Error::Divergent(format!(
                            "panel contributions do not decay (ratio {r:.3})"
                        )));
                    }
                }
                if r.abs() < 1e-3 && tol.accepts(value.abs(), self.sum) && index >= 2 {
                    state = TailState::Done(self.sum);
                }
                self.prev_ratio = Some(r);
            }
        }
        self.prev = Some(value);
        Ok(state)
    }
}

/// Integrates `f` over `(0, b]` for integrands with an integrable algebraic
/// behaviour `~ r^p` at the origin. Panels `[b q^{k+1}, b q^k]` with `q = 1/4`;
/// the unresolved piece near 0 is summed as a geometric series in the
/// observed panel ratio.
pub fn graded_from_zero<F: FnMut(f64) -> f64>(b: f64, cfg: &Graded, mut f: F) -> Result<f64> {
    let q = 0.25;
    let mut tail = GeometricTail::new();
    let mut hi = b;
    for k in 0..cfg.max_panels {
        let lo = hi * q;
        let v = panel(lo, hi, cfg, &mut f);
        if let TailState::Done(total) = tail.push(v, cfg.tol, k)? {
            return Ok(total);
        }
        hi = lo;
    }
    let last = tail.prev.unwrap_or(0.0);
    if cfg.tol.accepts(last.abs(), tail.sum) {
        Ok(tail.sum)
    } else if tail.prev_ratio.is_some_and(|r| r >= 1.0) {
        Err(Error::Divergent("integrand not integrable at the origin".into()))
    } else {
        Err(Error::ToleranceNotMet {
            context: "graded near-origin quadrature".into(),
            estimate: last.abs(),
            requested: cfg.tol.abs.max(cfg.tol.rel * tail.sum.abs()),
        })
    }
}

/// Integrates `f` over `[a, ∞)` using doubling panels `[a 2^k, a 2^{k+1}]`
/// and geometric extrapolation of algebraically decaying tails.
pub fn geometric_to_infinity<F: FnMut(f64) -> f64>(a: f64, cfg: &Graded, mut f: F) -> Result<f64> {
    assert!(a > 0.0);
    let mut tail = GeometricTail::new();
    let mut lo = a;
    for k in 0..cfg.max_panels {
        let hi = lo * 2.0;
        let v = panel(lo, hi, cfg, &mut f);
        if let TailState::Done(total) = tail.push(v, cfg.tol, k)? {
            return Ok(total);
        }
        lo = hi;
    }
    let last = tail.prev.unwrap_or(0.0);
    if cfg.tol.accepts(last.abs(), tail.sum) {
        Ok(tail.sum)
    } else if tail.prev_ratio.is_some_and(|r| r >= 1.0) {
        Err(Error::Divergent("integrand does not decay at infinity".into()))
    } else {
        Err(Error::ToleranceNotMet {
            context: "geometric tail quadrature".into(),
            estimate: last.abs(),
            requested: cfg.tol.abs.max(cfg.tol.rel * tail.sum.abs()),
        })
    }
}

/// `∫_R^∞ r^{-q} e^{i r t} dr` for `q > 0`, `t ≠ 0`, by the asymptotic
/// integration-by-parts series. Accurate once `|t| R ≳ 30`.
pub fn power_fourier_tail(q: f64, t: f64, r: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, r * t);
    let x = Complex64::new(0.0, -1.0 / (t * r)); // 1 / (i t R)
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last_mag = 1.0;
    for k in 0..60 {
        term *= x * (q + k as f64);
        let mag = term.norm();
        if mag > last_mag {
            break;
        }
        sum += term;
        last_mag = mag;
        if mag < 1e-17 {
            break;
        }
    }
    Complex64::new(0.0, 1.0) * phase * r.powf(-q) / t * sum
}

/// Panel boundaries on `[a, b]` that grow geometrically (ratio ≤ 1.5) and
/// never exceed `max_width`.
pub fn graded_breaks(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    let mut out = vec![a];
    let mut x = a;
    while x < b {
        let w = (0.5 * x.abs().max(1e-3)).min(max_width);
        x = (x + w).min(b);
        out.push(x);
    }
    out
}

/// `∫_{a}^∞ w(r) e^{i r t} dr` where `w(r) = coef · r^{-q}` exactly for
/// `r ≥ a` (pass `power = Some((coef, q))`), or `w` is negligible beyond
/// `cutoff` (pass `power = None`).
///
/// With a power tail the numerical part runs until the phase `|t| r`
/// reaches `min_phase`; the rest is the asymptotic series.
pub fn fourier_half_line<F: FnMut(f64) -> f64>(
    a: f64,
    t: f64,
    power: Option<(f64, f64)>,
    cutoff: f64,
    min_phase: f64,
    mut w: F,
) -> Complex64 {
    let rule = gauss_legendre(12);
    let end = match power {
        Some(_) if t != 0.0 => a.max(min_phase / t.abs()),
        Some(_) => a,
        None => cutoff.max(a),
    };
    let osc_width = if t == 0.0 {
        f64::INFINITY
    } else {
        std::f64::consts::FRAC_PI_2 / t.abs()
    };
    // power weights tolerate geometric panels; cut-off ones may decay fast
    let cap = if power.is_some() { f64::INFINITY } else { 4.0 };
    let breaks = graded_breaks(a, end, osc_width.min(cap));
    let mut sum = Complex64::new(0.0, 0.0);
    for pair in breaks.windows(2) {
        for (r, wt) in rule.mapped(pair[0], pair[1]) {
            sum += Complex64::from_polar(wt * w(r), r * t);
        }
    }
    if let Some((coef, q)) = power {
        if t == 0.0 {
            sum += coef * end.powf(1.0 - q) / (q - 1.0);
        } else {
            sum += coef * power_fourier_tail(q, t, end);
        }
    }
    sum
}
