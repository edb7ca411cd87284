//! Scans `η(ξ) + P(−iξ)` for zeros on a box.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::polynomial::ComplexPolynomial;

use super::Symbol;

/// Neighbouring zero points, with their centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCluster {
    pub points: Vec<Vec<f64>>,
    pub centroid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSetReport {
    /// Grid points below tolerance, plus refined minima that reach it.
    pub zero_points: Vec<Vec<f64>>,
    pub clusters: Vec<ZeroCluster>,
    pub g_subset_origin: bool,
    pub spacing: f64,
    /// Smallest scaled modulus over grid points away from every cluster.
    pub min_modulus_elsewhere: f64,
    pub certificate: String,
}

const EVIDENCE_NOTE: &str = "sampling is evidence, not proof, of non-vanishing";

/// Scans `[−L, L]^N` with `resolution` points per axis (rounded up to an odd
/// count so the origin is a node) for points where
/// `|η(ξ) + P(−iξ)| < tol (1 + |ξ|^{2s})`. Grid local minima of the scaled
/// modulus are refined by Nelder–Mead, so isolated zeros between nodes are
/// found too. The origin is always reported, since symbols of order `2s`
/// are in general not smooth there.
pub fn zero_set_scan(
    eta: &Symbol,
    p: &ComplexPolynomial,
    half_width: f64,
    resolution: usize,
    tol: f64,
) -> Result<ZeroSetReport> {
    let n = eta.dim();
    if resolution < 64 {
        return domain(format!("the zero-set scan needs at least 64 points per axis, got {resolution}"));
    }
    if !(tol > 0.0) || !(half_width > 0.0) {
        return domain("tolerance and box half-width must be positive");
    }
    if !p.is_zero() && p.dim() != n {
        return domain("symbol and polynomial dimensions differ");
    }
    let per_axis = resolution | 1;
    let spacing = 2.0 * half_width / (per_axis - 1) as f64;
    let two_s = 2.0 * eta.order();
    let scaled = |xi: &[f64]| -> Result<f64> {
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let value = eta.eval(xi)? + if p.is_zero() { 0.0.into() } else { p.eval_symbol(xi) };
        Ok(value.norm() / (1.0 + r.powf(two_s)))
    };
    let point = |flat: usize| -> Vec<f64> {
        let mut rest = flat;
        (0..n)
            .map(|_| {
                let j = rest % per_axis;
                rest /= per_axis;
                -half_width + j as f64 * spacing
            })
            .collect()
    };
    let total = per_axis.pow(n as u32);
    let values: Vec<f64> = (0..total).into_par_iter().map(|f| scaled(&point(f))).collect::<Result<_>>()?;

    // the origin always belongs to the exceptional set: η is not smooth there
    let mut zero_points: Vec<Vec<f64>> = vec![vec![0.0; n]];
    let origin = total / 2;
    zero_points.extend((0..total).filter(|&f| f != origin && values[f] < tol).map(point));

    // refine grid-local minima
    let mut minima: Vec<usize> = (0..total).filter(|&f| is_local_min(&values, f, per_axis, n)).collect();
    minima.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    minima.truncate(64);
    for f in minima {
        let start = point(f);
        let (best, value) = nelder_mead(|x| scaled(x).unwrap_or(f64::INFINITY), &start, 0.5 * spacing, 400);
        let inside = best.iter().all(|v| v.abs() <= half_width);
        if value < tol && inside && !zero_points.iter().any(|z| distance(z, &best) < 0.25 * spacing) {
            zero_points.push(best);
        }
    }

    let clusters = cluster(&zero_points, 2.0 * spacing);
    let g_subset_origin = zero_points.iter().all(|z| norm(z) < 2.0 * spacing);
    let min_modulus_elsewhere = (0..total)
        .filter(|&f| {
            let x = point(f);
            !zero_points.iter().any(|z| distance(z, &x) < 2.0 * spacing)
        })
        .map(|f| values[f])
        .fold(f64::INFINITY, f64::min);
    let certificate = format!(
        "min |η+P|/(1+|ξ|^{two_s}) away from {} cluster(s) on [-{half_width}, {half_width}]^{n} (spacing {spacing:.3e}) = {min_modulus_elsewhere:.3e}; {EVIDENCE_NOTE}",
        clusters.len()
    );
    Ok(ZeroSetReport { zero_points, clusters, g_subset_origin, spacing, min_modulus_elsewhere, certificate })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn is_local_min(values: &[f64], flat: usize, per_axis: usize, n: usize) -> bool {
    let v = values[flat];
    let mut stride = 1;
    for _ in 0..n {
        let j = (flat / stride) % per_axis;
        if j > 0 && values[flat - stride] < v {
            return false;
        }
        if j + 1 < per_axis && values[flat + stride] < v {
            return false;
        }
        stride *= per_axis;
    }
    true
}

/// Single-linkage clusters at the given linking distance.
fn cluster(points: &[Vec<f64>], link: f64) -> Vec<ZeroCluster> {
    let mut label: Vec<Option<usize>> = vec![None; points.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..points.len() {
        if label[start].is_some() {
            continue;
        }
        let id = groups.len();
        let mut members = vec![start];
        label[start] = Some(id);
        let mut next = 0;
        while next < members.len() {
            let i = members[next];
            next += 1;
            for j in 0..points.len() {
                if label[j].is_none() && distance(&points[i], &points[j]) <= link {
                    label[j] = Some(id);
                    members.push(j);
                }
            }
        }
        groups.push(members);
    }
    groups
        .into_iter()
        .map(|members| {
            let pts: Vec<Vec<f64>> = members.iter().map(|&i| points[i].clone()).collect();
            let dim = pts[0].len();
            let centroid = (0..dim).map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / pts.len() as f64).collect();
            ZeroCluster { points: pts, centroid }
        })
        .collect()
}

/// Minimises `f` from `start` with an axis-aligned initial simplex of size
/// `step`.
fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], step: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = (0..=n)
        .map(|i| {
            let mut x = start.to_vec();
            if i > 0 {
                x[i - 1] += step;
            }
            let v = f(&x);
            (x, v)
        })
        .collect();
    let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if distance(&simplex[0].0, &simplex[n].0) < 1e-10 * step {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let reflected = blend(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = blend(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = blend(&centroid, &worst.0, 0.5);
            let fc = f(&contracted);
            if fc < worst.1 {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    entry.0 = blend(&best, &entry.0, 0.5);
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}
