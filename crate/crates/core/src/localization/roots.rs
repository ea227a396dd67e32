//! Univariate root finding for polynomials whose coefficients span many
//! orders of magnitude: Newton-polygon splitting into clusters of roots of
//! similar modulus, Aberth iteration per cluster, Newton polishing.

use num_complex::Complex64;
use rand::Rng;

pub const MAX_ITER: usize = 200;
pub const TOLERANCE: f64 = 1e-12;
/// Adjacent Newton-polygon slopes closer than this (natural-log units) are
/// solved together.
pub const MERGE_GAP: f64 = 7.0;

/// Coefficient `exp(log)`; `None` marks an exact zero.
pub type LogCoeff = Option<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    /// Complex logarithm of the root.
    pub log: Complex64,
    /// `|p(z)| / Σ |a_j z^j|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub failed: usize,
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Aberth iteration on `Σ c_j z^j` (`c` has nonzero ends). Returns the
/// roots and whether every one converged.
pub fn aberth<R: Rng>(c: &[Complex64], rng: &mut R) -> (Vec<Complex64>, Vec<bool>) {
    let d = c.len() - 1;
    if d == 0 {
        return (Vec::new(), Vec::new());
    }
    if d == 1 {
        return (vec![-c[0] / c[1]], vec![true]);
    }
    let radius = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64);
    let offset: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, offset + std::f64::consts::TAU * (k as f64 + 0.25) / d as f64))
        .collect();
    let mut done = vec![false; d];
    for _ in 0..MAX_ITER {
        for k in 0..d {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(c, z[k]);
            if p.norm() == 0.0 {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !w.is_finite() {
                // restart this root from a random perturbation
                z[k] += Complex64::from_polar(radius * 1e-3, rng.random_range(0.0..std::f64::consts::TAU));
                continue;
            }
            z[k] -= w;
            if w.norm() <= TOLERANCE * z[k].norm() {
                done[k] = true;
            }
        }
        if done.iter().all(|&x| x) {
            break;
        }
    }
    (z, done)
}

/// Upper convex hull of `(j, h_j)` as a list of vertex indices into `pts`.
fn upper_hull(pts: &[(usize, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while hull.len() >= 2 {
            let (a, b) = (pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]]);
            let p = pts[i];
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// All nonzero roots of `Σ_j exp(coeffs[j]) z^j`.
pub fn solve_log_poly<R: Rng>(coeffs: &[LogCoeff], rng: &mut R) -> RootSet {
    let pts: Vec<(usize, f64)> = coeffs.iter().enumerate().filter_map(|(j, c)| c.map(|c| (j, c.re))).collect();
    let mut out = RootSet::default();
    if pts.len() < 2 {
        return out;
    }
    let hull = upper_hull(&pts);
    // edges as (j0, j1, slope)
    let edges: Vec<(usize, usize, f64)> = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (pts[w[0]], pts[w[1]]);
            (a.0, b.0, (b.1 - a.1) / (b.0 - a.0) as f64)
        })
        .collect();
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut last_slope = f64::NAN;
    for &(j0, j1, s) in &edges {
        match clusters.last_mut() {
            Some(c) if (last_slope - s).abs() < MERGE_GAP => c.1 = j1,
            _ => clusters.push((j0, j1)),
        }
        last_slope = s;
    }
    let height = |j: usize| coeffs[j].unwrap().re;
    for (j0, j1) in clusters {
        let slope = (height(j1) - height(j0)) / (j1 - j0) as f64;
        let rho = -slope;
        // scale z = e^rho y and normalize so the cluster ends have modulus ~1
        let norm = height(j0) + rho * j0 as f64;
        let scaled = |j: usize| coeffs[j].map(|c| (c + rho * j as f64 - norm).exp());
        let trunc: Vec<Complex64> =
            (j0..=j1).map(|j| scaled(j).unwrap_or(Complex64::new(0.0, 0.0))).collect();
        let full: Vec<(usize, Complex64)> = (0..coeffs.len()).filter_map(|j| scaled(j).map(|c| (j, c))).collect();
        let (ys, ok) = aberth(&trunc, rng);
        for (y, converged) in ys.into_iter().zip(ok) {
            match polish(&full, y) {
                Some(root) if converged || root.residual < TOLERANCE * 1e3 => out.roots.push(Root {
                    log: root.log + Complex64::new(rho, 0.0),
                    residual: root.residual,
                }),
                _ => out.failed += 1,
            }
        }
    }
    out
}

fn eval_sparse(c: &[(usize, Complex64)], y: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for &(j, a) in c {
        let yj = y.powu(j as u32);
        p += a * yj;
        mass += (a * yj).norm();
        if j > 0 {
            dp += a * y.powu(j as u32 - 1) * j as f64;
        }
    }
    (p, dp, mass)
}

/// A few Newton steps on the full scaled polynomial.
fn polish(c: &[(usize, Complex64)], mut y: Complex64) -> Option<Root> {
    if !y.is_finite() || y.norm() == 0.0 {
        return None;
    }
    let mut best = f64::INFINITY;
    for _ in 0..8 {
        let (p, dp, mass) = eval_sparse(c, y);
        let res = p.norm() / mass;
        best = best.min(res);
        if res < TOLERANCE * 1e-2 || dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        y -= step;
    }
    let (p, _, mass) = eval_sparse(c, y);
    let residual = p.norm() / mass;
    if !residual.is_finite() {
        return None;
    }
    Some(Root { log: y.ln(), residual: residual.min(best) })
}

/// Complex log of `Σ_k exp(terms[k])`; `None` when the sum cancels to
/// below `1e-13` of the largest term.
pub fn log_sum_exp(terms: &[Complex64]) -> LogCoeff {
    let top = terms.iter().map(|t| t.re).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return None;
    }
    let mut s = Complex64::new(0.0, 0.0);
    for t in terms {
        s += (t - top).exp();
    }
    if s.norm() < 1e-13 {
        return None;
    }
    Some(s.ln() + top)
}
