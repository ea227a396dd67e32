//! Sampling of `V_q` and of its localization `W_q` along fibers of the
//! projection to `x1`, and the distance of a cloud to the tropical curve.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::roots::{log_sum_exp, solve_log_poly, LogCoeff};
use super::{cutoff_b, log_terms, CutoffParams, LocalizationError};
use crate::poly::ValuatedPolynomial;
use crate::tropical::TropicalComplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudSource {
    Vq,
    Wq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSpec {
    pub log_radii: usize,
    pub phases: usize,
    /// Range of `Log_R |x1|`.
    pub range: (f64, f64),
    /// Points with some `|Log_R x_i|` above this are discarded.
    pub clip: f64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec { log_radii: 200, phases: 16, range: (-20.0, 20.0), clip: 40.0 }
    }
}

impl SamplingSpec {
    /// `(fiber index, log x1)` for every fiber of the grid.
    pub fn fibers(&self, ln_r: f64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.log_radii * self.phases);
        for i in 0..self.log_radii {
            let t = if self.log_radii == 1 { 0.5 } else { i as f64 / (self.log_radii - 1) as f64 };
            let l = self.range.0 + t * (self.range.1 - self.range.0);
            for k in 0..self.phases {
                let phase = std::f64::consts::TAU * (k as f64 + 0.5) / self.phases as f64 - std::f64::consts::PI;
                out.push(Complex64::new(l * ln_r, phase));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudPoint {
    /// Complex logarithms of the coordinates.
    pub log_x: Vec<Complex64>,
    pub log_r: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub source: CloudSource,
    pub ln_r: f64,
    pub points: Vec<CloudPoint>,
    /// Roots lost to non-convergence.
    pub dropped: usize,
    /// Roots outside the clip box.
    pub clipped: usize,
}

impl PointCloud {
    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// Columns `re_i, im_i` per coordinate, then `log_i`, then the residual.
    pub fn to_csv(&self) -> String {
        let n = self.points.first().map_or(0, |p| p.log_x.len());
        let mut s = String::new();
        let mut head: Vec<String> = (1..=n).flat_map(|i| [format!("re{i}"), format!("im{i}")]).collect();
        head.extend((1..=n).map(|i| format!("log{i}")));
        head.push("residual".into());
        s.push_str(&head.join(","));
        s.push('\n');
        for p in &self.points {
            let mut row: Vec<String> = Vec::new();
            for z in &p.log_x {
                let x = z.exp();
                row.push(format!("{:e}", x.re));
                row.push(format!("{:e}", x.im));
            }
            row.extend(p.log_r.iter().map(|l| format!("{l}")));
            row.push(format!("{:e}", p.residual));
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }
}

/// Complex log of each monomial's coefficient at `q`. For `W_q` only the
/// pure power `q^{v_m}` is kept.
pub(crate) fn log_coefficients(poly: &ValuatedPolynomial, ln_q: Complex64, source: CloudSource) -> Vec<Complex64> {
    poly.monomials
        .iter()
        .map(|m| match source {
            CloudSource::Wq => ln_q * m.valuation as f64,
            CloudSource::Vq => {
                let mut terms = vec![m.leading_coeff.ln() + ln_q * m.valuation as f64];
                for t in poly.tail_terms.iter().filter(|t| t.exponent == m.exponent) {
                    terms.push(t.coeff.ln() - ln_q * t.t_power as f64);
                }
                log_sum_exp(&terms).unwrap_or(terms[0])
            }
        })
        .collect()
}

fn fiber_seed(seed: u64, fiber: usize) -> u64 {
    seed ^ (fiber as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn check_curve(poly: &ValuatedPolynomial) -> Result<(i64, i64), LocalizationError> {
    if poly.ambient_dim != 2 {
        return Err(LocalizationError::NotCurve(poly.ambient_dim));
    }
    let lo = poly.monomials.iter().map(|m| m.exponent[1]).min().unwrap_or(0);
    let hi = poly.monomials.iter().map(|m| m.exponent[1]).max().unwrap_or(0);
    if lo == hi {
        return Err(LocalizationError::InvalidParams("fiber polynomial has degree 0 in x2".into()));
    }
    Ok((lo, hi))
}

/// Roots `log x2` of `f_q(x1, ·)` over one fiber.
pub(crate) fn fiber_roots(
    poly: &ValuatedPolynomial,
    coeffs: &[Complex64],
    lo: i64,
    hi: i64,
    zeta1: Complex64,
    rng: &mut ChaCha8Rng,
) -> (Vec<(Complex64, f64)>, usize) {
    let mut by_power: Vec<Vec<Complex64>> = vec![Vec::new(); (hi - lo + 1) as usize];
    for (m, c) in poly.monomials.iter().zip(coeffs) {
        by_power[(m.exponent[1] - lo) as usize].push(c + zeta1 * m.exponent[0] as f64);
    }
    let fiber: Vec<LogCoeff> = by_power.iter().map(|t| if t.is_empty() { None } else { log_sum_exp(t) }).collect();
    let found = solve_log_poly(&fiber, rng);
    (found.roots.iter().map(|r| (r.log, r.residual)).collect(), found.failed)
}

fn make_point(log_x: Vec<Complex64>, ln_r: f64, residual: f64) -> CloudPoint {
    let log_r = log_x.iter().map(|z| z.re / ln_r).collect();
    CloudPoint { log_x, log_r, residual }
}

fn assemble(source: CloudSource, ln_r: f64, clip: f64, per_fiber: Vec<(Vec<CloudPoint>, usize)>) -> PointCloud {
    let mut cloud = PointCloud { source, ln_r, points: Vec::new(), dropped: 0, clipped: 0 };
    for (pts, dropped) in per_fiber {
        cloud.dropped += dropped;
        for p in pts {
            if p.log_r.iter().all(|l| l.abs() <= clip) {
                cloud.points.push(p);
            } else {
                cloud.clipped += 1;
            }
        }
    }
    cloud
}

/// Points of `V_q = {f_q = 0}` on the fibers of `spec`, with residuals
/// `|f_q| / Σ|terms|`. Fibers are solved in parallel; each fiber has its
/// own generator derived from `seed`, so results do not depend on scheduling.
pub fn sample_variety(
    poly: &ValuatedPolynomial,
    q: Complex64,
    params: &CutoffParams,
    spec: &SamplingSpec,
    seed: u64,
) -> Result<PointCloud, LocalizationError> {
    let (lo, hi) = check_curve(poly)?;
    let ln_r = params.ln_r();
    let coeffs = log_coefficients(poly, q.ln(), CloudSource::Vq);
    let per_fiber: Vec<(Vec<CloudPoint>, usize)> = spec
        .fibers(ln_r)
        .into_par_iter()
        .enumerate()
        .map(|(i, zeta1)| {
            let mut rng = ChaCha8Rng::seed_from_u64(fiber_seed(seed, i));
            let (roots, failed) = fiber_roots(poly, &coeffs, lo, hi, zeta1, &mut rng);
            (roots.into_iter().map(|(w, res)| make_point(vec![zeta1, w], ln_r, res)).collect(), failed)
        })
        .collect();
    Ok(assemble(CloudSource::Vq, ln_r, spec.clip, per_fiber))
}

const WQ_ITER: usize = 60;
const WQ_TOL: f64 = 1e-12;

/// `f̃_q(x1, e^w) / e^s` as a real 2-vector, with the scaled mass.
fn wq_residual(poly: &ValuatedPolynomial, coeffs: &[Complex64], zeta1: Complex64, w: Complex64, s: f64, params: &CutoffParams) -> (Complex64, f64) {
    let exps: Vec<Complex64> = poly
        .monomials
        .iter()
        .zip(coeffs)
        .map(|(m, c)| c + zeta1 * m.exponent[0] as f64 + w * m.exponent[1] as f64)
        .collect();
    let ln_r = params.ln_r();
    let logs: Vec<f64> = exps.iter().map(|e| e.re / ln_r).collect();
    let mut value = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for (i, e) in exps.iter().enumerate() {
        let b: f64 = logs.iter().map(|&l| cutoff_b(l - logs[i], params)).product();
        if b == 0.0 {
            continue;
        }
        let t = (e - s).exp() * b;
        value += t;
        mass += t.norm();
    }
    (value, mass)
}

/// Damped Newton on `(Re w, Im w)` with a finite-difference Jacobian; the
/// weights depend on `|x2|`, so `f̃_q` is not holomorphic in `w`.
pub(crate) fn wq_newton(
    poly: &ValuatedPolynomial,
    coeffs: &[Complex64],
    zeta1: Complex64,
    mut w: Complex64,
    params: &CutoffParams,
) -> Option<(Complex64, f64)> {
    let top = |w: Complex64| {
        poly.monomials
            .iter()
            .zip(coeffs)
            .map(|(m, c)| c.re + zeta1.re * m.exponent[0] as f64 + w.re * m.exponent[1] as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    for _ in 0..WQ_ITER {
        let s = top(w);
        let (g, mass) = wq_residual(poly, coeffs, zeta1, w, s, params);
        if mass == 0.0 {
            return None;
        }
        let res = g.norm() / mass;
        if res < WQ_TOL {
            return Some((w, res));
        }
        let h = 1e-7 * (1.0 + w.re.abs());
        let (gx, _) = wq_residual(poly, coeffs, zeta1, w + Complex64::new(h, 0.0), s, params);
        let (gy, _) = wq_residual(poly, coeffs, zeta1, w + Complex64::new(0.0, h), s, params);
        let (a, c) = ((gx.re - g.re) / h, (gx.im - g.im) / h);
        let (b, d) = ((gy.re - g.re) / h, (gy.im - g.im) / h);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let step = Complex64::new((d * g.re - b * g.im) / det, (a * g.im - c * g.re) / det);
        let mut lambda = 1.0;
        let mut next = w - step;
        for _ in 0..10 {
            let (gn, mn) = wq_residual(poly, coeffs, zeta1, next, top(next), params);
            if mn > 0.0 && gn.norm() / mn < res {
                break;
            }
            lambda /= 2.0;
            next = w - step * lambda;
        }
        w = next;
        if !w.is_finite() {
            return None;
        }
    }
    let (g, mass) = wq_residual(poly, coeffs, zeta1, w, top(w), params);
    let res = g.norm() / mass;
    (res < WQ_TOL * 1e3).then_some((w, res))
}

/// Points of the localization `W_q = {f̃_q = 0}`, found by continuing each
/// `V_q` root on the same fiber.
pub fn sample_localized(
    poly: &ValuatedPolynomial,
    q: Complex64,
    params: &CutoffParams,
    spec: &SamplingSpec,
    seed: u64,
) -> Result<PointCloud, LocalizationError> {
    let (lo, hi) = check_curve(poly)?;
    let ln_r = params.ln_r();
    let ln_q = q.ln();
    let vq = log_coefficients(poly, ln_q, CloudSource::Vq);
    let wq = log_coefficients(poly, ln_q, CloudSource::Wq);
    let per_fiber: Vec<(Vec<CloudPoint>, usize)> = spec
        .fibers(ln_r)
        .into_par_iter()
        .enumerate()
        .map(|(i, zeta1)| {
            let mut rng = ChaCha8Rng::seed_from_u64(fiber_seed(seed, i));
            let (roots, mut failed) = fiber_roots(poly, &vq, lo, hi, zeta1, &mut rng);
            let mut pts: Vec<CloudPoint> = Vec::new();
            for (w0, _) in roots {
                match wq_newton(poly, &wq, zeta1, w0, params) {
                    Some((w, res)) => {
                        // several V_q roots may flow to the same W_q point
                        if !pts.iter().any(|p| (p.log_x[1] - w).norm() < 1e-8) {
                            pts.push(make_point(vec![zeta1, w], ln_r, res));
                        }
                    }
                    None => failed += 1,
                }
            }
            (pts, failed)
        })
        .collect();
    Ok(assemble(CloudSource::Wq, ln_r, spec.clip, per_fiber))
}

fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Euclidean distance from `y` to the union of the dense cells.
pub fn distance_to_complex(complex: &TropicalComplex, y: &[f64]) -> f64 {
    const TOL: f64 = 1e-9;
    let poly = &complex.poly;
    let mut best = f64::INFINITY;
    for cell in complex.dense_cells() {
        let a = &cell.dominant_set;
        let m0 = &poly.monomials[a[0]];
        // affine hull: (m_i − m_0)·X = v_0 − v_i
        let rows: Vec<Vec<f64>> = a[1..]
            .iter()
            .map(|&i| poly.monomials[i].exponent.iter().zip(m0.exponent.iter()).map(|(p, q)| (p - q) as f64).collect())
            .collect();
        let rhs: Vec<f64> = a[1..].iter().map(|&i| (m0.valuation - poly.monomials[i].valuation) as f64).collect();
        let resid: Vec<f64> = rows.iter().zip(&rhs).map(|(r, b)| r.iter().zip(y).map(|(a, x)| a * x).sum::<f64>() - b).collect();
        let gram: Vec<Vec<f64>> = rows.iter().map(|r| rows.iter().map(|s| r.iter().zip(s).map(|(a, b)| a * b).sum()).collect()).collect();
        let Some(lambda) = solve_small(gram, resid) else { continue };
        let p: Vec<f64> = (0..y.len()).map(|k| y[k] - rows.iter().zip(&lambda).map(|(r, l)| r[k] * l).sum::<f64>()).collect();
        let logs = log_terms(poly, &p);
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if a.iter().all(|&i| logs[i] >= top - TOL) {
            let d = p.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            best = best.min(d);
        }
    }
    best
}

/// One-sided Hausdorff distance from the cloud, restricted to `bounds`, to
/// the tropical hypersurface.
pub fn hausdorff_to_tropical(
    cloud: &PointCloud,
    complex: &TropicalComplex,
    bounds: &[(f64, f64)],
) -> Result<f64, LocalizationError> {
    let inside: Vec<&CloudPoint> = cloud
        .points
        .iter()
        .filter(|p| p.log_r.iter().zip(bounds).all(|(l, (lo, hi))| lo <= l && l <= hi))
        .collect();
    if inside.is_empty() {
        return Err(LocalizationError::EmptyCloud);
    }
    Ok(inside.par_iter().map(|p| distance_to_complex(complex, &p.log_r)).reduce(|| 0.0, f64::max))
}
