//! Checks on sampled points of `W_q`: every point lies in a region, and
//! inside the region of `μ` the localized function agrees with the
//! localized hyperplane in the standard coordinates of `μ`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::regions::{near_dominant, Witness};
use super::sampling::{log_coefficients, sample_localized, CloudSource, PointCloud, SamplingSpec};
use super::{cutoff_b, localized_hyperplane_logs, CutoffParams, LocalizationError};
use crate::monodromy::{standard_frame, StandardFrame};
use crate::tropical::TropicalComplex;

pub const IDENTITY_TOL: f64 = 1e-6;
pub const BAND_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub ln_r: f64,
    pub c0: f64,
    pub c1: f64,
    pub points: usize,
    pub dropped: usize,
    /// Points lying in no region.
    pub region_failures: usize,
    /// Points per cell id whose region contains them.
    pub region_counts: BTreeMap<usize, usize>,
    pub identity_failures: usize,
    pub max_identity_error: f64,
    /// Points on the middle band `|ℓ1| ≤ C1` of a bounded edge region.
    pub band_points: usize,
    pub band_failures: usize,
    pub max_band_error: f64,
    pub witnesses: Vec<Witness>,
}

impl LocalizationReport {
    pub fn regions_ok(&self) -> bool {
        self.region_failures == 0
    }

    pub fn identity_ok(&self) -> bool {
        self.identity_failures == 0
    }

    pub fn band_ok(&self) -> bool {
        self.band_failures == 0 && self.band_points > 0
    }

    pub fn passed(&self) -> bool {
        self.regions_ok() && self.identity_ok() && self.band_ok()
    }
}

const MAX_WITNESSES: usize = 20;

/// Samples `W_q` on the fibers of `spec` and checks it against the regions.
pub fn verify_localization(
    complex: &TropicalComplex,
    q: Complex64,
    params: &CutoffParams,
    spec: &SamplingSpec,
    seed: u64,
) -> Result<LocalizationReport, LocalizationError> {
    if !complex.smooth {
        return Err(LocalizationError::NotSmooth);
    }
    let cloud = sample_localized(&complex.poly, q, params, spec, seed)?;
    check_cloud(complex, q, params, &cloud)
}

pub fn check_cloud(
    complex: &TropicalComplex,
    q: Complex64,
    params: &CutoffParams,
    cloud: &PointCloud,
) -> Result<LocalizationReport, LocalizationError> {
    let poly = &complex.poly;
    let ln_r = params.ln_r();
    let coeffs = log_coefficients(poly, q.ln(), CloudSource::Wq);
    let mut frames: BTreeMap<Vec<usize>, (usize, StandardFrame, bool)> = BTreeMap::new();
    for cell in complex.dense_cells() {
        let frame = standard_frame(complex, cell.id, None).map_err(|_| LocalizationError::NotSmooth)?;
        let band = cell.dim == 1 && cell.bounded && frame.fixed == 1;
        frames.insert(cell.dominant_set.clone(), (cell.id, frame, band));
    }
    let mut report = LocalizationReport {
        ln_r,
        c0: params.c0,
        c1: params.c1,
        points: cloud.points.len(),
        dropped: cloud.dropped,
        region_failures: 0,
        region_counts: BTreeMap::new(),
        identity_failures: 0,
        max_identity_error: 0.0,
        band_points: 0,
        band_failures: 0,
        max_band_error: 0.0,
        witnesses: Vec::new(),
    };
    let witness = |report: &mut LocalizationReport, point: &[f64], detail: String| {
        if report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(Witness { point: point.to_vec(), detail });
        }
    };
    for p in &cloud.points {
        let exps: Vec<Complex64> = poly
            .monomials
            .iter()
            .zip(&coeffs)
            .map(|(m, c)| c + m.exponent.iter().zip(&p.log_x).map(|(&a, z)| z * a as f64).sum::<Complex64>())
            .collect();
        let logs: Vec<f64> = exps.iter().map(|e| e.re / ln_r).collect();
        let near = near_dominant(&logs, params.c0);
        let Some((id, frame, band)) = frames.get(&near) else {
            report.region_failures += 1;
            witness(&mut report, &p.log_r, format!("near-dominant set {near:?} is no dominant set"));
            continue;
        };
        *report.region_counts.entry(*id).or_default() += 1;
        // f̃_q / (q^{v_{m0}} x^{m0}) against the localized hyperplane in x̃
        let e0 = exps[frame.base];
        let mut lhs = Complex64::new(0.0, 0.0);
        let mut mass = 1.0;
        for (i, e) in exps.iter().enumerate() {
            let b: f64 = logs.iter().map(|&l| cutoff_b(l - logs[i], params)).product();
            if b > 0.0 {
                let t = (e - e0).exp() * b;
                lhs += t;
                mass += t.norm();
            }
        }
        let xt: Vec<Complex64> = frame.monomials.iter().map(|&i| (exps[i] - e0).exp()).collect();
        let lt: Vec<f64> = frame.monomials.iter().map(|&i| logs[i] - logs[frame.base]).collect();
        let rhs = localized_hyperplane_logs(&xt, &lt, params);
        let err = (lhs - rhs).norm() / mass;
        report.max_identity_error = report.max_identity_error.max(err);
        if err >= IDENTITY_TOL {
            report.identity_failures += 1;
            witness(&mut report, &p.log_r, format!("cell {id}: localized function differs by {err:e}"));
        }
        if *band && lt[0].abs() <= params.c1 {
            report.band_points += 1;
            let e = (xt[0] + 1.0).norm();
            report.max_band_error = report.max_band_error.max(e);
            if e >= BAND_TOL {
                report.band_failures += 1;
                witness(&mut report, &p.log_r, format!("cell {id}: |x~1 + 1| = {e:e} on the middle band"));
            }
        }
    }
    Ok(report)
}
