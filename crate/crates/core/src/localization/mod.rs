//! Numeric tropical localization: cutoff functions, the localized defining
//! function, regions around cells, amoeba sampling and verification.
//!
//! Points of the torus are handled through complex logarithms `ζ` with
//! `x = exp(ζ)`, so that `Log_R(x) = Re ζ / ln R` stays representable far
//! beyond the range of `f64` moduli.

pub mod regions;
pub mod roots;
pub mod sampling;
pub mod verify;

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::ValuatedPolynomial;

pub use regions::{check_region_combinatorics, region_membership, CombinatoricsReport, RegionKind};
pub use sampling::{hausdorff_to_tropical, sample_variety, CloudPoint, CloudSource, PointCloud, SamplingSpec};
pub use verify::{verify_localization, LocalizationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalizationError {
    #[error("invalid cutoff parameters: {0}")]
    InvalidParams(String),
    #[error("point has a zero coordinate")]
    ZeroCoordinate,
    #[error("numeric sampling needs a curve (ambient dimension 2), got {0}")]
    NotCurve(usize),
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("tropical hypersurface is not smooth")]
    NotSmooth,
}

/// Shape of the smooth transition of `b` on `(C1, C0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpProfile {
    /// `1 / (1 + exp(k (1/s − 1/(1−s))))` with `s = (C0 − X)/(C0 − C1)`.
    ExpGlue { sharpness: f64 },
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile::ExpGlue { sharpness: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffParams {
    pub c0: f64,
    pub c1: f64,
    pub r: f64,
    pub profile: BumpProfile,
}

impl Default for CutoffParams {
    fn default() -> Self {
        CutoffParams { c0: 0.1, c1: 0.05, r: 6f64.exp(), profile: BumpProfile::default() }
    }
}

impl CutoffParams {
    pub fn new(c0: f64, c1: f64, r: f64) -> Result<CutoffParams, LocalizationError> {
        if !(0.0 < c1 && c1 < c0 && c0 <= 0.25) {
            return Err(LocalizationError::InvalidParams(format!("need 0 < C1 < C0 <= 0.25, got C0={c0}, C1={c1}")));
        }
        if !(r > 1.0 && r.is_finite()) {
            return Err(LocalizationError::InvalidParams(format!("need R > 1, got {r}")));
        }
        Ok(CutoffParams { c0, c1, r, profile: BumpProfile::default() })
    }

    /// Skips the `C0 <= 0.25` bound, for experiments with oversized regions.
    pub fn unchecked(c0: f64, c1: f64, r: f64) -> CutoffParams {
        CutoffParams { c0, c1, r, profile: BumpProfile::default() }
    }

    pub fn with_r(self, r: f64) -> CutoffParams {
        CutoffParams { r, ..self }
    }

    pub fn ln_r(&self) -> f64 {
        self.r.ln()
    }
}

/// The cutoff `b`: 1 on `(−∞, C1]`, 0 on `[C0, ∞)`, smooth and decreasing between.
pub fn cutoff_b(x: f64, params: &CutoffParams) -> f64 {
    if x <= params.c1 {
        return 1.0;
    }
    if x >= params.c0 {
        return 0.0;
    }
    let s = (params.c0 - x) / (params.c0 - params.c1);
    let BumpProfile::ExpGlue { sharpness } = params.profile;
    let e = sharpness * (1.0 / s - 1.0 / (1.0 - s));
    if e > 700.0 {
        // keep b strictly positive below C0
        return f64::MIN_POSITIVE;
    }
    let b = 1.0 / (1.0 + e.exp());
    if b >= 1.0 {
        1.0 - f64::EPSILON / 2.0
    } else {
        b
    }
}

/// `log_R |q^{v_m} x^m|` for every monomial, given `Log_R(x)`.
pub fn log_terms(poly: &ValuatedPolynomial, log_x: &[f64]) -> Vec<f64> {
    poly.monomials.iter().map(|m| m.valuation as f64 + m.exponent.dot_f64(log_x)).collect()
}

pub fn weight_from_logs(logs: &[f64], m: usize, params: &CutoffParams) -> f64 {
    logs.iter().map(|&li| cutoff_b(li - logs[m], params)).product()
}

fn log_r_of(x: &[Complex64], params: &CutoffParams) -> Result<Vec<f64>, LocalizationError> {
    if x.iter().any(|c| c.norm() == 0.0) {
        return Err(LocalizationError::ZeroCoordinate);
    }
    Ok(x.iter().map(|c| c.norm().ln() / params.ln_r()).collect())
}

/// `b_m(x) = Π_i b(log_R|q^{v_i}x^i| − log_R|q^{v_m}x^m|)` with `|q| = R`.
pub fn weight_bm(
    x: &[Complex64],
    m: usize,
    poly: &ValuatedPolynomial,
    params: &CutoffParams,
) -> Result<f64, LocalizationError> {
    let logs = log_terms(poly, &log_r_of(x, params)?);
    Ok(weight_from_logs(&logs, m, params))
}

/// A complex number `value · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub value: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn to_complex(self) -> Complex64 {
        self.value * self.log_scale.exp()
    }
}

/// `f̃_q` at `x = exp(ζ)`, scaled by the largest monomial modulus.
/// Also returns the scaled sum of moduli, for relative tolerances.
pub fn f_tilde_log(poly: &ValuatedPolynomial, zeta: &[Complex64], q: Complex64, params: &CutoffParams) -> (Scaled, f64) {
    let ln_q = q.ln();
    let ln_r = params.ln_r();
    let exps: Vec<Complex64> = poly
        .monomials
        .iter()
        .map(|m| ln_q * m.valuation as f64 + m.exponent.iter().zip(zeta).map(|(&a, z)| z * a as f64).sum::<Complex64>())
        .collect();
    let logs: Vec<f64> = exps.iter().map(|e| e.re / ln_r).collect();
    let top = exps.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    let mut value = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for (i, e) in exps.iter().enumerate() {
        let b = weight_from_logs(&logs, i, params);
        if b == 0.0 {
            continue;
        }
        let t = (e - top).exp();
        value += t * b;
        mass += t.norm() * b;
    }
    (Scaled { value, log_scale: top }, mass)
}

/// `f̃_q(x) = Σ_m b_m(x) q^{v_m} x^m`.
pub fn f_tilde(
    x: &[Complex64],
    poly: &ValuatedPolynomial,
    q: Complex64,
    params: &CutoffParams,
) -> Result<Complex64, LocalizationError> {
    log_r_of(x, params)?;
    let zeta: Vec<Complex64> = x.iter().map(|c| c.ln()).collect();
    Ok(f_tilde_log(poly, &zeta, q, params).0.to_complex())
}

/// The localized hyperplane
/// `Π_i b(log_R|x_i|) + Σ_i b(−log_R|x_i|) Π_j b(log_R|x_j| − log_R|x_i|) x_i`.
pub fn localized_hyperplane(x: &[Complex64], params: &CutoffParams) -> Result<Complex64, LocalizationError> {
    let l = log_r_of(x, params)?;
    Ok(localized_hyperplane_logs(x, &l, params))
}

pub fn localized_hyperplane_logs(x: &[Complex64], l: &[f64], params: &CutoffParams) -> Complex64 {
    let mut out = Complex64::new(l.iter().map(|&li| cutoff_b(li, params)).product(), 0.0);
    for i in 0..x.len() {
        let w: f64 = cutoff_b(-l[i], params) * l.iter().map(|&lj| cutoff_b(lj - l[i], params)).product::<f64>();
        out += x[i] * w;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn p() -> CutoffParams {
        CutoffParams::default()
    }

    #[test]
    fn cutoff_boundaries() {
        let params = p();
        assert_eq!(cutoff_b(params.c1, &params), 1.0);
        assert_eq!(cutoff_b(params.c0, &params), 0.0);
        let mid = cutoff_b((params.c0 + params.c1) / 2.0, &params);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((mid - 0.5).abs() < 1e-12);
        assert!(cutoff_b(params.c1 + 1e-12, &params) < 1.0);
        assert!(cutoff_b(params.c0 - 1e-12, &params) > 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(CutoffParams::new(0.1, 0.05, 2.0).is_ok());
        assert!(CutoffParams::new(0.3, 0.05, 2.0).is_err());
        assert!(CutoffParams::new(0.1, 0.1, 2.0).is_err());
        assert!(CutoffParams::new(0.1, 0.05, 1.0).is_err());
    }

    #[test]
    fn line_weights() {
        let poly = parse_polynomial("1 + x1 + x2", 2).unwrap();
        let params = p();
        let r = params.r;
        let x = [Complex64::new(1.0 / r, 0.0), Complex64::new(0.0, 1.0 / r)];
        assert_eq!(weight_bm(&x, 0, &poly, &params).unwrap(), 1.0);
        assert_eq!(weight_bm(&x, 1, &poly, &params).unwrap(), 0.0);
        let one = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let w: Vec<f64> = (0..3).map(|m| weight_bm(&one, m, &poly, &params).unwrap()).collect();
        assert!(w[0] == w[1] && w[1] == w[2]);
        assert_eq!(w[0], 1.0);
        assert_eq!(weight_bm(&[Complex64::new(0.0, 0.0), one[0]], 0, &poly, &params), Err(LocalizationError::ZeroCoordinate));
    }

    #[test]
    fn f_tilde_deep_in_chamber_is_leading_term() {
        let poly = parse_polynomial("1 + x1 + x2", 2).unwrap();
        let params = p();
        let x = [Complex64::new(params.r.powi(3), 0.0), Complex64::new(1.0, 0.0)];
        let v = f_tilde(&x, &poly, Complex64::new(params.r, 0.0), &params).unwrap();
        assert!((v - x[0]).norm() < 1e-9 * x[0].norm());
    }

    #[test]
    fn localized_hyperplane_bands() {
        let params = p();
        let x = [Complex64::new(-1.0, 0.0)];
        assert!(localized_hyperplane(&x, &params).unwrap().norm() < 1e-15);
        let tiny = [Complex64::new(params.r.powf(-0.2), 0.0), Complex64::new(0.0, params.r.powf(-0.3))];
        assert_eq!(localized_hyperplane(&tiny, &params).unwrap(), Complex64::new(1.0, 0.0));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::poly::parse_polynomial;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn weight_depends_only_on_modulus(
            l in prop::collection::vec(-1.0f64..1.0, 2),
            phases in prop::collection::vec(0.0..std::f64::consts::TAU, 4),
            m in 0usize..6,
        ) {
            let poly = parse_polynomial("x2^2 + x2*(x1^3 + t^-2*x1^2 + t^-2*x1 + t^-1) + 1", 2).unwrap();
            let params = CutoffParams::default();
            let x = |a: f64, b: f64| [Complex64::from_polar(params.r.powf(l[0]), a), Complex64::from_polar(params.r.powf(l[1]), b)];
            let w1 = weight_bm(&x(phases[0], phases[1]), m, &poly, &params).unwrap();
            let w2 = weight_bm(&x(phases[2], phases[3]), m, &poly, &params).unwrap();
            prop_assert!((w1 - w2).abs() < 1e-12);
        }
    }
}
