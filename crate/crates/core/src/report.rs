//! End-to-end analysis and verification runs, and their JSON reports.
//! Exact rationals are written as `"p/q"` strings.

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::fan::{fan_is_unimodular, normal_fan, Fan};
use crate::lattice::Rational;
use crate::localization::{
    check_region_combinatorics, hausdorff_to_tropical, sample_variety, verify_localization, CombinatoricsReport,
    CutoffParams, LocalizationError, LocalizationReport, SamplingSpec,
};
use crate::monodromy::{format_report, monodromy_report, monodromy_word, MonodromyEntry, MonodromyWord};
use crate::poly::{parse_polynomial, ParseError, ValuatedPolynomial};
use crate::subdivision::{is_smooth, regular_subdivision, RegularSubdivision, SmoothnessFailure, SubdivisionError};
use crate::tropical::{boundary_strata, build_complex, cell_counts, ComplexError, TropicalComplex};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub input: String,
    pub poly: ValuatedPolynomial,
    pub subdivision: RegularSubdivision,
    pub smoothness: Result<(), SmoothnessFailure>,
    /// Dense-torus complex.
    pub complex: TropicalComplex,
    /// Complex with boundary strata, or why it is unavailable.
    pub compactified: Result<TropicalComplex, String>,
    pub word: Option<MonodromyWord>,
    pub entries: Option<Vec<MonodromyEntry>>,
}

impl Analysis {
    pub fn smooth(&self) -> bool {
        self.smoothness.is_ok()
    }

    /// The complex the monodromy entries refer to.
    pub fn reported_complex(&self) -> &TropicalComplex {
        self.compactified.as_ref().unwrap_or(&self.complex)
    }
}

/// Parses and analyzes `text`. Without `fan` the normal fan of the Newton
/// polytope is used for the boundary strata when it is unimodular. A
/// user fan that fails validation is an error.
pub fn analyze(text: &str, dim: usize, fan: Option<&Fan>) -> Result<Analysis, AnalyzeError> {
    let poly = parse_polynomial(text, dim)?;
    let subdivision = regular_subdivision(&poly)?;
    let smoothness = is_smooth(&subdivision);
    let complex = build_complex(&poly, &subdivision);
    let compactified = match fan {
        Some(f) => Ok(boundary_strata(&complex, f)?),
        None => {
            let nf = normal_fan(&subdivision.newton);
            match fan_is_unimodular(&nf) {
                Ok(()) => boundary_strata(&complex, &nf).map_err(|e| e.to_string()),
                Err(c) => Err(ComplexError::FanNotUnimodular(c).to_string()),
            }
        }
    };
    let mut analysis =
        Analysis { input: text.to_string(), poly, subdivision, smoothness, complex, compactified, word: None, entries: None };
    if analysis.smooth() {
        analysis.word = if dim == 2 { monodromy_word(&analysis.complex).ok() } else { None };
        analysis.entries = monodromy_report(analysis.reported_complex()).ok();
    }
    Ok(analysis)
}

pub fn rational_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn rationals(v: &[Rational]) -> Value {
    Value::from(v.iter().map(rational_string).collect::<Vec<_>>())
}

fn cells_json(complex: &TropicalComplex) -> Value {
    let exps = |set: &[usize]| -> Vec<Vec<i64>> { set.iter().map(|&i| complex.poly.monomials[i].exponent.0.clone()).collect() };
    Value::from(
        complex
            .cells
            .iter()
            .map(|c| {
                json!({
                    "id": c.id,
                    "dim": c.dim,
                    "orbit": c.orbit,
                    "bounded": c.bounded,
                    "vertices": c.vertices.iter().map(|v| rationals(&v.0)).collect::<Vec<_>>(),
                    "rays": c.rays,
                    "dual_cell": c.dual_cell,
                    "dominant_set": c.dominant_set,
                    "dominant_exponents": exps(&c.dominant_set),
                    "parent": c.parent,
                })
            })
            .collect::<Vec<_>>(),
    )
}

fn fan_json(fan: &Fan) -> Value {
    json!({ "rays": fan.rays, "cones": fan.cones })
}

fn word_json(word: &MonodromyWord) -> Value {
    json!({
        "display": word.to_string(),
        "factors": word.factors.iter().map(|f| json!({
            "cell": f.cell,
            "exponent": rational_string(&f.exponent),
            "direction": f.primitive_direction,
            "endpoints": f.endpoints.iter().map(|e| rationals(&e.0)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "sorted_exponents": word.sorted_exponents().iter().map(rational_string).collect::<Vec<_>>(),
    })
}

fn entries_json(entries: &[MonodromyEntry]) -> Value {
    Value::from(
        entries
            .iter()
            .map(|e| {
                let (frame, twisted) = match &e.profile {
                    None => (Value::Null, Value::Null),
                    Some(p) => (
                        json!({
                            "base": p.frame.base,
                            "monomials": p.frame.monomials,
                            "matrix": p.frame.frame.matrix,
                            "offsets": p.frame.frame.offsets,
                            "forms": p.frame.forms(),
                        }),
                        Value::from(
                            p.twisted
                                .iter()
                                .map(|t| json!({ "coord": t.index, "width": rational_string(&t.width), "values": rationals(&t.values) }))
                                .collect::<Vec<_>>(),
                        ),
                    ),
                };
                json!({
                    "cell": e.cell,
                    "dim": e.dim,
                    "orbit": e.orbit,
                    "infinite": e.profile.is_none(),
                    "description": e.describe(),
                    "frame": frame,
                    "twisted": twisted,
                })
            })
            .collect::<Vec<_>>(),
    )
}

pub fn analysis_json(a: &Analysis) -> Value {
    let poly = &a.poly;
    let sub = &a.subdivision;
    let newton = &sub.newton;
    let smoothness = match &a.smoothness {
        Ok(()) => json!({ "smooth": true, "certificate": null }),
        Err(f) => json!({
            "smooth": false,
            "certificate": {
                "cell": f.cell(),
                "points": sub.cell_points(f.cell()).iter().map(|p| p.0.clone()).collect::<Vec<_>>(),
                "reason": f.to_string(),
            }
        }),
    };
    let compactified = match &a.compactified {
        Ok(c) => json!({
            "available": true,
            "fan": c.fan.as_ref().map(fan_json),
            "counts": cell_counts(c),
            "strata": cells_json(&TropicalComplex { cells: c.cells.iter().filter(|x| !x.is_dense()).cloned().collect(), ..c.clone() }),
        }),
        Err(reason) => json!({ "available": false, "reason": reason }),
    };
    json!({
        "schema": SCHEMA,
        "input": { "text": a.input, "dim": poly.ambient_dim, "normalized": poly.to_string() },
        "support": poly.monomials.iter().map(|m| json!({
            "exponent": m.exponent.0,
            "valuation": m.valuation,
        })).collect::<Vec<_>>(),
        "newton_polytope": {
            "dim": newton.dim,
            "vertices": newton.vertices().iter().map(|&i| sub.points[i].0.clone()).collect::<Vec<_>>(),
            "facets": newton.facets.iter().map(|f| json!({
                "normal": f.normal.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "offset": f.offset.to_string(),
                "points": f.points,
            })).collect::<Vec<_>>(),
        },
        "subdivision": {
            "cells": sub.cells,
            "maximal": sub.maximal.iter().map(|m| json!({
                "points": m.points,
                "dual_vertex": rationals(&m.dual_vertex.0),
                "value": rational_string(&m.value),
            })).collect::<Vec<_>>(),
        },
        "smoothness": smoothness,
        "complex": {
            "counts": cell_counts(&a.complex),
            "cells": cells_json(&a.complex),
            "bounded_edges": a.complex.bounded_edges().iter().map(|c| c.id).collect::<Vec<_>>(),
        },
        "compactified": compactified,
        "monodromy": {
            "word": a.word.as_ref().map(word_json),
            "complex": if a.compactified.is_ok() { "compactified" } else { "dense" },
            "entries": a.entries.as_deref().map(entries_json),
        },
    })
}

/// Plain-text summary for terminals.
pub fn analysis_text(a: &Analysis) -> String {
    let mut out = format!("polynomial: {}\n", a.poly);
    match &a.smoothness {
        Ok(()) => out.push_str("smooth: yes\n"),
        Err(f) => out.push_str(&format!("smooth: no ({f})\n")),
    }
    let c = cell_counts(&a.complex);
    out.push_str(&format!("cells by dimension: {:?} (bounded {:?})\n", c.total, c.bounded));
    match &a.compactified {
        Ok(cc) => out.push_str(&format!("with boundary strata: {:?}\n", cell_counts(cc).total)),
        Err(r) => out.push_str(&format!("boundary strata unavailable: {r}\n")),
    }
    if let Some(w) = &a.word {
        out.push_str(&format!("monodromy: {w}\n"));
    }
    if let Some(e) = &a.entries {
        out.push_str(&format_report(a.reported_complex(), e));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub params: CutoffParams,
    pub sampling: SamplingSpec,
    pub combinatorics_samples: usize,
    /// Box for the distance to the tropical curve.
    pub bounds: [(f64, f64); 2],
}

impl VerifyOptions {
    pub fn new(seed: u64, params: CutoffParams) -> VerifyOptions {
        VerifyOptions {
            seed,
            params,
            sampling: SamplingSpec::default(),
            combinatorics_samples: 10_000,
            bounds: [(-20.0, 20.0), (-20.0, 20.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub checks: Vec<Check>,
    /// `(ln R, distance)` at `R` and `R²`.
    pub hausdorff: [(f64, f64); 2],
    pub localization: LocalizationReport,
    pub combinatorics: CombinatoricsReport,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Amoeba samples and distances at `R` and `R²`; localization and region
/// checks at `R²`.
pub fn run_verify(complex: &TropicalComplex, opts: &VerifyOptions) -> Result<VerifySummary, LocalizationError> {
    if !complex.smooth {
        return Err(LocalizationError::NotSmooth);
    }
    let poly = &complex.poly;
    let mut checks = Vec::new();
    let mut hausdorff = [(0.0, 0.0); 2];
    let mut max_res: f64 = 0.0;
    let mut total = 0;
    for (k, r) in [opts.params.r, opts.params.r * opts.params.r].into_iter().enumerate() {
        let p = opts.params.with_r(r);
        let cloud = sample_variety(poly, Complex64::new(r, 0.0), &p, &opts.sampling, opts.seed)?;
        max_res = max_res.max(cloud.max_residual());
        total += cloud.points.len();
        hausdorff[k] = (p.ln_r(), hausdorff_to_tropical(&cloud, complex, &opts.bounds)?);
    }
    checks.push(Check {
        name: "sampling",
        passed: total > 0 && max_res < 1e-9,
        detail: format!("{total} points, max residual {max_res:e}"),
    });
    checks.push(Check {
        name: "hausdorff_decreasing",
        passed: hausdorff[1].1 < hausdorff[0].1,
        detail: format!("{} at ln R = {}, {} at ln R = {}", hausdorff[0].1, hausdorff[0].0, hausdorff[1].1, hausdorff[1].0),
    });
    let fine = opts.params.with_r(opts.params.r * opts.params.r);
    let loc = verify_localization(complex, Complex64::new(fine.r, 0.0), &fine, &opts.sampling, opts.seed)?;
    checks.push(Check {
        name: "regions_cover",
        passed: loc.regions_ok() && loc.points > 0,
        detail: format!("{} of {} points in no region", loc.region_failures, loc.points),
    });
    checks.push(Check {
        name: "localized_hyperplane",
        passed: loc.identity_ok(),
        detail: format!("{} failures, max error {:e}", loc.identity_failures, loc.max_identity_error),
    });
    checks.push(Check {
        name: "edge_bands",
        passed: loc.band_ok(),
        detail: format!("{} band points, {} failures, max |x~1+1| {:e}", loc.band_points, loc.band_failures, loc.max_band_error),
    });
    let comb_box = vertex_box(complex, 3.0);
    let comb = check_region_combinatorics(complex, &fine, opts.combinatorics_samples, opts.seed, &comb_box);
    checks.push(Check {
        name: "region_combinatorics",
        passed: comb.passed(),
        detail: format!("{} stray sets, {} overlap failures in {} samples", comb.stray_sets, comb.overlap_failures, comb.samples),
    });
    Ok(VerifySummary { checks, hausdorff, localization: loc, combinatorics: comb })
}

/// Bounding box of the vertices, widened by `margin`.
fn vertex_box(complex: &TropicalComplex, margin: f64) -> Vec<(f64, f64)> {
    let d = complex.ambient_dim;
    let mut b = vec![(0.0f64, 0.0f64); d];
    for (i, v) in complex.dense_cells().flat_map(|c| c.vertices.iter()).enumerate() {
        for (k, x) in v.to_f64().into_iter().enumerate() {
            b[k] = if i == 0 { (x, x) } else { (b[k].0.min(x), b[k].1.max(x)) };
        }
    }
    b.into_iter().map(|(lo, hi)| (lo - margin, hi + margin)).collect()
}

pub fn verify_json(s: &VerifySummary, opts: &VerifyOptions) -> Value {
    let witnesses = |w: &[crate::localization::regions::Witness]| -> Vec<Value> {
        w.iter().map(|w| json!({ "point": w.point, "detail": w.detail })).collect()
    };
    json!({
        "schema": SCHEMA,
        "seed": opts.seed,
        "params": { "C0": opts.params.c0, "C1": opts.params.c1, "lnR": opts.params.ln_r() },
        "passed": s.passed(),
        "checks": s.checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
        "hausdorff": s.hausdorff.iter().map(|(l, d)| json!({ "lnR": l, "distance": d })).collect::<Vec<_>>(),
        "localization": {
            "points": s.localization.points,
            "dropped": s.localization.dropped,
            "region_counts": s.localization.region_counts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "witnesses": witnesses(&s.localization.witnesses),
        },
        "combinatorics": {
            "samples": s.combinatorics.samples,
            "region_points": s.combinatorics.region_points,
            "witnesses": witnesses(&s.combinatorics.witnesses),
        },
    })
}
