//! Regions of the tropical plane attached to cells, and sampling checks of
//! their combinatorics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{log_terms, CutoffParams};
use crate::tropical::{maximizing_face, TropCell, TropicalComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Open,
    /// Non-strict inequalities, containing the closure of the open region.
    Closed,
}

/// `{m : L_m > max − C0}`.
pub fn near_dominant(logs: &[f64], c0: f64) -> Vec<usize> {
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..logs.len()).filter(|&i| logs[i] > top - c0).collect()
}

fn in_region(logs: &[f64], support: &[usize], a: &[usize], c0: f64, kind: RegionKind) -> bool {
    let close = |d: f64| match kind {
        RegionKind::Open => d < c0,
        RegionKind::Closed => d <= c0,
    };
    for (i, &m) in a.iter().enumerate() {
        for &m2 in &a[i + 1..] {
            if !close((logs[m] - logs[m2]).abs()) {
                return false;
            }
        }
    }
    support
        .iter()
        .filter(|m| !a.contains(m))
        .all(|&m| a.iter().any(|&m2| logs[m2] - logs[m] >= c0))
}

/// Forms `v_m + m·X` in the coordinates of the cell's orbit, and the
/// support points that survive there.
fn orbit_logs(complex: &TropicalComplex, cell: &TropCell, x: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let poly = &complex.poly;
    match (&cell.quotient, &complex.fan) {
        (Some(u), Some(fan)) => {
            let cone = &fan.cones[cell.orbit];
            let l = cone.len();
            let pts: Vec<_> = poly.monomials.iter().map(|m| m.exponent.clone()).collect();
            let mut face: Vec<usize> = (0..pts.len()).collect();
            for &r in cone {
                let f = maximizing_face(&pts, &fan.rays[r]);
                face.retain(|i| f.contains(i));
            }
            let logs = poly
                .monomials
                .iter()
                .map(|m| {
                    let proj = u.iter().skip(l).map(|row| row.iter().zip(m.exponent.iter()).map(|(a, b)| a * b).sum::<i64>());
                    m.valuation as f64 + proj.zip(x).map(|(a, xi)| a as f64 * xi).sum::<f64>()
                })
                .collect();
            (logs, face)
        }
        _ => (log_terms(poly, x), (0..poly.len()).collect()),
    }
}

/// Whether `X` (in the coordinates of the cell's orbit) lies in the region of the cell.
pub fn region_membership(x: &[f64], cell: usize, complex: &TropicalComplex, params: &CutoffParams) -> bool {
    region_membership_kind(x, cell, complex, params, RegionKind::Open)
}

pub fn region_membership_kind(
    x: &[f64],
    cell: usize,
    complex: &TropicalComplex,
    params: &CutoffParams,
    kind: RegionKind,
) -> bool {
    let c = &complex.cells[cell];
    let (logs, support) = orbit_logs(complex, c, x);
    in_region(&logs, &support, &c.dominant_set, params.c0, kind)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CombinatoricsReport {
    pub samples: usize,
    /// Points with a single near-dominant term.
    pub chamber_points: usize,
    pub region_points: usize,
    /// Near-dominant sets of size at least two that are no dominant set of a cell.
    pub stray_sets: usize,
    /// Points in the closed regions of two cells but of no common face.
    pub overlap_failures: usize,
    pub witnesses: Vec<Witness>,
}

impl CombinatoricsReport {
    pub fn violations(&self) -> usize {
        self.stray_sets + self.overlap_failures
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

const MAX_WITNESSES: usize = 20;

/// Uniform samples in `bounds` (per coordinate) of the dense-torus chart.
pub fn check_region_combinatorics(
    complex: &TropicalComplex,
    params: &CutoffParams,
    samples: usize,
    seed: u64,
    bounds: &[(f64, f64)],
) -> CombinatoricsReport {
    let cells: Vec<&TropCell> = complex.dense_cells().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CombinatoricsReport { samples, ..Default::default() };
    let describe = |set: &[usize]| -> String {
        let pts: Vec<String> = set.iter().map(|&i| complex.poly.monomials[i].exponent.to_string()).collect();
        format!("{{{}}}", pts.join(","))
    };
    for _ in 0..samples {
        let x: Vec<f64> = bounds.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect();
        let logs = log_terms(&complex.poly, &x);
        let near = near_dominant(&logs, params.c0);
        if near.len() < 2 {
            report.chamber_points += 1;
        } else {
            report.region_points += 1;
            if !cells.iter().any(|c| c.dominant_set == near) {
                report.stray_sets += 1;
                if report.witnesses.len() < MAX_WITNESSES {
                    report.witnesses.push(Witness {
                        point: x.clone(),
                        detail: format!("near-dominant set {} is not the dominant set of a cell", describe(&near)),
                    });
                }
            }
        }
        let all: Vec<usize> = (0..complex.poly.len()).collect();
        let member: Vec<&TropCell> = cells
            .iter()
            .copied()
            .filter(|c| in_region(&logs, &all, &c.dominant_set, params.c0, RegionKind::Closed))
            .collect();
        for (i, a) in member.iter().enumerate() {
            for b in &member[i + 1..] {
                let common = member.iter().any(|m| {
                    a.dominant_set.iter().chain(&b.dominant_set).all(|k| m.dominant_set.contains(k))
                });
                if !common {
                    report.overlap_failures += 1;
                    if report.witnesses.len() < MAX_WITNESSES {
                        report.witnesses.push(Witness {
                            point: x.clone(),
                            detail: format!(
                                "in the regions of cells {} and {} but of no common face",
                                a.id, b.id
                            ),
                        });
                    }
                }
            }
        }
    }
    report
}
