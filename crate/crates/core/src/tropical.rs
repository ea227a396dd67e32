//! The tropical hypersurface as a polyhedral complex dual to the regular
//! subdivision, plus its strata in the boundary orbits of a toric
//! compactification.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::fan::{fan_is_unimodular, Fan};
use crate::lattice::{
    extend_to_unimodular, primitive, rat, unimodular_inverse, LatticeError, LatticePoint, Rational, RationalVector,
};
use crate::poly::ValuatedPolynomial;
use crate::subdivision::{is_smooth, RegularSubdivision};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("fan not unimodular (cone {0}); boundary strata unavailable; dense-torus results unaffected")]
    FanNotUnimodular(usize),
    #[error("fan does not refine the normal fan: rays of cone {0} share no maximizing face")]
    NotRefinement(usize),
    #[error("fan dimension {fan} does not match ambient dimension {ambient}")]
    DimensionMismatch { fan: usize, ambient: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropCell {
    pub id: usize,
    pub dim: usize,
    /// Sorted, in the coordinates of the orbit the cell lives in.
    pub vertices: Vec<RationalVector>,
    /// Primitive generators of the recession cone, sorted.
    pub rays: Vec<Vec<i64>>,
    /// Index of the dual cell in `RegularSubdivision::all_cells` order.
    pub dual_cell: usize,
    /// The dominant set as sorted support indices.
    pub dominant_set: Vec<usize>,
    /// Cone id of the torus orbit; 0 is the dense torus.
    pub orbit: usize,
    pub bounded: bool,
    /// Dense-torus cell whose closure contains this stratum.
    pub parent: Option<usize>,
    /// Unimodular matrix whose first rows span the orbit cone, for strata.
    pub quotient: Option<Vec<Vec<i64>>>,
}

impl TropCell {
    pub fn is_dense(&self) -> bool {
        self.orbit == 0
    }
}

#[derive(Debug, Clone)]
pub struct TropicalComplex {
    pub ambient_dim: usize,
    pub poly: ValuatedPolynomial,
    pub cells: Vec<TropCell>,
    pub smooth: bool,
    pub fan: Option<Fan>,
}

impl TropicalComplex {
    pub fn cells_of_dim(&self, k: usize) -> impl Iterator<Item = &TropCell> {
        self.cells.iter().filter(move |c| c.dim == k)
    }

    pub fn dense_cells(&self) -> impl Iterator<Item = &TropCell> {
        self.cells.iter().filter(|c| c.is_dense())
    }

    pub fn bounded_edges(&self) -> Vec<&TropCell> {
        self.dense_cells().filter(|c| c.dim == 1 && c.bounded).collect()
    }

    /// `a ≺ b`: `a` is a face of `b` (same orbit).
    pub fn is_face(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (&self.cells[a], &self.cells[b]);
        ca.orbit == cb.orbit && cb.dominant_set.iter().all(|i| ca.dominant_set.contains(i))
    }

    pub fn faces_of(&self, id: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&j| j != id && self.is_face(j, id)).collect()
    }

    pub fn cell_by_dominant(&self, dominant: &[usize]) -> Option<&TropCell> {
        self.dense_cells().find(|c| c.dominant_set == dominant)
    }

    /// Exact membership of a dense-torus point in a dense cell.
    pub fn contains(&self, id: usize, x: &[Rational]) -> bool {
        let cell = &self.cells[id];
        assert!(cell.is_dense(), "membership is only defined for dense-torus cells");
        let am = argmax_set(&self.poly, x);
        cell.dominant_set.iter().all(|i| am.contains(i))
    }
}

fn affine_form(poly: &ValuatedPolynomial, i: usize, x: &[Rational]) -> Rational {
    let m = &poly.monomials[i];
    rat(m.valuation) + m.exponent.dot(x)
}

/// `max_m (v_m + m·X)`.
pub fn trop_eval(poly: &ValuatedPolynomial, x: &[Rational]) -> Rational {
    (0..poly.len()).map(|i| affine_form(poly, i, x)).max().expect("nonempty polynomial")
}

/// Support indices attaining the maximum.
pub fn argmax_set(poly: &ValuatedPolynomial, x: &[Rational]) -> Vec<usize> {
    let vals: Vec<Rational> = (0..poly.len()).map(|i| affine_form(poly, i, x)).collect();
    let best = vals.iter().max().expect("nonempty polynomial").clone();
    (0..vals.len()).filter(|&i| vals[i] == best).collect()
}

/// Indices of support points maximizing the linear functional `r`.
pub fn maximizing_face(points: &[LatticePoint], r: &[i64]) -> Vec<usize> {
    let vals: Vec<i64> = points.iter().map(|m| m.iter().zip(r).map(|(a, b)| a * b).sum()).collect();
    let best = *vals.iter().max().unwrap();
    (0..vals.len()).filter(|&i| vals[i] == best).collect()
}

/// Dense-torus part of the tropical hypersurface.
pub fn build_complex(poly: &ValuatedPolynomial, subdiv: &RegularSubdivision) -> TropicalComplex {
    let d = subdiv.ambient_dim;
    let newton = &subdiv.newton;
    let facet_normals: Vec<Vec<i64>> = newton
        .facets
        .iter()
        .map(|f| crate::lattice::big_to_i64(&f.normal).expect("facet normal fits in i64"))
        .collect();

    let mut cells = Vec::new();
    for (flat, (k, tau)) in subdiv.all_cells().enumerate() {
        if k == 0 {
            continue;
        }
        let mut vertices: Vec<RationalVector> = subdiv
            .maximal
            .iter()
            .filter(|m| tau.iter().all(|i| m.points.binary_search(i).is_ok()))
            .map(|m| m.dual_vertex.clone())
            .collect();
        vertices.sort();
        vertices.dedup();
        assert!(!vertices.is_empty(), "subdivision cell without a maximal cell");
        let mut rays: Vec<Vec<i64>> = newton
            .facets
            .iter()
            .zip(&facet_normals)
            .filter(|(f, _)| tau.iter().all(|i| f.points.binary_search(i).is_ok()))
            .map(|(_, n)| n.clone())
            .collect();
        rays.sort();
        let dim = d - k;
        cells.push(TropCell {
            id: 0,
            dim,
            bounded: rays.is_empty(),
            vertices,
            rays,
            dual_cell: flat,
            dominant_set: tau.clone(),
            orbit: 0,
            parent: None,
            quotient: None,
        });
    }
    cells.sort_by(|a, b| (a.dim, &a.vertices, &a.rays).cmp(&(b.dim, &b.vertices, &b.rays)));
    for (i, c) in cells.iter_mut().enumerate() {
        c.id = i;
    }
    TropicalComplex { ambient_dim: d, poly: poly.clone(), cells, smooth: is_smooth(subdiv).is_ok(), fan: None }
}

fn project(x: &[Rational], uinv: &[Vec<i64>], skip: usize) -> Vec<Rational> {
    // coordinates of the row vector x in the basis given by the rows of U
    let d = x.len();
    (skip..d)
        .map(|j| (0..d).fold(Rational::zero(), |acc, i| acc + &x[i] * rat(uinv[i][j])))
        .collect()
}

/// Add the strata of the closure in the boundary orbits of the toric
/// variety of `fan`.
pub fn boundary_strata(complex: &TropicalComplex, fan: &Fan) -> Result<TropicalComplex, ComplexError> {
    let d = complex.ambient_dim;
    if fan.dim != d {
        return Err(ComplexError::DimensionMismatch { fan: fan.dim, ambient: d });
    }
    fan_is_unimodular(fan).map_err(ComplexError::FanNotUnimodular)?;
    let points: Vec<LatticePoint> = complex.poly.monomials.iter().map(|m| m.exponent.clone()).collect();
    let faces: Vec<Vec<usize>> = fan.rays.iter().map(|r| maximizing_face(&points, r)).collect();
    for (id, cone) in fan.cones.iter().enumerate().skip(1) {
        let common = cone.iter().skip(1).fold(faces[cone[0]].clone(), |acc, &r| {
            acc.into_iter().filter(|i| faces[r].contains(i)).collect()
        });
        if common.is_empty() {
            return Err(ComplexError::NotRefinement(id));
        }
    }

    let mut out: Vec<TropCell> = complex.dense_cells().cloned().collect();
    let mut strata: BTreeMap<(usize, Vec<usize>), TropCell> = BTreeMap::new();
    for parent in complex.dense_cells().filter(|c| !c.bounded) {
        for (sigma, cone) in fan.cones.iter().enumerate().skip(1) {
            if !cone.iter().all(|&r| parent.dominant_set.iter().all(|i| faces[r].contains(i))) {
                continue;
            }
            let l = cone.len();
            let frame = extend_to_unimodular(&fan.cone_rays(sigma), d)?;
            let uinv = unimodular_inverse(&frame.matrix)?;
            let mut vertices: Vec<RationalVector> =
                parent.vertices.iter().map(|v| RationalVector(project(v, &uinv, l))).collect();
            vertices.sort();
            vertices.dedup();
            let mut rays: Vec<Vec<i64>> = Vec::new();
            for r in &parent.rays {
                let img = project(&r.iter().map(|&c| rat(c)).collect::<Vec<_>>(), &uinv, l);
                let ints: Vec<i64> = img.iter().map(|c| c.to_integer().try_into().expect("integral image")).collect();
                if let Ok(p) = primitive(&ints) {
                    rays.push(p);
                }
            }
            rays.sort();
            rays.dedup();
            let key = (sigma, parent.dominant_set.clone());
            strata.entry(key).or_insert(TropCell {
                id: 0,
                dim: parent.dim - l,
                bounded: rays.is_empty(),
                vertices,
                rays,
                dual_cell: parent.dual_cell,
                dominant_set: parent.dominant_set.clone(),
                orbit: sigma,
                parent: Some(parent.id),
                quotient: Some(frame.matrix),
            });
        }
    }
    let base = out.len();
    for (i, (_, mut c)) in strata.into_iter().enumerate() {
        c.id = base + i;
        out.push(c);
    }
    Ok(TropicalComplex {
        ambient_dim: d,
        poly: complex.poly.clone(),
        cells: out,
        smooth: complex.smooth,
        fan: Some(fan.clone()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize)]
pub struct CellCounts {
    pub total: Vec<usize>,
    pub bounded: Vec<usize>,
    pub unbounded: Vec<usize>,
    pub boundary: Vec<usize>,
}

pub fn cell_counts(complex: &TropicalComplex) -> CellCounts {
    let top = complex.cells.iter().map(|c| c.dim + 1).max().unwrap_or(0);
    let mut counts = CellCounts {
        total: vec![0; top],
        bounded: vec![0; top],
        unbounded: vec![0; top],
        boundary: vec![0; top],
    };
    for c in &complex.cells {
        counts.total[c.dim] += 1;
        if !c.is_dense() {
            counts.boundary[c.dim] += 1;
        } else if c.bounded {
            counts.bounded[c.dim] += 1;
        } else {
            counts.unbounded[c.dim] += 1;
        }
    }
    counts
}
