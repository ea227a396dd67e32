//! Regular subdivision of the Newton polytope induced by the valuations.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::hull::{convex_hull, HullComplex};
use crate::lattice::{normalized_volume, LatticePoint, Rational, RationalVector};
use crate::poly::{newton_polytope, ValuatedPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivisionError {
    #[error("Newton polytope has dimension {dim}, expected {expected}")]
    Degenerate { dim: usize, expected: usize },
    #[error("ambient dimension {0} unsupported (at most 3)")]
    UnsupportedDimension(usize),
}

/// An upper facet of the lifted point set, i.e. a maximal cell together
/// with the point `X` where all its affine forms tie.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalCell {
    pub points: Vec<usize>,
    pub dual_vertex: RationalVector,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct RegularSubdivision {
    pub ambient_dim: usize,
    pub points: Vec<LatticePoint>,
    pub lift: Vec<i64>,
    /// `cells[k]` lists the `k`-dimensional cells as sorted index sets.
    pub cells: Vec<Vec<Vec<usize>>>,
    pub maximal: Vec<MaximalCell>,
    pub newton: HullComplex,
}

impl RegularSubdivision {
    pub fn all_cells(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> {
        self.cells.iter().enumerate().flat_map(|(k, cs)| cs.iter().map(move |c| (k, c)))
    }

    pub fn dim_of(&self, cell: &[usize]) -> Option<usize> {
        self.cells.iter().position(|cs| cs.iter().any(|c| c == cell))
    }

    /// Whether every point of the cell lies on the boundary of the Newton polytope.
    pub fn on_boundary(&self, cell: &[usize]) -> bool {
        self.newton.facets.iter().any(|f| cell.iter().all(|i| f.points.binary_search(i).is_ok()))
    }

    pub fn cell_points(&self, cell: &[usize]) -> Vec<LatticePoint> {
        cell.iter().map(|&i| self.points[i].clone()).collect()
    }
}

pub fn regular_subdivision(poly: &ValuatedPolynomial) -> Result<RegularSubdivision, SubdivisionError> {
    let d = poly.ambient_dim;
    if !(1..=3).contains(&d) {
        return Err(SubdivisionError::UnsupportedDimension(d));
    }
    let newton = newton_polytope(poly);
    if newton.dim != d {
        return Err(SubdivisionError::Degenerate { dim: newton.dim, expected: d });
    }
    let points: Vec<LatticePoint> = poly.monomials.iter().map(|m| m.exponent.clone()).collect();
    let lift = poly.valuations();
    let npts = points.len();

    let mut lifted: Vec<RationalVector> = points
        .iter()
        .zip(&lift)
        .map(|(m, &v)| {
            let mut c = m.to_rational().0;
            c.push(Rational::from_integer(v.into()));
            RationalVector(c)
        })
        .collect();
    // a point strictly below every upper face keeps the lifted hull full-dimensional
    let mut below = vec![Rational::zero(); d + 1];
    for p in &lifted {
        for (b, c) in below.iter_mut().zip(p.iter()) {
            *b += c;
        }
    }
    let count = Rational::from_integer(BigInt::from(npts));
    for b in below.iter_mut() {
        *b /= &count;
    }
    below[d] = Rational::from_integer((lift.iter().min().unwrap() - 1).into());
    lifted.push(RationalVector(below));

    let hull = convex_hull(&lifted);
    let upper: Vec<&crate::hull::Facet> = hull.facets.iter().filter(|f| f.normal[d].is_positive()).collect();
    let maximal: Vec<MaximalCell> = upper
        .iter()
        .map(|f| {
            let c = Rational::from_integer(f.normal[d].clone());
            let dual_vertex =
                RationalVector(f.normal[..d].iter().map(|a| Rational::from_integer(a.clone()) / &c).collect());
            MaximalCell { points: f.points.clone(), dual_vertex, value: &f.offset / &c }
        })
        .collect();

    let mut cells: Vec<Vec<Vec<usize>>> = vec![Vec::new(); d + 1];
    for (k, face) in hull.all_faces() {
        if k > d || face.contains(&npts) {
            continue;
        }
        if maximal.iter().any(|m| face.iter().all(|i| m.points.binary_search(i).is_ok())) {
            cells[k].push(face.clone());
        }
    }
    for cs in cells.iter_mut() {
        cs.sort();
    }
    let mut maximal = maximal;
    maximal.sort_by(|a, b| a.points.cmp(&b.points));
    Ok(RegularSubdivision { ambient_dim: d, points, lift, cells, maximal, newton })
}

/// Why a subdivision fails to be unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmoothnessFailure {
    NotSimplex { cell: Vec<usize>, points: usize },
    Volume { cell: Vec<usize>, volume: u64 },
}

impl SmoothnessFailure {
    pub fn cell(&self) -> &[usize] {
        match self {
            SmoothnessFailure::NotSimplex { cell, .. } | SmoothnessFailure::Volume { cell, .. } => cell,
        }
    }
}

impl std::fmt::Display for SmoothnessFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SmoothnessFailure::NotSimplex { cell, points } => {
                write!(f, "maximal cell {cell:?} has {points} points, not a simplex")
            }
            SmoothnessFailure::Volume { cell, volume } => {
                write!(f, "maximal cell {cell:?} has normalized volume {volume}")
            }
        }
    }
}

/// `Ok(())` when every maximal cell is a unimodular simplex.
pub fn is_smooth(subdiv: &RegularSubdivision) -> Result<(), SmoothnessFailure> {
    let d = subdiv.ambient_dim;
    for m in &subdiv.maximal {
        if m.points.len() != d + 1 {
            return Err(SmoothnessFailure::NotSimplex { cell: m.points.clone(), points: m.points.len() });
        }
        let vol = normalized_volume(&subdiv.cell_points(&m.points)).expect("simplex cardinality checked");
        if vol != 1 {
            return Err(SmoothnessFailure::Volume { cell: m.points.clone(), volume: vol });
        }
    }
    Ok(())
}

/// Normalized volume of a full-dimensional lattice polytope.
pub fn polytope_normalized_volume(hull: &HullComplex) -> u64 {
    let ints: Vec<LatticePoint> = hull
        .points
        .iter()
        .map(|p| LatticePoint(p.to_ints().expect("lattice polytope")))
        .collect();
    hull.triangulate()
        .iter()
        .map(|s| normalized_volume(&s.iter().map(|&i| ints[i].clone()).collect::<Vec<_>>()).unwrap())
        .sum()
}
