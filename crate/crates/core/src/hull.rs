//! Exact convex hulls in dimension at most 4.
//!
//! Full-dimensional input goes through an incremental beneath-beyond pass
//! over a simplicial boundary; coplanar simplicial facets are merged
//! afterwards so every facet carries all input points on its hyperplane.
//! Lower-dimensional input is hulled inside an affine chart of its span.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::lattice::{affine_dim, dot, nullspace, primitive_direction, rank, Rational, RationalVector};

pub const MAX_DIM: usize = 4;

/// Supporting hyperplane `normal · X = offset` with `normal · p ≤ offset`
/// on the hull. `points` holds every input index on the hyperplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<BigInt>,
    pub offset: Rational,
    pub points: Vec<usize>,
}

impl Facet {
    pub fn normal_rational(&self) -> Vec<Rational> {
        self.normal.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        dot(&self.normal_rational(), x) - &self.offset
    }
}

/// Affine chart `X = origin + Σ y_j basis_j` of a lower-dimensional span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineChart {
    pub origin: RationalVector,
    pub basis: Vec<RationalVector>,
    pivots: Vec<usize>,
}

impl AffineChart {
    /// Local coordinates of a point known to lie in the span.
    pub fn local(&self, x: &[Rational]) -> Vec<Rational> {
        // basis rows are in reduced echelon form on the pivot columns
        self.pivots.iter().map(|&p| &x[p] - &self.origin[p]).collect()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        let y = self.local(x);
        let mut back = self.origin.0.clone();
        for (yj, b) in y.iter().zip(&self.basis) {
            for (c, bc) in back.iter_mut().zip(b.iter()) {
                *c += yj * bc;
            }
        }
        back.as_slice() == x
    }
}

#[derive(Debug, Clone)]
pub struct HullComplex {
    pub ambient_dim: usize,
    /// Affine dimension of the hull.
    pub dim: usize,
    pub points: Vec<RationalVector>,
    /// `faces[k]` lists the `k`-dimensional faces as sorted index sets.
    pub faces: Vec<Vec<Vec<usize>>>,
    /// Facets; for degenerate input the normals live in `chart` coordinates.
    pub facets: Vec<Facet>,
    pub chart: Option<AffineChart>,
}

impl HullComplex {
    pub fn is_degenerate(&self) -> bool {
        self.chart.is_some()
    }

    /// Indices of hull vertices, one per distinct vertex position.
    pub fn vertices(&self) -> Vec<usize> {
        self.faces.first().map(|f| f.iter().map(|s| s[0]).collect()).unwrap_or_default()
    }

    pub fn all_faces(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> {
        self.faces.iter().enumerate().flat_map(|(k, fs)| fs.iter().map(move |f| (k, f)))
    }

    /// Whether `x` lies in the (closed) hull.
    pub fn contains(&self, x: &[Rational]) -> bool {
        let local;
        let y: &[Rational] = match &self.chart {
            Some(chart) => {
                if !chart.contains(x) {
                    return false;
                }
                local = chart.local(x);
                &local
            }
            None => x,
        };
        if self.dim == 0 {
            return self.points[0].0.as_slice() == x;
        }
        self.facets.iter().all(|f| !f.evaluate(y).is_positive())
    }
    /// Pulling triangulation of a face (given by its point set and
    /// dimension) into simplices on hull vertices.
    pub fn triangulate_face(&self, face: &[usize], k: usize) -> Vec<Vec<usize>> {
        let verts: Vec<usize> =
            self.faces[0].iter().filter(|v| face.contains(&v[0])).map(|v| v[0]).collect();
        if k == 0 {
            return vec![vec![verts[0]]];
        }
        let apex = *verts.iter().min().unwrap();
        let mut out = Vec::new();
        for sub in &self.faces[k - 1] {
            if sub.contains(&apex) || !sub.iter().all(|i| face.contains(i)) {
                continue;
            }
            for mut s in self.triangulate_face(sub, k - 1) {
                s.push(apex);
                s.sort_unstable();
                out.push(s);
            }
        }
        out
    }

    /// Triangulation of the whole hull.
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let top = self.faces[self.dim][0].clone();
        self.triangulate_face(&top, self.dim)
    }
}

/// Convex hull with its full face lattice.
///
/// # Panics
/// Panics on an empty point list, mixed dimensions, or dimension above
/// [`MAX_DIM`].
pub fn convex_hull(points: &[RationalVector]) -> HullComplex {
    assert!(!points.is_empty(), "convex hull of no points");
    let d = points[0].dim();
    assert!((1..=MAX_DIM).contains(&d), "hull dimension {d} unsupported");
    assert!(points.iter().all(|p| p.dim() == d), "mixed dimensions");

    let refs: Vec<&[Rational]> = points.iter().map(|p| p.0.as_slice()).collect();
    let k = affine_dim(&refs);
    if k < d {
        return degenerate_hull(points, k);
    }
    let facets = full_dim_facets(points);
    let faces = face_lattice(points, &facets, d);
    HullComplex { ambient_dim: d, dim: d, points: points.to_vec(), faces, facets, chart: None }
}

fn degenerate_hull(points: &[RationalVector], k: usize) -> HullComplex {
    let d = points[0].dim();
    let origin = points.iter().min().unwrap().clone();
    if k == 0 {
        let all: Vec<usize> = (0..points.len()).collect();
        return HullComplex {
            ambient_dim: d,
            dim: 0,
            points: points.to_vec(),
            faces: vec![vec![all]],
            facets: Vec::new(),
            chart: Some(AffineChart { origin, basis: Vec::new(), pivots: Vec::new() }),
        };
    }
    let mut diffs: Vec<Vec<Rational>> = points.iter().map(|p| p.sub(&origin).0).collect();
    let pivots = crate::lattice::rref(&mut diffs);
    let basis: Vec<RationalVector> = diffs[..pivots.len()].iter().cloned().map(RationalVector).collect();
    let chart = AffineChart { origin, basis, pivots };
    let local: Vec<RationalVector> = points.iter().map(|p| RationalVector(chart.local(p))).collect();
    let inner = convex_hull(&local);
    HullComplex {
        ambient_dim: d,
        dim: inner.dim,
        points: points.to_vec(),
        faces: inner.faces,
        facets: inner.facets,
        chart: Some(chart),
    }
}

struct Simplicial {
    verts: Vec<usize>,
    normal: Vec<Rational>,
    offset: Rational,
}

fn oriented_plane(pts: &[RationalVector], verts: &[usize], interior: &[Rational]) -> (Vec<Rational>, Rational) {
    let base = &pts[verts[0]];
    let diffs: Vec<Vec<Rational>> = verts[1..].iter().map(|&v| pts[v].sub(base).0).collect();
    let ns = nullspace(&diffs, base.dim());
    assert_eq!(ns.len(), 1, "facet vertices not affinely independent");
    let mut normal = ns.into_iter().next().unwrap();
    let mut offset = dot(&normal, base);
    if dot(&normal, interior) > offset {
        normal = normal.into_iter().map(|c| -c).collect();
        offset = -offset;
    }
    (normal, offset)
}

fn full_dim_facets(points: &[RationalVector]) -> Vec<Facet> {
    let d = points[0].dim();
    // distinct positions, processed in lexicographic order
    let mut uniq: Vec<RationalVector> = points.to_vec();
    uniq.sort();
    uniq.dedup();

    if d == 1 {
        let lo = uniq.first().unwrap()[0].clone();
        let hi = uniq.last().unwrap()[0].clone();
        let on = |v: &Rational| (0..points.len()).filter(|&i| &points[i][0] == v).collect::<Vec<_>>();
        return vec![
            Facet { normal: vec![BigInt::from(-1)], offset: -lo.clone(), points: on(&lo) },
            Facet { normal: vec![BigInt::from(1)], offset: hi.clone(), points: on(&hi) },
        ];
    }

    let mut simplex = vec![0usize];
    for i in 1..uniq.len() {
        if simplex.len() == d + 1 {
            break;
        }
        let mut rows: Vec<Vec<Rational>> = simplex[1..].iter().map(|&s| uniq[s].sub(&uniq[0]).0).collect();
        rows.push(uniq[i].sub(&uniq[0]).0);
        if rank(&rows) == rows.len() {
            simplex.push(i);
        }
    }
    assert_eq!(simplex.len(), d + 1, "full-dimensional input without a spanning simplex");
    let mut interior = vec![Rational::zero(); d];
    for &s in &simplex {
        for (c, x) in interior.iter_mut().zip(uniq[s].iter()) {
            *c += x;
        }
    }
    let count = Rational::from_integer(BigInt::from(d as u64 + 1));
    for c in interior.iter_mut() {
        *c /= &count;
    }

    let mut facets: Vec<Simplicial> = (0..=d)
        .map(|skip| {
            let verts: Vec<usize> = simplex.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
            let (normal, offset) = oriented_plane(&uniq, &verts, &interior);
            Simplicial { verts, normal, offset }
        })
        .collect();

    let in_simplex: BTreeSet<usize> = simplex.iter().copied().collect();
    for p in (0..uniq.len()).filter(|i| !in_simplex.contains(i)) {
        let visible: Vec<bool> = facets.iter().map(|f| dot(&f.normal, &uniq[p]) > f.offset).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for (f, _) in facets.iter().zip(&visible).filter(|(_, &v)| v) {
            for skip in 0..f.verts.len() {
                let ridge: Vec<usize> =
                    f.verts.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
                *ridges.entry(ridge).or_default() += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> = ridges.into_iter().filter(|(_, c)| *c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        let mut kept: Vec<Simplicial> =
            facets.into_iter().zip(visible).filter(|(_, v)| !v).map(|(f, _)| f).collect();
        for ridge in horizon {
            let mut verts = ridge;
            verts.push(p);
            verts.sort_unstable();
            let (normal, offset) = oriented_plane(&uniq, &verts, &interior);
            kept.push(Simplicial { verts, normal, offset });
        }
        facets = kept;
    }

    // merge coplanar simplicial facets by canonical hyperplane
    let mut merged: BTreeMap<(Vec<BigInt>, Rational), ()> = BTreeMap::new();
    for f in &facets {
        let normal = primitive_direction(&f.normal).expect("zero facet normal");
        let nr: Vec<Rational> = normal.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let offset = dot(&nr, &uniq[f.verts[0]]);
        merged.insert((normal, offset), ());
    }
    merged
        .into_keys()
        .map(|(normal, offset)| {
            let nr: Vec<Rational> = normal.iter().map(|c| Rational::from_integer(c.clone())).collect();
            let on: Vec<usize> = (0..points.len()).filter(|&i| dot(&nr, &points[i]) == offset).collect();
            Facet { normal, offset, points: on }
        })
        .collect()
}

/// Faces as the intersection closure of the facet point sets, graded by
/// affine dimension; the top entry is the whole point set.
fn face_lattice(points: &[RationalVector], facets: &[Facet], d: usize) -> Vec<Vec<Vec<usize>>> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: Vec<Vec<usize>> = Vec::new();
    for f in facets {
        if seen.insert(f.points.clone()) {
            queue.push(f.points.clone());
        }
    }
    while let Some(face) = queue.pop() {
        for f in facets {
            let meet: Vec<usize> = face.iter().copied().filter(|i| f.points.binary_search(i).is_ok()).collect();
            if !meet.is_empty() && seen.insert(meet.clone()) {
                queue.push(meet);
            }
        }
    }
    let mut graded: Vec<Vec<Vec<usize>>> = vec![Vec::new(); d + 1];
    for face in seen {
        let refs: Vec<&[Rational]> = face.iter().map(|&i| points[i].0.as_slice()).collect();
        graded[affine_dim(&refs)].push(face);
    }
    graded[d].push((0..points.len()).collect());
    graded
}
