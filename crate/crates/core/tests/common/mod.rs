//! Generators and brute-force oracles shared by the property and
//! acceptance suites. Every check returns `Err(description)` on mismatch.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropmono::hull::convex_hull;
use tropmono::lattice::{affine_dim, determinant, rank, rat, solve, Rational, RationalVector};
use tropmono::monodromy::{monodromy_word, standard_frame, twist_profile, twist_profile_in};
use tropmono::poly::{parse_polynomial, ValuatedPolynomial};
use tropmono::subdivision::{is_smooth, regular_subdivision};
use tropmono::tropical::{build_complex, trop_eval, TropicalComplex};

pub const HYPELLIP: &str = "x2^2 + x2*(x1^3 + t^-2*x1^2 + t^-2*x1 + t^-1) + 1";
pub const ELLIPTIC: &str = "t^-1 + x1 + x2 + x1^-1*x2^-1";
pub const G: &str = "t^-1 + x1 + x2 + x3 + x1^-1*x2^-1*x3^-1";

pub fn complex_of(poly: &ValuatedPolynomial) -> TropicalComplex {
    build_complex(poly, &regular_subdivision(poly).unwrap())
}

pub fn complex(text: &str, d: usize) -> TropicalComplex {
    complex_of(&parse_polynomial(text, d).unwrap())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Rational {
    Rational::new(rng.random_range(lo * den..=hi * den).into(), den.into())
}

// ---------------------------------------------------------------- hull

/// Facets by exhaustive search over hyperplanes through `d` points.
fn brute_facets(pts: &[Vec<i64>], d: usize) -> BTreeSet<Vec<usize>> {
    let n = pts.len();
    let mut out = BTreeSet::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let base = &pts[idx[0]];
        let rows: Vec<Vec<i64>> = idx[1..].iter().map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        // normal by cofactors: det of rows with a unit vector appended
        let normal: Vec<i64> = (0..d)
            .map(|k| {
                let mut m = rows.clone();
                let mut e = vec![0; d];
                e[k] = 1;
                m.push(e);
                i64::try_from(determinant(&m)).unwrap()
            })
            .collect();
        if normal.iter().any(|&c| c != 0) {
            let side: Vec<i64> =
                pts.iter().map(|p| p.iter().zip(base).zip(&normal).map(|((a, b), c)| (a - b) * c).sum()).collect();
            if side.iter().all(|&s| s <= 0) || side.iter().all(|&s| s >= 0) {
                out.insert((0..n).filter(|&i| side[i] == 0).collect::<Vec<_>>());
            }
        }
        // next combination
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < n - d + k {
                idx[k] += 1;
                for j in k + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn set_dim(pts: &[Vec<i64>], set: &[usize]) -> usize {
    let r: Vec<Vec<Rational>> = set.iter().map(|&i| pts[i].iter().map(|&c| rat(c)).collect()).collect();
    let refs: Vec<&[Rational]> = r.iter().map(|v| v.as_slice()).collect();
    affine_dim(&refs)
}

/// Face lattice (all proper faces by dimension) from brute-force facets.
pub fn brute_faces(pts: &[Vec<i64>], d: usize) -> Vec<BTreeSet<Vec<usize>>> {
    let facets = brute_facets(pts, d);
    let mut all: BTreeSet<Vec<usize>> = facets.clone();
    let mut frontier: Vec<Vec<usize>> = facets.iter().cloned().collect();
    while let Some(f) = frontier.pop() {
        for g in &facets {
            let i: Vec<usize> = f.iter().copied().filter(|x| g.contains(x)).collect();
            if !i.is_empty() && all.insert(i.clone()) {
                frontier.push(i);
            }
        }
    }
    let mut by_dim = vec![BTreeSet::new(); d];
    for f in all {
        by_dim[set_dim(pts, &f)].insert(f);
    }
    by_dim
}

pub fn random_point_set<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<i64>> {
    let n = rng.random_range(d + 1..=8);
    (0..n).map(|_| (0..d).map(|_| rng.random_range(-2..=2)).collect()).collect()
}

/// Faces and membership of the incremental hull against the oracle.
pub fn check_hull(pts: &[Vec<i64>], d: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let rv: Vec<RationalVector> = pts.iter().map(|p| RationalVector::from_ints(p)).collect();
    let hull = convex_hull(&rv);
    let all: Vec<usize> = (0..pts.len()).collect();
    let dim = set_dim(pts, &all);
    if hull.dim != dim {
        return Err(format!("{pts:?}: dim {} vs {dim}", hull.dim));
    }
    if dim < d {
        return Ok(());
    }
    let oracle = brute_faces(pts, d);
    for k in 0..d {
        let got: BTreeSet<Vec<usize>> = hull.faces[k].iter().cloned().collect();
        if got != oracle[k] {
            return Err(format!("{pts:?}: {k}-faces {got:?} vs {:?}", oracle[k]));
        }
    }
    let facets: Vec<Vec<usize>> = oracle[d - 1].iter().cloned().collect();
    for _ in 0..20 {
        let x: Vec<Rational> = (0..d).map(|_| random_rational(rng, -3, 3, 4)).collect();
        // inside iff x is on the inner side of every oracle facet
        let inside = facets.iter().all(|f| {
            let base = &pts[f[0]];
            let others: Vec<usize> = (0..pts.len()).filter(|i| !f.contains(i)).collect();
            let rows: Vec<Vec<Rational>> =
                f.iter().map(|&i| pts[i].iter().zip(base).map(|(a, b)| rat(a - b)).collect()).collect();
            let normal = nullspace_vector(&rows, d);
            let eval = |p: &[Rational]| -> Rational {
                p.iter().zip(base).zip(&normal).map(|((a, b), c)| (a - rat(*b)) * c).sum()
            };
            let s = eval(&pts[others[0]].iter().map(|&c| rat(c)).collect::<Vec<_>>());
            let v = eval(&x);
            v.is_zero() || v.is_positive() == s.is_positive()
        });
        if hull.contains(&x) != inside {
            return Err(format!("{pts:?}: membership of {x:?}"));
        }
    }
    Ok(())
}

fn nullspace_vector(rows: &[Vec<Rational>], d: usize) -> Vec<Rational> {
    // try unit right-hand sides until the system with an extra row is solvable
    for k in 0..d {
        let mut a = rows.to_vec();
        let mut e = vec![Rational::zero(); d];
        e[k] = rat(1);
        a.push(e);
        let mut b = vec![Rational::zero(); rows.len()];
        b.push(rat(1));
        if rank(&a) > rank(rows) {
            if let Some(x) = solve(&a, &b) {
                return x;
            }
        }
    }
    panic!("no normal")
}

// ---------------------------------------------------------- smooth inputs

/// A random polynomial with a smooth (unimodular) regular subdivision.
pub fn random_smooth<R: Rng>(rng: &mut R, d: usize) -> ValuatedPolynomial {
    loop {
        let side = if d == 2 { rng.random_range(1..=3) } else { rng.random_range(1..=2) };
        let mut pts: Vec<Vec<i64>> = Vec::new();
        let grid: Vec<Vec<i64>> = if d == 2 {
            (0..=side).flat_map(|a| (0..=side).map(move |b| vec![a, b])).collect()
        } else {
            (0..=side).flat_map(|a| (0..=side).flat_map(move |b| (0..=side).map(move |c| vec![a, b, c]))).collect()
        };
        for p in grid {
            if rng.random_bool(0.7) {
                pts.push(p);
            }
        }
        if pts.len() < d + 1 {
            continue;
        }
        // a strictly concave lift keeps every point, noise breaks ties
        let scale = rng.random_range(4..=8);
        let terms: Vec<(Vec<i64>, i64, Complex64)> = pts
            .iter()
            .map(|p| {
                let v = -scale * p.iter().map(|c| c * c).sum::<i64>() + rng.random_range(-1..=1) + 10 * p[0];
                (p.clone(), v, Complex64::new(1.0, 0.0))
            })
            .collect();
        let poly = ValuatedPolynomial::from_terms(d, terms);
        let Ok(sub) = regular_subdivision(&poly) else { continue };
        if is_smooth(&sub).is_ok() {
            return poly;
        }
    }
}

/// `dim μ + dim τ = d` and `|A_μ| = d + 1 − dim μ` for every cell.
pub fn check_duality(poly: &ValuatedPolynomial) -> Result<(), String> {
    let d = poly.ambient_dim;
    let sub = regular_subdivision(poly).unwrap();
    let c = build_complex(poly, &sub);
    let cells: Vec<(usize, &Vec<usize>)> = sub.all_cells().collect();
    for cell in &c.cells {
        let (tau_dim, tau) = cells[cell.dual_cell];
        if cell.dim + tau_dim != d {
            return Err(format!("{poly}: cell {} dim {} dual dim {tau_dim}", cell.id, cell.dim));
        }
        if cell.dominant_set.len() != d + 1 - cell.dim || tau != &cell.dominant_set {
            return Err(format!("{poly}: cell {} dominant set {:?}", cell.id, cell.dominant_set));
        }
    }
    Ok(())
}

fn argmax_oracle(poly: &ValuatedPolynomial, x: &[Rational]) -> Vec<usize> {
    let vals: Vec<Rational> = poly
        .monomials
        .iter()
        .map(|m| m.exponent.iter().zip(x).fold(rat(m.valuation), |acc, (&a, xi)| acc + rat(a) * xi))
        .collect();
    let best = vals.iter().max().unwrap().clone();
    (0..vals.len()).filter(|&i| vals[i] == best).collect()
}

/// Random points of each cell (positive combinations of its vertices and
/// rays) have exactly the cell's dominant set as argmax; random points of
/// the ambient space are in a cell iff the argmax contains its dominant set.
pub fn check_membership(poly: &ValuatedPolynomial, points: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let c = complex_of(poly);
    let d = poly.ambient_dim;
    for k in 0..points {
        let cell = &c.cells[k % c.cells.len()];
        let wts: Vec<Rational> = cell.vertices.iter().map(|_| random_rational(rng, 1, 4, 3)).collect();
        let total: Rational = wts.iter().sum();
        let mut x = vec![Rational::zero(); d];
        for (v, w) in cell.vertices.iter().zip(&wts) {
            for i in 0..d {
                x[i] += &v.0[i] * w / &total;
            }
        }
        for r in &cell.rays {
            let s = random_rational(rng, 1, 5, 7);
            for i in 0..d {
                x[i] += rat(r[i]) * &s;
            }
        }
        let am = argmax_oracle(poly, &x);
        if am != cell.dominant_set {
            return Err(format!("{poly}: point {x:?} of cell {} has argmax {am:?}", cell.id));
        }
        if !c.contains(cell.id, &x) {
            return Err(format!("{poly}: cell {} does not contain its own point", cell.id));
        }
        let y: Vec<Rational> = (0..d).map(|_| random_rational(rng, -6, 6, 5)).collect();
        let am = argmax_oracle(poly, &y);
        for other in &c.cells {
            let expect = other.dominant_set.iter().all(|i| am.contains(i));
            if c.contains(other.id, &y) != expect {
                return Err(format!("{poly}: membership of {y:?} in cell {}", other.id));
            }
        }
        if am.len() >= 2 && c.cell_by_dominant(&am).is_none() {
            return Err(format!("{poly}: tie set {am:?} at {y:?} is no cell"));
        }
    }
    Ok(())
}

// ------------------------------------------------------------ monodromy

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let rest: Vec<usize> = items.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &y)| y).collect();
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Twist widths of every bounded cell agree for every ordering of its
/// dominant monomials.
pub fn check_frame_invariance(c: &TropicalComplex) -> Result<(), String> {
    for cell in c.cells.iter().filter(|x| x.bounded) {
        let mut reference = twist_profile(c, cell.id).map_err(|e| e.to_string())?.widths();
        reference.sort();
        for order in permutations(&cell.dominant_set) {
            let frame = standard_frame(c, cell.id, Some(&order)).map_err(|e| e.to_string())?;
            let mut w = twist_profile_in(c, frame).map_err(|e| e.to_string())?.widths();
            w.sort();
            if w != reference {
                return Err(format!("cell {} order {order:?}: widths {w:?} vs {reference:?}", cell.id));
            }
        }
    }
    Ok(())
}

pub fn random_unimodular<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..rng.random_range(1..=6) {
        let i = rng.random_range(0..d);
        let j = rng.random_range(0..d);
        if i == j {
            m[i].iter_mut().for_each(|c| *c = -*c);
        } else {
            let k = rng.random_range(-2..=2);
            for col in 0..d {
                m[i][col] += k * m[j][col];
            }
        }
    }
    let mut rows: Vec<usize> = (0..d).collect();
    rows.shuffle(rng);
    rows.into_iter().map(|i| m[i].clone()).collect()
}

/// Word exponents are unchanged by `m ↦ U m + s` with `|det U| = 1`.
pub fn check_covariance(poly: &ValuatedPolynomial, u: &[Vec<i64>], shift: &[i64]) -> Result<(), String> {
    if !determinant(u).abs().is_one() {
        return Err(format!("not unimodular: {u:?}"));
    }
    let before = monodromy_word(&complex_of(poly)).map_err(|e| e.to_string())?.sorted_exponents();
    let moved = poly.transform_exponents(u, shift);
    let after = monodromy_word(&complex_of(&moved)).map_err(|e| e.to_string())?.sorted_exponents();
    if before != after {
        return Err(format!("{poly} under {u:?}: {before:?} vs {after:?}"));
    }
    Ok(())
}

/// Lattice length of bounded edges with integral endpoints equals the
/// number of lattice points on the segment minus one.
pub fn check_lattice_lengths(c: &TropicalComplex) -> Result<(), String> {
    for e in c.bounded_edges() {
        let (Some(a), Some(b)) = (e.vertices[0].to_ints(), e.vertices[1].to_ints()) else { continue };
        let lo: Vec<i64> = a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect();
        let hi: Vec<i64> = a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect();
        let mut count = 0;
        let mut p = lo.clone();
        'outer: loop {
            // p on the segment iff p − a is parallel to b − a
            let u: Vec<i64> = p.iter().zip(&a).map(|(x, y)| x - y).collect();
            let v: Vec<i64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
            let parallel = (0..u.len()).all(|i| (0..u.len()).all(|j| u[i] * v[j] == u[j] * v[i]));
            if parallel {
                count += 1;
            }
            for k in 0..p.len() {
                if p[k] < hi[k] {
                    p[k] += 1;
                    continue 'outer;
                }
                p[k] = lo[k];
            }
            break;
        }
        let len = tropmono::monodromy::lattice_length(e).map_err(|x| x.to_string())?;
        if len != rat(count - 1) {
            return Err(format!("edge {}: length {len} vs {} lattice points", e.id, count));
        }
    }
    Ok(())
}

/// `trop(F)` is convex: midpoint value at most the mean.
pub fn check_convexity(poly: &ValuatedPolynomial, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = poly.ambient_dim;
    for _ in 0..50 {
        let x: Vec<Rational> = (0..d).map(|_| random_rational(rng, -8, 8, 3)).collect();
        let y: Vec<Rational> = (0..d).map(|_| random_rational(rng, -8, 8, 3)).collect();
        let mid: Vec<Rational> = x.iter().zip(&y).map(|(a, b)| (a + b) / rat(2)).collect();
        if trop_eval(poly, &mid) * rat(2) > trop_eval(poly, &x) + trop_eval(poly, &y) {
            return Err(format!("{poly}: convexity fails at {x:?}, {y:?}"));
        }
    }
    Ok(())
}
