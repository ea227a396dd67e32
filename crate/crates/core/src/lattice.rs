//! Exact lattice primitives: integer points, rational vectors, content and
//! primitive vectors, determinants, normalized simplex volumes and unimodular
//! completion of partial lattice bases.

use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("the zero vector has no primitive direction")]
    ZeroVector,
    #[error("expected {expected} points in dimension {dim}, got {got}")]
    WrongCardinality { expected: usize, dim: usize, got: usize },
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("vectors do not extend to a lattice basis (maximal-minor gcd is {gcd})")]
    NotExtendable { gcd: BigInt },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integer overflow while converting {0}")]
    Overflow(String),
}

/// An exponent vector `m` in the character lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector(self.0.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> Vec<i64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    /// Pairing `m · X` with a rational point.
    pub fn dot(&self, x: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(x)
            .map(|(&m, xi)| xi * Rational::from_integer(m.into()))
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    pub fn dot_f64(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&m, xi)| m as f64 * xi).sum()
    }
}

impl Deref for LatticePoint {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A point of `M_R` or `N_R` with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn from_ints(coords: &[i64]) -> Self {
        RationalVector(coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        RationalVector(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn dot(&self, other: &[Rational]) -> Rational {
        dot(&self.0, other)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    /// Integer coordinates, if every entry is integral and fits in `i64`.
    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational_to_f64).collect()
    }

    /// Coordinates as `"p/q"` strings (integers print without denominator).
    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|c| c.to_string()).collect()
    }
}

impl Deref for RationalVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// gcd of the absolute values of the entries; 0 for the zero vector.
pub fn content(v: &[i64]) -> u64 {
    v.iter().fold(0u64, |g, &c| g.gcd(&c.unsigned_abs()))
}

/// `v / content(v)`. Dividing by a positive number keeps every sign.
pub fn primitive(v: &[i64]) -> Result<Vec<i64>, LatticeError> {
    let g = content(v);
    if g == 0 {
        return Err(LatticeError::ZeroVector);
    }
    Ok(v.iter().map(|&c| c / g as i64).collect())
}

/// Scale a nonzero rational vector to the primitive integer vector pointing
/// the same way.
pub fn primitive_direction(v: &[Rational]) -> Result<Vec<BigInt>, LatticeError> {
    let lcm = v.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(ints.into_iter().map(|c| c / &g).collect())
}

pub fn big_to_i64(v: &[BigInt]) -> Result<Vec<i64>, LatticeError> {
    v.iter()
        .map(|c| c.to_i64().ok_or_else(|| LatticeError::Overflow(c.to_string())))
        .collect()
}

/// Determinant of a square integer matrix (fraction-free Bareiss elimination).
pub fn determinant(matrix: &[Vec<i64>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|row| row.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// `(n+1)! · vol` of a lattice simplex given by `n+2` points in dimension `n+1`.
pub fn normalized_volume(simplex: &[LatticePoint]) -> Result<u64, LatticeError> {
    let dim = simplex.first().map(|p| p.dim()).unwrap_or(0);
    if simplex.len() != dim + 1 {
        return Err(LatticeError::WrongCardinality { expected: dim + 1, dim, got: simplex.len() });
    }
    let rows: Vec<Vec<i64>> = simplex[1..].iter().map(|p| p.sub(&simplex[0])).collect();
    let d = determinant(&rows).abs();
    d.to_u64().ok_or_else(|| LatticeError::Overflow(d.to_string()))
}

/// Integer matrix of determinant ±1 with integer offsets, i.e. an integral
/// affine change of coordinates `Y = matrix · X + offsets`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnimodularFrame {
    pub matrix: Vec<Vec<i64>>,
    pub offsets: Vec<i64>,
}

impl UnimodularFrame {
    pub fn determinant(&self) -> BigInt {
        determinant(&self.matrix)
    }
}

/// Complete `k` integer row vectors in dimension `dim` to a unimodular
/// `dim × dim` matrix whose first `k` rows are the inputs.
///
/// Column-style Hermite reduction: unimodular column operations `V` bring the
/// rows to `[H | 0]`; the inputs extend iff `H` has unit diagonal, and the
/// completion is the bottom block of `V⁻¹`. When at least one completion row
/// is added, its sign is chosen so that the determinant is `+1`.
pub fn extend_to_unimodular(vectors: &[Vec<i64>], dim: usize) -> Result<UnimodularFrame, LatticeError> {
    for v in vectors {
        if v.len() != dim {
            return Err(LatticeError::DimensionMismatch { expected: dim, got: v.len() });
        }
    }
    let k = vectors.len();
    if k > dim {
        return Err(LatticeError::Dependent);
    }
    let mut a: Vec<Vec<BigInt>> =
        vectors.iter().map(|r| r.iter().map(|&c| BigInt::from(c)).collect()).collect();
    // inverse of the accumulated column transform
    let mut w: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut diag_product = BigInt::one();

    for r in 0..k {
        loop {
            let nonzero: Vec<usize> = (r..dim).filter(|&c| !a[r][c].is_zero()).collect();
            if nonzero.is_empty() {
                return Err(LatticeError::Dependent);
            }
            if nonzero.len() == 1 {
                let p = nonzero[0];
                if p != r {
                    for row in a.iter_mut() {
                        row.swap(p, r);
                    }
                    w.swap(p, r);
                }
                if a[r][r].is_negative() {
                    for row in a.iter_mut() {
                        row[r] = -row[r].clone();
                    }
                    for c in w[r].iter_mut() {
                        *c = -c.clone();
                    }
                }
                break;
            }
            let p = *nonzero
                .iter()
                .min_by(|&&x, &&y| a[r][x].abs().cmp(&a[r][y].abs()).then(x.cmp(&y)))
                .unwrap();
            for &j in &nonzero {
                if j == p {
                    continue;
                }
                let q = &a[r][j] / &a[r][p];
                if q.is_zero() {
                    continue;
                }
                // column j -= q * column p ; inverse: row p += q * row j
                for row in a.iter_mut() {
                    let t = &row[p] * &q;
                    row[j] -= t;
                }
                let wj = w[j].clone();
                for (c, x) in w[p].iter_mut().zip(wj) {
                    *c += &q * x;
                }
            }
        }
        diag_product *= &a[r][r];
    }
    if !diag_product.is_one() {
        return Err(LatticeError::NotExtendable { gcd: diag_product });
    }
    let mut matrix: Vec<Vec<i64>> = vectors.to_vec();
    for row in &w[k..] {
        matrix.push(big_to_i64(row)?);
    }
    if k < dim && determinant(&matrix).is_negative() {
        for c in matrix[k].iter_mut() {
            *c = -*c;
        }
    }
    Ok(UnimodularFrame { matrix, offsets: vec![0; dim] })
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(matrix: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, LatticeError> {
    let n = matrix.len();
    let rows: Vec<Vec<Rational>> = matrix.iter().map(|r| r.iter().map(|&c| rat(c)).collect()).collect();
    let inv = invert(&rows).ok_or(LatticeError::Dependent)?;
    let mut out = Vec::with_capacity(n);
    for row in inv {
        let mut ints = Vec::with_capacity(n);
        for c in row {
            if !c.is_integer() {
                return Err(LatticeError::NotExtendable { gcd: determinant(matrix).abs() });
            }
            ints.push(c.to_integer().to_i64().ok_or_else(|| LatticeError::Overflow(c.to_string()))?);
        }
        out.push(ints);
    }
    Ok(out)
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : rows · x = 0}`.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

/// Solve `a · x = b`; `None` when inconsistent or not uniquely solvable.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let ncols = a.first()?.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&ncols) || pivots.len() != ncols {
        return None;
    }
    Some((0..ncols).map(|i| aug[i][ncols].clone()).collect())
}

pub fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Dimension of the affine hull of a nonempty point set.
pub fn affine_dim(points: &[&[Rational]]) -> usize {
    match points.split_first() {
        None => 0,
        Some((p0, rest)) => {
            let diffs: Vec<Vec<Rational>> =
                rest.iter().map(|p| p.iter().zip(p0.iter()).map(|(a, b)| a - b).collect()).collect();
            rank(&diffs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_examples() {
        assert_eq!(content(&[0, 3]), 3);
        assert_eq!(content(&[3, -3]), 3);
        assert_eq!(content(&[-4, 6, 2]), 2);
        assert_eq!(content(&[0, 0]), 0);
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&[0, 3]).unwrap(), vec![0, 1]);
        assert_eq!(primitive(&[-4, 6, 2]).unwrap(), vec![-2, 3, 1]);
        assert_eq!(primitive(&[1, -2]).unwrap(), vec![1, -2]);
        assert_eq!(primitive(&[0, 0]), Err(LatticeError::ZeroVector));
    }

    fn pts(v: &[&[i64]]) -> Vec<LatticePoint> {
        v.iter().map(|c| LatticePoint(c.to_vec())).collect()
    }

    #[test]
    fn normalized_volume_examples() {
        assert_eq!(normalized_volume(&pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap(), 1);
        assert_eq!(normalized_volume(&pts(&[&[0, 0], &[1, 0], &[-1, -1]])).unwrap(), 1);
        assert_eq!(normalized_volume(&pts(&[&[0, 0], &[2, 1], &[1, 2]])).unwrap(), 3);
        assert!(matches!(
            normalized_volume(&pts(&[&[0, 0], &[1, 0]])),
            Err(LatticeError::WrongCardinality { .. })
        ));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        assert_eq!(determinant(&[vec![2, 1], vec![1, 2]]), BigInt::from(3));
        assert_eq!(determinant(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]), BigInt::from(-1));
        assert_eq!(determinant(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), BigInt::from(-3));
        assert_eq!(determinant(&[vec![1, 2], vec![2, 4]]), BigInt::zero());
    }

    #[test]
    fn extend_single_vector_in_plane() {
        let f = extend_to_unimodular(&[vec![-2, -1]], 2).unwrap();
        assert_eq!(f.matrix[0], vec![-2, -1]);
        assert_eq!(f.matrix[1], vec![1, 0]);
        assert_eq!(f.determinant(), BigInt::one());
    }

    #[test]
    fn extend_full_basis_is_identity_extension() {
        let f = extend_to_unimodular(&[vec![1, 0], vec![-1, -1]], 2).unwrap();
        assert_eq!(f.matrix, vec![vec![1, 0], vec![-1, -1]]);
        assert_eq!(f.determinant(), BigInt::from(-1));
    }

    #[test]
    fn extend_standard_vector() {
        let f = extend_to_unimodular(&[vec![1, 0, 0]], 3).unwrap();
        assert_eq!(f.matrix, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn extend_rejects_non_primitive() {
        assert!(matches!(
            extend_to_unimodular(&[vec![2, 0]], 2),
            Err(LatticeError::NotExtendable { .. })
        ));
        assert!(matches!(
            extend_to_unimodular(&[vec![1, 1], vec![1, -2]], 2),
            Err(LatticeError::NotExtendable { .. })
        ));
        assert_eq!(extend_to_unimodular(&[vec![1, 2], vec![2, 4]], 2), Err(LatticeError::Dependent));
    }

    #[test]
    fn linear_solve_and_nullspace() {
        let a = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        assert_eq!(solve(&a, &[rat(2), rat(0)]).unwrap(), vec![rat(1), rat(1)]);
        let ns = nullspace(&[vec![rat(1), rat(1), rat(1)]], 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(dot(&v, &[rat(1), rat(1), rat(1)]).is_zero());
        }
    }

    #[test]
    fn primitive_direction_of_rationals() {
        let v = vec![Rational::new(1.into(), 2.into()), Rational::new((-3).into(), 4.into())];
        assert_eq!(primitive_direction(&v).unwrap(), vec![BigInt::from(2), BigInt::from(-3)]);
    }
}
