//! Lattice lengths, standard coordinates, twist profiles and the Dehn-twist
//! word of the monodromy around the tropical limit.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{
    determinant, extend_to_unimodular, primitive_direction, rat, LatticeError, Rational, RationalVector,
    UnimodularFrame,
};
use crate::tropical::{TropCell, TropicalComplex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonodromyError {
    #[error("cell {0} is unbounded: infinitely many twists")]
    Unbounded(usize),
    #[error("cell {0} is not an edge")]
    NotAnEdge(usize),
    #[error("tropical hypersurface is not smooth")]
    NotSmooth,
    #[error("Dehn-twist words need a curve (ambient dimension 2), got {0}")]
    NotCurve(usize),
    #[error("base choice {0:?} is not an ordering of part of the dominant set")]
    BadBase(Vec<usize>),
    #[error("completion rows do not give a unimodular frame")]
    BadCompletion,
    #[error("fixed coordinate {coord} does not vanish on cell {cell}")]
    FrameNotVanishing { cell: usize, coord: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `l` with `ν₁ − ν₂ = l·V` for primitive integral `V`.
pub fn lattice_length(edge: &TropCell) -> Result<Rational, MonodromyError> {
    if edge.dim != 1 {
        return Err(MonodromyError::NotAnEdge(edge.id));
    }
    if !edge.bounded {
        return Err(MonodromyError::Unbounded(edge.id));
    }
    let diff = edge.vertices[1].sub(&edge.vertices[0]);
    let v = primitive_direction(&diff)?;
    let (i, vi) = v.iter().enumerate().find(|(_, c)| !c.is_zero()).unwrap();
    Ok((&diff[i] / Rational::from_integer(vi.clone())).abs())
}

/// Standard coordinates `X̃ = matrix · X + offsets` attached to a cell.
/// The first `fixed` coordinates vanish on the cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardFrame {
    pub cell: usize,
    pub base: usize,
    pub monomials: Vec<usize>,
    pub fixed: usize,
    pub frame: UnimodularFrame,
}

impl StandardFrame {
    pub fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        self.frame
            .matrix
            .iter()
            .zip(&self.frame.offsets)
            .map(|(row, &o)| row.iter().zip(x).fold(rat(o), |acc, (&a, xi)| acc + rat(a) * xi))
            .collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.frame
            .matrix
            .iter()
            .zip(&self.frame.offsets)
            .map(|(row, &o)| o as f64 + row.iter().zip(x).map(|(&a, xi)| a as f64 * xi).sum::<f64>())
            .collect()
    }

    /// Human-readable affine forms such as `-1+X1`.
    pub fn forms(&self) -> Vec<String> {
        self.frame.matrix.iter().zip(&self.frame.offsets).map(|(row, &o)| affine_form_string(row, o)).collect()
    }
}

fn affine_form_string(row: &[i64], offset: i64) -> String {
    let mut s = String::new();
    if offset != 0 {
        s.push_str(&offset.to_string());
    }
    for (i, &a) in row.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let sign = if a < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = if a.abs() == 1 { String::new() } else { a.abs().to_string() };
        s.push_str(&format!("{sign}{mag}X{}", i + 1));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Exponent of support point `i` in the coordinates of the cell's orbit.
fn orbit_exponent(complex: &TropicalComplex, cell: &TropCell, i: usize) -> Vec<i64> {
    let m = &complex.poly.monomials[i].exponent;
    match &cell.quotient {
        None => m.0.clone(),
        Some(u) => {
            let l = complex.fan.as_ref().expect("stratum without fan").cones[cell.orbit].len();
            u.iter().skip(l).map(|row| row.iter().zip(m.iter()).map(|(a, b)| a * b).sum()).collect()
        }
    }
}

fn fixed_rows(
    complex: &TropicalComplex,
    cell: &TropCell,
    order: &[usize],
) -> (Vec<Vec<i64>>, Vec<i64>) {
    let vals = complex.poly.valuations();
    let e0 = orbit_exponent(complex, cell, order[0]);
    let rows = order[1..]
        .iter()
        .map(|&i| orbit_exponent(complex, cell, i).iter().zip(&e0).map(|(a, b)| a - b).collect())
        .collect();
    let offsets = order[1..].iter().map(|&i| vals[i] - vals[order[0]]).collect();
    (rows, offsets)
}

fn resolve_order(cell: &TropCell, base_choice: Option<&[usize]>) -> Result<Vec<usize>, MonodromyError> {
    let a = &cell.dominant_set;
    let mut order: Vec<usize> = base_choice.unwrap_or(&[]).to_vec();
    let mut seen = order.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != order.len() || order.iter().any(|i| !a.contains(i)) {
        return Err(MonodromyError::BadBase(order));
    }
    // the support is sorted, so index order is lexicographic order
    order.extend(a.iter().copied().filter(|i| !seen.contains(i)));
    Ok(order)
}

fn lex_largest_vertex(cell: &TropCell) -> &RationalVector {
    cell.vertices.iter().max().expect("cell without vertices")
}

fn completion_offsets(rows: &[Vec<i64>], at: &RationalVector) -> Vec<i64> {
    rows.iter()
        .map(|row| {
            let v = row.iter().zip(at.iter()).fold(Rational::zero(), |acc, (&a, x)| acc + rat(a) * x);
            -v.floor().to_integer().try_into().unwrap_or(0i64)
        })
        .collect()
}

/// Deterministic standard frame. `base_choice` optionally fixes `m₀`
/// followed by any prefix of the order of the remaining dominant monomials.
pub fn standard_frame(
    complex: &TropicalComplex,
    cell: usize,
    base_choice: Option<&[usize]>,
) -> Result<StandardFrame, MonodromyError> {
    standard_frame_with_completion(complex, cell, base_choice, None)
}

/// As [`standard_frame`], with explicit completion rows replacing the
/// default lattice-basis extension.
pub fn standard_frame_with_completion(
    complex: &TropicalComplex,
    cell_id: usize,
    base_choice: Option<&[usize]>,
    completion: Option<Vec<Vec<i64>>>,
) -> Result<StandardFrame, MonodromyError> {
    if !complex.smooth {
        return Err(MonodromyError::NotSmooth);
    }
    let cell = &complex.cells[cell_id];
    let order = resolve_order(cell, base_choice)?;
    let (rows, mut offsets) = fixed_rows(complex, cell, &order);
    let dim = orbit_dim(complex, cell);
    let matrix = match completion {
        None => extend_to_unimodular(&rows, dim)?.matrix,
        Some(extra) => {
            let mut m = rows.clone();
            m.extend(extra);
            if m.len() != dim || m.iter().any(|r| r.len() != dim) || !determinant(&m).abs().is_one() {
                return Err(MonodromyError::BadCompletion);
            }
            m
        }
    };
    offsets.extend(completion_offsets(&matrix[rows.len()..], lex_largest_vertex(cell)));
    let frame = StandardFrame {
        cell: cell_id,
        base: order[0],
        monomials: order[1..].to_vec(),
        fixed: rows.len(),
        frame: UnimodularFrame { matrix, offsets },
    };
    for v in &cell.vertices {
        let y = frame.eval(v);
        if let Some(coord) = (0..frame.fixed).find(|&i| !y[i].is_zero()) {
            return Err(MonodromyError::FrameNotVanishing { cell: cell_id, coord: coord + 1 });
        }
    }
    Ok(frame)
}

fn orbit_dim(complex: &TropicalComplex, cell: &TropCell) -> usize {
    match &complex.fan {
        Some(f) if !cell.is_dense() => complex.ambient_dim - f.cones[cell.orbit].len(),
        _ => complex.ambient_dim,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedCoord {
    /// 1-based coordinate number in the standard frame.
    pub index: usize,
    pub values: Vec<Rational>,
    pub width: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistProfile {
    pub cell: usize,
    pub dim: usize,
    pub orbit: usize,
    pub fixed_coords: Vec<usize>,
    pub twisted: Vec<TwistedCoord>,
    pub frame: StandardFrame,
}

impl TwistProfile {
    pub fn is_identity(&self) -> bool {
        self.twisted.iter().all(|t| t.width.is_zero())
    }

    pub fn widths(&self) -> Vec<Rational> {
        self.twisted.iter().map(|t| t.width.clone()).collect()
    }
}

pub fn twist_profile(complex: &TropicalComplex, cell: usize) -> Result<TwistProfile, MonodromyError> {
    twist_profile_in(complex, standard_frame(complex, cell, None)?)
}

/// Profile of a cell with respect to a given frame.
pub fn twist_profile_in(complex: &TropicalComplex, frame: StandardFrame) -> Result<TwistProfile, MonodromyError> {
    let cell = &complex.cells[frame.cell];
    if !cell.bounded {
        return Err(MonodromyError::Unbounded(cell.id));
    }
    let values: Vec<Vec<Rational>> = cell.vertices.iter().map(|v| frame.eval(v)).collect();
    let total = frame.frame.matrix.len();
    let twisted = (frame.fixed..total)
        .map(|i| {
            let vals: Vec<Rational> = values.iter().map(|y| y[i].clone()).collect();
            let max = vals.iter().max().unwrap().clone();
            let min = vals.iter().min().unwrap().clone();
            TwistedCoord { index: i + 1, values: vals, width: max - min }
        })
        .collect();
    Ok(TwistProfile {
        cell: cell.id,
        dim: cell.dim,
        orbit: cell.orbit,
        fixed_coords: (1..=frame.fixed).collect(),
        twisted,
        frame,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistFactor {
    pub cell: usize,
    pub exponent: Rational,
    pub primitive_direction: Vec<i64>,
    pub endpoints: [RationalVector; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyWord {
    pub factors: Vec<TwistFactor>,
}

impl MonodromyWord {
    pub fn exponents(&self) -> Vec<Rational> {
        self.factors.iter().map(|f| f.exponent.clone()).collect()
    }

    pub fn sorted_exponents(&self) -> Vec<Rational> {
        let mut e = self.exponents();
        e.sort();
        e
    }
}

impl fmt::Display for MonodromyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "id");
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ∘ ")?;
            }
            write!(f, "T_{}", i + 1)?;
            if !factor.exponent.is_one() {
                write!(f, "^{}", factor.exponent)?;
            }
        }
        Ok(())
    }
}

/// One Dehn twist per bounded edge, ordered by left endpoint then direction.
pub fn monodromy_word(complex: &TropicalComplex) -> Result<MonodromyWord, MonodromyError> {
    if complex.ambient_dim != 2 {
        return Err(MonodromyError::NotCurve(complex.ambient_dim));
    }
    if !complex.smooth {
        return Err(MonodromyError::NotSmooth);
    }
    let mut factors: Vec<TwistFactor> = complex
        .bounded_edges()
        .into_iter()
        .map(|e| {
            let (lo, hi) = (e.vertices[0].clone(), e.vertices[1].clone());
            let dir = primitive_direction(&hi.sub(&lo)).expect("degenerate edge");
            TwistFactor {
                cell: e.id,
                exponent: lattice_length(e).expect("bounded edge"),
                primitive_direction: crate::lattice::big_to_i64(&dir).expect("direction fits in i64"),
                endpoints: [lo, hi],
            }
        })
        .collect();
    factors.sort_by(|a, b| (&a.endpoints[0], &a.primitive_direction).cmp(&(&b.endpoints[0], &b.primitive_direction)));
    Ok(MonodromyWord { factors })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyEntry {
    pub cell: usize,
    pub dim: usize,
    pub orbit: usize,
    /// `None` for unbounded cells, whose twist multiplicity is infinite.
    pub profile: Option<TwistProfile>,
}

impl MonodromyEntry {
    pub fn describe(&self) -> String {
        match &self.profile {
            None => "∞ (unbounded)".to_string(),
            Some(p) if p.twisted.is_empty() || p.is_identity() => "identity".to_string(),
            Some(p) => {
                let parts: Vec<String> = p
                    .twisted
                    .iter()
                    .map(|t| format!("x~{}: {} Dehn twist(s)", t.index, t.width))
                    .collect();
                parts.join(", ")
            }
        }
    }
}

/// Profiles of every cell of every orbit; unbounded cells are marked infinite.
pub fn monodromy_report(complex: &TropicalComplex) -> Result<Vec<MonodromyEntry>, MonodromyError> {
    if !complex.smooth {
        return Err(MonodromyError::NotSmooth);
    }
    complex
        .cells
        .iter()
        .map(|c| {
            let profile = if c.bounded { Some(twist_profile(complex, c.id)?) } else { None };
            Ok(MonodromyEntry { cell: c.id, dim: c.dim, orbit: c.orbit, profile })
        })
        .collect()
}

/// Table with one row per cell.
pub fn format_report(complex: &TropicalComplex, entries: &[MonodromyEntry]) -> String {
    let mut out = String::from("cell  dim  orbit  vertices                         monodromy\n");
    for e in entries {
        let c = &complex.cells[e.cell];
        let verts: Vec<String> = c.vertices.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("{:<5} {:<4} {:<6} {:<32} {}\n", e.cell, e.dim, e.orbit, verts.join(" "), e.describe()));
    }
    out
}
