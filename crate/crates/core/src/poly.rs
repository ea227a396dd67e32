//! Valuated Laurent polynomials: parsing, support, Newton polytope and
//! numeric instantiation at a complex value of the parameter.
//!
//! Grammar: terms separated by `+`/`-`; a term is a product of factors
//! joined by `*` (or juxtaposed when a parenthesis is involved). Factors
//! are `t^k`, `xi^k` (signed integer `k`, `^1` optional), real or
//! imaginary literals (`2.5`, `3i`, `i`, `1e-3`) and parenthesized
//! sub-expressions.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::hull::{convex_hull, HullComplex};
use crate::lattice::LatticePoint;

pub type Polytope = HullComplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range (ambient dimension {dim})")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("coefficient of monomial {0} cancels to zero")]
    ZeroCoefficient(LatticePoint),
    #[error("ambient dimension must be positive")]
    ZeroDimension,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuatedMonomial {
    pub exponent: LatticePoint,
    pub valuation: i64,
    pub leading_coeff: Complex64,
}

/// A non-leading series term `coeff · t^t_power · x^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailTerm {
    pub exponent: LatticePoint,
    pub t_power: i64,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuatedPolynomial {
    pub ambient_dim: usize,
    /// Sorted by exponent.
    pub monomials: Vec<ValuatedMonomial>,
    pub tail_terms: Vec<TailTerm>,
}

impl ValuatedPolynomial {
    /// Build directly from `(exponent, valuation, leading coefficient)`
    /// triples. Duplicate exponents keep the term of larger valuation.
    pub fn from_terms(ambient_dim: usize, terms: impl IntoIterator<Item = (Vec<i64>, i64, Complex64)>) -> Self {
        let mut map: BTreeMap<LatticePoint, (i64, Complex64)> = BTreeMap::new();
        for (e, v, c) in terms {
            assert_eq!(e.len(), ambient_dim, "exponent dimension mismatch");
            assert!(c != Complex64::new(0.0, 0.0), "zero leading coefficient");
            let e = LatticePoint(e);
            match map.get(&e) {
                Some(&(v0, _)) if v0 >= v => {}
                _ => {
                    map.insert(e, (v, c));
                }
            }
        }
        let monomials = map
            .into_iter()
            .map(|(exponent, (valuation, leading_coeff))| ValuatedMonomial { exponent, valuation, leading_coeff })
            .collect();
        ValuatedPolynomial { ambient_dim, monomials, tail_terms: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// `n` where the ambient torus has dimension `n + 1`.
    pub fn n(&self) -> usize {
        self.ambient_dim - 1
    }

    pub fn valuations(&self) -> Vec<i64> {
        self.monomials.iter().map(|m| m.valuation).collect()
    }

    pub fn index_of(&self, e: &[i64]) -> Option<usize> {
        self.monomials.binary_search_by(|m| m.exponent.0.as_slice().cmp(e)).ok()
    }

    /// Apply `m ↦ U m + shift` to every exponent.
    pub fn transform_exponents(&self, u: &[Vec<i64>], shift: &[i64]) -> ValuatedPolynomial {
        let map = |e: &LatticePoint| -> Vec<i64> {
            u.iter().zip(shift).map(|(row, s)| row.iter().zip(e.iter()).map(|(a, b)| a * b).sum::<i64>() + s).collect()
        };
        let mut out = ValuatedPolynomial::from_terms(
            self.ambient_dim,
            self.monomials.iter().map(|m| (map(&m.exponent), m.valuation, m.leading_coeff)),
        );
        out.tail_terms = self
            .tail_terms
            .iter()
            .map(|t| TailTerm { exponent: LatticePoint(map(&t.exponent)), t_power: t.t_power, coeff: t.coeff })
            .collect();
        out.tail_terms.sort_by(|a, b| (&a.exponent, a.t_power).cmp(&(&b.exponent, b.t_power)));
        out
    }
}

/// Sorted exponent list.
pub fn support(poly: &ValuatedPolynomial) -> Vec<LatticePoint> {
    poly.monomials.iter().map(|m| m.exponent.clone()).collect()
}

pub fn newton_polytope(poly: &ValuatedPolynomial) -> Polytope {
    let pts: Vec<_> = poly.monomials.iter().map(|m| m.exponent.to_rational()).collect();
    convex_hull(&pts)
}

/// Coefficients `k_m(q)` on each monomial, keeping every explicit series term.
pub fn instantiate_fq(poly: &ValuatedPolynomial, q: Complex64) -> Vec<(LatticePoint, Complex64)> {
    poly.monomials
        .iter()
        .map(|m| {
            let mut c = m.leading_coeff * q.powi(m.valuation as i32);
            for t in poly.tail_terms.iter().filter(|t| t.exponent == m.exponent) {
                c += t.coeff * q.powi(-t.t_power as i32);
            }
            (m.exponent.clone(), c)
        })
        .collect()
}

// exponent vector and t-power → coefficient
type Series = BTreeMap<(Vec<i64>, i64), Complex64>;

fn constant(dim: usize, c: Complex64) -> Series {
    let mut s = Series::new();
    s.insert((vec![0; dim], 0), c);
    s
}

fn mul(a: &Series, b: &Series) -> Series {
    let mut out = Series::new();
    for ((ea, ta), ca) in a {
        for ((eb, tb), cb) in b {
            let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry((e, ta + tb)).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
        }
    }
    out
}

fn add_into(acc: &mut Series, s: Series, sign: f64) {
    for (k, c) in s {
        *acc.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c * sign;
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    dim: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(o, _)| o).unwrap_or(self.src.len())
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Series, ParseError> {
        let mut acc = Series::new();
        let mut sign = match self.peek() {
            Some('+') => {
                self.pos += 1;
                1.0
            }
            Some('-') => {
                self.pos += 1;
                -1.0
            }
            _ => 1.0,
        };
        loop {
            let t = self.term()?;
            add_into(&mut acc, t, sign);
            match self.peek() {
                Some('+') => sign = 1.0,
                Some('-') => sign = -1.0,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Series, ParseError> {
        let (mut acc, mut last_paren) = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let (f, p) = self.factor()?;
                    acc = mul(&acc, &f);
                    last_paren = p;
                }
                Some('(') => {
                    let (f, p) = self.factor()?;
                    acc = mul(&acc, &f);
                    last_paren = p;
                }
                Some(c) if last_paren && (c.is_ascii_alphanumeric() || c == '.') => {
                    let (f, p) = self.factor()?;
                    acc = mul(&acc, &f);
                    last_paren = p;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.pos += 1;
        }
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.pos += 1;
        }
        s.parse().or_else(|_| {
            self.pos = start;
            self.err("expected integer exponent")
        })
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        if self.peek() == Some('^') {
            self.pos += 1;
            self.integer()
        } else {
            Ok(1)
        }
    }

    /// Returns the factor and whether it was a parenthesized group.
    fn factor(&mut self) -> Result<(Series, bool), ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                if self.peek() == Some('^') {
                    return self.err("powers of parenthesized groups are not supported");
                }
                Ok((inner, true))
            }
            Some('t') => {
                self.pos += 1;
                let k = self.exponent()?;
                let mut s = Series::new();
                s.insert((vec![0; self.dim], k), Complex64::new(1.0, 0.0));
                Ok((s, false))
            }
            Some('x') => {
                self.pos += 1;
                let start = self.pos;
                let mut digits = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
                    digits.push(c);
                    self.pos += 1;
                }
                let Ok(index) = digits.parse::<usize>() else {
                    self.pos = start;
                    return self.err("expected variable index after 'x'");
                };
                if index == 0 || index > self.dim {
                    return Err(ParseError::VariableOutOfRange { index, dim: self.dim });
                }
                let k = self.exponent()?;
                let mut e = vec![0; self.dim];
                e[index - 1] = k;
                let mut s = Series::new();
                s.insert((e, 0), Complex64::new(1.0, 0.0));
                Ok((s, false))
            }
            Some('i') => {
                self.pos += 1;
                Ok((constant(self.dim, Complex64::new(0.0, 1.0)), false))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let value = self.number()?;
                if self.peek() == Some('i') {
                    self.pos += 1;
                    Ok((constant(self.dim, Complex64::new(0.0, value)), false))
                } else {
                    Ok((constant(self.dim, Complex64::new(value, 0.0)), false))
                }
            }
            Some(c) => self.err(format!("unexpected character '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let mut s = String::new();
        let take_digits = |p: &mut Self, s: &mut String| {
            while let Some(c) = p.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                p.pos += 1;
            }
        };
        take_digits(self, &mut s);
        if self.peek() == Some('.') {
            s.push('.');
            self.pos += 1;
            take_digits(self, &mut s);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            let mut e = String::from("e");
            self.pos += 1;
            if let Some(c @ ('+' | '-')) = self.peek() {
                e.push(c);
                self.pos += 1;
            }
            let before = e.len();
            take_digits(self, &mut e);
            if e.len() == before {
                self.pos = save;
            } else {
                s.push_str(&e);
            }
        }
        s.parse().or_else(|_| {
            self.pos = start;
            self.err("malformed number")
        })
    }
}

/// Parse polynomial text over `t` and `x1..x{ambient_dim}`.
pub fn parse_polynomial(text: &str, ambient_dim: usize) -> Result<ValuatedPolynomial, ParseError> {
    if ambient_dim == 0 {
        return Err(ParseError::ZeroDimension);
    }
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut p = Parser { chars, pos: 0, dim: ambient_dim, src: text };
    if p.peek().is_none() {
        return p.err("empty polynomial");
    }
    let series = p.expr()?;
    if p.peek().is_some() {
        return p.err(format!("unexpected character '{}'", p.peek().unwrap()));
    }

    let mut by_exp: BTreeMap<Vec<i64>, Vec<(i64, Complex64)>> = BTreeMap::new();
    for ((e, tp), c) in series {
        by_exp.entry(e).or_default().push((tp, c));
    }
    let mut monomials = Vec::new();
    let mut tail_terms = Vec::new();
    for (e, mut terms) in by_exp {
        terms.retain(|(_, c)| *c != Complex64::new(0.0, 0.0));
        terms.sort_by_key(|&(tp, _)| tp);
        let exponent = LatticePoint(e);
        let Some(&(t0, c0)) = terms.first() else {
            return Err(ParseError::ZeroCoefficient(exponent));
        };
        for &(tp, c) in &terms[1..] {
            tail_terms.push(TailTerm { exponent: exponent.clone(), t_power: tp, coeff: c });
        }
        monomials.push(ValuatedMonomial { exponent, valuation: -t0, leading_coeff: c0 });
    }
    Ok(ValuatedPolynomial { ambient_dim, monomials, tail_terms })
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: Complex64, bare_one: bool) -> fmt::Result {
    if c.im == 0.0 {
        if bare_one && c.re == 1.0 {
            return Ok(());
        }
        if c.re < 0.0 {
            write!(f, "({})", c.re)
        } else {
            write!(f, "{}", c.re)
        }
    } else if c.im < 0.0 {
        write!(f, "({}-{}i)", c.re, -c.im)
    } else {
        write!(f, "({}+{}i)", c.re, c.im)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, e: &LatticePoint, t_power: i64, c: Complex64) -> fmt::Result {
    let mut factors: Vec<String> = Vec::new();
    if t_power != 0 {
        factors.push(format!("t^{t_power}"));
    }
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => factors.push(format!("x{}", i + 1)),
            _ => factors.push(format!("x{}^{k}", i + 1)),
        }
    }
    if factors.is_empty() {
        return write_coeff(f, c, false);
    }
    let bare = c.im == 0.0 && c.re == 1.0;
    write_coeff(f, c, true)?;
    if !bare {
        write!(f, "*")?;
    }
    write!(f, "{}", factors.join("*"))
}

impl fmt::Display for ValuatedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for m in &self.monomials {
            let tails = self.tail_terms.iter().filter(|t| t.exponent == m.exponent);
            for (tp, c) in std::iter::once((-m.valuation, m.leading_coeff)).chain(tails.map(|t| (t.t_power, t.coeff))) {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write_term(f, &m.exponent, tp, c)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const HYPELLIP: &str = "x2^2 + x2*(x1^3 + t^-2*x1^2 + t^-2*x1 + t^-1) + 1";

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn hyperelliptic_support_and_valuations() {
        let p = parse_polynomial(HYPELLIP, 2).unwrap();
        let expected = [
            (vec![0, 0], 0),
            (vec![0, 1], 1),
            (vec![0, 2], 0),
            (vec![1, 1], 2),
            (vec![2, 1], 2),
            (vec![3, 1], 0),
        ];
        assert_eq!(p.len(), 6);
        for (m, (e, v)) in p.monomials.iter().zip(expected) {
            assert_eq!(m.exponent.0, e);
            assert_eq!(m.valuation, v);
            assert_eq!(m.leading_coeff, one());
        }
        assert!(p.tail_terms.is_empty());
    }

    #[test]
    fn elliptic_valuations() {
        let p = parse_polynomial("t^-1 + x1 + x2 + x1^-1*x2^-1", 2).unwrap();
        assert_eq!(p.monomials[p.index_of(&[0, 0]).unwrap()].valuation, 1);
        for e in [[1, 0], [0, 1], [-1, -1]] {
            assert_eq!(p.monomials[p.index_of(&e).unwrap()].valuation, 0);
        }
    }

    #[test]
    fn line_support_sorted() {
        let p = parse_polynomial("1 + x1 + x2", 2).unwrap();
        let s: Vec<Vec<i64>> = support(&p).into_iter().map(|m| m.0).collect();
        assert_eq!(s, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert!(p.monomials.iter().all(|m| m.valuation == 0 && m.leading_coeff == one()));
    }

    #[test]
    fn single_monomial_polytope() {
        let p = parse_polynomial("x1", 2).unwrap();
        assert_eq!(support(&p), vec![LatticePoint(vec![1, 0])]);
        let h = newton_polytope(&p);
        assert_eq!(h.dim, 0);
    }

    #[test]
    fn newton_polytope_vertices() {
        let p = parse_polynomial(HYPELLIP, 2).unwrap();
        let h = newton_polytope(&p);
        let mut v: Vec<Vec<i64>> = h.vertices().into_iter().map(|i| p.monomials[i].exponent.0.clone()).collect();
        v.sort();
        assert_eq!(v, vec![vec![0, 0], vec![0, 2], vec![3, 1]]);

        let e = parse_polynomial("t^-1 + x1 + x2 + x1^-1*x2^-1", 2).unwrap();
        let h = newton_polytope(&e);
        let v: Vec<usize> = h.vertices();
        assert_eq!(v.len(), 3);
        assert!(!v.contains(&e.index_of(&[0, 0]).unwrap()));
    }

    #[test]
    fn instantiate_real_q() {
        let p = parse_polynomial(HYPELLIP, 2).unwrap();
        let q = Complex64::new(3.0, 0.0);
        let c: Vec<f64> = instantiate_fq(&p, q).into_iter().map(|(_, c)| c.re).collect();
        assert_eq!(c, vec![1.0, 3.0, 1.0, 9.0, 9.0, 1.0]);
        let e = parse_polynomial("t^-1+x1+x2+x1^-1*x2^-1", 2).unwrap();
        let c = instantiate_fq(&e, Complex64::new(10.0, 0.0));
        assert_eq!(c[e.index_of(&[0, 0]).unwrap()].1, Complex64::new(10.0, 0.0));
        let l = parse_polynomial("1+x1+x2", 2).unwrap();
        assert!(instantiate_fq(&l, one()).iter().all(|(_, c)| *c == one()));
    }

    #[test]
    fn series_tail_terms() {
        let p = parse_polynomial("(t^-1 + 2 + 3*t)*x1 + 1", 1).unwrap();
        let m = &p.monomials[p.index_of(&[1]).unwrap()];
        assert_eq!(m.valuation, 1);
        assert_eq!(p.tail_terms.len(), 2);
        let q = Complex64::new(2.0, 0.0);
        let c = instantiate_fq(&p, q)[1].1;
        assert!((c.re - (2.0 + 2.0 + 1.5)).abs() < 1e-12);
    }

    #[test]
    fn complex_literals() {
        let p = parse_polynomial("(1+2i)*x1 - i + 0.5e1*x1^-1", 1).unwrap();
        assert_eq!(p.monomials[p.index_of(&[1]).unwrap()].leading_coeff, Complex64::new(1.0, 2.0));
        assert_eq!(p.monomials[p.index_of(&[0]).unwrap()].leading_coeff, Complex64::new(0.0, -1.0));
        assert_eq!(p.monomials[p.index_of(&[-1]).unwrap()].leading_coeff, Complex64::new(5.0, 0.0));
    }

    #[test]
    fn juxtaposed_parentheses() {
        let p = parse_polynomial("(1 + x1)(2 - x1)", 1).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.monomials[p.index_of(&[2]).unwrap()].leading_coeff, Complex64::new(-1.0, 0.0));
        let q = parse_polynomial("(x1)x2", 2).unwrap();
        assert_eq!(q.monomials[0].exponent.0, vec![1, 1]);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_polynomial("x1 - x1 + 1", 2), Err(ParseError::ZeroCoefficient(_))));
        assert_eq!(parse_polynomial("x3 + 1", 2), Err(ParseError::VariableOutOfRange { index: 3, dim: 2 }));
        assert!(matches!(parse_polynomial("x1 + ", 2), Err(ParseError::Syntax { pos: 5, .. })));
        assert!(matches!(parse_polynomial("x1 ^ 1/2", 2), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("2x1", 2), Err(ParseError::Syntax { pos: 1, .. })));
        assert!(matches!(parse_polynomial("(1+x1)^2", 2), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("", 2), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn display_round_trip() {
        for text in [HYPELLIP, "t^-1+x1+x2+x1^-1*x2^-1", "(1-2.5i)*x1 - 3*t^2 + (t + t^-3)*x2^-4", "-x1 + 0.1"] {
            let p = parse_polynomial(text, 2).unwrap();
            let printed = p.to_string();
            assert_eq!(parse_polynomial(&printed, 2).unwrap(), p, "{printed}");
        }
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_term() -> impl Strategy<Value = (Vec<i64>, i64, (i32, i32))> {
        (prop::collection::vec(-3i64..4, 2), -3i64..4, (-9i32..10, -9i32..10))
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(terms in prop::collection::vec(arb_term(), 1..8)) {
            let poly = ValuatedPolynomial::from_terms(
                2,
                terms.into_iter().filter(|(_, _, (a, b))| *a != 0 || *b != 0).map(|(e, v, (a, b))| {
                    (e, v, Complex64::new(a as f64 / 4.0, b as f64 / 8.0))
                }),
            );
            prop_assume!(!poly.is_empty());
            let back = parse_polynomial(&poly.to_string(), 2).unwrap();
            prop_assert_eq!(back, poly);
        }

        #[test]
        fn valuation_is_minus_min_t_power(powers in prop::collection::btree_set(-5i64..6, 1..4)) {
            let text = powers.iter().map(|k| format!("t^{k}")).collect::<Vec<_>>().join(" + ");
            let p = parse_polynomial(&format!("({text})*x1 + 1"), 1).unwrap();
            let m = &p.monomials[p.index_of(&[1]).unwrap()];
            prop_assert_eq!(m.valuation, -*powers.iter().next().unwrap());
            prop_assert_eq!(p.tail_terms.len(), powers.len() - 1);
        }
    }
}
