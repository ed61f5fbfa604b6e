//! Internal canonical form: expanded multivariate (Laurent) polynomials over
//! a set of generators ("atoms").
//!
//! An atom is a coordinate symbol or an opaque transcendental generator
//! (`sin`, `cos`, `exp` of a canonical expression, or the reciprocal of a
//! non-monomial canonical polynomial). Every `ScalarExpr` flattens to a
//! `Poly`; two expressions are structurally equal after normalization iff
//! they flatten to the same `Poly`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ScalarExpr;
use crate::error::{Error, Result};

/// Generator of the canonical polynomial ring.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Atom {
    Coord(String),
    /// sin of a canonical, nonzero argument.
    Sin(ScalarExpr),
    Cos(ScalarExpr),
    Exp(ScalarExpr),
    /// Reciprocal of a canonical polynomial that is not a single term.
    Recip(ScalarExpr),
}

impl Atom {
    pub(crate) fn is_opaque(&self) -> bool {
        !matches!(self, Atom::Coord(_))
    }
}

/// Power product of atoms, sorted by atom; exponents are nonzero.
pub(crate) type Monomial = Vec<(Atom, i32)>;

fn merge_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Monomial::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Canonical expanded polynomial: monomial -> nonzero rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.insert(Vec::new(), c);
        p
    }

    pub(crate) fn atom(a: Atom) -> Self {
        let mut p = Poly::zero();
        p.insert(vec![(a, 1)], BigRational::one());
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// The constant value, if this polynomial is a constant (possibly zero).
    pub(crate) fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Vec::new()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub(crate) fn insert(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), -c.clone());
        }
        out
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(merge_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    pub(crate) fn pow(&self, k: i32) -> Poly {
        if k == 0 {
            return Poly::one();
        }
        let (base, mut e) = if k > 0 {
            (self.clone(), k as u64)
        } else {
            (self.invert(), (-(k as i64)) as u64)
        };
        let mut result = Poly::one();
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                result = result.mul(&sq);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        result
    }

    /// Multiplicative inverse. Single terms invert exactly (Laurent
    /// exponents); anything else becomes an opaque reciprocal atom.
    fn invert(&self) -> Poly {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let inv_m: Monomial = m.iter().map(|(a, e)| (a.clone(), -e)).collect();
            let mut p = Poly::zero();
            p.insert(inv_m, c.recip());
            return p;
        }
        Poly::atom(Atom::Recip(self.to_expr()))
    }

    /// True if any monomial contains a non-coordinate atom. Zero-testing is
    /// exact exactly when this is false.
    pub(crate) fn has_opaque(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.iter().any(|(a, _)| a.is_opaque()))
    }

    /// Max exponent of `coord` across monomials, or `None` when `coord`
    /// occurs inside an opaque atom (no well-defined polynomial degree).
    pub(crate) fn degree_in(&self, coord: &str) -> Option<i32> {
        let mut deg = 0;
        for m in self.terms.keys() {
            for (a, e) in m {
                match a {
                    Atom::Coord(c) if c == coord => deg = deg.max(*e),
                    Atom::Coord(_) => {}
                    Atom::Sin(u) | Atom::Cos(u) | Atom::Exp(u) | Atom::Recip(u) => {
                        if u.free_coords().contains(coord) {
                            return None;
                        }
                    }
                }
            }
        }
        Some(deg)
    }

    pub(crate) fn partial(&self, coord: &str) -> Poly {
        let mut out = Poly::zero();
        for (m, coef) in &self.terms {
            for (i, (atom, e)) in m.iter().enumerate() {
                let da = atom_partial(atom, coord);
                if da.is_zero() {
                    continue;
                }
                // coef * e * atom^(e-1) * (rest of monomial) * d(atom)
                let mut rest: Monomial = Vec::with_capacity(m.len());
                for (j, entry) in m.iter().enumerate() {
                    if j == i {
                        if e - 1 != 0 {
                            rest.push((entry.0.clone(), e - 1));
                        }
                    } else {
                        rest.push(entry.clone());
                    }
                }
                let mut piece = Poly::zero();
                piece.insert(rest, coef * BigRational::from_integer((*e).into()));
                out = out.add(&piece.mul(&da));
            }
        }
        out
    }

    pub(crate) fn eval(&self, point: &BTreeMap<String, f64>) -> Result<f64> {
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut v = c
                .to_f64()
                .ok_or_else(|| Error::NonFinite(format!("coefficient {c}")))?;
            for (a, e) in m {
                v *= atom_eval(a, point)?.powi(*e);
            }
            sum += v;
        }
        Ok(sum)
    }

    /// Canonical expression tree for this polynomial.
    pub(crate) fn to_expr(&self) -> ScalarExpr {
        if self.terms.is_empty() {
            return ScalarExpr::Rational(BigRational::zero());
        }
        let mut parts: Vec<ScalarExpr> = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            parts.push(term_expr(m, c));
        }
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            ScalarExpr::Sum(parts)
        }
    }
}

fn term_expr(m: &Monomial, c: &BigRational) -> ScalarExpr {
    let mut factors: Vec<ScalarExpr> = Vec::new();
    if !c.is_one() || m.is_empty() {
        factors.push(ScalarExpr::Rational(c.clone()));
    }
    for (a, e) in m {
        let (base, exp) = match a {
            Atom::Coord(x) => (ScalarExpr::Coord(x.clone()), *e),
            Atom::Sin(u) => (ScalarExpr::Sin(Box::new(u.clone())), *e),
            Atom::Cos(u) => (ScalarExpr::Cos(Box::new(u.clone())), *e),
            Atom::Exp(u) => (ScalarExpr::Exp(Box::new(u.clone())), *e),
            // recip(u)^e is canonically u^(-e)
            Atom::Recip(u) => (u.clone(), -*e),
        };
        factors.push(if exp == 1 {
            base
        } else {
            ScalarExpr::Pow(Box::new(base), exp)
        });
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        ScalarExpr::Product(factors)
    }
}

fn atom_partial(a: &Atom, coord: &str) -> Poly {
    match a {
        Atom::Coord(x) => {
            if x == coord {
                Poly::one()
            } else {
                Poly::zero()
            }
        }
        Atom::Sin(u) => Poly::atom(Atom::Cos(u.clone())).mul(&from_expr(u).partial(coord)),
        Atom::Cos(u) => Poly::atom(Atom::Sin(u.clone()))
            .neg()
            .mul(&from_expr(u).partial(coord)),
        Atom::Exp(u) => Poly::atom(Atom::Exp(u.clone())).mul(&from_expr(u).partial(coord)),
        Atom::Recip(u) => Poly::atom(Atom::Recip(u.clone()))
            .pow(2)
            .neg()
            .mul(&from_expr(u).partial(coord)),
    }
}

fn atom_eval(a: &Atom, point: &BTreeMap<String, f64>) -> Result<f64> {
    Ok(match a {
        Atom::Coord(x) => *point
            .get(x)
            .ok_or_else(|| Error::UnboundCoordinate(x.clone()))?,
        Atom::Sin(u) => from_expr(u).eval(point)?.sin(),
        Atom::Cos(u) => from_expr(u).eval(point)?.cos(),
        Atom::Exp(u) => from_expr(u).eval(point)?.exp(),
        Atom::Recip(u) => 1.0 / from_expr(u).eval(point)?,
    })
}

/// Flatten an expression tree into its canonical polynomial.
pub(crate) fn from_expr(e: &ScalarExpr) -> Poly {
    match e {
        ScalarExpr::Rational(c) => Poly::constant(c.clone()),
        ScalarExpr::Coord(x) => Poly::atom(Atom::Coord(x.clone())),
        ScalarExpr::Sum(es) => es
            .iter()
            .fold(Poly::zero(), |acc, t| acc.add(&from_expr(t))),
        ScalarExpr::Product(es) => es.iter().fold(Poly::one(), |acc, t| acc.mul(&from_expr(t))),
        ScalarExpr::Pow(b, k) => from_expr(b).pow(*k),
        ScalarExpr::Sin(u) => {
            let arg = from_expr(u);
            if arg.is_zero() {
                Poly::zero()
            } else {
                Poly::atom(Atom::Sin(arg.to_expr()))
            }
        }
        ScalarExpr::Cos(u) => {
            let arg = from_expr(u);
            if arg.is_zero() {
                Poly::one()
            } else {
                Poly::atom(Atom::Cos(arg.to_expr()))
            }
        }
        ScalarExpr::Exp(u) => {
            let arg = from_expr(u);
            if arg.is_zero() {
                Poly::one()
            } else {
                Poly::atom(Atom::Exp(arg.to_expr()))
            }
        }
    }
}
