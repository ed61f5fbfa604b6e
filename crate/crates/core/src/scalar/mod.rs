//! Exact symbolic scalars: the coefficient ring of every form and field.
//!
//! `ScalarExpr` is an expression tree over exact rational constants,
//! coordinate symbols, sums, products, integer powers, and `sin`/`cos`/`exp`.
//! [`ScalarExpr::normalize`] rewrites a tree into a canonical expanded form:
//! polynomial expressions reach a unique sorted-monomial normal form, while
//! transcendental subterms become opaque generators. Zero-testing of the
//! polynomial class is therefore a decision procedure; the transcendental
//! class is tested numerically at seeded random points and verdicts are
//! labelled accordingly.

mod parse;
pub(crate) mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use parse::parse_scalar;

/// Symbolic scalar expression.
///
/// The variant set is fixed: rational constants, coordinates, n-ary sums and
/// products, integer powers, and the three transcendental functions closed
/// under differentiation. Values are immutable; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScalarExpr {
    Rational(BigRational),
    Coord(String),
    Sum(Vec<ScalarExpr>),
    Product(Vec<ScalarExpr>),
    Pow(Box<ScalarExpr>, i32),
    Sin(Box<ScalarExpr>),
    Cos(Box<ScalarExpr>),
    Exp(Box<ScalarExpr>),
}

impl ScalarExpr {
    pub fn int(n: i64) -> Self {
        ScalarExpr::Rational(BigRational::from_integer(n.into()))
    }

    /// Exact rational constant `p/q`. Panics if `q == 0`.
    pub fn rational(p: i64, q: i64) -> Self {
        ScalarExpr::Rational(BigRational::new(p.into(), q.into()))
    }

    pub fn coord(name: impl Into<String>) -> Self {
        ScalarExpr::Coord(name.into())
    }

    pub fn zero() -> Self {
        ScalarExpr::int(0)
    }

    pub fn one() -> Self {
        ScalarExpr::int(1)
    }

    pub fn pow(self, k: i32) -> Self {
        ScalarExpr::Pow(Box::new(self), k)
    }

    pub fn sin(self) -> Self {
        ScalarExpr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Self {
        ScalarExpr::Cos(Box::new(self))
    }

    pub fn exp(self) -> Self {
        ScalarExpr::Exp(Box::new(self))
    }

    /// Canonical form: expanded polynomial over coordinates and opaque
    /// transcendental generators, with sorted monomials. Idempotent.
    pub fn normalize(&self) -> ScalarExpr {
        poly::from_expr(self).to_expr()
    }

    /// Structural equality of normal forms.
    pub fn equivalent(&self, other: &ScalarExpr) -> bool {
        poly::from_expr(self) == poly::from_expr(other)
    }

    /// True iff the normal form is identically zero (exact for the
    /// polynomial class and for any exact cancellation).
    pub fn is_normal_zero(&self) -> bool {
        poly::from_expr(self).is_zero()
    }

    /// Exact symbolic partial derivative with respect to `coord`, in normal
    /// form. Differentiating along a symbol that does not occur yields zero;
    /// coordinate-name validity is checked by the chart layers.
    pub fn partial(&self, coord: &str) -> ScalarExpr {
        poly::from_expr(self).partial(coord).to_expr()
    }

    /// Simultaneous substitution of coordinates by expressions, then
    /// normalization.
    pub fn substitute(&self, bindings: &BTreeMap<String, ScalarExpr>) -> ScalarExpr {
        self.substitute_tree(bindings).normalize()
    }

    fn substitute_tree(&self, bindings: &BTreeMap<String, ScalarExpr>) -> ScalarExpr {
        match self {
            ScalarExpr::Rational(_) => self.clone(),
            ScalarExpr::Coord(x) => bindings.get(x).cloned().unwrap_or_else(|| self.clone()),
            ScalarExpr::Sum(es) => {
                ScalarExpr::Sum(es.iter().map(|e| e.substitute_tree(bindings)).collect())
            }
            ScalarExpr::Product(es) => {
                ScalarExpr::Product(es.iter().map(|e| e.substitute_tree(bindings)).collect())
            }
            ScalarExpr::Pow(b, k) => ScalarExpr::Pow(Box::new(b.substitute_tree(bindings)), *k),
            ScalarExpr::Sin(u) => ScalarExpr::Sin(Box::new(u.substitute_tree(bindings))),
            ScalarExpr::Cos(u) => ScalarExpr::Cos(Box::new(u.substitute_tree(bindings))),
            ScalarExpr::Exp(u) => ScalarExpr::Exp(Box::new(u.substitute_tree(bindings))),
        }
    }

    /// All coordinate symbols occurring in the tree (including inside
    /// transcendental arguments).
    pub fn free_coords(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_coords(&mut out);
        out
    }

    fn collect_coords(&self, out: &mut BTreeSet<String>) {
        match self {
            ScalarExpr::Rational(_) => {}
            ScalarExpr::Coord(x) => {
                out.insert(x.clone());
            }
            ScalarExpr::Sum(es) | ScalarExpr::Product(es) => {
                for e in es {
                    e.collect_coords(out);
                }
            }
            ScalarExpr::Pow(b, _) => b.collect_coords(out),
            ScalarExpr::Sin(u) | ScalarExpr::Cos(u) | ScalarExpr::Exp(u) => u.collect_coords(out),
        }
    }

    /// IEEE double value at a full coordinate assignment.
    pub fn eval(&self, point: &BTreeMap<String, f64>) -> Result<f64> {
        let v = poly::from_expr(self).eval(point)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("{self} at {point:?}")))
        }
    }

    /// The exact rational value, if the normal form is constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        poly::from_expr(self).as_constant()
    }

    /// Max polynomial degree in `coord`, or `None` when `coord` occurs
    /// inside a transcendental argument.
    pub fn poly_degree_in(&self, coord: &str) -> Option<i32> {
        poly::from_expr(self).degree_in(coord)
    }

    /// Decide or test whether the expression is identically zero.
    ///
    /// The polynomial (and Laurent) class is decided exactly from the normal
    /// form. Normal forms containing opaque generators are sampled at
    /// `cfg.samples` points drawn from `[-2, 2]` per coordinate with the
    /// explicit seed; those verdicts are labelled `Numerically*` and never
    /// upgraded.
    pub fn is_zero(&self, cfg: &ZeroTest) -> Result<Verdict> {
        let p = poly::from_expr(self);
        if p.is_zero() {
            return Ok(Verdict::ProvenZero);
        }
        if !p.has_opaque() {
            return Ok(Verdict::ProvenNonzero);
        }
        let coords = self.free_coords();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut max = 0.0f64;
        for _ in 0..cfg.samples.max(1) {
            let point: BTreeMap<String, f64> = coords
                .iter()
                .map(|c| (c.clone(), rng.gen_range(-2.0..2.0)))
                .collect();
            let v = p.eval(&point)?;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("{self} at {point:?}")));
            }
            max = max.max(v.abs());
        }
        Ok(if max <= cfg.tol {
            Verdict::NumericallyZero
        } else {
            Verdict::NumericallyNonzero
        })
    }
}

impl std::ops::Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::Sum(vec![self, rhs])
    }
}

impl std::ops::Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::Sum(vec![self, -rhs])
    }
}

impl std::ops::Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::Product(vec![self, rhs])
    }
}

impl std::ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::Product(vec![ScalarExpr::int(-1), self])
    }
}

// ---------------------------------------------------------------------------
// Zero-test configuration and verdicts
// ---------------------------------------------------------------------------

/// Configuration for probabilistic zero tests: sample count, absolute
/// tolerance and RNG seed. Defaults match the engine-wide defaults
/// (100 samples, 1e-9, seed 42).
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTest {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            samples: 100,
            tol: 1e-9,
            seed: 42,
        }
    }
}

impl ZeroTest {
    pub fn with_seed(seed: u64) -> Self {
        ZeroTest {
            seed,
            ..Default::default()
        }
    }
}

/// Outcome of a zero test. `Proven*` verdicts are exact symbolic facts;
/// `Numerically*` verdicts come from random sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ProvenZero,
    ProvenNonzero,
    NumericallyZero,
    NumericallyNonzero,
}

impl Verdict {
    pub fn is_zero(self) -> bool {
        matches!(self, Verdict::ProvenZero | Verdict::NumericallyZero)
    }

    pub fn is_proven(self) -> bool {
        matches!(self, Verdict::ProvenZero | Verdict::ProvenNonzero)
    }

    /// Aggregate componentwise verdicts: a single provably nonzero component
    /// decides nonzero; numeric components downgrade "proven" to "numeric".
    pub fn combine_all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::ProvenZero;
        for v in verdicts {
            out = match (out, v) {
                (_, Verdict::ProvenNonzero) | (Verdict::ProvenNonzero, _) => {
                    Verdict::ProvenNonzero
                }
                (_, Verdict::NumericallyNonzero) | (Verdict::NumericallyNonzero, _) => {
                    Verdict::NumericallyNonzero
                }
                (_, Verdict::NumericallyZero) | (Verdict::NumericallyZero, _) => {
                    Verdict::NumericallyZero
                }
                (Verdict::ProvenZero, Verdict::ProvenZero) => Verdict::ProvenZero,
            };
        }
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::ProvenZero => "ProvenZero",
            Verdict::ProvenNonzero => "ProvenNonzero",
            Verdict::NumericallyZero => "NumericallyZero",
            Verdict::NumericallyNonzero => "NumericallyNonzero",
        };
        f.write_str(s)
    }
}

// ---------------------------------------------------------------------------
// Display (the shared expression text syntax)
// ---------------------------------------------------------------------------

const PREC_SUM: u8 = 1;
const PREC_PROD: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_ATOM: u8 = 4;

fn fmt_rational(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn fmt_prec(e: &ScalarExpr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = match e {
        ScalarExpr::Sum(_) => PREC_SUM,
        ScalarExpr::Product(_) => PREC_PROD,
        ScalarExpr::Pow(..) => PREC_POW,
        ScalarExpr::Rational(c) if c.is_negative() => PREC_SUM,
        _ => PREC_ATOM,
    };
    let parens = prec < min_prec;
    if parens {
        f.write_str("(")?;
    }
    match e {
        ScalarExpr::Rational(c) => fmt_rational(c, f)?,
        ScalarExpr::Coord(x) => f.write_str(x)?,
        ScalarExpr::Sum(es) => {
            for (i, t) in es.iter().enumerate() {
                let rendered = format!("{}", Prec(t, PREC_SUM));
                if i == 0 {
                    f.write_str(&rendered)?;
                } else if let Some(stripped) = rendered.strip_prefix('-') {
                    write!(f, " - {stripped}")?;
                } else {
                    write!(f, " + {rendered}")?;
                }
            }
        }
        ScalarExpr::Product(es) => {
            let mut rest = &es[..];
            let mut lead_minus = false;
            if let Some(ScalarExpr::Rational(c)) = es.first() {
                if *c == -BigRational::one() && es.len() > 1 {
                    lead_minus = true;
                    rest = &es[1..];
                }
            }
            if lead_minus {
                f.write_str("-")?;
            }
            for (i, t) in rest.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                fmt_prec(t, PREC_PROD, f)?;
            }
        }
        ScalarExpr::Pow(b, k) => {
            fmt_prec(b, PREC_ATOM, f)?;
            if *k < 0 {
                write!(f, "^({k})")?;
            } else {
                write!(f, "^{k}")?;
            }
        }
        ScalarExpr::Sin(u) => write!(f, "sin({u})")?,
        ScalarExpr::Cos(u) => write!(f, "cos({u})")?,
        ScalarExpr::Exp(u) => write!(f, "exp({u})")?,
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

struct Prec<'a>(&'a ScalarExpr, u8);

impl fmt::Display for Prec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self.0, self.1, f)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

// ---------------------------------------------------------------------------
