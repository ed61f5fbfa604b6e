//! Lifted functionals: point evaluation and fiber integration over a compact
//! interval, extended from families of scalars to families of horizontal
//! forms, plus the two Newton-Leibniz identities.
//!
//! Integration is exact (symbolic antiderivative) on the closed class of
//! integrands: polynomials in the integration variable, and `p(t)` times
//! `sin`/`cos`/`exp` of a rational-linear argument `a*t + b`. Anything else
//! degrades to Gauss-Legendre quadrature; the pending integral keeps its
//! symbolic integrand so that derivatives still commute with the integral
//! sign (differentiation under the integral).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cylinder::{horizontalize, is_horizontal, nabla, slice_form, Projection};
use crate::error::{Error, Result};
use crate::exterior::{DiffForm, MultiIndex, VectorField};
use crate::quad::GaussLegendre;
use crate::scalar::poly::{self, Atom};
use crate::scalar::{ScalarExpr, Verdict, ZeroTest};
use crate::spaces::{compose, slicing, Chart, CylinderSpace, ParamPoint, SmoothMap};

pub const DEFAULT_QUAD_NODES: usize = 32;

/// What the functional does on `C^inf(G)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionalKind {
    /// Evaluation at a parameter point.
    PointEval(ParamPoint),
    /// Definite integration of one parameter variable over `[lo, hi]`.
    Integral {
        var: String,
        lo: BigRational,
        hi: BigRational,
    },
}

/// How integrals are computed: exact antiderivatives (failing outside the
/// closed class) or quadrature with a fixed node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Symbolic,
    Quadrature { nodes: usize },
}

/// A bounded functional on the parameter factor, lifted to families.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedFunctional {
    pub kind: FunctionalKind,
    pub method: Method,
}

impl LiftedFunctional {
    pub fn point_eval(g: ParamPoint) -> Self {
        LiftedFunctional {
            kind: FunctionalKind::PointEval(g),
            method: Method::Symbolic,
        }
    }

    pub fn integral(var: impl Into<String>, lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidFunctional(format!(
                "integration interval needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(LiftedFunctional {
            kind: FunctionalKind::Integral {
                var: var.into(),
                lo,
                hi,
            },
            method: Method::Symbolic,
        })
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    fn validate(&self, cyl: &CylinderSpace) -> Result<()> {
        match &self.kind {
            FunctionalKind::PointEval(g) => {
                for c in cyl.params().coords() {
                    if !g.contains_key(c) {
                        return Err(Error::UnboundCoordinate(c.clone()));
                    }
                }
            }
            FunctionalKind::Integral { var, .. } => {
                if !cyl.params().coords().contains(var) {
                    return Err(Error::InvalidFunctional(format!(
                        "`{var}` is not a parameter coordinate of {}",
                        cyl.name()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Apply to a family of scalars, honoring `self.method` strictly: the
    /// symbolic method errors outside the closed class.
    pub fn apply_scalar(&self, cyl: &CylinderSpace, f: &ScalarExpr) -> Result<LiftedScalar> {
        self.apply_scalar_inner(cyl, f, false)
    }

    /// Apply to a family of scalars, trying the symbolic route first and
    /// falling back to a pending quadrature integral outside the closed
    /// class.
    pub fn apply_scalar_auto(&self, cyl: &CylinderSpace, f: &ScalarExpr) -> Result<LiftedScalar> {
        self.apply_scalar_inner(cyl, f, true)
    }

    fn apply_scalar_inner(
        &self,
        cyl: &CylinderSpace,
        f: &ScalarExpr,
        auto: bool,
    ) -> Result<LiftedScalar> {
        self.validate(cyl)?;
        for c in f.free_coords() {
            if !Chart::Cylinder(cyl.clone()).contains_coord(&c) {
                return Err(Error::UnknownCoordinate(format!(
                    "{c} is not a coordinate of {}",
                    cyl.name()
                )));
            }
        }
        match &self.kind {
            FunctionalKind::PointEval(g) => {
                let bindings: BTreeMap<String, ScalarExpr> = g
                    .iter()
                    .map(|(k, v)| (k.clone(), ScalarExpr::Rational(v.clone())))
                    .collect();
                Ok(LiftedScalar::from_exact(f.substitute(&bindings)))
            }
            FunctionalKind::Integral { var, lo, hi } => {
                let symbolic = if auto || self.method == Method::Symbolic {
                    symbolic_definite_integral(f, var, lo, hi)
                } else {
                    None
                };
                match symbolic {
                    Some(exact) => Ok(LiftedScalar::from_exact(exact)),
                    None if auto || matches!(self.method, Method::Quadrature { .. }) => {
                        Ok(LiftedScalar::pending(PendingIntegral {
                            integrand: f.normalize(),
                            var: var.clone(),
                            lo: lo.clone(),
                            hi: hi.clone(),
                        }))
                    }
                    None => Err(Error::SymbolicIntegrationUnsupported(f.to_string())),
                }
            }
        }
    }

    /// Apply to a family of forms (horizontal over `pi_M`): coefficientwise
    /// lift, wedge monomials re-indexed onto the base. Fiber integration of
    /// forms requires a one-dimensional parameter factor.
    pub fn apply_form(&self, form: &DiffForm) -> Result<LiftedForm> {
        self.apply_form_inner(form, false)
    }

    pub fn apply_form_auto(&self, form: &DiffForm) -> Result<LiftedForm> {
        self.apply_form_inner(form, true)
    }

    fn apply_form_inner(&self, form: &DiffForm, auto: bool) -> Result<LiftedForm> {
        let cyl = form.chart().as_cylinder()?.clone();
        if !is_horizontal(form, Projection::Base)? {
            let witness = crate::cylinder::non_horizontal_part(form, Projection::Base)?;
            return Err(Error::NotHorizontal(
                "piM (lifted functional on forms)".into(),
                witness.to_string(),
            ));
        }
        if matches!(self.kind, FunctionalKind::Integral { .. }) && cyl.params().dim() != 1 {
            return Err(Error::InvalidFunctional(format!(
                "fiber integration of forms needs a one-dimensional parameter factor, {} has {}",
                cyl.params().name(),
                cyl.params().dim()
            )));
        }
        self.validate(&cyl)?;
        let target = Chart::Space(cyl.base().clone());
        let mut out = LiftedForm::zero(target, form.degree());
        for (idx, coeff) in form.terms() {
            // horizontal indices are base positions, unchanged on the base chart
            let ls = self.apply_scalar_inner(&cyl, coeff, auto)?;
            out.insert(idx.clone(), ls);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Symbolic antiderivatives on the closed class
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
enum TransKind {
    Sin,
    Cos,
    Exp,
}

/// Exact definite integral, or `None` outside the closed class.
pub fn symbolic_definite_integral(
    f: &ScalarExpr,
    var: &str,
    lo: &BigRational,
    hi: &BigRational,
) -> Option<ScalarExpr> {
    let anti = symbolic_antiderivative(f, var)?;
    let mut at_hi = BTreeMap::new();
    at_hi.insert(var.to_string(), ScalarExpr::Rational(hi.clone()));
    let mut at_lo = BTreeMap::new();
    at_lo.insert(var.to_string(), ScalarExpr::Rational(lo.clone()));
    Some((anti.substitute(&at_hi) - anti.substitute(&at_lo)).normalize())
}

/// Antiderivative in `var`, or `None` outside the closed class.
pub fn symbolic_antiderivative(f: &ScalarExpr, var: &str) -> Option<ScalarExpr> {
    let p = poly::from_expr(f);
    let mut acc = ScalarExpr::zero();
    for (mono, coef) in p.terms() {
        acc = acc + term_antiderivative(mono, coef, var)?;
    }
    Some(acc.normalize())
}

fn term_antiderivative(
    mono: &[(Atom, i32)],
    coef: &BigRational,
    var: &str,
) -> Option<ScalarExpr> {
    let mut var_pow: i32 = 0;
    let mut trans: Option<(TransKind, ScalarExpr)> = None;
    let mut rest: Vec<ScalarExpr> = vec![ScalarExpr::Rational(coef.clone())];

    for (atom, e) in mono {
        let depends = |u: &ScalarExpr| u.free_coords().contains(var);
        match atom {
            Atom::Coord(c) if c == var => var_pow = *e,
            Atom::Coord(c) => rest.push(ScalarExpr::coord(c.clone()).pow(*e)),
            Atom::Sin(u) if depends(u) => {
                if trans.is_some() || *e != 1 {
                    return None;
                }
                trans = Some((TransKind::Sin, u.clone()));
            }
            Atom::Cos(u) if depends(u) => {
                if trans.is_some() || *e != 1 {
                    return None;
                }
                trans = Some((TransKind::Cos, u.clone()));
            }
            Atom::Exp(u) if depends(u) => {
                if trans.is_some() || *e != 1 {
                    return None;
                }
                trans = Some((TransKind::Exp, u.clone()));
            }
            Atom::Recip(u) if depends(u) => return None,
            Atom::Sin(u) => rest.push(u.clone().sin().pow(*e)),
            Atom::Cos(u) => rest.push(u.clone().cos().pow(*e)),
            Atom::Exp(u) => rest.push(u.clone().exp().pow(*e)),
            Atom::Recip(u) => rest.push(u.clone().pow(-*e)),
        }
    }
    if var_pow < 0 {
        return None;
    }
    let rest_expr = ScalarExpr::Product(rest);
    match trans {
        None => {
            // integral of t^n is t^(n+1)/(n+1)
            let n1 = var_pow + 1;
            let scale = ScalarExpr::Rational(BigRational::new(1.into(), (n1 as i64).into()));
            Some(rest_expr * scale * ScalarExpr::coord(var).pow(n1))
        }
        Some((kind, u)) => {
            let alpha = linear_rational_coefficient(&u, var)?;
            Some(rest_expr * trans_antiderivative(kind, var_pow, &alpha, &u, var))
        }
    }
}

/// The rational slope of `u = alpha*var + beta`; `None` unless `u` is
/// exactly rational-linear in `var`.
fn linear_rational_coefficient(u: &ScalarExpr, var: &str) -> Option<BigRational> {
    let p = poly::from_expr(u);
    let mut alpha: Option<BigRational> = None;
    for (mono, coef) in p.terms() {
        match mono.len() {
            0 => {} // rational constant part
            1 => {
                let (atom, e) = &mono[0];
                if *e == 1 {
                    if let Atom::Coord(c) = atom {
                        if c == var {
                            alpha = Some(coef.clone());
                            continue;
                        }
                    }
                }
                return None;
            }
            _ => return None,
        }
    }
    alpha.filter(|a| !a.is_zero())
}

/// Integration-by-parts table for `t^n {sin,cos,exp}(alpha t + beta)`.
fn trans_antiderivative(
    kind: TransKind,
    n: i32,
    alpha: &BigRational,
    u: &ScalarExpr,
    var: &str,
) -> ScalarExpr {
    let inv_a = ScalarExpr::Rational(alpha.recip());
    let t = ScalarExpr::coord(var);
    let tn = |n: i32| if n == 0 { ScalarExpr::one() } else { t.clone().pow(n) };
    let nn = |n: i32| ScalarExpr::Rational(BigRational::from_integer((n as i64).into()));
    match kind {
        TransKind::Exp => {
            // E(n) = t^n exp(u)/a - (n/a) E(n-1)
            let mut acc = inv_a.clone() * u.clone().exp();
            for k in 1..=n {
                acc = inv_a.clone() * tn(k) * u.clone().exp() - inv_a.clone() * nn(k) * acc;
            }
            acc.normalize()
        }
        TransKind::Sin | TransKind::Cos => {
            // S(n) = -t^n cos(u)/a + (n/a) C(n-1)
            // C(n) =  t^n sin(u)/a - (n/a) S(n-1)
            let mut s = -(inv_a.clone() * u.clone().cos());
            let mut c = inv_a.clone() * u.clone().sin();
            for k in 1..=n {
                let s_k =
                    -(inv_a.clone() * tn(k) * u.clone().cos()) + inv_a.clone() * nn(k) * c.clone();
                let c_k =
                    inv_a.clone() * tn(k) * u.clone().sin() - inv_a.clone() * nn(k) * s.clone();
                s = s_k;
                c = c_k;
            }
            match kind {
                TransKind::Sin => s.normalize(),
                _ => c.normalize(),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Lifted scalars and forms (exact part + pending quadrature integrals)
// ---------------------------------------------------------------------------

/// A definite integral kept symbolic: evaluated by quadrature, but still
/// differentiable under the integral sign.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingIntegral {
    pub integrand: ScalarExpr,
    pub var: String,
    pub lo: BigRational,
    pub hi: BigRational,
}

impl PendingIntegral {
    fn eval(&self, point: &BTreeMap<String, f64>, rule: &GaussLegendre) -> Result<f64> {
        let lo = self
            .lo
            .to_f64()
            .ok_or_else(|| Error::NonFinite("interval endpoint".into()))?;
        let hi = self
            .hi
            .to_f64()
            .ok_or_else(|| Error::NonFinite("interval endpoint".into()))?;
        let mut point = point.clone();
        rule.integrate(
            |t| {
                point.insert(self.var.clone(), t);
                self.integrand.eval(&point)
            },
            lo,
            hi,
        )
    }

    fn partial(&self, coord: &str) -> Result<PendingIntegral> {
        if coord == self.var {
            return Err(Error::InvalidFunctional(format!(
                "cannot differentiate a pending integral by its own variable `{coord}`"
            )));
        }
        Ok(PendingIntegral {
            integrand: self.integrand.partial(coord),
            var: self.var.clone(),
            lo: self.lo.clone(),
            hi: self.hi.clone(),
        })
    }
}

impl fmt::Display for PendingIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "int[{}={}..{}]({})",
            self.var, self.lo, self.hi, self.integrand
        )
    }
}

/// Result of a lifted functional on scalars: an exact closed-form part plus
/// a sum of pending quadrature integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedScalar {
    exact: ScalarExpr,
    pending: Vec<PendingIntegral>,
}

impl LiftedScalar {
    pub fn from_exact(e: ScalarExpr) -> Self {
        LiftedScalar {
            exact: e.normalize(),
            pending: Vec::new(),
        }
    }

    pub fn pending(p: PendingIntegral) -> Self {
        LiftedScalar {
            exact: ScalarExpr::zero().normalize(),
            pending: if p.integrand.is_normal_zero() {
                Vec::new()
            } else {
                vec![p]
            },
        }
    }

    pub fn is_exact(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn exact_part(&self) -> &ScalarExpr {
        &self.exact
    }

    pub fn pending_part(&self) -> &[PendingIntegral] {
        &self.pending
    }

    pub fn into_exact(self) -> Option<ScalarExpr> {
        if self.pending.is_empty() {
            Some(self.exact)
        } else {
            None
        }
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.pending.is_empty() && self.exact.is_normal_zero()
    }

    pub fn add(&self, other: &LiftedScalar) -> LiftedScalar {
        // integrals over the same interval merge by linearity, so exact
        // cancellations under the integral sign are recognized symbolically
        let mut merged: BTreeMap<(String, BigRational, BigRational), ScalarExpr> = BTreeMap::new();
        for p in self.pending.iter().chain(other.pending.iter()) {
            let key = (p.var.clone(), p.lo.clone(), p.hi.clone());
            let entry = merged.entry(key).or_insert_with(ScalarExpr::zero);
            *entry = (entry.clone() + p.integrand.clone()).normalize();
        }
        let pending = merged
            .into_iter()
            .filter(|(_, integrand)| !integrand.is_normal_zero())
            .map(|((var, lo, hi), integrand)| PendingIntegral {
                integrand,
                var,
                lo,
                hi,
            })
            .collect();
        LiftedScalar {
            exact: (self.exact.clone() + other.exact.clone()).normalize(),
            pending,
        }
    }

    pub fn neg(&self) -> LiftedScalar {
        LiftedScalar {
            exact: (-self.exact.clone()).normalize(),
            pending: self
                .pending
                .iter()
                .map(|p| PendingIntegral {
                    integrand: (-p.integrand.clone()).normalize(),
                    ..p.clone()
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &LiftedScalar) -> LiftedScalar {
        self.add(&other.neg())
    }

    /// Multiply by an exact scalar independent of the pending integration
    /// variables (it moves inside the integral sign).
    pub fn mul_exact(&self, f: &ScalarExpr) -> Result<LiftedScalar> {
        let free = f.free_coords();
        for p in &self.pending {
            if free.contains(&p.var) {
                return Err(Error::InvalidFunctional(format!(
                    "cannot scale a pending integral by an expression in `{}`",
                    p.var
                )));
            }
        }
        Ok(LiftedScalar {
            exact: (f.clone() * self.exact.clone()).normalize(),
            pending: self
                .pending
                .iter()
                .map(|p| PendingIntegral {
                    integrand: (f.clone() * p.integrand.clone()).normalize(),
                    ..p.clone()
                })
                .filter(|p| !p.integrand.is_normal_zero())
                .collect(),
        })
    }

    /// Differentiation under the integral sign.
    pub fn partial(&self, coord: &str) -> Result<LiftedScalar> {
        let pending = self
            .pending
            .iter()
            .map(|p| p.partial(coord))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|p| !p.integrand.is_normal_zero())
            .collect();
        Ok(LiftedScalar {
            exact: self.exact.partial(coord),
            pending,
        })
    }

    pub fn free_coords(&self) -> BTreeSet<String> {
        let mut out = self.exact.free_coords();
        for p in &self.pending {
            let mut inner = p.integrand.free_coords();
            inner.remove(&p.var);
            out.extend(inner);
        }
        out
    }

    pub fn eval(&self, point: &BTreeMap<String, f64>, rule: &GaussLegendre) -> Result<f64> {
        let mut v = self.exact.eval(point)?;
        for p in &self.pending {
            v += p.eval(point, rule)?;
        }
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("lifted scalar evaluation".into()))
        }
    }

    /// Zero test: exact when no integral is pending, numeric sampling
    /// otherwise.
    pub fn is_zero(&self, cfg: &ZeroTest, nodes: usize) -> Result<Verdict> {
        if self.pending.is_empty() {
            return self.exact.is_zero(cfg);
        }
        let coords = self.free_coords();
        let rule = GaussLegendre::new(nodes);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut max = 0.0f64;
        for _ in 0..cfg.samples.max(1) {
            let point: BTreeMap<String, f64> = coords
                .iter()
                .map(|c| (c.clone(), rng.gen_range(-2.0..2.0)))
                .collect();
            max = max.max(self.eval(&point, &rule)?.abs());
        }
        Ok(if max <= cfg.tol {
            Verdict::NumericallyZero
        } else {
            Verdict::NumericallyNonzero
        })
    }
}

impl fmt::Display for LiftedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact)?;
        for p in &self.pending {
            write!(f, " + {p}")?;
        }
        Ok(())
    }
}

/// A form on the base whose coefficients may contain pending integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedForm {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<MultiIndex, LiftedScalar>,
}

impl LiftedForm {
    pub fn zero(chart: Chart, degree: usize) -> Self {
        LiftedForm {
            chart,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_form(form: &DiffForm) -> Self {
        let mut out = LiftedForm::zero(form.chart().clone(), form.degree());
        for (idx, c) in form.terms() {
            out.insert(idx.clone(), LiftedScalar::from_exact(c.clone()));
        }
        out
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &LiftedScalar)> {
        self.terms.iter()
    }

    pub fn insert(&mut self, idx: MultiIndex, ls: LiftedScalar) {
        let merged = match self.terms.remove(&idx) {
            Some(old) => old.add(&ls),
            None => ls,
        };
        if !merged.is_structurally_zero() {
            self.terms.insert(idx, merged);
        }
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(LiftedScalar::is_exact)
    }

    pub fn into_exact(self) -> Option<DiffForm> {
        if !self.is_exact() {
            return None;
        }
        let terms: Vec<(MultiIndex, ScalarExpr)> = self
            .terms
            .into_iter()
            .map(|(i, ls)| (i, ls.exact))
            .collect();
        DiffForm::from_terms(self.chart, self.degree, terms).ok()
    }

    pub fn coefficient(&self, idx: &[u32]) -> LiftedScalar {
        self.terms
            .get(idx)
            .cloned()
            .unwrap_or_else(|| LiftedScalar::from_exact(ScalarExpr::zero()))
    }

    pub fn add(&self, other: &LiftedForm) -> Result<LiftedForm> {
        if self.chart != other.chart {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                self.chart.name(),
                other.chart.name()
            )));
        }
        if self.degree != other.degree && !self.terms.is_empty() && !other.terms.is_empty() {
            return Err(Error::Degree(format!(
                "cannot combine degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let degree = if self.terms.is_empty() {
            other.degree
        } else {
            self.degree
        };
        let mut out = LiftedForm::zero(self.chart.clone(), degree);
        for (idx, ls) in self.terms.iter().chain(other.terms.iter()) {
            out.insert(idx.clone(), ls.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> LiftedForm {
        let mut out = LiftedForm::zero(self.chart.clone(), self.degree);
        for (idx, ls) in &self.terms {
            out.insert(idx.clone(), ls.neg());
        }
        out
    }

    pub fn sub(&self, other: &LiftedForm) -> Result<LiftedForm> {
        self.add(&other.neg())
    }

    /// Exterior derivative, differentiating pending integrals under the
    /// integral sign.
    pub fn d(&self) -> Result<LiftedForm> {
        let coords = self.chart.coords();
        let mut out = LiftedForm::zero(self.chart.clone(), self.degree + 1);
        for (idx, ls) in &self.terms {
            for (p, coord) in coords.iter().enumerate() {
                let p = p as u32;
                if idx.contains(&p) {
                    continue;
                }
                let dls = ls.partial(coord)?;
                if dls.is_structurally_zero() {
                    continue;
                }
                let pos = idx.iter().filter(|&&i| i < p).count();
                let mut new_idx = idx.clone();
                new_idx.insert(pos, p);
                out.insert(new_idx, if pos % 2 == 1 { dls.neg() } else { dls });
            }
        }
        Ok(out)
    }

    /// Zero test: exact path when every coefficient is exact, otherwise
    /// numeric sampling of all coefficients at common random points.
    pub fn is_zero(&self, cfg: &ZeroTest, nodes: usize) -> Result<Verdict> {
        if self.terms.is_empty() {
            return Ok(Verdict::ProvenZero);
        }
        if self.is_exact() {
            let mut verdicts = Vec::new();
            for ls in self.terms.values() {
                verdicts.push(ls.exact.is_zero(cfg)?);
            }
            return Ok(Verdict::combine_all(verdicts));
        }
        let mut coords = BTreeSet::new();
        for ls in self.terms.values() {
            coords.extend(ls.free_coords());
        }
        let rule = GaussLegendre::new(nodes);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut max = 0.0f64;
        for _ in 0..cfg.samples.max(1) {
            let point: BTreeMap<String, f64> = coords
                .iter()
                .map(|c| (c.clone(), rng.gen_range(-2.0..2.0)))
                .collect();
            for ls in self.terms.values() {
                max = max.max(ls.eval(&point, &rule)?.abs());
            }
        }
        Ok(if max <= cfg.tol {
            Verdict::NumericallyZero
        } else {
            Verdict::NumericallyNonzero
        })
    }
}

impl fmt::Display for LiftedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let coords = self.chart.coords();
        for (i, (idx, ls)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let wedge = idx
                .iter()
                .map(|&p| format!("d{}", coords[p as usize]))
                .collect::<Vec<_>>()
                .join(" ^ ");
            if idx.is_empty() {
                write!(f, "{ls}")?;
            } else {
                write!(f, "({ls}) * {wedge}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Newton-Leibniz identities
// ---------------------------------------------------------------------------

fn interval_cylinder(map: &SmoothMap) -> Result<(CylinderSpace, String)> {
    let cyl = map.source().as_cylinder()?.clone();
    if cyl.params().dim() != 1 {
        return Err(Error::InvalidChart(format!(
            "expected an interval cylinder, parameter factor {} has dimension {}",
            cyl.params().name(),
            cyl.params().dim()
        )));
    }
    let var = cyl.params().coords()[0].clone();
    Ok((cyl, var))
}

fn endpoint(var: &str, value: &BigRational) -> ParamPoint {
    let mut g = ParamPoint::new();
    g.insert(var.to_string(), value.clone());
    g
}

/// Scalar/map Newton-Leibniz: integral of the time derivative of the pulled
/// back function equals the difference of the endpoint pullbacks.
pub fn newton_leibniz_scalar(
    map: &SmoothMap,
    lo: &BigRational,
    hi: &BigRational,
    f: &ScalarExpr,
    cfg: &ZeroTest,
    nodes: usize,
) -> Result<Verdict> {
    let (cyl, var) = interval_cylinder(map)?;
    let pulled = map.pullback_scalar(f)?;
    let rate = pulled.partial(&var);
    let functional = LiftedFunctional::integral(var.clone(), lo.clone(), hi.clone())?;
    let lhs = functional.apply_scalar_auto(&cyl, &rate)?;
    let f_hi = compose(map, &slicing(&cyl, &endpoint(&var, hi))?)?.pullback_scalar(f)?;
    let f_lo = compose(map, &slicing(&cyl, &endpoint(&var, lo))?)?.pullback_scalar(f)?;
    let rhs = LiftedScalar::from_exact((f_hi - f_lo).normalize());
    lhs.sub(&rhs).is_zero(cfg, nodes)
}

/// Form-valued Newton-Leibniz on an interval cylinder:
/// `I_a^b . nabla_{d/dt} . p0` equals `iota_b* - iota_a*`.
pub fn nl_form_identity(
    form: &DiffForm,
    lo: &BigRational,
    hi: &BigRational,
    cfg: &ZeroTest,
    nodes: usize,
) -> Result<Verdict> {
    let cyl = form.chart().as_cylinder()?.clone();
    if cyl.params().dim() != 1 {
        return Err(Error::InvalidChart(
            "form-valued Newton-Leibniz needs an interval cylinder".into(),
        ));
    }
    let var = cyl.params().coords()[0].clone();
    let ddt = VectorField::coordinate_field(Chart::Space(cyl.params().clone()), &var)?;
    let functional = LiftedFunctional::integral(var.clone(), lo.clone(), hi.clone())?;
    let lhs = functional.apply_form_auto(&nabla(&ddt, &horizontalize(form)?)?)?;
    let rhs_hi = slice_form(form, &endpoint(&var, hi), false)?;
    let rhs_lo = slice_form(form, &endpoint(&var, lo), false)?;
    let rhs = LiftedForm::from_form(&rhs_hi.sub(&rhs_lo)?);
    lhs.sub(&rhs)?.is_zero(cfg, nodes)
}
