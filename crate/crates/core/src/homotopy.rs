//! Homotopies `F : M x [a,b] -> N`, derivatives of map families, flow
//! verification, the homotopy operator `h = I_a^b . p0 . i_{dF/dt}` and the
//! machine check of the homotopy formula `F_b* - F_a* = h d + d h`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::cylinder::{canonical_lift, horizontalize, nabla, time_field};
use crate::error::{Error, Result};
use crate::exterior::{DiffForm, VectorField};
use crate::integrate::{LiftedForm, LiftedFunctional};
use crate::scalar::{ScalarExpr, Verdict, ZeroTest};
use crate::spaces::{compose, slicing, Chart, CylinderSpace, ParamPoint, SmoothMap};

/// A smooth homotopy: a map whose source is an interval cylinder
/// `M x [lo, hi]` with a single parameter coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Homotopy {
    map: SmoothMap,
    lo: BigRational,
    hi: BigRational,
}

impl Homotopy {
    pub fn new(map: SmoothMap, lo: BigRational, hi: BigRational) -> Result<Self> {
        let cyl = map.source().as_cylinder()?;
        if cyl.params().dim() != 1 {
            return Err(Error::InvalidChart(format!(
                "a homotopy needs a one-dimensional parameter factor, {} has {}",
                cyl.params().name(),
                cyl.params().dim()
            )));
        }
        if lo >= hi {
            return Err(Error::InvalidFunctional(format!(
                "homotopy interval needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Homotopy { map, lo, hi })
    }

    pub fn map(&self) -> &SmoothMap {
        &self.map
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn cylinder(&self) -> &CylinderSpace {
        match self.map.source() {
            Chart::Cylinder(c) => c,
            Chart::Space(_) => unreachable!("validated at construction"),
        }
    }

    pub fn param(&self) -> &str {
        &self.cylinder().params().coords()[0]
    }

    fn endpoint(&self, value: &BigRational) -> ParamPoint {
        let mut g = ParamPoint::new();
        g.insert(self.param().to_string(), value.clone());
        g
    }

    /// The slice `F_t : M -> N` at a parameter value.
    pub fn slice_at(&self, value: &BigRational) -> Result<SmoothMap> {
        compose(&self.map, &slicing(self.cylinder(), &self.endpoint(value))?)
    }

    pub fn start_map(&self) -> Result<SmoothMap> {
        self.slice_at(&self.lo.clone())
    }

    pub fn end_map(&self) -> Result<SmoothMap> {
        self.slice_at(&self.hi.clone())
    }

    fn integral(&self) -> LiftedFunctional {
        LiftedFunctional::integral(self.param(), self.lo.clone(), self.hi.clone())
            .expect("interval validated at construction")
    }
}

/// A vector field along a map `F`: one component per target coordinate,
/// with coefficients on the source.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeVectorField {
    along: SmoothMap,
    components: BTreeMap<String, ScalarExpr>,
}

impl RelativeVectorField {
    pub fn along(&self) -> &SmoothMap {
        &self.along
    }

    pub fn component(&self, coord: &str) -> ScalarExpr {
        self.components
            .get(coord)
            .cloned()
            .unwrap_or_else(ScalarExpr::zero)
    }

    pub fn components(&self) -> &BTreeMap<String, ScalarExpr> {
        &self.components
    }

    pub fn is_zero_field(&self) -> bool {
        self.components.values().all(ScalarExpr::is_normal_zero)
    }
}

impl fmt::Display for RelativeVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        for (i, (coord, comp)) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({comp}) * d/d{coord}")?;
        }
        Ok(())
    }
}

/// Derivative of the map family along a field on the parameter factor: the
/// relative field whose `u`-component is the lifted field applied to `F`'s
/// `u`-component.
pub fn map_family_derivative(h: &Homotopy, x: &VectorField) -> Result<RelativeVectorField> {
    let cyl = h.cylinder();
    if x.chart() != &Chart::Space(cyl.params().clone()) {
        return Err(Error::FactorMismatch(format!(
            "derivative of a map family is taken along a field on {}",
            cyl.params().name()
        )));
    }
    let lifted = canonical_lift(x, cyl)?;
    let mut components = BTreeMap::new();
    for coord in h.map.target().coords() {
        let comp = lifted.apply(h.map.component(&coord)?)?;
        if !comp.is_normal_zero() {
            components.insert(coord.clone(), comp);
        }
    }
    Ok(RelativeVectorField {
        along: h.map.clone(),
        components,
    })
}

/// The infinitesimal homotopy `F' = dF/dt`.
pub fn infinitesimal_homotopy(h: &Homotopy) -> Result<RelativeVectorField> {
    let ddt = VectorField::coordinate_field(
        Chart::Space(h.cylinder().params().clone()),
        h.param(),
    )?;
    map_family_derivative(h, &ddt)
}

/// Report of the two flow conditions: relatedness `d/dt . A* = A* . X` on a
/// generating set of functions, and `A . iota_0 = id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowReport {
    pub generator: Verdict,
    pub initial: Verdict,
}

impl FlowReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::combine_all([self.generator, self.initial])
    }
}

/// Check that `a : M x G -> M` is the flow of `x`. It suffices to test the
/// relatedness identity on the coordinate functions of `M`, since both sides
/// are derivations composed with `a*`.
pub fn flow_check(a: &SmoothMap, x: &VectorField, cfg: &ZeroTest) -> Result<FlowReport> {
    let cyl = a.source().as_cylinder()?.clone();
    if cyl.params().dim() != 1 {
        return Err(Error::InvalidChart(
            "flow check needs a one-parameter cylinder".into(),
        ));
    }
    if a.target() != &Chart::Space(cyl.base().clone()) {
        return Err(Error::SpaceMismatch(format!(
            "a flow maps {} back to its base {}",
            cyl.name(),
            cyl.base().name()
        )));
    }
    if x.chart() != a.target() {
        return Err(Error::SpaceMismatch(format!(
            "generating field lives on {}, flow target is {}",
            x.chart().name(),
            a.target().name()
        )));
    }
    let t = cyl.params().coords()[0].clone();

    let mut generator_verdicts = Vec::new();
    for coord in cyl.base().coords() {
        let lhs = a.component(coord)?.partial(&t);
        let rhs = a.pullback_scalar(&x.apply(&ScalarExpr::coord(coord.clone()))?)?;
        generator_verdicts.push((lhs - rhs).is_zero(cfg)?);
    }

    let mut zero_pt = ParamPoint::new();
    zero_pt.insert(t, BigRational::from_integer(0.into()));
    let at_zero = compose(a, &slicing(&cyl, &zero_pt)?)?;
    let mut initial_verdicts = Vec::new();
    for coord in cyl.base().coords() {
        let diff = at_zero.component(coord)?.clone() - ScalarExpr::coord(coord.clone());
        initial_verdicts.push(diff.is_zero(cfg)?);
    }

    Ok(FlowReport {
        generator: Verdict::combine_all(generator_verdicts),
        initial: Verdict::combine_all(initial_verdicts),
    })
}

/// Contraction with the infinitesimal homotopy, defined through the identity
/// `i_{dF/dt}(w) = i_{d/dt}(F*(w))`. The relative field must be the
/// infinitesimal homotopy of its own map.
pub fn interior_relative(v: &RelativeVectorField, form: &DiffForm) -> Result<DiffForm> {
    let cyl = v.along.source().as_cylinder()?.clone();
    if cyl.params().dim() != 1 {
        return Err(Error::InvalidChart(
            "relative contraction needs a one-parameter cylinder".into(),
        ));
    }
    let t = cyl.params().coords()[0].clone();
    for coord in v.along.target().coords() {
        let expected = v.along.component(&coord)?.partial(&t);
        if !expected.equivalent(&v.component(&coord)) {
            return Err(Error::UnsupportedRelativeContraction(format!(
                "component `{coord}` is {} but dF/dt gives {expected}",
                v.component(&coord)
            )));
        }
    }
    if form.degree() == 0 {
        return Err(Error::Degree(
            "relative contraction needs a form of degree >= 1".into(),
        ));
    }
    let pulled = form.pullback(&v.along)?;
    pulled.interior(&time_field(&cyl)?)
}

/// The homotopy operator `h = I_a^b . p0 . i_{dF/dt}`, a degree `-1`
/// operator from forms on `N` to forms on `M`. Exact on the polynomial
/// class; quadrature coefficients appear exactly when a pulled-back
/// coefficient leaves the symbolically integrable class.
pub fn homotopy_operator(h: &Homotopy, form: &DiffForm) -> Result<LiftedForm> {
    if form.degree() == 0 {
        return Err(Error::Degree(
            "the homotopy operator is defined on forms of degree >= 1".into(),
        ));
    }
    if form.chart() != h.map.target() {
        return Err(Error::SpaceMismatch(format!(
            "form lives on {}, homotopy lands in {}",
            form.chart().name(),
            h.map.target().name()
        )));
    }
    let cyl = h.cylinder();
    let pulled = form.pullback(&h.map)?;
    let contracted = pulled.interior(&time_field(cyl)?)?;
    let horizontal = horizontalize(&contracted)?;
    h.integral().apply_form_auto(&horizontal)
}

/// Residual and verdict of the homotopy formula
/// `F_b* - F_a* - h.d - d.h = 0` applied to `form`.
pub fn verify_homotopy_formula(
    h: &Homotopy,
    form: &DiffForm,
    cfg: &ZeroTest,
    nodes: usize,
) -> Result<(Verdict, LiftedForm)> {
    if form.degree() == 0 {
        return Err(Error::Degree(
            "use the universal Newton-Leibniz check for 0-forms".into(),
        ));
    }
    let pull_hi = form.pullback(&h.end_map()?)?;
    let pull_lo = form.pullback(&h.start_map()?)?;
    let h_d = homotopy_operator(h, &form.d())?;
    let d_h = homotopy_operator(h, form)?.d()?;
    let residual = LiftedForm::from_form(&pull_hi.sub(&pull_lo)?)
        .sub(&h_d)?
        .sub(&d_h)?;
    let verdict = residual.is_zero(cfg, nodes)?;
    Ok((verdict, residual))
}

/// The universal Newton-Leibniz identity pushed through `F*`:
/// `I_a^b . nabla_{d/dt} . p0 . F* = F_b* - F_a*`.
pub fn universal_nl_check(
    h: &Homotopy,
    form: &DiffForm,
    cfg: &ZeroTest,
    nodes: usize,
) -> Result<Verdict> {
    if form.chart() != h.map.target() {
        return Err(Error::SpaceMismatch(format!(
            "form lives on {}, homotopy lands in {}",
            form.chart().name(),
            h.map.target().name()
        )));
    }
    let cyl = h.cylinder();
    let ddt = VectorField::coordinate_field(Chart::Space(cyl.params().clone()), h.param())?;
    let pulled = form.pullback(&h.map)?;
    let lhs = h
        .integral()
        .apply_form_auto(&nabla(&ddt, &horizontalize(&pulled)?)?)?;
    let rhs = form.pullback(&h.end_map()?)?.sub(&form.pullback(&h.start_map()?)?)?;
    lhs.sub(&LiftedForm::from_form(&rhs))?.is_zero(cfg, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;
    use crate::spaces::Space;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn contraction_r2() -> (Homotopy, Chart) {
        // F(x, y, t) = (t x, t y) on [0, 1]
        let m = Space::new("M", &["x", "y"]).unwrap();
        let g = Space::new("T", &["t"]).unwrap();
        let cyl = CylinderSpace::new(m, g).unwrap();
        let n = Chart::Space(Space::new("N", &["u", "v"]).unwrap());
        let mut comps = BTreeMap::new();
        comps.insert("u".to_string(), parse_scalar("t*x").unwrap());
        comps.insert("v".to_string(), parse_scalar("t*y").unwrap());
        let map = SmoothMap::new(Chart::Cylinder(cyl), n.clone(), comps).unwrap();
        (Homotopy::new(map, rat(0), rat(1)).unwrap(), n)
    }

    fn line_homotopy() -> (Homotopy, Chart) {
        // F(x, t) = t x on [0, 1]
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("T", &["t"]).unwrap();
        let cyl = CylinderSpace::new(m, g).unwrap();
        let n = Chart::Space(Space::new("N", &["u"]).unwrap());
        let mut comps = BTreeMap::new();
        comps.insert("u".to_string(), parse_scalar("t*x").unwrap());
        let map = SmoothMap::new(Chart::Cylinder(cyl), n.clone(), comps).unwrap();
        (Homotopy::new(map, rat(0), rat(1)).unwrap(), n)
    }

    #[test]
    fn map_family_derivative_examples() {
        let (h, _) = line_homotopy();
        let fp = infinitesimal_homotopy(&h).unwrap();
        assert!(fp.component("u").equivalent(&ScalarExpr::coord("x")));

        // constant homotopy has zero derivative
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("T", &["t"]).unwrap();
        let cyl = CylinderSpace::new(m, g).unwrap();
        let n = Chart::Space(Space::new("N", &["u"]).unwrap());
        let mut comps = BTreeMap::new();
        comps.insert("u".to_string(), ScalarExpr::coord("x"));
        let map = SmoothMap::new(Chart::Cylinder(cyl), n, comps).unwrap();
        let hc = Homotopy::new(map, rat(0), rat(1)).unwrap();
        assert!(infinitesimal_homotopy(&hc).unwrap().is_zero_field());

        // F(x,t) = x + t has unit derivative
        let m = Space::new("M2", &["x2"]).unwrap();
        let g = Space::new("T2", &["t2"]).unwrap();
        let cyl = CylinderSpace::new(m, g).unwrap();
        let n = Chart::Space(Space::new("N2", &["u2"]).unwrap());
        let mut comps = BTreeMap::new();
        comps.insert("u2".to_string(), parse_scalar("x2 + t2").unwrap());
        let map = SmoothMap::new(Chart::Cylinder(cyl), n, comps).unwrap();
        let ht = Homotopy::new(map, rat(0), rat(1)).unwrap();
        assert!(infinitesimal_homotopy(&ht)
            .unwrap()
            .component("u2")
            .equivalent(&ScalarExpr::one()));
    }

    #[test]
    fn flow_checks() {
        let cfg = ZeroTest::default();
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("T", &["t"]).unwrap();
        let cyl = CylinderSpace::new(m.clone(), g).unwrap();

        // translation flow A(x,t) = x + t generated by d/dx
        let mut comps = BTreeMap::new();
        comps.insert("x".to_string(), parse_scalar("x + t").unwrap());
        let a = SmoothMap::new(
            Chart::Cylinder(cyl.clone()),
            Chart::Space(m.clone()),
            comps,
        )
        .unwrap();
        let ddx = VectorField::coordinate_field(Chart::Space(m.clone()), "x").unwrap();
        let rep = flow_check(&a, &ddx, &cfg).unwrap();
        assert_eq!(rep.generator, Verdict::ProvenZero);
        assert_eq!(rep.initial, Verdict::ProvenZero);

        // scaling flow A(x,t) = exp(t) x generated by x d/dx
        let mut comps = BTreeMap::new();
        comps.insert("x".to_string(), parse_scalar("exp(t)*x").unwrap());
        let a2 = SmoothMap::new(
            Chart::Cylinder(cyl.clone()),
            Chart::Space(m.clone()),
            comps,
        )
        .unwrap();
        let mut xcomps = BTreeMap::new();
        xcomps.insert("x".to_string(), ScalarExpr::coord("x"));
        let euler = VectorField::new(Chart::Space(m.clone()), xcomps).unwrap();
        let rep2 = flow_check(&a2, &euler, &cfg).unwrap();
        assert!(rep2.generator.is_zero());
        assert_eq!(rep2.initial, Verdict::ProvenZero);

        // identity flow generated by the zero field
        let mut comps = BTreeMap::new();
        comps.insert("x".to_string(), ScalarExpr::coord("x"));
        let a3 = SmoothMap::new(Chart::Cylinder(cyl), Chart::Space(m.clone()), comps).unwrap();
        let rep3 = flow_check(&a3, &VectorField::zero(Chart::Space(m)), &cfg).unwrap();
        assert_eq!(rep3.verdict(), Verdict::ProvenZero);
    }

    #[test]
    fn lifted_flow_on_a_product() {
        // A((x,y),t) = (x + t, y) is the flow of the lift of d/dx to M x N
        let cfg = ZeroTest::default();
        let p = Space::new("P", &["x", "y"]).unwrap();
        let g = Space::new("T", &["t"]).unwrap();
        let cyl = CylinderSpace::new(p.clone(), g).unwrap();
        let mut comps = BTreeMap::new();
        comps.insert("x".to_string(), parse_scalar("x + t").unwrap());
        comps.insert("y".to_string(), ScalarExpr::coord("y"));
        let a = SmoothMap::new(Chart::Cylinder(cyl), Chart::Space(p.clone()), comps).unwrap();
        let mut xcomps = BTreeMap::new();
        xcomps.insert("x".to_string(), ScalarExpr::one());
        let lifted = VectorField::new(Chart::Space(p), xcomps).unwrap();
        assert_eq!(flow_check(&a, &lifted, &cfg).unwrap().verdict(), Verdict::ProvenZero);
    }

    #[test]
    fn relative_contraction_of_area_form() {
        let (h, n) = contraction_r2();
        let du = DiffForm::coordinate_differential(n.clone(), "u").unwrap();
        let dv = DiffForm::coordinate_differential(n, "v").unwrap();
        let area = du.wedge(&dv).unwrap();
        let fp = infinitesimal_homotopy(&h).unwrap();
        let contracted = interior_relative(&fp, &area).unwrap();
        // t(x dy - y dx)
        assert!(contracted
            .coefficient(&[0])
            .equivalent(&parse_scalar("-t*y").unwrap()));
        assert!(contracted
            .coefficient(&[1])
            .equivalent(&parse_scalar("t*x").unwrap()));

        // degree-0 input is a contract error
        let f0 = DiffForm::scalar(h.map().target().clone(), ScalarExpr::coord("u")).unwrap();
        assert!(interior_relative(&fp, &f0).is_err());

        // a mismatched relative field is rejected
        let (h2, n2) = line_homotopy();
        let wrong = RelativeVectorField {
            along: h2.map().clone(),
            components: {
                let mut m = BTreeMap::new();
                m.insert("u".to_string(), parse_scalar("2*x").unwrap());
                m
            },
        };
        let du2 = DiffForm::coordinate_differential(n2, "u").unwrap();
        assert!(matches!(
            interior_relative(&wrong, &du2),
            Err(Error::UnsupportedRelativeContraction(_))
        ));
    }

    #[test]
    fn homotopy_operator_golden_values() {
        let (h, n) = contraction_r2();
        let du = DiffForm::coordinate_differential(n.clone(), "u").unwrap();
        let dv = DiffForm::coordinate_differential(n, "v").unwrap();
        let area = du.wedge(&dv).unwrap();
        let hop = homotopy_operator(&h, &area).unwrap().into_exact().unwrap();
        // (x dy - y dx)/2
        assert!(hop.coefficient(&[0]).equivalent(&parse_scalar("-y/2").unwrap()));
        assert!(hop.coefficient(&[1]).equivalent(&parse_scalar("x/2").unwrap()));
        let d_hop = LiftedForm::from_form(&hop).d().unwrap().into_exact().unwrap();
        assert!(d_hop.coefficient(&[0, 1]).equivalent(&ScalarExpr::one()));

        let (hl, nl) = line_homotopy();
        let du = DiffForm::coordinate_differential(nl, "u").unwrap();
        let got = homotopy_operator(&hl, &du).unwrap().into_exact().unwrap();
        assert!(got.as_scalar().unwrap().equivalent(&ScalarExpr::coord("x")));
    }

    #[test]
    fn homotopy_operator_degree_zero_rejected() {
        let (h, n) = line_homotopy();
        let f = DiffForm::scalar(n, ScalarExpr::coord("u")).unwrap();
        assert!(matches!(homotopy_operator(&h, &f), Err(Error::Degree(_))));
    }

    #[test]
    fn homotopy_formula_instances() {
        let cfg = ZeroTest::default();
        let (h, n) = contraction_r2();
        let du = DiffForm::coordinate_differential(n.clone(), "u").unwrap();
        let dv = DiffForm::coordinate_differential(n, "v").unwrap();
        let area = du.clone().wedge(&dv).unwrap();
        let (verdict, residual) = verify_homotopy_formula(&h, &area, &cfg, 32).unwrap();
        assert_eq!(verdict, Verdict::ProvenZero, "residual: {residual}");

        let (hl, nl) = line_homotopy();
        let du = DiffForm::coordinate_differential(nl, "u").unwrap();
        let (v2, _) = verify_homotopy_formula(&hl, &du, &cfg, 32).unwrap();
        assert_eq!(v2, Verdict::ProvenZero);

        // constant homotopy: all three terms vanish
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("T", &["t"]).unwrap();
        let cyl = CylinderSpace::new(m, g).unwrap();
        let nch = Chart::Space(Space::new("N", &["u"]).unwrap());
        let mut comps = BTreeMap::new();
        comps.insert("u".to_string(), ScalarExpr::coord("x"));
        let map = SmoothMap::new(Chart::Cylinder(cyl), nch.clone(), comps).unwrap();
        let hc = Homotopy::new(map, rat(0), rat(1)).unwrap();
        let du = DiffForm::coordinate_differential(nch, "u").unwrap();
        let (v3, _) = verify_homotopy_formula(&hc, &du, &cfg, 32).unwrap();
        assert_eq!(v3, Verdict::ProvenZero);
    }

    #[test]
    fn universal_nl_instances() {
        let cfg = ZeroTest::default();
        let (hl, nl) = line_homotopy();
        let usq = DiffForm::scalar(nl, parse_scalar("u^2").unwrap()).unwrap();
        assert_eq!(universal_nl_check(&hl, &usq, &cfg, 32).unwrap(), Verdict::ProvenZero);

        let (h, n) = contraction_r2();
        let du = DiffForm::coordinate_differential(n.clone(), "u").unwrap();
        let dv = DiffForm::coordinate_differential(n, "v").unwrap();
        let area = du.wedge(&dv).unwrap();
        assert_eq!(universal_nl_check(&h, &area, &cfg, 32).unwrap(), Verdict::ProvenZero);
    }
}
