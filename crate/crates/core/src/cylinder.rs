//! Cylinder-specific operators: canonical lifts of vector fields, the
//! bidegree decomposition of forms on `M x G`, horizontalization, the
//! horizontal differential, the coefficientwise derivative of families, and
//! slicing of forms and fields to parameter values.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exterior::{DiffForm, MultiIndex, VectorField};
use crate::scalar::ScalarExpr;
use crate::spaces::{slicing, Chart, CylinderSpace, ParamPoint};

/// One of the two canonical projections of a cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// `pi_M : M x G -> M`
    Base,
    /// `pi_G : M x G -> G`
    Params,
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Projection::Base => "piM",
            Projection::Params => "piG",
        })
    }
}

/// The bidegree pieces of a homogeneous form on a cylinder: the `(p, q)`
/// component collects wedge monomials with `p` base and `q` parameter
/// differentials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigradedForm {
    cyl: CylinderSpace,
    degree: usize,
    components: BTreeMap<(usize, usize), DiffForm>,
}

impl BigradedForm {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cylinder(&self) -> &CylinderSpace {
        &self.cyl
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &DiffForm)> {
        self.components.iter()
    }

    /// The `(p, q)` component (zero when absent).
    pub fn component(&self, p: usize, q: usize) -> DiffForm {
        self.components
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| DiffForm::zero(Chart::Cylinder(self.cyl.clone()), p + q))
    }

    /// Sum of all components; equals the split form exactly.
    pub fn reconstruct(&self) -> DiffForm {
        let mut acc = DiffForm::zero(Chart::Cylinder(self.cyl.clone()), self.degree);
        for part in self.components.values() {
            acc = acc.add(part).expect("components share chart and degree");
        }
        acc
    }
}

fn base_count(idx: &[u32], base_dim: usize) -> usize {
    idx.iter().filter(|&&i| (i as usize) < base_dim).count()
}

/// Lift a vector field on one factor to the cylinder: same components read
/// as functions on the cylinder, zero on the other block. The lift of a
/// field on `M` is `pi_G`-vertical and `pi_M`-related to the field.
pub fn canonical_lift(field: &VectorField, cyl: &CylinderSpace) -> Result<VectorField> {
    let on_base = field.chart() == &Chart::Space(cyl.base().clone());
    let on_params = field.chart() == &Chart::Space(cyl.params().clone());
    if !on_base && !on_params {
        return Err(Error::FactorMismatch(format!(
            "field lives on {}, cylinder is {}",
            field.chart().name(),
            cyl.name()
        )));
    }
    VectorField::new(Chart::Cylinder(cyl.clone()), field.components().clone())
}

/// The unique field on the cylinder simultaneously related to `x` on the
/// base and `y` on the parameters.
pub fn lift_pair(x: &VectorField, y: &VectorField, cyl: &CylinderSpace) -> Result<VectorField> {
    if x.chart() != &Chart::Space(cyl.base().clone()) {
        return Err(Error::FactorMismatch(format!(
            "first field must live on the base {}",
            cyl.base().name()
        )));
    }
    if y.chart() != &Chart::Space(cyl.params().clone()) {
        return Err(Error::FactorMismatch(format!(
            "second field must live on the parameter factor {}",
            cyl.params().name()
        )));
    }
    canonical_lift(x, cyl)?.add(&canonical_lift(y, cyl)?)
}

/// The lifted `d/dt` on a one-parameter cylinder.
pub fn time_field(cyl: &CylinderSpace) -> Result<VectorField> {
    if cyl.params().dim() != 1 {
        return Err(Error::InvalidChart(format!(
            "time field needs a one-dimensional parameter factor, {} has {}",
            cyl.params().name(),
            cyl.params().dim()
        )));
    }
    let t = cyl.params().coords()[0].clone();
    VectorField::coordinate_field(Chart::Cylinder(cyl.clone()), &t)
}

/// Partition a form's terms by (base, parameter) index counts.
pub fn bidegree_split(form: &DiffForm) -> Result<BigradedForm> {
    let cyl = form.chart().as_cylinder()?.clone();
    let base_dim = cyl.base_dim();
    let mut buckets: BTreeMap<(usize, usize), Vec<(MultiIndex, ScalarExpr)>> = BTreeMap::new();
    for (idx, coeff) in form.terms() {
        let p = base_count(idx, base_dim);
        let q = idx.len() - p;
        buckets
            .entry((p, q))
            .or_default()
            .push((idx.clone(), coeff.clone()));
    }
    let mut components = BTreeMap::new();
    for ((p, q), terms) in buckets {
        let part = DiffForm::from_terms(Chart::Cylinder(cyl.clone()), p + q, terms)?;
        components.insert((p, q), part);
    }
    Ok(BigradedForm {
        cyl,
        degree: form.degree(),
        components,
    })
}

/// The canonical projector `p_{p,q}` applied to a homogeneous form.
pub fn projector(form: &DiffForm, p: usize, q: usize) -> Result<DiffForm> {
    let split = bidegree_split(form)?;
    Ok(split.component(p, q))
}

/// Horizontalization `p_0`: the `(k, 0)` bidegree component. Idempotent.
pub fn horizontalize(form: &DiffForm) -> Result<DiffForm> {
    let cyl = form.chart().as_cylinder()?.clone();
    let base_dim = cyl.base_dim();
    let kept = form
        .terms()
        .filter(|(idx, _)| base_count(idx, base_dim) == idx.len())
        .map(|(idx, c)| (idx.clone(), c.clone()));
    DiffForm::from_terms(Chart::Cylinder(cyl), form.degree(), kept)
}

/// True iff every wedge monomial avoids the block transverse to `over`:
/// horizontal over `pi_M` means no parameter differentials.
pub fn is_horizontal(form: &DiffForm, over: Projection) -> Result<bool> {
    let cyl = form.chart().as_cylinder()?;
    let base_dim = cyl.base_dim();
    Ok(form.terms().all(|(idx, _)| {
        let p = base_count(idx, base_dim);
        match over {
            Projection::Base => p == idx.len(),
            Projection::Params => p == 0,
        }
    }))
}

/// The part of `form` transverse to horizontality over `over` (the witness
/// returned when a horizontality check fails).
pub fn non_horizontal_part(form: &DiffForm, over: Projection) -> Result<DiffForm> {
    let cyl = form.chart().as_cylinder()?.clone();
    let base_dim = cyl.base_dim();
    let kept = form
        .terms()
        .filter(|(idx, _)| {
            let p = base_count(idx, base_dim);
            match over {
                Projection::Base => p != idx.len(),
                Projection::Params => p != 0,
            }
        })
        .map(|(idx, c)| (idx.clone(), c.clone()));
    DiffForm::from_terms(Chart::Cylinder(cyl), form.degree(), kept)
}

/// Canonical representative of the class of `form` modulo the horizontal
/// ideal of `over`, realized through the bidegree splitting: the unique
/// component with no differentials from `over`'s own block.
pub fn vertical_representative(form: &DiffForm, over: Projection) -> Result<DiffForm> {
    let cyl = form.chart().as_cylinder()?.clone();
    let base_dim = cyl.base_dim();
    let kept = form
        .terms()
        .filter(|(idx, _)| {
            let p = base_count(idx, base_dim);
            match over {
                // mod the ideal generated by base differentials: keep pure
                // parameter monomials
                Projection::Base => p == 0,
                // mod the ideal generated by parameter differentials: keep
                // pure base monomials
                Projection::Params => p == idx.len(),
            }
        })
        .map(|(idx, c)| (idx.clone(), c.clone()));
    DiffForm::from_terms(Chart::Cylinder(cyl), form.degree(), kept)
}

fn require_horizontal(form: &DiffForm, what: &str) -> Result<()> {
    if !is_horizontal(form, Projection::Base)? {
        let witness = non_horizontal_part(form, Projection::Base)?;
        return Err(Error::NotHorizontal(
            format!("piM ({what})"),
            witness.to_string(),
        ));
    }
    Ok(())
}

/// Horizontal differential `d_bar = p_{k+1,0} . d` on horizontal forms;
/// squares to zero.
pub fn horizontal_d(form: &DiffForm) -> Result<DiffForm> {
    require_horizontal(form, "horizontal differential")?;
    horizontalize(&form.d())
}

/// Derivative of a family of forms along a parameter field: apply the
/// canonical lift of `x` to each coefficient, keeping wedge monomials.
/// Coincides with the Lie derivative along the lift on horizontal forms.
pub fn nabla(x: &VectorField, form: &DiffForm) -> Result<DiffForm> {
    let cyl = form.chart().as_cylinder()?.clone();
    require_horizontal(form, "nabla")?;
    if x.chart() != &Chart::Space(cyl.params().clone()) {
        return Err(Error::FactorMismatch(format!(
            "nabla differentiates along a field on the parameter factor {}",
            cyl.params().name()
        )));
    }
    let lifted = canonical_lift(x, &cyl)?;
    let mapped = form
        .terms()
        .map(|(idx, coeff)| Ok((idx.clone(), lifted.apply(coeff)?)))
        .collect::<Result<Vec<_>>>()?;
    DiffForm::from_terms(Chart::Cylinder(cyl), form.degree(), mapped)
}

/// Restrict a family of forms to the slice at `g` (pullback along the
/// slicing map). With `strict` the input must be horizontal over `pi_M`;
/// otherwise the parameter-differential block is dropped by the pullback,
/// which is exactly the kernel of slicing on covariant quantities.
pub fn slice_form(form: &DiffForm, g: &ParamPoint, strict: bool) -> Result<DiffForm> {
    let cyl = form.chart().as_cylinder()?.clone();
    if strict {
        require_horizontal(form, "slice (strict mode)")?;
    }
    let iota = slicing(&cyl, g)?;
    form.pullback(&iota)
}

/// Slice of a field on the cylinder: base components with parameters
/// substituted. `sliceable` is false when the field was not `pi_G`-vertical,
/// in which case the family of slices does not determine the field.
#[derive(Debug, Clone)]
pub struct SlicedField {
    pub field: VectorField,
    pub sliceable: bool,
}

pub fn slice_field(field: &VectorField, g: &ParamPoint) -> Result<SlicedField> {
    let cyl = field.chart().as_cylinder()?.clone();
    let sliceable = is_vertical(field, Projection::Params)?;
    let mut bindings = BTreeMap::new();
    for c in cyl.params().coords() {
        let v = g
            .get(c)
            .ok_or_else(|| Error::UnboundCoordinate(c.clone()))?;
        bindings.insert(c.clone(), ScalarExpr::Rational(v.clone()));
    }
    let mut comps = BTreeMap::new();
    for c in cyl.base().coords() {
        let e = field.component(c).substitute(&bindings);
        if !e.is_normal_zero() {
            comps.insert(c.clone(), e);
        }
    }
    Ok(SlicedField {
        field: VectorField::new(Chart::Space(cyl.base().clone()), comps)?,
        sliceable,
    })
}

/// A field is `pi_G`-vertical iff it has no parameter components (it is then
/// a field along `pi_M`, i.e. a family of fields on the base); symmetrically
/// for `pi_M`.
pub fn is_vertical(field: &VectorField, over: Projection) -> Result<bool> {
    let cyl = field.chart().as_cylinder()?;
    let transverse = match over {
        Projection::Params => cyl.params().coords(),
        Projection::Base => cyl.base().coords(),
    };
    Ok(transverse
        .iter()
        .all(|c| field.component(c).is_normal_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;
    use crate::spaces::Space;
    use num_rational::BigRational;

    fn cyl_xy_t() -> CylinderSpace {
        let m = Space::new("M", &["x", "y"]).unwrap();
        let g = Space::new("G", &["t"]).unwrap();
        CylinderSpace::new(m, g).unwrap()
    }

    fn cyl_x_t() -> CylinderSpace {
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("G", &["t"]).unwrap();
        CylinderSpace::new(m, g).unwrap()
    }

    fn fm(cyl: &CylinderSpace, terms: &[(&[u32], &str)]) -> DiffForm {
        let degree = terms.first().map_or(0, |(i, _)| i.len());
        DiffForm::from_terms(
            Chart::Cylinder(cyl.clone()),
            degree,
            terms
                .iter()
                .map(|(i, s)| (i.to_vec(), parse_scalar(s).unwrap())),
        )
        .unwrap()
    }

    fn pt(t: i64) -> ParamPoint {
        let mut g = ParamPoint::new();
        g.insert("t".to_string(), BigRational::from_integer(t.into()));
        g
    }

    #[test]
    fn canonical_lift_extends_by_zero() {
        let cyl = cyl_x_t();
        let ddx = VectorField::coordinate_field(Chart::Space(cyl.base().clone()), "x").unwrap();
        let lift = canonical_lift(&ddx, &cyl).unwrap();
        assert!(lift.component("x").equivalent(&ScalarExpr::one()));
        assert!(lift.component("t").is_normal_zero());

        let xddx = {
            let mut m = BTreeMap::new();
            m.insert("x".to_string(), ScalarExpr::coord("x"));
            VectorField::new(Chart::Space(cyl.base().clone()), m).unwrap()
        };
        let lifted = canonical_lift(&xddx, &cyl).unwrap();
        assert!(lifted.component("x").equivalent(&ScalarExpr::coord("x")));

        let ddt = VectorField::coordinate_field(Chart::Space(cyl.params().clone()), "t").unwrap();
        let time = canonical_lift(&ddt, &cyl).unwrap();
        assert!(time.equivalent(&time_field(&cyl).unwrap()));

        let other = Space::new("Q", &["q"]).unwrap();
        let dq = VectorField::coordinate_field(Chart::Space(other), "q").unwrap();
        assert!(matches!(
            canonical_lift(&dq, &cyl),
            Err(Error::FactorMismatch(_))
        ));
    }

    #[test]
    fn lift_pair_is_sum_of_lifts() {
        let cyl = cyl_x_t();
        let x = VectorField::coordinate_field(Chart::Space(cyl.base().clone()), "x").unwrap();
        let y = VectorField::coordinate_field(Chart::Space(cyl.params().clone()), "t").unwrap();
        let z = lift_pair(&x, &y, &cyl).unwrap();
        assert!(z.component("x").equivalent(&ScalarExpr::one()));
        assert!(z.component("t").equivalent(&ScalarExpr::one()));

        let zero_base = VectorField::zero(Chart::Space(cyl.base().clone()));
        let z2 = lift_pair(&zero_base, &y, &cyl).unwrap();
        assert!(is_vertical(&z2, Projection::Base).unwrap());

        let zero_params = VectorField::zero(Chart::Space(cyl.params().clone()));
        let z3 = lift_pair(&x, &zero_params, &cyl).unwrap();
        assert!(is_vertical(&z3, Projection::Params).unwrap());
    }

    #[test]
    fn bidegree_split_partitions_terms() {
        let cyl = cyl_x_t();
        // x dx + t dt on (x,t)
        let w = fm(&cyl, &[(&[0], "x"), (&[1], "t")]);
        let split = bidegree_split(&w).unwrap();
        assert!(split.component(1, 0).equivalent(&fm(&cyl, &[(&[0], "x")])));
        assert!(split.component(0, 1).equivalent(&fm(&cyl, &[(&[1], "t")])));
        assert!(split.reconstruct().equivalent(&w));

        let dtdx = fm(&cyl, &[(&[0, 1], "1")]);
        let s2 = bidegree_split(&dtdx).unwrap();
        assert!(s2.component(1, 1).equivalent(&dtdx));

        let f = fm(&cyl, &[(&[], "x*t")]);
        let s3 = bidegree_split(&f).unwrap();
        assert!(s3.component(0, 0).equivalent(&f));
    }

    #[test]
    fn horizontalize_keeps_base_block() {
        let cyl = cyl_xy_t();
        // t^2 dx^dy + t*x dt-block terms, from the pulled-back area form
        let w = fm(
            &cyl,
            &[(&[0, 1], "t^2"), (&[0, 2], "t*y"), (&[1, 2], "-t*x")],
        );
        let h = horizontalize(&w).unwrap();
        assert!(h.equivalent(&fm(&cyl, &[(&[0, 1], "t^2")])));
        assert!(horizontalize(&h).unwrap().equivalent(&h));

        let xdx = fm(&cyl, &[(&[0], "x")]);
        assert!(horizontalize(&xdx).unwrap().equivalent(&xdx));

        let dt = fm(&cyl, &[(&[2], "1")]);
        assert!(horizontalize(&dt).unwrap().is_empty());
    }

    #[test]
    fn horizontality_predicate() {
        let cyl = cyl_xy_t();
        let w = fm(&cyl, &[(&[0, 1], "x*t")]);
        assert!(is_horizontal(&w, Projection::Base).unwrap());
        let mixed = fm(&cyl, &[(&[0, 2], "1")]);
        assert!(!is_horizontal(&mixed, Projection::Base).unwrap());
        let f = fm(&cyl, &[(&[], "x*t")]);
        assert!(is_horizontal(&f, Projection::Base).unwrap());
        assert!(is_horizontal(&f, Projection::Params).unwrap());
    }

    #[test]
    fn vertical_representatives() {
        let cyl = cyl_x_t();
        let w = fm(&cyl, &[(&[0], "x"), (&[1], "t")]);
        // over piG: kill the dt block
        assert!(vertical_representative(&w, Projection::Params)
            .unwrap()
            .equivalent(&fm(&cyl, &[(&[0], "x")])));
        let dt = fm(&cyl, &[(&[1], "1")]);
        assert!(vertical_representative(&dt, Projection::Params)
            .unwrap()
            .is_empty());
        let dx = fm(&cyl, &[(&[0], "1")]);
        assert!(vertical_representative(&dx, Projection::Base)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn horizontal_differential_examples() {
        let cyl = cyl_xy_t();
        // d_bar(x*t) = t dx
        let f = fm(&cyl, &[(&[], "x*t")]);
        assert!(horizontal_d(&f).unwrap().equivalent(&fm(&cyl, &[(&[0], "t")])));
        // d_bar(t^2 dx) = 0
        let w = fm(&cyl, &[(&[0], "t^2")]);
        assert!(horizontal_d(&w).unwrap().is_empty());
        // d_bar(x*y*t dx) = -x*t dx^dy
        let w2 = fm(&cyl, &[(&[0], "x*y*t")]);
        assert!(horizontal_d(&w2)
            .unwrap()
            .equivalent(&fm(&cyl, &[(&[0, 1], "-x*t")])));
        // non-horizontal input is rejected
        let dt = fm(&cyl, &[(&[2], "1")]);
        assert!(matches!(horizontal_d(&dt), Err(Error::NotHorizontal(..))));
    }

    #[test]
    fn nabla_differentiates_coefficients() {
        let cyl = cyl_x_t();
        let ddt = VectorField::coordinate_field(Chart::Space(cyl.params().clone()), "t").unwrap();
        let w = fm(&cyl, &[(&[0], "x*t^2")]);
        assert!(nabla(&ddt, &w)
            .unwrap()
            .equivalent(&fm(&cyl, &[(&[0], "2*x*t")])));

        let constant = fm(&cyl, &[(&[0], "1")]);
        assert!(nabla(&ddt, &constant).unwrap().is_empty());

        let euler = {
            let mut m = BTreeMap::new();
            m.insert("t".to_string(), ScalarExpr::coord("t"));
            VectorField::new(Chart::Space(cyl.params().clone()), m).unwrap()
        };
        let tdx = fm(&cyl, &[(&[0], "t")]);
        assert!(nabla(&euler, &tdx).unwrap().equivalent(&tdx));
    }

    #[test]
    fn slice_form_examples() {
        let cyl = cyl_x_t();
        let w = fm(&cyl, &[(&[0], "x*t")]);
        let sliced = slice_form(&w, &pt(2), false).unwrap();
        assert!(sliced.coefficient(&[0]).equivalent(&parse_scalar("2*x").unwrap()));

        let cyl2 = cyl_xy_t();
        let area = fm(&cyl2, &[(&[0, 1], "t^2")]);
        let s = slice_form(&area, &pt(1), false).unwrap();
        assert!(s.coefficient(&[0, 1]).equivalent(&ScalarExpr::one()));

        let dt = fm(&cyl, &[(&[1], "1")]);
        assert!(slice_form(&dt, &pt(5), false).unwrap().is_empty());
        assert!(matches!(
            slice_form(&dt, &pt(5), true),
            Err(Error::NotHorizontal(..))
        ));
    }

    #[test]
    fn slice_field_examples() {
        let cyl = cyl_x_t();
        let chart = Chart::Cylinder(cyl.clone());

        let mut m = BTreeMap::new();
        m.insert("x".to_string(), ScalarExpr::coord("t"));
        let z = VectorField::new(chart.clone(), m).unwrap();
        let s = slice_field(&z, &pt(3)).unwrap();
        assert!(s.sliceable);
        assert!(s.field.component("x").equivalent(&ScalarExpr::int(3)));

        let ddt = VectorField::coordinate_field(chart.clone(), "t").unwrap();
        let s2 = slice_field(&ddt, &pt(0)).unwrap();
        assert!(!s2.sliceable);
        assert!(s2.field.is_empty());

        let mut m3 = BTreeMap::new();
        m3.insert("x".to_string(), ScalarExpr::coord("x"));
        m3.insert("t".to_string(), ScalarExpr::one());
        let z3 = VectorField::new(chart, m3).unwrap();
        let s3 = slice_field(&z3, &pt(0)).unwrap();
        assert!(!s3.sliceable);
        assert!(s3.field.component("x").equivalent(&ScalarExpr::coord("x")));
    }
}
