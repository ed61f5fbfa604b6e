//! Differential forms and vector fields on a chart, with the standard
//! graded operations: wedge, exterior derivative, interior product, Lie
//! derivative (Cartan formula) and pullback along smooth maps.
//!
//! Forms are homogeneous: a term map from strictly increasing coordinate
//! multi-indices (positions in the chart's canonical order) to normalized
//! scalar coefficients. Zero coefficients are never stored, so structural
//! equality of forms is normal-form equality.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{ScalarExpr, Verdict, ZeroTest};
use crate::spaces::{Chart, SmoothMap};

/// Strictly increasing positions into the chart's coordinate list.
pub type MultiIndex = Vec<u32>;

/// A homogeneous differential form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffForm {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<MultiIndex, ScalarExpr>,
}

impl DiffForm {
    pub fn zero(chart: Chart, degree: usize) -> Self {
        DiffForm {
            chart,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A degree-0 form (a scalar function on the chart).
    pub fn scalar(chart: Chart, f: ScalarExpr) -> Result<Self> {
        let mut form = DiffForm::zero(chart, 0);
        form.check_coeff_coords(&f)?;
        form.insert_term(Vec::new(), f);
        Ok(form)
    }

    /// The coordinate differential `d<coord>`.
    pub fn coordinate_differential(chart: Chart, coord: &str) -> Result<Self> {
        let idx = chart
            .coord_index(coord)
            .ok_or_else(|| Error::UnknownCoordinate(coord.to_string()))? as u32;
        let mut form = DiffForm::zero(chart, 1);
        form.insert_term(vec![idx], ScalarExpr::one());
        Ok(form)
    }

    /// Build a form from raw terms; indices must be strictly increasing and
    /// of uniform length.
    pub fn from_terms(
        chart: Chart,
        degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, ScalarExpr)>,
    ) -> Result<Self> {
        let dim = chart.dim() as u32;
        let mut form = DiffForm::zero(chart, degree);
        for (idx, coeff) in terms {
            if idx.len() != degree {
                return Err(Error::Degree(format!(
                    "index {idx:?} has length {} in a degree-{degree} form",
                    idx.len()
                )));
            }
            if !idx.windows(2).all(|w| w[0] < w[1]) || idx.iter().any(|&i| i >= dim) {
                return Err(Error::Degree(format!(
                    "index {idx:?} is not strictly increasing within the chart"
                )));
            }
            form.check_coeff_coords(&coeff)?;
            form.insert_term(idx, coeff);
        }
        Ok(form)
    }

    fn check_coeff_coords(&self, coeff: &ScalarExpr) -> Result<()> {
        for c in coeff.free_coords() {
            if !self.chart.contains_coord(&c) {
                return Err(Error::UnknownCoordinate(format!(
                    "{c} is not a coordinate of {}",
                    self.chart.name()
                )));
            }
        }
        Ok(())
    }

    fn insert_term(&mut self, idx: MultiIndex, coeff: ScalarExpr) {
        let coeff = match self.terms.remove(&idx) {
            Some(existing) => (existing + coeff).normalize(),
            None => coeff.normalize(),
        };
        if !coeff.is_normal_zero() {
            self.terms.insert(idx, coeff);
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a multi-index (zero when absent).
    pub fn coefficient(&self, idx: &[u32]) -> ScalarExpr {
        self.terms
            .get(idx)
            .cloned()
            .unwrap_or_else(ScalarExpr::zero)
    }

    /// The unique coefficient of a degree-0 form.
    pub fn as_scalar(&self) -> Result<ScalarExpr> {
        if self.degree != 0 {
            return Err(Error::Degree(format!(
                "expected a degree-0 form, got degree {}",
                self.degree
            )));
        }
        Ok(self.coefficient(&[]))
    }

    fn compatible(&self, other: &DiffForm) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                self.chart.name(),
                other.chart.name()
            )));
        }
        // a form with no terms is the zero form of any degree
        if self.degree != other.degree && !self.is_empty() && !other.is_empty() {
            return Err(Error::Degree(format!(
                "cannot combine degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DiffForm) -> Result<DiffForm> {
        self.compatible(other)?;
        let degree = if self.is_empty() { other.degree } else { self.degree };
        let mut out = DiffForm::zero(self.chart.clone(), degree);
        for (idx, c) in self.terms.iter().chain(other.terms.iter()) {
            out.insert_term(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.chart.clone(), self.degree);
        for (idx, c) in &self.terms {
            out.insert_term(idx.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffForm) -> Result<DiffForm> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, f: &ScalarExpr) -> DiffForm {
        let mut out = DiffForm::zero(self.chart.clone(), self.degree);
        for (idx, c) in &self.terms {
            out.insert_term(idx.clone(), f.clone() * c.clone());
        }
        out
    }

    /// Wedge product, with Koszul signs from sorting the merged indices.
    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm> {
        if self.chart != other.chart {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                self.chart.name(),
                other.chart.name()
            )));
        }
        let degree = self.degree + other.degree;
        let mut out = DiffForm::zero(self.chart.clone(), degree);
        for (ia, ca) in &self.terms {
            'b: for (ib, cb) in &other.terms {
                let mut inversions = 0usize;
                for &i in ia {
                    if ib.contains(&i) {
                        continue 'b;
                    }
                    inversions += ib.iter().filter(|&&j| j < i).count();
                }
                let mut idx: MultiIndex = ia.iter().chain(ib.iter()).copied().collect();
                idx.sort_unstable();
                let coeff = ca.clone() * cb.clone();
                out.insert_term(
                    idx,
                    if inversions % 2 == 1 { -coeff } else { coeff },
                );
            }
        }
        Ok(out)
    }

    /// Exterior derivative: `d(f dX_I) = sum_c (df/dc) dc ^ dX_I`.
    pub fn d(&self) -> DiffForm {
        let coords = self.chart.coords();
        let mut out = DiffForm::zero(self.chart.clone(), self.degree + 1);
        for (idx, coeff) in &self.terms {
            for (p, coord) in coords.iter().enumerate() {
                let p = p as u32;
                if idx.contains(&p) {
                    continue;
                }
                let dc = coeff.partial(coord);
                if dc.is_normal_zero() {
                    continue;
                }
                let pos = idx.iter().filter(|&&i| i < p).count();
                let mut new_idx = idx.clone();
                new_idx.insert(pos, p);
                out.insert_term(new_idx, if pos % 2 == 1 { -dc } else { dc });
            }
        }
        out
    }

    /// Interior product (contraction) with a vector field; degree drops by 1.
    pub fn interior(&self, field: &VectorField) -> Result<DiffForm> {
        if self.chart != field.chart {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                self.chart.name(),
                field.chart.name()
            )));
        }
        if self.degree == 0 {
            return Err(Error::Degree(
                "interior product needs a form of degree >= 1".into(),
            ));
        }
        let coords = self.chart.coords();
        let mut out = DiffForm::zero(self.chart.clone(), self.degree - 1);
        for (idx, coeff) in &self.terms {
            for (slot, &p) in idx.iter().enumerate() {
                let comp = field.component(&coords[p as usize]);
                if comp.is_normal_zero() {
                    continue;
                }
                let mut new_idx = idx.clone();
                new_idx.remove(slot);
                let term = comp * coeff.clone();
                out.insert_term(new_idx, if slot % 2 == 1 { -term } else { term });
            }
        }
        Ok(out)
    }

    /// Lie derivative via the Cartan formula `i_X d + d i_X`; on degree 0 it
    /// is the field acting as a derivation.
    pub fn lie(&self, field: &VectorField) -> Result<DiffForm> {
        if self.degree == 0 {
            let f = self.as_scalar()?;
            return DiffForm::scalar(self.chart.clone(), field.apply(&f)?);
        }
        let a = self.d().interior(field)?;
        let b = self.interior(field)?.d();
        a.add(&b)
    }

    /// Pullback along `map` (the form must live on `map.target()`):
    /// substitute coordinates in coefficients and replace each target
    /// differential by the differential of its component expression.
    pub fn pullback(&self, map: &SmoothMap) -> Result<DiffForm> {
        if &self.chart != map.target() {
            return Err(Error::SpaceMismatch(format!(
                "form lives on {}, map lands in {}",
                self.chart.name(),
                map.target().name()
            )));
        }
        let tcoords = self.chart.coords();
        let mut out = DiffForm::zero(map.source().clone(), self.degree);
        for (idx, coeff) in &self.terms {
            let mut piece = DiffForm::scalar(map.source().clone(), map.pullback_scalar(coeff)?)?;
            for &p in idx {
                let component = map.component(&tcoords[p as usize])?;
                let dcomp = DiffForm::scalar(map.source().clone(), component.clone())?.d();
                piece = piece.wedge(&dcomp)?;
                if piece.is_empty() {
                    break;
                }
            }
            if piece.is_empty() {
                continue;
            }
            out = out.add(&piece)?;
        }
        // an all-zero result keeps the nominal degree
        if out.is_empty() {
            out.degree = self.degree;
        }
        Ok(out)
    }

    /// Zero test, aggregated over coefficients.
    pub fn is_zero(&self, cfg: &ZeroTest) -> Result<Verdict> {
        let mut verdicts = Vec::with_capacity(self.terms.len());
        for coeff in self.terms.values() {
            verdicts.push(coeff.is_zero(cfg)?);
        }
        Ok(Verdict::combine_all(verdicts))
    }

    /// Structural equality after per-coefficient normalization (coefficients
    /// are stored normalized, so this is plain equality).
    pub fn equivalent(&self, other: &DiffForm) -> bool {
        self.chart == other.chart
            && (self.degree == other.degree || self.is_empty() || other.is_empty())
            && self.terms == other.terms
    }

    /// Human/DSL rendering of one wedge monomial.
    pub fn monomial_names(&self, idx: &[u32]) -> Vec<String> {
        let coords = self.chart.coords();
        idx.iter()
            .map(|&i| format!("d{}", coords[i as usize]))
            .collect()
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let coords = self.chart.coords();
        for (i, (idx, coeff)) in self.terms.iter().enumerate() {
            let wedge = idx
                .iter()
                .map(|&p| format!("d{}", coords[p as usize]))
                .collect::<Vec<_>>()
                .join(" ^ ");
            let coeff_str = coeff.to_string();
            let body = if idx.is_empty() {
                coeff_str.clone()
            } else if coeff_str == "1" {
                wedge.clone()
            } else if coeff_str == "-1" {
                format!("-{wedge}")
            } else if matches!(coeff, ScalarExpr::Sum(_)) {
                format!("({coeff_str}) * {wedge}")
            } else {
                format!("{coeff_str} * {wedge}")
            };
            if i == 0 {
                f.write_str(&body)?;
            } else if let Some(stripped) = body.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

/// A vector field: one scalar component per coordinate (missing = zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    chart: Chart,
    components: BTreeMap<String, ScalarExpr>,
}

impl VectorField {
    pub fn new(chart: Chart, components: BTreeMap<String, ScalarExpr>) -> Result<Self> {
        let mut normalized = BTreeMap::new();
        for (k, e) in components {
            if !chart.contains_coord(&k) {
                return Err(Error::UnknownCoordinate(format!(
                    "{k} is not a coordinate of {}",
                    chart.name()
                )));
            }
            for c in e.free_coords() {
                if !chart.contains_coord(&c) {
                    return Err(Error::UnknownCoordinate(format!(
                        "{c} is not a coordinate of {}",
                        chart.name()
                    )));
                }
            }
            let e = e.normalize();
            if !e.is_normal_zero() {
                normalized.insert(k, e);
            }
        }
        Ok(VectorField {
            chart,
            components: normalized,
        })
    }

    /// The coordinate field `d/d<coord>`.
    pub fn coordinate_field(chart: Chart, coord: &str) -> Result<Self> {
        let mut components = BTreeMap::new();
        if !chart.contains_coord(coord) {
            return Err(Error::UnknownCoordinate(coord.to_string()));
        }
        components.insert(coord.to_string(), ScalarExpr::one());
        VectorField::new(chart, components)
    }

    pub fn zero(chart: Chart) -> Self {
        VectorField {
            chart,
            components: BTreeMap::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
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

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        if self.chart != other.chart {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                self.chart.name(),
                other.chart.name()
            )));
        }
        let mut components = self.components.clone();
        for (k, e) in &other.components {
            let sum = (self.component(k) + e.clone()).normalize();
            if sum.is_normal_zero() {
                components.remove(k);
            } else {
                components.insert(k.clone(), sum);
            }
        }
        Ok(VectorField {
            chart: self.chart.clone(),
            components,
        })
    }

    pub fn neg(&self) -> VectorField {
        self.scalar_mul(&ScalarExpr::int(-1))
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, f: &ScalarExpr) -> VectorField {
        let mut components = BTreeMap::new();
        for (k, e) in &self.components {
            let v = (f.clone() * e.clone()).normalize();
            if !v.is_normal_zero() {
                components.insert(k.clone(), v);
            }
        }
        VectorField {
            chart: self.chart.clone(),
            components,
        }
    }

    /// Apply the field to a function as a derivation:
    /// `X(f) = sum_c X^c df/dc`.
    pub fn apply(&self, f: &ScalarExpr) -> Result<ScalarExpr> {
        for c in f.free_coords() {
            if !self.chart.contains_coord(&c) {
                return Err(Error::UnknownCoordinate(format!(
                    "{c} is not a coordinate of {}",
                    self.chart.name()
                )));
            }
        }
        let mut acc = ScalarExpr::zero();
        for (coord, comp) in &self.components {
            acc = acc + comp.clone() * f.partial(coord);
        }
        Ok(acc.normalize())
    }

    pub fn equivalent(&self, other: &VectorField) -> bool {
        self.chart == other.chart && self.components == other.components
    }
}

/// `apply_field(X, f)` on a degree-0 form.
pub fn apply_field(field: &VectorField, f: &DiffForm) -> Result<DiffForm> {
    if field.chart() != f.chart() {
        return Err(Error::SpaceMismatch(format!(
            "{} vs {}",
            field.chart().name(),
            f.chart().name()
        )));
    }
    let scalar = f.as_scalar()?;
    DiffForm::scalar(f.chart().clone(), field.apply(&scalar)?)
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        for (i, (coord, comp)) in self.components.iter().enumerate() {
            let comp_str = comp.to_string();
            let body = if comp_str == "1" {
                format!("d/d{coord}")
            } else if comp_str == "-1" {
                format!("-d/d{coord}")
            } else if matches!(comp, ScalarExpr::Sum(_)) {
                format!("({comp_str}) * d/d{coord}")
            } else {
                format!("{comp_str} * d/d{coord}")
            };
            if i == 0 {
                f.write_str(&body)?;
            } else if let Some(stripped) = body.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;
    use crate::spaces::{CylinderSpace, Space};

    fn chart_xy() -> Chart {
        Chart::Space(Space::new("M", &["x", "y"]).unwrap())
    }

    fn cyl_x_t() -> Chart {
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("G", &["t"]).unwrap();
        Chart::Cylinder(CylinderSpace::new(m, g).unwrap())
    }

    fn sc(chart: &Chart, text: &str) -> DiffForm {
        DiffForm::scalar(chart.clone(), parse_scalar(text).unwrap()).unwrap()
    }

    fn dd(chart: &Chart, coord: &str) -> DiffForm {
        DiffForm::coordinate_differential(chart.clone(), coord).unwrap()
    }

    #[test]
    fn wedge_basics() {
        let ch = chart_xy();
        let dx = dd(&ch, "x");
        let dy = dd(&ch, "y");
        let dxdy = dx.wedge(&dy).unwrap();
        assert_eq!(dxdy.coefficient(&[0, 1]), ScalarExpr::one());
        assert!(dx.wedge(&dx).unwrap().is_empty());
        // (x dy) ^ dx = -x dx^dy
        let xdy = dy.scalar_mul(&ScalarExpr::coord("x"));
        let w = xdy.wedge(&dx).unwrap();
        assert!(w.coefficient(&[0, 1]).equivalent(&-ScalarExpr::coord("x")));
    }

    #[test]
    fn exterior_derivative_basics() {
        let ch = chart_xy();
        // d(x*y) = y dx + x dy
        let d = sc(&ch, "x*y").d();
        assert!(d.coefficient(&[0]).equivalent(&ScalarExpr::coord("y")));
        assert!(d.coefficient(&[1]).equivalent(&ScalarExpr::coord("x")));
        // d(x dy) = dx^dy
        let d2 = dd(&ch, "y").scalar_mul(&ScalarExpr::coord("x")).d();
        assert!(d2.coefficient(&[0, 1]).equivalent(&ScalarExpr::one()));
    }

    #[test]
    fn d_squared_vanishes() {
        let ch = cyl_x_t();
        let f = sc(&ch, "x^2*t + sin(x)");
        assert!(f.d().d().is_empty());
    }

    #[test]
    fn interior_contractions() {
        let ch = cyl_x_t();
        let dt = dd(&ch, "t");
        let dx = dd(&ch, "x");
        let ddt = VectorField::coordinate_field(ch.clone(), "t").unwrap();
        // i_dt (dt ^ dx) = dx
        let a = dt.wedge(&dx).unwrap().interior(&ddt).unwrap();
        assert!(a.equivalent(&dx));
        // i_dt (dx ^ dt) = -dx
        let b = dx.wedge(&dt).unwrap().interior(&ddt).unwrap();
        assert!(b.equivalent(&dx.neg()));
        // absent coordinate contracts to zero
        let chxy = chart_xy();
        let w = dd(&chxy, "x").wedge(&dd(&chxy, "y")).unwrap();
        let dxf = VectorField::coordinate_field(chxy.clone(), "x").unwrap();
        assert_eq!(w.interior(&dxf).unwrap().degree(), 1);
        // degree-0 contraction is an error
        assert!(sc(&chxy, "x").interior(&dxf).is_err());
    }

    #[test]
    fn lie_derivative_cases() {
        let ch = chart_xy();
        let ddx = VectorField::coordinate_field(ch.clone(), "x").unwrap();
        // L_{d/dx}(x dx) = dx
        let xdx = dd(&ch, "x").scalar_mul(&ScalarExpr::coord("x"));
        assert!(xdx.lie(&ddx).unwrap().equivalent(&dd(&ch, "x")));
        // transverse constant form
        let cht = cyl_x_t();
        let ddt = VectorField::coordinate_field(cht.clone(), "t").unwrap();
        assert!(dd(&cht, "x").lie(&ddt).unwrap().is_empty());
        // degree-0 Lie derivative is the derivation
        let f = sc(&cht, "x^2*t");
        let lf = f.lie(&ddt).unwrap();
        assert!(lf.as_scalar().unwrap().equivalent(&parse_scalar("x^2").unwrap()));
    }

    #[test]
    fn apply_field_examples() {
        let ch = cyl_x_t();
        let ddx = VectorField::coordinate_field(ch.clone(), "x").unwrap();
        let f = parse_scalar("x^2*t").unwrap();
        assert!(ddx.apply(&f).unwrap().equivalent(&parse_scalar("2*x*t").unwrap()));

        let mut comps = BTreeMap::new();
        comps.insert("t".to_string(), ScalarExpr::coord("x"));
        let xddt = VectorField::new(ch.clone(), comps).unwrap();
        assert!(xddt
            .apply(&ScalarExpr::coord("t"))
            .unwrap()
            .equivalent(&ScalarExpr::coord("x")));

        let ddt = VectorField::coordinate_field(ch, "t").unwrap();
        assert!(ddt.apply(&parse_scalar("sin(x)").unwrap()).unwrap().is_normal_zero());
    }

    #[test]
    fn pullback_chain_rule_and_area_form() {
        // F(x,t) = (t*x): pullback of du = t dx + x dt
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("G", &["t"]).unwrap();
        let cyl = Chart::Cylinder(CylinderSpace::new(m, g).unwrap());
        let n = Chart::Space(Space::new("N", &["u"]).unwrap());
        let mut comps = BTreeMap::new();
        comps.insert("u".to_string(), parse_scalar("t*x").unwrap());
        let f = SmoothMap::new(cyl.clone(), n.clone(), comps).unwrap();
        let du = dd(&n, "u");
        let pb = du.pullback(&f).unwrap();
        assert!(pb.coefficient(&[0]).equivalent(&ScalarExpr::coord("t")));
        assert!(pb.coefficient(&[1]).equivalent(&ScalarExpr::coord("x")));

        // F(x,y,t) = (t*x, t*y): pullback of du^dv
        let m2 = Space::new("M2", &["x", "y"]).unwrap();
        let g2 = Space::new("G2", &["t"]).unwrap();
        let cyl2 = Chart::Cylinder(CylinderSpace::new(m2, g2).unwrap());
        let n2 = Chart::Space(Space::new("N2", &["u", "v"]).unwrap());
        let mut comps2 = BTreeMap::new();
        comps2.insert("u".to_string(), parse_scalar("t*x").unwrap());
        comps2.insert("v".to_string(), parse_scalar("t*y").unwrap());
        let f2 = SmoothMap::new(cyl2.clone(), n2.clone(), comps2).unwrap();
        let dudv = dd(&n2, "u").wedge(&dd(&n2, "v")).unwrap();
        let pb2 = dudv.pullback(&f2).unwrap();
        // t^2 dx^dy + t*y dx^dt - t*x dy^dt  (coords x,y,t = positions 0,1,2)
        assert!(pb2.coefficient(&[0, 1]).equivalent(&parse_scalar("t^2").unwrap()));
        assert!(pb2.coefficient(&[0, 2]).equivalent(&parse_scalar("t*y").unwrap()));
        assert!(pb2.coefficient(&[1, 2]).equivalent(&parse_scalar("-t*x").unwrap()));
    }

    #[test]
    fn pullback_along_slicing_substitutes() {
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("G", &["t"]).unwrap();
        let cylsp = CylinderSpace::new(m, g).unwrap();
        let cyl = Chart::Cylinder(cylsp.clone());
        let fam = sc(&cyl, "x*t");
        let mut gpt = crate::spaces::ParamPoint::new();
        gpt.insert("t".into(), num_rational::BigRational::from_integer(1.into()));
        let iota = crate::spaces::slicing(&cylsp, &gpt).unwrap();
        let restricted = fam.pullback(&iota).unwrap();
        assert!(restricted
            .as_scalar()
            .unwrap()
            .equivalent(&ScalarExpr::coord("x")));
    }
}
