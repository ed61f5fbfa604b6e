//! Coordinate charts and smooth maps in coordinates.
//!
//! A `Space` is a named, ordered global coordinate chart. A `CylinderSpace`
//! is a product `M x G` whose coordinate order is base-then-parameters; that
//! order is also the canonical wedge-monomial order. Smooth maps are given by
//! one scalar component per target coordinate.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::ScalarExpr;

/// A named global coordinate chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    name: String,
    coords: Vec<String>,
}

impl Space {
    pub fn new(name: impl Into<String>, coords: &[&str]) -> Result<Self> {
        let name = name.into();
        let coords: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        if coords.is_empty() {
            return Err(Error::InvalidChart(format!("space {name} has no coordinates")));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(Error::InvalidChart(format!(
                    "duplicate coordinate `{c}` in space {name}"
                )));
            }
        }
        Ok(Space { name, coords })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// The product `M x G` of a base space and a parameter space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSpace {
    base: Space,
    params: Space,
}

impl CylinderSpace {
    pub fn new(base: Space, params: Space) -> Result<Self> {
        for c in params.coords() {
            if base.coords().contains(c) {
                return Err(Error::InvalidChart(format!(
                    "coordinate `{c}` appears in both factors {} and {}",
                    base.name(),
                    params.name()
                )));
            }
        }
        Ok(CylinderSpace { base, params })
    }

    pub fn base(&self) -> &Space {
        &self.base
    }

    pub fn params(&self) -> &Space {
        &self.params
    }

    /// Base coordinates followed by parameter coordinates.
    pub fn coords(&self) -> Vec<String> {
        let mut out = self.base.coords().to_vec();
        out.extend_from_slice(self.params.coords());
        out
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + self.params.dim()
    }

    pub fn name(&self) -> String {
        format!("{}*{}", self.base.name(), self.params.name())
    }
}

/// Either a plain space or a cylinder: the domain of forms, fields and maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chart {
    Space(Space),
    Cylinder(CylinderSpace),
}

impl Chart {
    pub fn coords(&self) -> Vec<String> {
        match self {
            Chart::Space(s) => s.coords().to_vec(),
            Chart::Cylinder(c) => c.coords(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Chart::Space(s) => s.dim(),
            Chart::Cylinder(c) => c.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Chart::Space(s) => s.name().to_string(),
            Chart::Cylinder(c) => c.name(),
        }
    }

    pub fn coord_index(&self, coord: &str) -> Option<usize> {
        self.coords().iter().position(|c| c == coord)
    }

    pub fn as_cylinder(&self) -> Result<&CylinderSpace> {
        match self {
            Chart::Cylinder(c) => Ok(c),
            Chart::Space(s) => Err(Error::InvalidChart(format!(
                "expected a cylinder, got plain space {}",
                s.name()
            ))),
        }
    }

    pub fn contains_coord(&self, coord: &str) -> bool {
        self.coord_index(coord).is_some()
    }
}

impl From<Space> for Chart {
    fn from(s: Space) -> Chart {
        Chart::Space(s)
    }
}

impl From<CylinderSpace> for Chart {
    fn from(c: CylinderSpace) -> Chart {
        Chart::Cylinder(c)
    }
}

/// A smooth map in coordinates: one component expression per target
/// coordinate, over the source coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothMap {
    source: Chart,
    target: Chart,
    components: BTreeMap<String, ScalarExpr>,
}

impl SmoothMap {
    pub fn new(
        source: Chart,
        target: Chart,
        components: BTreeMap<String, ScalarExpr>,
    ) -> Result<Self> {
        let tcoords = target.coords();
        for c in &tcoords {
            if !components.contains_key(c) {
                return Err(Error::InvalidMap(format!(
                    "missing component for target coordinate `{c}`"
                )));
            }
        }
        for key in components.keys() {
            if !tcoords.contains(key) {
                return Err(Error::InvalidMap(format!(
                    "component `{key}` is not a coordinate of {}",
                    target.name()
                )));
            }
        }
        let mut normalized = BTreeMap::new();
        for (k, e) in components {
            for free in e.free_coords() {
                if !source.contains_coord(&free) {
                    return Err(Error::UnknownCoordinate(format!(
                        "{free} (component `{k}` must use only coordinates of {})",
                        source.name()
                    )));
                }
            }
            normalized.insert(k, e.normalize());
        }
        Ok(SmoothMap {
            source,
            target,
            components: normalized,
        })
    }

    pub fn identity(chart: Chart) -> Self {
        let components = chart
            .coords()
            .iter()
            .map(|c| (c.clone(), ScalarExpr::coord(c.clone())))
            .collect();
        SmoothMap {
            source: chart.clone(),
            target: chart,
            components,
        }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn component(&self, coord: &str) -> Result<&ScalarExpr> {
        self.components
            .get(coord)
            .ok_or_else(|| Error::UnknownCoordinate(coord.to_string()))
    }

    pub fn components(&self) -> &BTreeMap<String, ScalarExpr> {
        &self.components
    }

    /// Pull a scalar on the target back to the source by substitution.
    pub fn pullback_scalar(&self, f: &ScalarExpr) -> Result<ScalarExpr> {
        for c in f.free_coords() {
            if !self.target.contains_coord(&c) {
                return Err(Error::UnknownCoordinate(format!(
                    "{c} is not a coordinate of {}",
                    self.target.name()
                )));
            }
        }
        Ok(f.substitute(&self.components))
    }

    /// Componentwise equality of normal forms.
    pub fn equivalent(&self, other: &SmoothMap) -> bool {
        self.source == other.source
            && self.target == other.target
            && self
                .components
                .iter()
                .all(|(k, e)| other.components.get(k).is_some_and(|o| o.equivalent(e)))
    }
}

impl fmt::Display for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {{ ", self.source.name(), self.target.name())?;
        for (i, (k, e)) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k} = {e}")?;
        }
        write!(f, " }}")
    }
}

/// Composition `f . h` (apply `h` first). Requires `h.target == f.source`.
pub fn compose(f: &SmoothMap, h: &SmoothMap) -> Result<SmoothMap> {
    if h.target != f.source {
        return Err(Error::SpaceMismatch(format!(
            "cannot compose: inner map lands in {}, outer map starts from {}",
            h.target.name(),
            f.source.name()
        )));
    }
    let components = f
        .components
        .iter()
        .map(|(k, e)| (k.clone(), e.substitute(&h.components)))
        .collect();
    Ok(SmoothMap {
        source: h.source.clone(),
        target: f.target.clone(),
        components,
    })
}

/// Canonical projection `M x G -> M`.
pub fn projection_base(cyl: &CylinderSpace) -> SmoothMap {
    let components = cyl
        .base()
        .coords()
        .iter()
        .map(|c| (c.clone(), ScalarExpr::coord(c.clone())))
        .collect();
    SmoothMap {
        source: Chart::Cylinder(cyl.clone()),
        target: Chart::Space(cyl.base().clone()),
        components,
    }
}

/// Canonical projection `M x G -> G`.
pub fn projection_params(cyl: &CylinderSpace) -> SmoothMap {
    let components = cyl
        .params()
        .coords()
        .iter()
        .map(|c| (c.clone(), ScalarExpr::coord(c.clone())))
        .collect();
    SmoothMap {
        source: Chart::Cylinder(cyl.clone()),
        target: Chart::Space(cyl.params().clone()),
        components,
    }
}

/// A point of the parameter factor: exact rational values for every
/// parameter coordinate.
pub type ParamPoint = BTreeMap<String, BigRational>;

/// The slicing map `M -> M x G` at the parameter point `g`: base coordinates
/// are kept, parameter coordinates are pinned to constants.
pub fn slicing(cyl: &CylinderSpace, g: &ParamPoint) -> Result<SmoothMap> {
    let mut components: BTreeMap<String, ScalarExpr> = BTreeMap::new();
    for c in cyl.base().coords() {
        components.insert(c.clone(), ScalarExpr::coord(c.clone()));
    }
    for c in cyl.params().coords() {
        let v = g
            .get(c)
            .ok_or_else(|| Error::UnboundCoordinate(c.clone()))?;
        components.insert(c.clone(), ScalarExpr::Rational(v.clone()));
    }
    Ok(SmoothMap {
        source: Chart::Space(cyl.base().clone()),
        target: Chart::Cylinder(cyl.clone()),
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn cyl_xy_t() -> CylinderSpace {
        let m = Space::new("M", &["x", "y"]).unwrap();
        let g = Space::new("G", &["t"]).unwrap();
        CylinderSpace::new(m, g).unwrap()
    }

    fn param(t: i64) -> ParamPoint {
        let mut g = ParamPoint::new();
        g.insert("t".to_string(), BigRational::from_integer(t.into()));
        g
    }

    #[test]
    fn projections_restrict_the_identity() {
        let cyl = cyl_xy_t();
        let pm = projection_base(&cyl);
        assert_eq!(pm.component("x").unwrap(), &ScalarExpr::coord("x"));
        assert_eq!(pm.component("y").unwrap(), &ScalarExpr::coord("y"));
        let pg = projection_params(&cyl);
        assert_eq!(pg.component("t").unwrap(), &ScalarExpr::coord("t"));
    }

    #[test]
    fn slicing_pins_parameters() {
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("G", &["t"]).unwrap();
        let cyl = CylinderSpace::new(m, g).unwrap();
        let s1 = slicing(&cyl, &param(1)).unwrap();
        assert_eq!(s1.component("x").unwrap(), &ScalarExpr::coord("x"));
        assert_eq!(s1.component("t").unwrap(), &ScalarExpr::one());
        let s0 = slicing(&cyl, &param(0)).unwrap();
        assert_eq!(s0.component("t").unwrap(), &ScalarExpr::zero());
        assert!(slicing(&cyl, &ParamPoint::new()).is_err());
    }

    #[test]
    fn projection_after_slicing_is_identity() {
        let cyl = cyl_xy_t();
        for tval in [-3, 0, 2, 7] {
            let comp = compose(&projection_base(&cyl), &slicing(&cyl, &param(tval)).unwrap())
                .unwrap();
            assert!(comp.equivalent(&SmoothMap::identity(Chart::Space(cyl.base().clone()))));
        }
    }

    #[test]
    fn composition_substitutes_components() {
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("G", &["t"]).unwrap();
        let cyl = CylinderSpace::new(m.clone(), g).unwrap();
        let n = Space::new("N", &["u"]).unwrap();
        let mut comps = BTreeMap::new();
        comps.insert("u".to_string(), parse_scalar("t*x").unwrap());
        let f = SmoothMap::new(
            Chart::Cylinder(cyl.clone()),
            Chart::Space(n.clone()),
            comps,
        )
        .unwrap();

        let f1 = compose(&f, &slicing(&cyl, &param(1)).unwrap()).unwrap();
        assert!(f1.component("u").unwrap().equivalent(&ScalarExpr::coord("x")));

        let f0 = compose(&f, &slicing(&cyl, &param(0)).unwrap()).unwrap();
        assert!(f0.component("u").unwrap().equivalent(&ScalarExpr::zero()));

        let idc = SmoothMap::identity(Chart::Cylinder(cyl));
        assert!(compose(&f, &idc).unwrap().equivalent(&f));
    }

    #[test]
    fn map_validation_rejects_bad_components() {
        let m = Space::new("M", &["x"]).unwrap();
        let n = Space::new("N", &["u"]).unwrap();
        let mut comps = BTreeMap::new();
        comps.insert("u".to_string(), parse_scalar("q + x").unwrap());
        assert!(matches!(
            SmoothMap::new(Chart::Space(m.clone()), Chart::Space(n.clone()), comps),
            Err(Error::UnknownCoordinate(_))
        ));
        assert!(matches!(
            SmoothMap::new(Chart::Space(m), Chart::Space(n), BTreeMap::new()),
            Err(Error::InvalidMap(_))
        ));
    }

    #[test]
    fn chart_invariants_enforced() {
        assert!(Space::new("M", &[]).is_err());
        assert!(Space::new("M", &["x", "x"]).is_err());
        let m = Space::new("M", &["x"]).unwrap();
        let g = Space::new("G", &["x"]).unwrap();
        assert!(CylinderSpace::new(m, g).is_err());
    }
}
