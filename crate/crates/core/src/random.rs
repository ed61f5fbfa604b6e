//! Seeded random generators for scalars, forms, fields and maps, used by the
//! property batteries and the acceptance suite. Everything is deterministic
//! given the RNG state.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::Rng;

use crate::error::Result;
use crate::exterior::{DiffForm, MultiIndex, VectorField};
use crate::scalar::ScalarExpr;
use crate::spaces::{Chart, SmoothMap};

/// Small nonzero rational with numerator in `[-3, 3]` and denominator in
/// `[1, 2]`.
pub fn rational(rng: &mut impl Rng) -> BigRational {
    let mut numer = 0i64;
    while numer == 0 {
        numer = rng.gen_range(-3..=3);
    }
    let denom = rng.gen_range(1..=2i64);
    BigRational::new(numer.into(), denom.into())
}

/// Random polynomial over `coords` with total degree at most `max_degree`
/// and at most `max_terms` monomials (possibly fewer after collection).
pub fn polynomial(
    rng: &mut impl Rng,
    coords: &[String],
    max_degree: u32,
    max_terms: usize,
) -> ScalarExpr {
    let terms = rng.gen_range(1..=max_terms.max(1));
    let mut acc = ScalarExpr::zero();
    for _ in 0..terms {
        let mut term = ScalarExpr::Rational(rational(rng));
        let mut budget = max_degree;
        for c in coords {
            if budget == 0 {
                break;
            }
            let e = rng.gen_range(0..=budget);
            if e > 0 {
                term = term * ScalarExpr::coord(c.clone()).pow(e as i32);
                budget -= e;
            }
        }
        acc = acc + term;
    }
    acc.normalize()
}

/// Random polynomial form of the given degree with sparse terms.
pub fn form(
    rng: &mut impl Rng,
    chart: &Chart,
    degree: usize,
    coeff_degree: u32,
    max_terms: usize,
) -> Result<DiffForm> {
    let dim = chart.dim();
    let coords = chart.coords();
    if degree > dim {
        return Ok(DiffForm::zero(chart.clone(), degree));
    }
    let mut terms: Vec<(MultiIndex, ScalarExpr)> = Vec::new();
    for _ in 0..rng.gen_range(1..=max_terms.max(1)) {
        let mut idx: Vec<u32> = (0..dim as u32).collect();
        // random strictly increasing index set of the right size
        for i in (1..dim).rev() {
            let j = rng.gen_range(0..=i);
            idx.swap(i, j);
        }
        let mut idx: Vec<u32> = idx.into_iter().take(degree).collect();
        idx.sort_unstable();
        let coeff = polynomial(rng, &coords, coeff_degree, 3);
        terms.push((idx, coeff));
    }
    DiffForm::from_terms(chart.clone(), degree, terms)
}

/// Random form with a uniformly chosen degree in `0..=max_degree`.
pub fn form_any_degree(
    rng: &mut impl Rng,
    chart: &Chart,
    max_degree: usize,
    coeff_degree: u32,
) -> Result<DiffForm> {
    let degree = rng.gen_range(0..=max_degree.min(chart.dim()));
    form(rng, chart, degree, coeff_degree, 3)
}

/// Random polynomial vector field on a chart.
pub fn field(rng: &mut impl Rng, chart: &Chart, coeff_degree: u32) -> Result<VectorField> {
    let coords = chart.coords();
    let mut comps = BTreeMap::new();
    for c in &coords {
        if rng.gen_bool(0.7) {
            comps.insert(c.clone(), polynomial(rng, &coords, coeff_degree, 2));
        }
    }
    VectorField::new(chart.clone(), comps)
}

/// Random polynomial map between charts with component degree at most
/// `degree`.
pub fn map(
    rng: &mut impl Rng,
    source: &Chart,
    target: &Chart,
    degree: u32,
) -> Result<SmoothMap> {
    let scoords = source.coords();
    let comps = target
        .coords()
        .iter()
        .map(|c| (c.clone(), polynomial(rng, &scoords, degree, 3)))
        .collect();
    SmoothMap::new(source.clone(), target.clone(), comps)
}

/// Random point binding the chart's coordinates to floats in `[-2, 2]`.
pub fn point(rng: &mut impl Rng, chart: &Chart) -> BTreeMap<String, f64> {
    chart
        .coords()
        .into_iter()
        .map(|c| (c, rng.gen_range(-2.0..2.0)))
        .collect()
}
