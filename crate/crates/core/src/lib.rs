//! Symbolic exterior calculus on product ("cylinder") spaces `M x G`.
//!
//! The crate implements coordinate differential forms, vector fields and
//! smooth maps together with the cylinder-specific operators: canonical
//! lifts, the bidegree decomposition, horizontalization, the horizontal
//! differential, lifted functionals (point evaluation and fiber integration
//! over an interval), and the homotopy operator, up to machine verification
//! of the homotopy formula `F_b* - F_a* = h d + d h`.
//!
//! All coefficients are exact symbolic scalars over arbitrary-precision
//! rationals; probabilistic numeric checks are used only where symbolic
//! decision is impossible (transcendental coefficients), and their verdicts
//! are labelled as numeric.

pub mod cylinder;
pub mod error;
pub mod exterior;
pub mod homotopy;
pub mod integrate;
pub mod quad;
pub mod random;
pub mod scalar;
pub mod spaces;

pub use error::{Error, Result};
pub use exterior::{apply_field, DiffForm, MultiIndex, VectorField};
pub use num_rational::BigRational;
pub use scalar::{parse_scalar, ScalarExpr, Verdict, ZeroTest};
pub use spaces::{
    compose, projection_base, projection_params, slicing, Chart, CylinderSpace, ParamPoint, Space,
    SmoothMap,
};
