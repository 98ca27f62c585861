//! Geometric thermodynamics of a slowly driven qubit coupled to two Ohmic
//! bosonic baths: response coefficients, pumped-heat area, thermodynamic
//! lengths and the isoperimetric search for optimal engine cycles.
//!
//! All quantities are in natural units (k_B = ħ = T = 1). See [`units`] for
//! the conversion to SI.

pub mod error;
pub mod geometry;
pub mod master_eq;
pub mod optimizer;
pub mod performance;
pub mod quad;
pub mod qubit_model;
pub mod trajectory;
pub mod units;

pub use error::{Error, Result};
pub use qubit_model::{BathParams, FieldPoint, OnsagerCoeffs};
pub use geometry::{Geometry, GeomSummary, Metric, ProfileKind, ProfileStats};
pub use trajectory::{Curve, Path, Shape, SpeedProfile};
pub use performance::{Drive, Mode, Performance, RefrigeratorPerformance};
pub use optimizer::{Objective, OptimizationResult, OptimizerSettings};
