//! Verification toolkit for one-dimensional solidification of a binary alloy
//! with a mushy zone.
//!
//! The library computes the exact similarity solution of the two-front Stefan
//! problem under a piecewise-constant thermal diffusivity (solid, mush,
//! liquid), where the mushy diffusivity is itself determined by root-finding
//! so that the closed-form liquid fraction hits its solidus value. The same
//! problem is solved numerically with an implicit apparent-capacity finite
//! difference scheme, and the harness compares the two and emits the error
//! metrics of the published VT3-1 titanium-alloy benchmark.
//!
//! Pipeline: [`material`] (properties, pointwise functions) →
//! [`linearization`] (the three constant diffusivities and the fraction
//! model) → [`similarity`] (front coefficients and exact fields) → [`fdm`]
//! (numeric solver) → [`harness`] (error metrics, convergence, reports).

pub mod fdm;
pub mod harness;
pub mod linearization;
pub mod material;
pub mod similarity;
pub mod specfn;
