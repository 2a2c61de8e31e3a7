//! Sub-linear expectations generated by families of probability models,
//! two-sided phi-sub-Gaussian certificates, conjugate tail bounds for upper
//! capacities, and a desk-scale check of the capacity strong law of large
//! numbers.
//!
//! Modules, bottom-up:
//!
//! * [`nfunc`]: `phi_p`, convex conjugates (analytic and golden-section).
//! * [`expectation`]: exact discrete engine, Gaussian mean families, Monte
//!   Carlo estimators and axiom verifiers.
//! * [`subgauss`]: certificates, `tau_phi` bisection, tail bounds.
//! * [`slln`]: majorant constants, series bounds and path simulation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expectation;
pub mod nfunc;
mod par;
pub mod report;
pub mod rng;
pub mod slln;
pub mod subgauss;

pub use error::{Error, Result};
pub use expectation::{
    DiscreteEvent, DiscreteModelFamily, DiscreteRandomVariable, FamilySpec, GaussianMeanFamily,
    IntervalEvent, McEstimate, ModelFamily,
};
pub use nfunc::{ConjugateQuery, NFunction};
pub use report::{PropertyCheck, PropertyReport};
pub use slln::{CapacityEstimate, SllnConfig, SllnReport, TheoremConstants, TheoremInputs};
pub use subgauss::{LogMgfOracle, SubGaussianCertificate, SubGaussianParams, TailBoundResult};
