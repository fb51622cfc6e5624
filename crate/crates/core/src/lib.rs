//! Thermodynamic formalism on one-sided subshifts, built around one-block
//! factor maps.
//!
//! The crate computes, at finite word length `n`:
//!
//! - topological pressure of additive and almost additive potentials, with
//!   rigorous sub/super-additive brackets;
//! - exact Gibbs/equilibrium data for small-window potentials on mixing SFTs
//!   (Ruelle–Perron–Frobenius eigendata, Parry measures, Markov chains);
//! - image potentials of a potential under a factor map, the induced Gibbs
//!   property of pushforward measures, and preimage potentials built from
//!   fiber counts;
//! - relative (fiberwise) pressure along eventually periodic points;
//! - variational lower bounds from order-k Markov measures.
//!
//! Everything is evaluated on cylinders through `[inf, sup]` envelopes of
//! `log f_n` and accumulated in log-space.

// dense matrix and DP kernels read better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod codes;
pub mod error;
pub mod factor;
pub mod gibbs;
pub mod logsum;
pub mod potential;
pub mod pressure;
pub mod shift;

pub use codes::{ConditionAReport, FactorMap};
pub use error::{Error, Result};
pub use factor::ImagePotentialTable;
pub use gibbs::{CylinderDistribution, MarkovMeasure, Measure, RpfData};
pub use potential::{Flavor, LogEnvelope, Potential};
pub use pressure::PressureBracket;
pub use shift::{LabeledGraph, PeriodicPoint, ShiftKind, Subshift, Tail, Word};
