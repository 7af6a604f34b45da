//! Risk and reward measures for portfolios scored on both financial return
//! and an ESG flow.
//!
//! A position is a [`BivariateScenarioSet`]: finitely many scenarios, each a
//! pair (return, normalized ESG) with a probability. The measures blend the
//! two coordinates with a weight lambda in [0, 1].

pub mod axioms;
pub mod dual;
pub mod error;
pub mod generate;
pub mod hedging;
pub mod measures;
pub mod panel;
pub mod ranking;
pub mod ratios;
pub mod risk;
pub mod scenario;

pub use error::{Error, Result};
pub use measures::{Lambda, MeasureKind, MeasureSpec};
pub use risk::DiscreteDistribution;
pub use scenario::{BivariateScenarioSet, NormalizationConfig};
