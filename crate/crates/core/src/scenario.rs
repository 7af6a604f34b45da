//! The bivariate (return, ESG) scenario model and ESG score normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::{validate_probs, DiscreteDistribution};

/// Trading days per year; also the ESG scaling constant.
pub const TRADING_DAYS: u32 = 252;

/// Discrete joint law of `(r, esg)`: scenario `i` has return `returns[i]`,
/// sustainability flow `esg[i]` and probability `probs[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateScenarioSet {
    returns: Vec<f64>,
    esg: Vec<f64>,
    probs: Vec<f64>,
}

impl BivariateScenarioSet {
    pub fn new(scenarios: Vec<(f64, f64)>, probs: Vec<f64>) -> Result<Self> {
        let (returns, esg) = scenarios.into_iter().unzip();
        Self::from_margins(returns, esg, probs)
    }

    pub fn from_margins(returns: Vec<f64>, esg: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if returns.len() != esg.len() {
            return Err(Error::Distribution(format!(
                "{} returns but {} ESG values",
                returns.len(),
                esg.len()
            )));
        }
        validate_probs(&probs, returns.len())?;
        if let Some(i) = returns
            .iter()
            .zip(&esg)
            .position(|(r, e)| !(r.is_finite() && e.is_finite()))
        {
            return Err(Error::Distribution(format!("scenario {i} is not finite")));
        }
        Ok(Self {
            returns,
            esg,
            probs,
        })
    }

    /// Historical-simulation weighting: every scenario gets 1/N.
    pub fn equally_weighted(scenarios: Vec<(f64, f64)>) -> Result<Self> {
        let n = scenarios.len();
        if n == 0 {
            return Err(Error::Distribution("empty scenario set".into()));
        }
        Self::new(scenarios, vec![1.0 / n as f64; n])
    }

    /// The deterministic vector `[a1, a2]'` as a one-scenario law.
    pub fn deterministic(a1: f64, a2: f64) -> Result<Self> {
        Self::new(vec![(a1, a2)], vec![1.0])
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn esg(&self) -> &[f64] {
        &self.esg
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn scenarios(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.returns.iter().copied().zip(self.esg.iter().copied())
    }

    pub fn return_margin(&self) -> DiscreteDistribution {
        DiscreteDistribution::from_parts(self.returns.clone(), self.probs.clone())
    }

    pub fn esg_margin(&self) -> DiscreteDistribution {
        DiscreteDistribution::from_parts(self.esg.clone(), self.probs.clone())
    }

    fn map(&self, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (returns, esg) = self.scenarios().map(|(r, e)| f(r, e)).unzip();
        Self {
            returns,
            esg,
            probs: self.probs.clone(),
        }
    }

    /// `beta * X`.
    pub fn scale(&self, beta: f64) -> Self {
        self.map(|r, e| (beta * r, beta * e))
    }

    /// `X + [a1, a2]'`.
    pub fn translate(&self, a1: f64, a2: f64) -> Self {
        self.map(|r, e| (r + a1, e + a2))
    }

    /// `-X`, both components negated.
    pub fn negate(&self) -> Self {
        self.map(|r, e| (-r, -e))
    }

    fn check_common_index(&self, other: &Self) -> Result<()> {
        if self.probs != other.probs {
            return Err(Error::param(
                "scenario sets do not share a common scenario index",
            ));
        }
        Ok(())
    }

    /// Scenario-wise sum `X1 + X2`; both sets must share their scenario index.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_common_index(other)?;
        Ok(Self {
            returns: self
                .returns
                .iter()
                .zip(&other.returns)
                .map(|(a, b)| a + b)
                .collect(),
            esg: self
                .esg
                .iter()
                .zip(&other.esg)
                .map(|(a, b)| a + b)
                .collect(),
            probs: self.probs.clone(),
        })
    }

    /// `delta * X1 + (1 - delta) * X2` on a common scenario index.
    pub fn mix(&self, other: &Self, delta: f64) -> Result<Self> {
        self.check_common_index(other)?;
        let w = 1.0 - delta;
        Ok(Self {
            returns: self
                .returns
                .iter()
                .zip(&other.returns)
                .map(|(a, b)| delta * a + w * b)
                .collect(),
            esg: self
                .esg
                .iter()
                .zip(&other.esg)
                .map(|(a, b)| delta * a + w * b)
                .collect(),
            probs: self.probs.clone(),
        })
    }

    /// Reorders scenarios: position `i` of the result holds scenario `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::param("not a permutation of the scenario index"));
        }
        Ok(Self {
            returns: perm.iter().map(|&i| self.returns[i]).collect(),
            esg: perm.iter().map(|&i| self.esg[i]).collect(),
            probs: perm.iter().map(|&i| self.probs[i]).collect(),
        })
    }

    /// Same returns and probabilities with a replaced ESG margin.
    pub fn with_esg(&self, esg: Vec<f64>) -> Result<Self> {
        Self::from_margins(self.returns.clone(), esg, self.probs.clone())
    }

    /// Same ESG margin and probabilities with replaced returns.
    pub fn with_returns(&self, returns: Vec<f64>) -> Result<Self> {
        Self::from_margins(returns, self.esg.clone(), self.probs.clone())
    }
}

/// Affine map from a raw ESG score scale onto `[-1/c, 1/c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConfig {
    pub raw_min: f64,
    pub raw_max: f64,
    pub c: u32,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self {
            raw_min: 0.0,
            raw_max: 100.0,
            c: TRADING_DAYS,
        }
    }
}

impl NormalizationConfig {
    pub fn new(raw_min: f64, raw_max: f64, c: u32) -> Result<Self> {
        let cfg = Self {
            raw_min,
            raw_max,
            c,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.raw_min.is_finite() && self.raw_max.is_finite() && self.raw_min < self.raw_max) {
            return Err(Error::param(format!(
                "raw ESG range [{}, {}] must be finite with min < max",
                self.raw_min, self.raw_max
            )));
        }
        if self.c == 0 {
            return Err(Error::param("normalization constant c must be at least 1"));
        }
        Ok(())
    }

    /// Normalizes one score; `index` is only used for the error message.
    pub fn apply(&self, index: usize, s: f64) -> Result<f64> {
        if !(s >= self.raw_min && s <= self.raw_max) {
            return Err(Error::OutOfRange {
                index,
                value: s,
                min: self.raw_min,
                max: self.raw_max,
            });
        }
        let unit = 2.0 * (s - self.raw_min) / (self.raw_max - self.raw_min) - 1.0;
        Ok(unit / f64::from(self.c))
    }
}

/// Maps raw scores affinely onto `[-1/c, 1/c]`, `raw_min -> -1/c`,
/// `raw_max -> 1/c`.
pub fn normalize_esg(raw: &[f64], cfg: &NormalizationConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    raw.iter()
        .enumerate()
        .map(|(i, &s)| cfg.apply(i, s))
        .collect()
}
