//! Univariate building blocks on discrete laws: AVaR, moments and
//! partial-moment norms.
//!
//! Every accumulation runs over the atoms in canonical order (sorted by
//! value, then probability). Two distributions that differ only by a
//! permutation of their atoms therefore evaluate to bit-identical results.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of the probability vector from a unit sum.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A finite-support law: atoms `values[i]` with mass `probs[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        validate_probs(&probs, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Distribution(format!(
                "value at index {i} is not finite"
            )));
        }
        Ok(Self { values, probs })
    }

    /// Equal weights 1/N on every value.
    pub fn equally_weighted(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Distribution("empty support".into()));
        }
        let p = 1.0 / n as f64;
        Self::new(values, vec![p; n])
    }

    /// Point mass at `a`.
    pub fn degenerate(a: f64) -> Result<Self> {
        Self::new(vec![a], vec![1.0])
    }

    /// Caller guarantees the invariants (used when deriving from an
    /// already-validated scenario set).
    pub(crate) fn from_parts(values: Vec<f64>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), probs.len());
        Self { values, probs }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(
            self.values.iter().map(|&v| f(v)).collect(),
            self.probs.clone(),
        )
    }

    /// Atom indices sorted ascending by value; ties keep input order.
    pub(crate) fn ascending_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        idx
    }

    /// Ascending by value, then by probability.
    fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| match self.values[a].total_cmp(&self.values[b]) {
            Ordering::Equal => self.probs[a].total_cmp(&self.probs[b]),
            o => o,
        });
        idx
    }

    fn constant_value(&self) -> Option<f64> {
        let first = *self.values.first()?;
        self.values.iter().all(|&v| v == first).then_some(first)
    }

    fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.canonical_order()
            .into_iter()
            .map(|i| self.probs[i] * f(self.values[i]))
            .sum()
    }
}

pub(crate) fn validate_probs(probs: &[f64], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Distribution("empty support".into()));
    }
    if probs.len() != n {
        return Err(Error::Distribution(format!(
            "{} probabilities for {} atoms",
            probs.len(),
            n
        )));
    }
    if let Some(i) = probs.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Distribution(format!(
            "probability at index {i} is negative or not finite"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::Distribution(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::param(format!("quantile level {tau} outside [0, 1)")));
    }
    Ok(())
}

/// Average value at risk at level `tau`: the negated mean of the worst
/// `1 - tau` probability mass, splitting the boundary atom.
///
/// Equivalent to `inf_b { E[(b - Y)^+] / (1 - tau) - b }`. At `tau = 0`
/// this is `-E[Y]`.
pub fn avar(d: &DiscreteDistribution, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if let Some(a) = d.constant_value() {
        return Ok(-a);
    }
    let tail = 1.0 - tau;
    let mut taken = 0.0;
    let mut acc = 0.0;
    for i in d.ascending_order() {
        let remaining = tail - taken;
        if remaining <= 0.0 {
            break;
        }
        let w = d.probs[i].min(remaining);
        acc += w * d.values[i];
        taken += w;
    }
    Ok(-acc / tail)
}

pub fn mean(d: &DiscreteDistribution) -> f64 {
    if let Some(a) = d.constant_value() {
        return a;
    }
    d.expect(|v| v)
}

/// Population variance `E[(Y - E[Y])^2]`.
pub fn variance(d: &DiscreteDistribution) -> f64 {
    if d.constant_value().is_some() {
        return 0.0;
    }
    let m = mean(d);
    d.expect(|v| (v - m) * (v - m)).max(0.0)
}

pub fn std(d: &DiscreteDistribution) -> f64 {
    variance(d).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `(Y - threshold)^+`
    Above,
    /// `(threshold - Y)^+`
    Below,
}

/// `(E[max(±(Y - threshold), 0)^p])^(1/p)`.
pub fn partial_norm(d: &DiscreteDistribution, threshold: f64, side: Side, p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::param(format!("norm order {p} must be positive")));
    }
    let excess = |v: f64| match side {
        Side::Above => (v - threshold).max(0.0),
        Side::Below => (threshold - v).max(0.0),
    };
    let m = if p == 1.0 {
        d.expect(excess)
    } else if p == 2.0 {
        d.expect(|v| {
            let e = excess(v);
            e * e
        })
    } else {
        d.expect(|v| excess(v).powf(p))
    };
    Ok(if p == 1.0 {
        m
    } else if p == 2.0 {
        m.sqrt()
    } else {
        m.powf(1.0 / p)
    })
}
