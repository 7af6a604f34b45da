//! ESG risk measure catalog.
//!
//! Two ways to lift a univariate functional to the bivariate vector
//! `X = [r, esg]'`: evaluate it on the combined outcome
//! `Y = (1 - lambda) r + lambda esg` (the plain variants), or blend the two
//! marginal values linearly (the `_l` variants).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::{self, check_tau, DiscreteDistribution};
use crate::scenario::BivariateScenarioSet;

/// Investor preference between monetary (0) and ESG (1) outcomes.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Lambda(f64);

impl Lambda {
    pub const ZERO: Lambda = Lambda(0.0);
    pub const ONE: Lambda = Lambda(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::param(format!("lambda {value} outside [0, 1]")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(1 - lambda) a1 + lambda a2`.
    pub fn blend(self, a1: f64, a2: f64) -> f64 {
        (1.0 - self.0) * a1 + self.0 * a2
    }
}

impl TryFrom<f64> for Lambda {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Lambda::new(v)
    }
}

impl From<Lambda> for f64 {
    fn from(l: Lambda) -> f64 {
        l.0
    }
}

/// Scenario-wise `(1 - lambda) r + lambda esg` with the original probabilities.
pub fn combine(x: &BivariateScenarioSet, lambda: Lambda) -> DiscreteDistribution {
    let values = x.scenarios().map(|(r, e)| lambda.blend(r, e)).collect();
    DiscreteDistribution::from_parts(values, x.probs().to_vec())
}

pub fn esg_avar(x: &BivariateScenarioSet, lambda: Lambda, tau: f64) -> Result<f64> {
    risk::avar(&combine(x, lambda), tau)
}

pub fn esg_avar_l(x: &BivariateScenarioSet, lambda: Lambda, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let r = risk::avar(&x.return_margin(), tau)?;
    let e = risk::avar(&x.esg_margin(), tau)?;
    Ok(lambda.blend(r, e))
}

pub fn esg_variance(x: &BivariateScenarioSet, lambda: Lambda) -> f64 {
    risk::variance(&combine(x, lambda))
}

pub fn esg_sigma(x: &BivariateScenarioSet, lambda: Lambda) -> f64 {
    esg_variance(x, lambda).sqrt()
}

pub fn esg_variance_l(x: &BivariateScenarioSet, lambda: Lambda) -> f64 {
    lambda.blend(
        risk::variance(&x.return_margin()),
        risk::variance(&x.esg_margin()),
    )
}

pub fn esg_sigma_l(x: &BivariateScenarioSet, lambda: Lambda) -> f64 {
    esg_variance_l(x, lambda).sqrt()
}

/// Reward measure `(1 - lambda) E[r] + lambda E[esg]`.
pub fn esg_mean(x: &BivariateScenarioSet, lambda: Lambda) -> f64 {
    risk::mean(&combine(x, lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    EsgAvar,
    EsgAvarL,
    EsgVariance,
    EsgSigma,
    EsgVarianceL,
    EsgSigmaL,
    EsgMean,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 7] = [
        MeasureKind::EsgAvar,
        MeasureKind::EsgAvarL,
        MeasureKind::EsgVariance,
        MeasureKind::EsgSigma,
        MeasureKind::EsgVarianceL,
        MeasureKind::EsgSigmaL,
        MeasureKind::EsgMean,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::EsgAvar => "esg_avar",
            MeasureKind::EsgAvarL => "esg_avar_l",
            MeasureKind::EsgVariance => "esg_variance",
            MeasureKind::EsgSigma => "esg_sigma",
            MeasureKind::EsgVarianceL => "esg_variance_l",
            MeasureKind::EsgSigmaL => "esg_sigma_l",
            MeasureKind::EsgMean => "esg_mean",
        }
    }

    pub fn uses_tau(self) -> bool {
        matches!(self, MeasureKind::EsgAvar | MeasureKind::EsgAvarL)
    }

    /// `esg_mean` is a reward; everything else is a risk.
    pub fn is_reward(self) -> bool {
        self == MeasureKind::EsgMean
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown measure '{s}'")))
    }
}

/// A measure from the catalog with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub lambda: Lambda,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind, lambda: Lambda, tau: Option<f64>) -> Result<Self> {
        match (kind.uses_tau(), tau) {
            (true, Some(t)) => check_tau(t)?,
            (true, None) => return Err(Error::param(format!("{kind} needs a quantile level"))),
            (false, Some(_)) => {
                return Err(Error::param(format!("{kind} takes no quantile level")))
            }
            (false, None) => {}
        }
        Ok(Self { kind, tau, lambda })
    }

    pub fn avar(lambda: Lambda, tau: f64) -> Result<Self> {
        Self::new(MeasureKind::EsgAvar, lambda, Some(tau))
    }

    pub fn avar_l(lambda: Lambda, tau: f64) -> Result<Self> {
        Self::new(MeasureKind::EsgAvarL, lambda, Some(tau))
    }

    pub fn plain(kind: MeasureKind, lambda: Lambda) -> Result<Self> {
        Self::new(kind, lambda, None)
    }

    pub fn with_lambda(self, lambda: Lambda) -> Self {
        Self { lambda, ..self }
    }

    pub fn evaluate(&self, x: &BivariateScenarioSet) -> Result<f64> {
        let l = self.lambda;
        let tau = || {
            self.tau
                .ok_or_else(|| Error::param("missing quantile level"))
        };
        Ok(match self.kind {
            MeasureKind::EsgAvar => esg_avar(x, l, tau()?)?,
            MeasureKind::EsgAvarL => esg_avar_l(x, l, tau()?)?,
            MeasureKind::EsgVariance => esg_variance(x, l),
            MeasureKind::EsgSigma => esg_sigma(x, l),
            MeasureKind::EsgVarianceL => esg_variance_l(x, l),
            MeasureKind::EsgSigmaL => esg_sigma_l(x, l),
            MeasureKind::EsgMean => esg_mean(x, l),
        })
    }

    pub fn label(&self) -> String {
        match self.tau {
            Some(t) => format!("{}(lambda={}, tau={})", self.kind, self.lambda.value(), t),
            None => format!("{}(lambda={})", self.kind, self.lambda.value()),
        }
    }
}

/// Pure monetary and pure ESG risk: the measure on `[r, 0]'` and on `[0, esg]'`.
pub fn pure_risks(x: &BivariateScenarioSet, spec: &MeasureSpec) -> Result<(f64, f64)> {
    if !spec.kind.uses_tau() {
        return Err(Error::param("pure risks are defined for the AVaR measures"));
    }
    let monetary = x.with_esg(vec![0.0; x.len()])?;
    let esg_only = x.with_returns(vec![0.0; x.len()])?;
    Ok((spec.evaluate(&monetary)?, spec.evaluate(&esg_only)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(v: f64) -> Lambda {
        Lambda::new(v).unwrap()
    }

    fn anti() -> BivariateScenarioSet {
        BivariateScenarioSet::equally_weighted(vec![(-0.10, 0.10), (0.10, -0.10)]).unwrap()
    }

    #[test]
    fn lambda_bounds() {
        assert!(Lambda::new(-0.01).is_err());
        assert!(Lambda::new(1.01).is_err());
        assert!(Lambda::new(f64::NAN).is_err());
        assert_eq!(Lambda::new(1.0).unwrap(), Lambda::ONE);
    }

    #[test]
    fn combine_projections() {
        let x = BivariateScenarioSet::equally_weighted(vec![(-0.10, 0.10), (0.3, -0.002)]).unwrap();
        assert_eq!(combine(&x, Lambda::ZERO).values(), x.returns());
        assert_eq!(combine(&x, Lambda::ONE).values(), x.esg());
        assert_eq!(combine(&x, lam(0.5)).values()[0], 0.0);
    }

    #[test]
    fn esg_avar_examples() {
        let d = BivariateScenarioSet::deterministic(0.02, -0.003).unwrap();
        for l in [0.0, 0.3, 1.0] {
            for tau in [0.0, 0.9] {
                let want = -lam(l).blend(0.02, -0.003);
                assert!((esg_avar(&d, lam(l), tau).unwrap() - want).abs() < 1e-15);
            }
        }
        assert_eq!(esg_avar(&anti(), lam(0.5), 0.5).unwrap(), 0.0);
        assert!((esg_avar(&anti(), Lambda::ZERO, 0.5).unwrap() - 0.10).abs() < 1e-15);
    }

    #[test]
    fn esg_avar_l_examples() {
        let x = anti();
        assert!((esg_avar_l(&x, lam(0.5), 0.5).unwrap() - 0.10).abs() < 1e-15);
        assert_eq!(
            esg_avar_l(&x, Lambda::ZERO, 0.5).unwrap(),
            esg_avar(&x, Lambda::ZERO, 0.5).unwrap()
        );
        let co =
            BivariateScenarioSet::equally_weighted(vec![(-0.1, -0.2), (0.0, 0.0), (0.05, 0.1)])
                .unwrap();
        for l in [0.2, 0.5, 0.8] {
            for tau in [0.0, 0.5, 0.9] {
                let a = esg_avar(&co, lam(l), tau).unwrap();
                let b = esg_avar_l(&co, lam(l), tau).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn variance_examples() {
        let d = BivariateScenarioSet::deterministic(0.1, 0.2).unwrap();
        assert_eq!(esg_variance(&d, lam(0.4)), 0.0);
        assert_eq!(esg_sigma(&d, lam(0.4)), 0.0);

        // independent margins, each variance 1, on the product space
        let x = BivariateScenarioSet::equally_weighted(vec![
            (-1.0, -1.0),
            (-1.0, 1.0),
            (1.0, -1.0),
            (1.0, 1.0),
        ])
        .unwrap();
        assert!((esg_variance(&x, lam(0.5)) - 0.5).abs() < 1e-15);

        let y = BivariateScenarioSet::equally_weighted(vec![(0.1, 0.3), (-0.2, 0.05), (0.0, 0.0)])
            .unwrap();
        let (v, s) = (esg_variance(&y, lam(0.3)), esg_sigma(&y, lam(0.3)));
        let y2 = y.scale(2.0);
        assert!((esg_variance(&y2, lam(0.3)) - 4.0 * v).abs() < 1e-15);
        assert!((esg_sigma(&y2, lam(0.3)) - 2.0 * s).abs() < 1e-15);
    }

    #[test]
    fn linear_variance_examples() {
        let x = BivariateScenarioSet::equally_weighted(vec![(-0.2, -0.1), (0.2, 0.1)]).unwrap();
        assert_eq!(
            esg_variance_l(&x, Lambda::ZERO),
            risk::variance(&x.return_margin())
        );
        let v = esg_variance_l(&x, lam(0.25));
        assert!((v - 0.0325).abs() < 1e-15);
        assert!((esg_sigma_l(&x, lam(0.25)) - 0.180278).abs() < 1e-6);

        let eq = BivariateScenarioSet::equally_weighted(vec![(-0.2, 0.2), (0.2, -0.2)]).unwrap();
        assert!((esg_variance_l(&eq, lam(0.37)) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn mean_examples() {
        let d = BivariateScenarioSet::deterministic(0.1, 0.02).unwrap();
        assert!((esg_mean(&d, lam(0.5)) - 0.06).abs() < 1e-15);
        let x = BivariateScenarioSet::equally_weighted(vec![(0.1, 0.01), (0.1, 0.03)]).unwrap();
        assert!((esg_mean(&x, lam(0.5)) - 0.06).abs() < 1e-15);
        assert_eq!(esg_mean(&x, Lambda::ONE), risk::mean(&x.esg_margin()));
    }

    #[test]
    fn pure_risk_examples() {
        let x =
            BivariateScenarioSet::equally_weighted(vec![(-0.1, 0.002), (0.05, -0.003), (0.0, 0.0)])
                .unwrap();
        let at0 = MeasureSpec::avar(Lambda::ZERO, 0.5).unwrap();
        assert_eq!(pure_risks(&x, &at0).unwrap().1, 0.0);
        let at1 = MeasureSpec::avar(Lambda::ONE, 0.5).unwrap();
        assert_eq!(pure_risks(&x, &at1).unwrap().0, 0.0);
        let sigma = MeasureSpec::plain(MeasureKind::EsgSigma, lam(0.5)).unwrap();
        assert!(pure_risks(&x, &sigma).is_err());
    }

    #[test]
    fn measure_spec_parameter_checks() {
        assert!(MeasureSpec::new(MeasureKind::EsgAvar, lam(0.5), None).is_err());
        assert!(MeasureSpec::new(MeasureKind::EsgSigma, lam(0.5), Some(0.9)).is_err());
        assert!(MeasureSpec::avar(lam(0.5), 1.0).is_err());
        assert_eq!(
            "esg_sigma_l".parse::<MeasureKind>().unwrap(),
            MeasureKind::EsgSigmaL
        );
        assert!("esg_var".parse::<MeasureKind>().is_err());
    }
}
