//! ESG reward-risk ratios.
//!
//! Apart from Sharpe, every ratio is `reward^+ / risk^+` with the
//! conventions: `0^+ / 0^+` is undefined, `0 / d` is 0 and `n / 0` is `+inf`
//! for `n > 0`. Sharpe keeps its sign.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hedging::SafeAsset;
use crate::measures::{combine, esg_avar, esg_mean, esg_sigma, Lambda};
use crate::risk::{self, partial_norm, Side};
use crate::scenario::BivariateScenarioSet;

/// Real number extended with infinities and an explicit undefined marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extended {
    Finite(f64),
    PosInf,
    NegInf,
    Undefined,
}

impl Extended {
    pub fn is_undefined(self) -> bool {
        matches!(self, Extended::Undefined)
    }

    /// Infinities map to `±inf`, undefined to NaN.
    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            Extended::PosInf => f64::INFINITY,
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Undefined => f64::NAN,
        }
    }

    /// Order for "higher is better" rankings: `+inf` first, then finite
    /// values descending, `-inf`, undefined last.
    pub fn cmp_descending(self, other: Self) -> Ordering {
        fn key(v: Extended) -> (u8, f64) {
            match v {
                Extended::PosInf => (0, 0.0),
                Extended::Finite(x) => (1, -x),
                Extended::NegInf => (2, 0.0),
                Extended::Undefined => (3, 0.0),
            }
        }
        let (a, b) = (key(self), key(other));
        a.0.cmp(&b.0).then(a.1.total_cmp(&b.1))
    }

    /// Order for "lower is better" rankings: finite ascending, undefined last.
    pub fn cmp_ascending(self, other: Self) -> Ordering {
        fn key(v: Extended) -> (u8, f64) {
            match v {
                Extended::NegInf => (0, 0.0),
                Extended::Finite(x) => (1, x),
                Extended::PosInf => (2, 0.0),
                Extended::Undefined => (3, 0.0),
            }
        }
        let (a, b) = (key(self), key(other));
        a.0.cmp(&b.0).then(a.1.total_cmp(&b.1))
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => f.write_str("inf"),
            Extended::NegInf => f.write_str("-inf"),
            Extended::Undefined => f.write_str("undefined"),
        }
    }
}

/// `num^+ / den^+` with the zero conventions described in the module docs.
pub fn positive_quotient(num: f64, den: f64) -> Extended {
    let (n, d) = (num.max(0.0), den.max(0.0));
    match (n == 0.0, d == 0.0) {
        (true, true) => Extended::Undefined,
        (true, false) => Extended::Finite(0.0),
        (false, true) => Extended::PosInf,
        (false, false) => Extended::Finite(n / d),
    }
}

/// Signed quotient over a nonnegative denominator.
fn signed_quotient(num: f64, den: f64) -> Extended {
    if den > 0.0 {
        Extended::Finite(num / den)
    } else if num > 0.0 {
        Extended::PosInf
    } else if num < 0.0 {
        Extended::NegInf
    } else {
        Extended::Undefined
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioValue {
    pub value: Extended,
    /// Reward before taking positive parts.
    pub numerator: f64,
    /// Risk before taking positive parts.
    pub denominator: f64,
}

impl RatioValue {
    fn clipped(numerator: f64, denominator: f64) -> Self {
        Self {
            value: positive_quotient(numerator, denominator),
            numerator,
            denominator,
        }
    }

    /// The value under the positive-part convention (differs from `value`
    /// only for a negative Sharpe ratio).
    pub fn positive_part(&self) -> Extended {
        positive_quotient(self.numerator, self.denominator)
    }
}

/// `ESG-mu(X - SA) / ESG-sigma(X)`, signed.
pub fn esg_sharpe(x: &BivariateScenarioSet, lambda: Lambda, sa: &SafeAsset) -> RatioValue {
    let numerator = esg_mean(x, lambda) - lambda.blend(sa.rf_r, sa.rf_esg);
    let denominator = esg_sigma(x, lambda);
    RatioValue {
        value: signed_quotient(numerator, denominator),
        numerator,
        denominator,
    }
}

fn check_level(name: &str, v: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { v >= 0.0 } else { v > 0.0 } && v < 1.0;
    if !ok {
        let lo = if allow_zero { "[0" } else { "(0" };
        return Err(Error::param(format!("{name} = {v} outside {lo}, 1)")));
    }
    Ok(())
}

/// `ESG-AVaR_beta(-X) / ESG-AVaR_gamma(X)`.
pub fn esg_rachev(
    x: &BivariateScenarioSet,
    lambda: Lambda,
    beta: f64,
    gamma: f64,
) -> Result<RatioValue> {
    check_level("beta", beta, true)?;
    check_level("gamma", gamma, true)?;
    let numerator = esg_avar(&x.negate(), lambda, beta)?;
    let denominator = esg_avar(x, lambda, gamma)?;
    Ok(RatioValue::clipped(numerator, denominator))
}

/// `ESG-mu(X) / ESG-AVaR_alpha(X)`.
pub fn esg_starr(x: &BivariateScenarioSet, lambda: Lambda, alpha: f64) -> Result<RatioValue> {
    check_level("alpha", alpha, false)?;
    Ok(RatioValue::clipped(
        esg_mean(x, lambda),
        esg_avar(x, lambda, alpha)?,
    ))
}

/// `ESG-mu(X)^+ / ||Y^-||_p`; with a target, both sides use `X - SA`.
pub fn esg_sortino_satchell(
    x: &BivariateScenarioSet,
    lambda: Lambda,
    p: f64,
    target: Option<&SafeAsset>,
) -> Result<RatioValue> {
    let y = combine(x, lambda);
    let t = target.map_or(0.0, |sa| lambda.blend(sa.rf_r, sa.rf_esg));
    let numerator = risk::mean(&y) - t;
    let denominator = partial_norm(&y, t, Side::Below, p)?;
    Ok(RatioValue::clipped(numerator, denominator))
}

/// `E[(Y - t)^+] / E[(t - Y)^+]`.
pub fn esg_omega(x: &BivariateScenarioSet, lambda: Lambda, threshold: f64) -> Result<RatioValue> {
    if !threshold.is_finite() {
        return Err(Error::param("omega threshold must be finite"));
    }
    let y = combine(x, lambda);
    Ok(RatioValue::clipped(
        partial_norm(&y, threshold, Side::Above, 1.0)?,
        partial_norm(&y, threshold, Side::Below, 1.0)?,
    ))
}

/// `||(Y - m)^+||_p / ||(n - Y)^+||_q`.
pub fn esg_farinelli_tibiletti(
    x: &BivariateScenarioSet,
    lambda: Lambda,
    m: f64,
    n: f64,
    p: f64,
    q: f64,
) -> Result<RatioValue> {
    if !(m.is_finite() && n.is_finite()) {
        return Err(Error::param("thresholds m and n must be finite"));
    }
    let y = combine(x, lambda);
    Ok(RatioValue::clipped(
        partial_norm(&y, m, Side::Above, p)?,
        partial_norm(&y, n, Side::Below, q)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RatioKind {
    Sharpe { safe_asset: SafeAsset },
    Rachev { beta: f64, gamma: f64 },
    Starr { alpha: f64 },
    SortinoSatchell { p: f64, target: Option<SafeAsset> },
    Omega { threshold: f64 },
    FarinelliTibiletti { m: f64, n: f64, p: f64, q: f64 },
}

/// Ratio names accepted on the command line.
pub const RATIO_NAMES: [&str; 6] = [
    "sharpe",
    "rachev",
    "starr",
    "sortino_satchell",
    "omega",
    "farinelli_tibiletti",
];

impl RatioKind {
    pub fn name(&self) -> &'static str {
        match self {
            RatioKind::Sharpe { .. } => RATIO_NAMES[0],
            RatioKind::Rachev { .. } => RATIO_NAMES[1],
            RatioKind::Starr { .. } => RATIO_NAMES[2],
            RatioKind::SortinoSatchell { .. } => RATIO_NAMES[3],
            RatioKind::Omega { .. } => RATIO_NAMES[4],
            RatioKind::FarinelliTibiletti { .. } => RATIO_NAMES[5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RatioKind::Sharpe { .. } => Ok(()),
            RatioKind::Rachev { beta, gamma } => {
                check_level("beta", beta, true)?;
                check_level("gamma", gamma, true)
            }
            RatioKind::Starr { alpha } => check_level("alpha", alpha, false),
            RatioKind::SortinoSatchell { p, .. } => check_order("p", p),
            RatioKind::Omega { threshold } => {
                if threshold.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("omega threshold must be finite"))
                }
            }
            RatioKind::FarinelliTibiletti { p, q, .. } => {
                check_order("p", p)?;
                check_order("q", q)
            }
        }
    }
}

fn check_order(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} = {v} must be positive")))
    }
}

/// Parameters used when a ratio is named without explicit settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioDefaults {
    pub tau: f64,
    pub p: f64,
    pub q: f64,
    pub m: f64,
    pub n: f64,
    pub threshold: f64,
    pub safe_asset: SafeAsset,
}

impl Default for RatioDefaults {
    fn default() -> Self {
        Self {
            tau: 0.95,
            p: 2.0,
            q: 2.0,
            m: 0.0,
            n: 0.0,
            threshold: 0.0,
            safe_asset: SafeAsset::zero(),
        }
    }
}

impl RatioKind {
    /// Builds a ratio kind from its name, taking parameters from `d`
    /// (Rachev uses `tau` for both tails, STARR uses it as alpha).
    pub fn from_name(name: &str, d: &RatioDefaults) -> Result<Self> {
        let kind = match name {
            "sharpe" => RatioKind::Sharpe {
                safe_asset: d.safe_asset.clone(),
            },
            "rachev" => RatioKind::Rachev {
                beta: d.tau,
                gamma: d.tau,
            },
            "starr" => RatioKind::Starr { alpha: d.tau },
            "sortino_satchell" => RatioKind::SortinoSatchell {
                p: d.p,
                target: None,
            },
            "omega" => RatioKind::Omega {
                threshold: d.threshold,
            },
            "farinelli_tibiletti" => RatioKind::FarinelliTibiletti {
                m: d.m,
                n: d.n,
                p: d.p,
                q: d.q,
            },
            other => return Err(Error::param(format!("unknown ratio '{other}'"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl FromStr for RatioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RatioKind::from_name(s, &RatioDefaults::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSpec {
    pub kind: RatioKind,
    pub lambda: Lambda,
}

impl RatioSpec {
    pub fn new(kind: RatioKind, lambda: Lambda) -> Result<Self> {
        kind.validate()?;
        Ok(Self { kind, lambda })
    }

    pub fn with_lambda(&self, lambda: Lambda) -> Self {
        Self {
            kind: self.kind.clone(),
            lambda,
        }
    }

    pub fn evaluate(&self, x: &BivariateScenarioSet) -> Result<RatioValue> {
        let l = self.lambda;
        match &self.kind {
            RatioKind::Sharpe { safe_asset } => Ok(esg_sharpe(x, l, safe_asset)),
            RatioKind::Rachev { beta, gamma } => esg_rachev(x, l, *beta, *gamma),
            RatioKind::Starr { alpha } => esg_starr(x, l, *alpha),
            RatioKind::SortinoSatchell { p, target } => {
                esg_sortino_satchell(x, l, *p, target.as_ref())
            }
            RatioKind::Omega { threshold } => esg_omega(x, l, *threshold),
            RatioKind::FarinelliTibiletti { m, n, p, q } => {
                esg_farinelli_tibiletti(x, l, *m, *n, *p, *q)
            }
        }
    }

    pub fn label(&self) -> String {
        let params = match &self.kind {
            RatioKind::Sharpe { safe_asset } => {
                format!("rf_r={}, rf_esg={}", safe_asset.rf_r, safe_asset.rf_esg)
            }
            RatioKind::Rachev { beta, gamma } => format!("beta={beta}, gamma={gamma}"),
            RatioKind::Starr { alpha } => format!("alpha={alpha}"),
            RatioKind::SortinoSatchell { p, target } => match target {
                Some(t) => format!("p={p}, target=({}, {})", t.rf_r, t.rf_esg),
                None => format!("p={p}"),
            },
            RatioKind::Omega { threshold } => format!("threshold={threshold}"),
            RatioKind::FarinelliTibiletti { m, n, p, q } => format!("m={m}, n={n}, p={p}, q={q}"),
        };
        format!(
            "{}(lambda={}, {params})",
            self.kind.name(),
            self.lambda.value()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(v: f64) -> Lambda {
        Lambda::new(v).unwrap()
    }

    /// Bivariate set whose combined outcome is `ys` for every lambda.
    fn diag(ys: &[f64]) -> BivariateScenarioSet {
        BivariateScenarioSet::equally_weighted(ys.iter().map(|&y| (y, y)).collect()).unwrap()
    }

    fn finite(v: Extended) -> f64 {
        match v {
            Extended::Finite(x) => x,
            other => panic!("expected finite, got {other:?}"),
        }
    }

    #[test]
    fn quotient_conventions() {
        assert_eq!(positive_quotient(0.0, 0.0), Extended::Undefined);
        assert_eq!(positive_quotient(-1.0, -1.0), Extended::Undefined);
        assert_eq!(positive_quotient(-1.0, 2.0), Extended::Finite(0.0));
        assert_eq!(positive_quotient(1.0, -2.0), Extended::PosInf);
        assert_eq!(positive_quotient(1.0, 4.0), Extended::Finite(0.25));
    }

    #[test]
    fn sharpe_examples() {
        // mean 0.1, sigma 0.2
        let x = diag(&[-0.1, 0.3]);
        let v = esg_sharpe(&x, lam(0.4), &SafeAsset::zero());
        assert!((finite(v.value) - 0.5).abs() < 1e-15);

        let sa = SafeAsset::new("sa", 0.02, 0.001).unwrap();
        let d = BivariateScenarioSet::deterministic(0.02, 0.001).unwrap();
        assert_eq!(esg_sharpe(&d, lam(0.3), &sa).value, Extended::Undefined);

        let down = diag(&[-0.02, -0.02]);
        assert_eq!(
            esg_sharpe(&down, lam(0.3), &SafeAsset::zero()).value,
            Extended::NegInf
        );

        let x = BivariateScenarioSet::equally_weighted(vec![
            (0.01, 0.002),
            (-0.02, 0.001),
            (0.05, -0.003),
        ])
        .unwrap();
        let a = finite(esg_sharpe(&x, lam(0.3), &SafeAsset::zero()).value);
        let b = finite(esg_sharpe(&x.scale(7.5), lam(0.3), &SafeAsset::zero()).value);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sharpe_is_signed() {
        let x = diag(&[-0.3, 0.1]);
        let v = esg_sharpe(&x, lam(0.5), &SafeAsset::zero());
        assert!((finite(v.value) + 0.5).abs() < 1e-15);
        assert_eq!(v.positive_part(), Extended::Finite(0.0));
    }

    #[test]
    fn rachev_examples() {
        let x = diag(&[-0.1, 0.1]);
        assert!((finite(esg_rachev(&x, lam(0.3), 0.5, 0.5).unwrap().value) - 1.0).abs() < 1e-15);
        let s = diag(&[-0.2, -0.05, 0.0, 0.05, 0.2]);
        for b in [0.2, 0.6, 0.9] {
            assert!((finite(esg_rachev(&s, lam(0.7), b, b).unwrap().value) - 1.0).abs() < 1e-12);
        }
        // beta = 0: numerator is the mean
        let y = diag(&[-0.1, 0.05, 0.2]);
        let r = esg_rachev(&y, lam(0.5), 0.0, 0.9).unwrap();
        assert!((r.numerator - 0.05).abs() < 1e-15);
        assert!(esg_rachev(&y, lam(0.5), 1.0, 0.9).is_err());
    }

    #[test]
    fn starr_examples() {
        // mean 0.06, AVaR_0.5 = 0.12 on {-0.12, 0.24}
        let x = diag(&[-0.12, 0.24]);
        let v = esg_starr(&x, lam(0.5), 0.5).unwrap();
        assert!((finite(v.value) - 0.5).abs() < 1e-15);
        let neg = diag(&[-0.2, 0.1]);
        assert_eq!(
            esg_starr(&neg, lam(0.5), 0.5).unwrap().value,
            Extended::Finite(0.0)
        );
        assert!(esg_starr(&neg, lam(0.5), 0.0).is_err());
    }

    #[test]
    fn sortino_examples() {
        let x = diag(&[-0.1, 0.3]);
        let v = esg_sortino_satchell(&x, lam(0.2), 2.0, None).unwrap();
        assert!((finite(v.value) - std::f64::consts::SQRT_2).abs() < 1e-8);
        let pos = diag(&[0.0, 0.3]);
        assert_eq!(
            esg_sortino_satchell(&pos, lam(0.2), 2.0, None)
                .unwrap()
                .value,
            Extended::PosInf
        );
        let neg = diag(&[-0.3, 0.1]);
        assert_eq!(
            esg_sortino_satchell(&neg, lam(0.2), 2.0, None)
                .unwrap()
                .value,
            Extended::Finite(0.0)
        );
        // a target shifts both sides
        let sa = SafeAsset::new("t", 0.1, 0.1).unwrap();
        let shifted = diag(&[0.0, 0.4]);
        let a = esg_sortino_satchell(&shifted, lam(0.2), 2.0, Some(&sa)).unwrap();
        assert!((finite(a.value) - finite(v.value)).abs() < 1e-12);
        assert!(esg_sortino_satchell(&x, lam(0.2), 0.0, None).is_err());
    }

    #[test]
    fn omega_examples() {
        let sym = diag(&[0.1, 0.2, 0.3]);
        assert!((finite(esg_omega(&sym, lam(0.5), 0.2).unwrap().value) - 1.0).abs() < 1e-15);
        let x = diag(&[-0.1, 0.3]);
        assert!((finite(esg_omega(&x, lam(0.5), 0.0).unwrap().value) - 3.0).abs() < 1e-14);
        assert_eq!(
            esg_omega(&x, lam(0.5), -0.2).unwrap().value,
            Extended::PosInf
        );
        assert_eq!(
            esg_omega(&diag(&[0.1]), lam(0.5), 0.1).unwrap().value,
            Extended::Undefined
        );
    }

    #[test]
    fn farinelli_tibiletti_examples() {
        let x = diag(&[-0.1, 0.3]);
        let ft = esg_farinelli_tibiletti(&x, lam(0.5), 0.0, 0.0, 1.0, 1.0).unwrap();
        assert!((finite(ft.value) - 3.0).abs() < 1e-14);
        let d = diag(&[0.02]);
        assert_eq!(
            esg_farinelli_tibiletti(&d, lam(0.5), 0.02, 0.02, 2.0, 2.0)
                .unwrap()
                .value,
            Extended::Undefined
        );
        let y = diag(&[-0.1, 0.05, 0.3, -0.02]);
        let a = esg_farinelli_tibiletti(&y, lam(0.5), 0.0, 0.0, 2.0, 3.0).unwrap();
        let b = esg_farinelli_tibiletti(&y.scale(3.0), lam(0.5), 0.0, 0.0, 2.0, 3.0).unwrap();
        assert!((finite(a.value) - finite(b.value)).abs() < 1e-12);
    }

    #[test]
    fn ranking_orders() {
        let mut v = vec![
            Extended::Undefined,
            Extended::Finite(1.0),
            Extended::PosInf,
            Extended::Finite(3.0),
            Extended::NegInf,
        ];
        v.sort_by(|a, b| a.cmp_descending(*b));
        assert_eq!(
            v,
            vec![
                Extended::PosInf,
                Extended::Finite(3.0),
                Extended::Finite(1.0),
                Extended::NegInf,
                Extended::Undefined
            ]
        );
        v.sort_by(|a, b| a.cmp_ascending(*b));
        assert_eq!(v[0], Extended::NegInf);
        assert_eq!(v[4], Extended::Undefined);
    }

    #[test]
    fn names_parse() {
        for name in RATIO_NAMES {
            assert_eq!(name.parse::<RatioKind>().unwrap().name(), name);
        }
        assert!("calmar".parse::<RatioKind>().is_err());
    }
}
