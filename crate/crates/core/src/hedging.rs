//! ESG safe assets: risk of deterministic positions, hedge weights and
//! safe-asset selection.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, HedgeBound, Result};
use crate::measures::{Lambda, MeasureSpec};
use crate::scenario::BivariateScenarioSet;

pub const SAFE_ASSET_HEADER: [&str; 3] = ["label", "rf_r", "rf_esg"];

/// Deterministic (return, ESG flow) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafeAsset {
    pub label: String,
    pub rf_r: f64,
    pub rf_esg: f64,
}

impl SafeAsset {
    pub fn new(label: impl Into<String>, rf_r: f64, rf_esg: f64) -> Result<Self> {
        if !(rf_r.is_finite() && rf_esg.is_finite()) {
            return Err(Error::param("safe asset components must be finite"));
        }
        Ok(Self {
            label: label.into(),
            rf_r,
            rf_esg,
        })
    }

    /// `[0, 0]'`.
    pub fn zero() -> Self {
        Self {
            label: "zero".into(),
            rf_r: 0.0,
            rf_esg: 0.0,
        }
    }

    /// Pure monetary safe asset `[rf, 0]'`.
    pub fn cash(rf: f64) -> Result<Self> {
        Self::new("cash", rf, 0.0)
    }

    /// Pure ESG safe asset `[0, rf_esg]'`.
    pub fn pure_esg(rf_esg: f64) -> Result<Self> {
        Self::new("pure_esg", 0.0, rf_esg)
    }

    /// Donation: the money is gone (`-100%`) in exchange for ESG flow.
    pub fn charity(rf_esg: f64) -> Result<Self> {
        Self::new("charity", -1.0, rf_esg)
    }

    /// The asset as a scenario-wise constant on the index of `x`.
    pub fn as_scenarios_like(&self, x: &BivariateScenarioSet) -> BivariateScenarioSet {
        x.scale(0.0).translate(self.rf_r, self.rf_esg)
    }
}

/// Risk of a deterministic position: `-((1 - lambda) rf_r + lambda rf_esg)`.
pub fn safe_asset_risk(sa: &SafeAsset, lambda: Lambda) -> f64 {
    -lambda.blend(sa.rf_r, sa.rf_esg)
}

/// Smallest weight in the monetary safe asset that brings the risk `rho`
/// of a univariate position down to `kappa`: `(rho - kappa) / (rho + rf)`.
pub fn univariate_hedge_weight(rho: f64, kappa: f64, rf_r: f64) -> Result<f64> {
    check_band(rho, kappa, -rf_r)?;
    Ok((rho - kappa) / (rho + rf_r))
}

fn check_band(rho: f64, kappa: f64, floor: f64) -> Result<()> {
    if !(rho.is_finite() && kappa.is_finite()) {
        return Err(Error::param("risk and target must be finite"));
    }
    if kappa <= floor {
        return Err(Error::InfeasibleHedge {
            bound: HedgeBound::Lower,
            kappa,
            limit: floor,
        });
    }
    if kappa > rho {
        return Err(Error::InfeasibleHedge {
            bound: HedgeBound::Upper,
            kappa,
            limit: rho,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HedgeResult {
    pub weight: f64,
    pub achieved_risk: f64,
    pub safe_asset: String,
}

/// Hedge weight against an ESG safe asset:
/// `(rho - kappa) / ((1 - lambda) rf_r + lambda rf_esg + rho)`.
///
/// Feasible band: `safe_asset_risk(sa) < kappa <= rho`.
pub fn esg_hedge_weight(
    rho: f64,
    kappa: f64,
    lambda: Lambda,
    sa: &SafeAsset,
) -> Result<HedgeResult> {
    let floor = safe_asset_risk(sa, lambda);
    check_band(rho, kappa, floor)?;
    let weight = (rho - kappa) / (lambda.blend(sa.rf_r, sa.rf_esg) + rho);
    let achieved_risk = (1.0 - weight) * rho + weight * floor;
    Ok(HedgeResult {
        weight,
        achieved_risk,
        safe_asset: sa.label.clone(),
    })
}

/// `1 / (1 + rf_esg)`: above this preference a charity asset has negative risk.
pub fn charity_threshold(rf_esg: f64) -> Result<f64> {
    if !(rf_esg.is_finite() && rf_esg > -1.0) {
        return Err(Error::param(format!("rf_esg {rf_esg} must exceed -1")));
    }
    Ok(1.0 / (1.0 + rf_esg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafeAssetChoice {
    pub index: usize,
    pub label: String,
    pub risk: f64,
    /// Labels of later assets with exactly the same risk.
    pub ties: Vec<String>,
}

/// The minimum-risk safe asset; ties go to the first in input order.
pub fn select_safe_asset(assets: &[SafeAsset], lambda: Lambda) -> Result<SafeAssetChoice> {
    let risks: Vec<f64> = assets.iter().map(|a| safe_asset_risk(a, lambda)).collect();
    let (index, &risk) = risks
        .iter()
        .enumerate()
        .reduce(|best, cur| if cur.1 < best.1 { cur } else { best })
        .ok_or_else(|| Error::param("no safe assets to choose from"))?;
    let ties = risks
        .iter()
        .enumerate()
        .filter(|&(i, &r)| i != index && r == risk)
        .map(|(i, _)| assets[i].label.clone())
        .collect();
    Ok(SafeAssetChoice {
        index,
        label: assets[index].label.clone(),
        risk,
        ties,
    })
}

/// Measures `x` with `spec`, picks the best safe asset and hedges to `kappa`.
pub fn hedge_position(
    x: &BivariateScenarioSet,
    spec: &MeasureSpec,
    kappa: f64,
    assets: &[SafeAsset],
) -> Result<HedgeResult> {
    if spec.kind.is_reward() {
        return Err(Error::param("hedging needs a risk measure"));
    }
    let choice = select_safe_asset(assets, spec.lambda)?;
    let rho = spec.evaluate(x)?;
    esg_hedge_weight(rho, kappa, spec.lambda, &assets[choice.index])
}

/// Parses a `label,rf_r,rf_esg` CSV file.
pub fn parse_safe_assets<R: Read>(reader: R) -> Result<Vec<SafeAsset>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let perr = |line: u64, message: String| Error::Parse { line, message };
    let header = rdr.headers().map_err(|e| perr(1, e.to_string()))?.clone();
    if header.iter().ne(SAFE_ASSET_HEADER.iter().copied()) {
        return Err(perr(
            1,
            format!("header must be '{}'", SAFE_ASSET_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            perr(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize, name: &str| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    perr(
                        line,
                        format!("{name}: '{}' is not a finite number", &rec[i]),
                    )
                })
        };
        if rec[0].is_empty() {
            return Err(perr(line, "empty label".into()));
        }
        out.push(SafeAsset::new(&rec[0], num(1, "rf_r")?, num(2, "rf_esg")?)?);
    }
    if out.is_empty() {
        return Err(Error::InsufficientData(
            "safe-asset file has no rows".into(),
        ));
    }
    Ok(out)
}
