//! Lambda-swept rankings of the assets of a panel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Lambda, MeasureKind, MeasureSpec};
use crate::panel::{asset_scenarios, AssetPanel};
use crate::ratios::{Extended, RatioDefaults, RatioKind, RatioSpec, RATIO_NAMES};
use crate::scenario::BivariateScenarioSet;

/// A ranking metric without its lambda.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Measure { kind: MeasureKind, tau: Option<f64> },
    Ratio(RatioKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Lowest risk ranks first.
    AscendingRisk,
    /// Highest reward or ratio ranks first.
    DescendingReward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::AscendingRisk => "ascending-risk",
            Direction::DescendingReward => "descending-reward",
        }
    }
}

/// Every metric name accepted by [`Metric::parse`].
pub fn catalog() -> Vec<&'static str> {
    MeasureKind::ALL
        .iter()
        .map(|k| k.as_str())
        .chain(RATIO_NAMES)
        .collect()
}

impl Metric {
    /// Resolves a catalog name (ratios may carry an `esg_` prefix). AVaR measures take `tau`; ratios take their
    /// parameters from `defaults`.
    pub fn parse(name: &str, tau: f64, defaults: &RatioDefaults) -> Result<Self> {
        if let Ok(kind) = name.parse::<MeasureKind>() {
            let tau = kind.uses_tau().then_some(tau);
            MeasureSpec::new(kind, Lambda::ZERO, tau)?;
            return Ok(Metric::Measure { kind, tau });
        }
        // ratios also answer to an `esg_` prefix
        let bare = name.strip_prefix("esg_").unwrap_or(name);
        if RATIO_NAMES.contains(&bare) {
            return Ok(Metric::Ratio(RatioKind::from_name(bare, defaults)?));
        }
        Err(Error::param(format!(
            "unknown metric '{name}'; expected one of: {}",
            catalog().join(", ")
        )))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Measure { kind, .. } => kind.as_str(),
            Metric::Ratio(k) => k.name(),
        }
    }

    pub fn is_ratio(&self) -> bool {
        matches!(self, Metric::Ratio(_))
    }

    pub fn direction(&self) -> Direction {
        match self {
            Metric::Measure { kind, .. } if !kind.is_reward() => Direction::AscendingRisk,
            _ => Direction::DescendingReward,
        }
    }

    pub fn evaluate(&self, x: &BivariateScenarioSet, lambda: Lambda) -> Result<Extended> {
        match self {
            Metric::Measure { kind, tau } => {
                let v = MeasureSpec::new(*kind, lambda, *tau)?.evaluate(x)?;
                Ok(Extended::Finite(v))
            }
            Metric::Ratio(kind) => Ok(RatioSpec::new(kind.clone(), lambda)?.evaluate(x)?.value),
        }
    }

    /// Human-readable parameter summary.
    pub fn describe(&self) -> String {
        match self {
            Metric::Measure { kind, tau: Some(t) } => format!("{kind} tau={t}"),
            Metric::Measure { kind, tau: None } => kind.to_string(),
            Metric::Ratio(k) => {
                let spec = RatioSpec {
                    kind: k.clone(),
                    lambda: Lambda::ZERO,
                };
                let label = spec.label();
                // drop the lambda from the label
                label.replacen("lambda=0, ", "", 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedAsset {
    pub rank: usize,
    pub ticker: String,
    pub value: Extended,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub lambda: f64,
    pub assets: Vec<RankedAsset>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    pub metric: String,
    pub description: String,
    pub direction: Direction,
    pub lambda_grid: Vec<f64>,
    pub rows: Vec<RankingRow>,
}

impl RankingTable {
    /// Tickers in rank order at grid position `i`.
    pub fn order_at(&self, i: usize) -> Vec<&str> {
        self.rows[i]
            .assets
            .iter()
            .map(|a| a.ticker.as_str())
            .collect()
    }
}

/// `steps` evenly spaced values on [0, 1] including both endpoints.
pub fn even_lambda_grid(steps: usize) -> Result<Vec<Lambda>> {
    match steps {
        0 => Err(Error::param("lambda grid needs at least one point")),
        1 => Ok(vec![Lambda::ZERO]),
        _ => (0..steps)
            .map(|i| Lambda::new(i as f64 / (steps - 1) as f64))
            .collect(),
    }
}

/// Parses a comma-separated list of lambda values.
pub fn parse_lambda_grid(text: &str) -> Result<Vec<Lambda>> {
    let grid: Vec<Lambda> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            let v: f64 = s
                .parse()
                .map_err(|_| Error::param(format!("lambda '{s}' is not a number")))?;
            Lambda::new(v)
        })
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(Error::param("empty lambda grid"));
    }
    Ok(grid)
}

/// Ranks every asset at every grid point. Ties break by ticker.
pub fn rank_panel(panel: &AssetPanel, metric: &Metric, grid: &[Lambda]) -> Result<RankingTable> {
    if grid.is_empty() {
        return Err(Error::param("empty lambda grid"));
    }
    let sets: Vec<BivariateScenarioSet> = (0..panel.tickers().len())
        .map(|k| asset_scenarios(panel, k))
        .collect::<Result<_>>()?;
    let direction = metric.direction();
    let rows = grid
        .par_iter()
        .map(|&lambda| {
            let values = sets
                .iter()
                .map(|x| metric.evaluate(x, lambda))
                .collect::<Result<Vec<_>>>()?;
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| {
                let by_value = match direction {
                    Direction::AscendingRisk => values[a].cmp_ascending(values[b]),
                    Direction::DescendingReward => values[a].cmp_descending(values[b]),
                };
                by_value.then_with(|| panel.tickers()[a].cmp(&panel.tickers()[b]))
            });
            let assets = order
                .into_iter()
                .enumerate()
                .map(|(pos, k)| RankedAsset {
                    rank: pos + 1,
                    ticker: panel.tickers()[k].clone(),
                    value: values[k],
                })
                .collect();
            Ok(RankingRow {
                lambda: lambda.value(),
                assets,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RankingTable {
        metric: metric.name().to_string(),
        description: metric.describe(),
        direction,
        lambda_grid: grid.iter().map(|l| l.value()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = even_lambda_grid(21).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], Lambda::ZERO);
        assert_eq!(g[20], Lambda::ONE);
        assert_eq!(g[10].value(), 0.5);
        assert!(even_lambda_grid(0).is_err());
        let p = parse_lambda_grid("0, 0.25,1").unwrap();
        assert_eq!(p.len(), 3);
        assert!(parse_lambda_grid("0,1.5").is_err());
        assert!(parse_lambda_grid("a").is_err());
        assert!(parse_lambda_grid("").is_err());
    }

    #[test]
    fn metric_parsing() {
        let d = RatioDefaults::default();
        let m = Metric::parse("esg_avar", 0.95, &d).unwrap();
        assert_eq!(m.direction(), Direction::AscendingRisk);
        assert_eq!(
            Metric::parse("esg_mean", 0.95, &d).unwrap().direction(),
            Direction::DescendingReward
        );
        assert_eq!(
            Metric::parse("omega", 0.95, &d).unwrap().direction(),
            Direction::DescendingReward
        );
        let err = Metric::parse("var", 0.95, &d).unwrap_err().to_string();
        assert!(
            err.contains("esg_avar") && err.contains("farinelli_tibiletti"),
            "{err}"
        );
        assert!(Metric::parse("esg_avar", 1.0, &d).is_err());
        assert_eq!(
            Metric::parse("esg_sharpe", 0.95, &d).unwrap().name(),
            "sharpe"
        );
        assert!(Metric::parse("esg_esg_sharpe", 0.95, &d).is_err());
    }

    #[test]
    fn hand_ordered_mean_ranking() {
        // esg_mean at 0.5: A = 0.5*0.01 + 0.5*0.002 = 0.006, B = 0.00025, C = 0.008
        let panel = AssetPanel::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec!["d1".into(), "d2".into()],
            vec![vec![0.0, 0.02], vec![-0.01, 0.01], vec![0.03, 0.0]],
            vec![vec![0.002, 0.002], vec![0.001, 0.0], vec![0.002, 0.0]],
        )
        .unwrap();
        let m = Metric::parse("esg_mean", 0.95, &RatioDefaults::default()).unwrap();
        let t = rank_panel(&panel, &m, &[Lambda::new(0.5).unwrap()]).unwrap();
        assert_eq!(t.order_at(0), vec!["C", "A", "B"]);
        assert_eq!(t.rows[0].assets[0].rank, 1);
    }

    #[test]
    fn ties_break_by_ticker() {
        let panel = AssetPanel::new(
            vec!["Z".into(), "A".into()],
            vec!["d1".into(), "d2".into()],
            vec![vec![0.01, -0.01], vec![0.01, -0.01]],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        )
        .unwrap();
        let m = Metric::parse("esg_avar", 0.5, &RatioDefaults::default()).unwrap();
        let t = rank_panel(&panel, &m, &even_lambda_grid(3).unwrap()).unwrap();
        for i in 0..3 {
            assert_eq!(t.order_at(i), vec!["A", "Z"]);
        }
    }
}
