//! Panel ingestion, historical-simulation scenarios and descriptive
//! statistics.
//!
//! The panel file is long-form CSV with header `date,ticker,ret,esg_raw`.
//! Assets are aligned on the dates they all share (inner join); dates are
//! matched as strings after checking the `YYYY-MM-DD` shape.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{BivariateScenarioSet, NormalizationConfig, TRADING_DAYS};

pub const PANEL_HEADER: [&str; 4] = ["date", "ticker", "ret", "esg_raw"];

/// Default minimum number of aligned observations per asset.
pub const MIN_OBSERVATIONS: usize = 30;

/// Aligned per-asset daily returns and normalized ESG series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetPanel {
    tickers: Vec<String>,
    dates: Vec<String>,
    returns: Vec<Vec<f64>>,
    esg: Vec<Vec<f64>>,
}

impl AssetPanel {
    /// Builds a panel from already-aligned series (`returns[k][t]` is asset
    /// `k` on `dates[t]`). ESG values are taken as normalized.
    pub fn new(
        tickers: Vec<String>,
        dates: Vec<String>,
        returns: Vec<Vec<f64>>,
        esg: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if returns.len() != tickers.len() || esg.len() != tickers.len() {
            return Err(Error::param("one return and one ESG series per ticker"));
        }
        let unique: BTreeSet<&String> = tickers.iter().collect();
        if unique.len() != tickers.len() {
            return Err(Error::param("duplicate ticker"));
        }
        for (k, t) in tickers.iter().enumerate() {
            if returns[k].len() != dates.len() || esg[k].len() != dates.len() {
                return Err(Error::param(format!("series for {t} not aligned on dates")));
            }
            if returns[k].iter().chain(&esg[k]).any(|v| !v.is_finite()) {
                return Err(Error::param(format!("non-finite value in series for {t}")));
            }
        }
        Ok(Self {
            tickers,
            dates,
            returns,
            esg,
        })
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn dates(&self) -> &[String] {
        &self.dates
    }

    pub fn returns(&self) -> &[Vec<f64>] {
        &self.returns
    }

    pub fn esg(&self) -> &[Vec<f64>] {
        &self.esg
    }

    pub fn index_of(&self, ticker: &str) -> Result<usize> {
        self.tickers
            .iter()
            .position(|t| t == ticker)
            .ok_or_else(|| Error::NotFound(format!("ticker {ticker}")))
    }

    /// Copy of the panel with every value passed through `f(asset, t, ret, esg)`.
    pub fn map_values(&self, f: impl Fn(usize, usize, f64, f64) -> (f64, f64)) -> Result<Self> {
        let mut returns = self.returns.clone();
        let mut esg = self.esg.clone();
        for k in 0..self.tickers.len() {
            for t in 0..self.dates.len() {
                let (r, e) = f(k, t, self.returns[k][t], self.esg[k][t]);
                returns[k][t] = r;
                esg[k][t] = e;
            }
        }
        Self::new(self.tickers.clone(), self.dates.clone(), returns, esg)
    }
}

/// Reads panel files, enforcing the minimum observation count.
#[derive(Debug, Clone, Copy)]
pub struct PanelReader {
    pub normalization: NormalizationConfig,
    pub min_observations: usize,
}

impl PanelReader {
    pub fn new(normalization: NormalizationConfig) -> Self {
        Self {
            normalization,
            min_observations: MIN_OBSERVATIONS,
        }
    }

    pub fn with_min_observations(mut self, n: usize) -> Self {
        self.min_observations = n;
        self
    }

    pub fn read_path(&self, path: impl AsRef<Path>) -> Result<AssetPanel> {
        let file = std::fs::File::open(path)?;
        self.read(file)
    }

    pub fn read_str(&self, text: &str) -> Result<AssetPanel> {
        self.read(text.as_bytes())
    }

    pub fn read<R: Read>(&self, reader: R) -> Result<AssetPanel> {
        self.normalization.validate()?;
        let rows = parse_rows(reader, &self.normalization)?;
        align(rows, self.min_observations)
    }
}

/// Loads a panel file with the default minimum of 30 aligned observations.
pub fn load_panel(path: impl AsRef<Path>, cfg: &NormalizationConfig) -> Result<AssetPanel> {
    PanelReader::new(*cfg).read_path(path)
}

type Rows = BTreeMap<String, BTreeMap<String, (f64, f64)>>;

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::Utf8 { err, .. } => parse_err(line, format!("invalid UTF-8: {err}")),
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => parse_err(line, format!("expected {expected_len} fields, found {len}")),
        other => parse_err(line, format!("{other:?}")),
    }
}

fn parse_number(line: u64, column: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| parse_err(line, format!("{column}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{column}: '{s}' is not finite")));
    }
    Ok(v)
}

fn check_date(line: u64, s: &str) -> Result<()> {
    if s.len() != 10 || NaiveDate::parse_from_str(s, "%Y-%m-%d").is_err() {
        return Err(parse_err(line, format!("date '{s}' is not YYYY-MM-DD")));
    }
    Ok(())
}

fn parse_rows<R: Read>(reader: R, cfg: &NormalizationConfig) -> Result<Rows> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(PANEL_HEADER.iter().copied()) {
        return Err(parse_err(
            1,
            format!("header must be '{}'", PANEL_HEADER.join(",")),
        ));
    }
    let mut rows = Rows::new();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_err(e)),
        }
        let line = record.position().map_or(0, |p| p.line());
        let date = &record[0];
        let ticker = &record[1];
        check_date(line, date)?;
        if ticker.is_empty() {
            return Err(parse_err(line, "empty ticker"));
        }
        let ret = parse_number(line, "ret", &record[2])?;
        let raw = parse_number(line, "esg_raw", &record[3])?;
        let esg = cfg.apply(0, raw).map_err(|_| {
            parse_err(
                line,
                format!("esg_raw {raw} outside [{}, {}]", cfg.raw_min, cfg.raw_max),
            )
        })?;
        let series = rows.entry(ticker.to_string()).or_default();
        if series.insert(date.to_string(), (ret, esg)).is_some() {
            return Err(parse_err(
                line,
                format!("duplicate row for {ticker} on {date}"),
            ));
        }
    }
    Ok(rows)
}

fn align(rows: Rows, min_observations: usize) -> Result<AssetPanel> {
    let mut iter = rows.values();
    let Some(first) = iter.next() else {
        return Err(Error::InsufficientData(
            "panel contains no observations".into(),
        ));
    };
    let mut common: BTreeSet<&String> = first.keys().collect();
    for series in iter {
        common.retain(|d| series.contains_key(*d));
    }
    if common.len() < min_observations.max(1) {
        return Err(Error::InsufficientData(format!(
            "{} aligned observations, at least {} required",
            common.len(),
            min_observations.max(1)
        )));
    }
    let dates: Vec<String> = common.into_iter().cloned().collect();
    let mut tickers = Vec::with_capacity(rows.len());
    let mut returns = Vec::with_capacity(rows.len());
    let mut esg = Vec::with_capacity(rows.len());
    for (ticker, series) in &rows {
        tickers.push(ticker.clone());
        returns.push(dates.iter().map(|d| series[d].0).collect());
        esg.push(dates.iter().map(|d| series[d].1).collect());
    }
    AssetPanel::new(tickers, dates, returns, esg)
}

/// Historical-simulation law for one asset: one scenario per date, 1/N each.
pub fn to_scenarios(panel: &AssetPanel, ticker: &str) -> Result<BivariateScenarioSet> {
    let k = panel.index_of(ticker)?;
    asset_scenarios(panel, k)
}

pub(crate) fn asset_scenarios(panel: &AssetPanel, k: usize) -> Result<BivariateScenarioSet> {
    let scenarios = panel.returns[k]
        .iter()
        .copied()
        .zip(panel.esg[k].iter().copied())
        .collect();
    BivariateScenarioSet::equally_weighted(scenarios)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetStats {
    pub ticker: String,
    pub ret_mean_ann: f64,
    pub ret_std_ann: f64,
    pub esg_mean_ann: f64,
    pub esg_std_ann: f64,
    /// Pearson correlation of daily (return, ESG) pairs; `None` when either
    /// series has zero variance.
    pub corr_ret_esg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub assets: Vec<AssetStats>,
}

fn sample_mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sum of squared deviations from the mean.
fn sum_sq_dev(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

fn is_constant(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

fn sample_std(xs: &[f64]) -> f64 {
    if is_constant(xs) {
        return 0.0;
    }
    (sum_sq_dev(xs, sample_mean(xs)) / (xs.len() - 1) as f64).sqrt()
}

/// Pearson correlation, `None` for a zero-variance input.
fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if is_constant(xs) || is_constant(ys) {
        return None;
    }
    let (mx, my) = (sample_mean(xs), sample_mean(ys));
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let denom = (sum_sq_dev(xs, mx) * sum_sq_dev(ys, my)).sqrt();
    if denom == 0.0 {
        return None;
    }
    Some((cov / denom).clamp(-1.0, 1.0))
}

/// Annualized moments per asset: means scale by 252, sample standard
/// deviations by sqrt(252).
pub fn descriptive_stats(panel: &AssetPanel) -> Result<DescriptiveStats> {
    if panel.dates.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} observations, descriptive statistics need at least 2",
            panel.dates.len()
        )));
    }
    let days = f64::from(TRADING_DAYS);
    let root = days.sqrt();
    let assets = panel
        .tickers
        .iter()
        .enumerate()
        .map(|(k, ticker)| {
            let (r, e) = (&panel.returns[k], &panel.esg[k]);
            AssetStats {
                ticker: ticker.clone(),
                ret_mean_ann: sample_mean(r) * days,
                ret_std_ann: sample_std(r) * root,
                esg_mean_ann: sample_mean(e) * days,
                esg_std_ann: sample_std(e) * root,
                corr_ret_esg: pearson(r, e),
            }
        })
        .collect();
    Ok(DescriptiveStats { assets })
}

/// Correlations of all `2n` series, laid out as
/// `[returns x returns, returns x ESG; ESG x returns, ESG x ESG]`.
/// Entries involving a zero-variance series are `None`; the diagonal is 1.
pub fn correlation_matrix(panel: &AssetPanel) -> Result<Vec<Vec<Option<f64>>>> {
    if panel.dates.len() < 2 {
        return Err(Error::InsufficientData(
            "correlations need at least 2 observations".into(),
        ));
    }
    let series: Vec<&[f64]> = panel
        .returns
        .iter()
        .chain(&panel.esg)
        .map(Vec::as_slice)
        .collect();
    let m = series.len();
    let mut out = vec![vec![None; m]; m];
    for i in 0..m {
        out[i][i] = Some(1.0);
        for j in (i + 1)..m {
            let c = pearson(series[i], series[j]);
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    Ok(out)
}
