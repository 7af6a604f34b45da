//! `esgrisk`: batch analytics over (return, ESG) panels.

mod format;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use esgrisk::axioms::{reproduce_property_matrix, CellStatus, PropertyMatrix, Scope};
use esgrisk::dual::{duality_study, DualityConfig, DualityReport};
use esgrisk::hedging::{
    esg_hedge_weight, parse_safe_assets, safe_asset_risk, select_safe_asset, SafeAsset,
};
use esgrisk::panel::{descriptive_stats, to_scenarios, AssetPanel, PanelReader, MIN_OBSERVATIONS};
use esgrisk::ranking::{even_lambda_grid, parse_lambda_grid, rank_panel, Metric, RankingTable};
use esgrisk::ratios::RatioDefaults;
use esgrisk::scenario::TRADING_DAYS;
use esgrisk::{Error, Lambda, MeasureKind, MeasureSpec, NormalizationConfig};
use serde_json::{json, Value};

use crate::format::{ext, json_ext, json_num, json_text, num, round_json};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_CONTRADICTION: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "esgrisk",
    version,
    about = "ESG risk measures, ratios, hedging and axiom checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Annualized moments per asset.
    Stats(StatsArgs),
    /// Rank assets by a measure or ratio over a lambda grid.
    Rank(RankArgs),
    /// Same as `rank`, restricted to ratio metrics.
    Ratio(RankArgs),
    /// Hedge weight against the best of a list of ESG safe assets.
    Hedge(HedgeArgs),
    /// Compare primal and dual AVaR values on random instances.
    Duality(DualityArgs),
    /// Reproduce an axiom property matrix.
    Axioms(AxiomsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    /// Plain-text matrix (axioms only).
    Text,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PanelArgs {
    /// Panel CSV with header `date,ticker,ret,esg_raw`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    esg_min: f64,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    esg_max: f64,
    /// Minimum number of common dates.
    #[arg(long, default_value_t = MIN_OBSERVATIONS)]
    min_obs: usize,
}

impl PanelArgs {
    fn load(&self) -> Result<AssetPanel, Error> {
        let cfg = NormalizationConfig::new(self.esg_min, self.esg_max, TRADING_DAYS)?;
        PanelReader::new(cfg)
            .with_min_observations(self.min_obs)
            .read_path(&self.input)
    }
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    panel: PanelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    panel: PanelArgs,
    /// Metric name; see the error message of an unknown name for the catalog.
    #[arg(long)]
    metric: String,
    /// Comma-separated lambda values.
    #[arg(long, conflicts_with = "lambda_steps")]
    lambda_grid: Option<String>,
    /// Number of evenly spaced lambda values on [0, 1].
    #[arg(long, default_value_t = 21)]
    lambda_steps: usize,
    /// AVaR level; also the tail level of rachev and starr.
    #[arg(long, default_value_t = 0.95)]
    tau: f64,
    #[command(flatten)]
    ratio: RatioArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RatioArgs {
    /// Safe return for sharpe.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rf_r: f64,
    /// Safe ESG flow for sharpe.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rf_esg: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    #[arg(long, default_value_t = 0.0)]
    n: f64,
    /// Omega threshold.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    threshold: f64,
}

#[derive(Args)]
struct HedgeArgs {
    /// Risk of the position to hedge.
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "input",
        conflicts_with = "input"
    )]
    rho: Option<f64>,
    /// Panel to measure the position from (with --ticker).
    #[arg(long, requires = "ticker")]
    input: Option<PathBuf>,
    #[arg(long)]
    ticker: Option<String>,
    /// Risk measure used on the panel.
    #[arg(long, default_value = "esg_avar")]
    metric: String,
    #[arg(long, default_value_t = 0.95)]
    tau: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    esg_min: f64,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    esg_max: f64,
    #[arg(long, default_value_t = MIN_OBSERVATIONS)]
    min_obs: usize,
    /// Target risk level.
    #[arg(long, allow_negative_numbers = true)]
    kappa: f64,
    #[arg(long)]
    lambda: f64,
    /// CSV with header `label,rf_r,rf_esg`.
    #[arg(long)]
    safe_assets: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DualityArgs {
    /// Largest scenario count; each instance draws its size from 1..=n.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fix lambda instead of sweeping {0, 0.25, 0.5, 0.75, 1}.
    #[arg(long)]
    lambda: Option<f64>,
    /// Fix tau instead of sweeping {0.5, 0.9, 0.95, 0.99}.
    #[arg(long)]
    tau: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AxiomsArgs {
    /// risk_measures or ratios
    #[arg(long)]
    scope: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_data_error() {
            EXIT_DATA
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Rendered output plus an exit status for reporting commands.
struct Outcome {
    text: String,
    code: u8,
    note: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            code: 0,
            note: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    let (outcome, output) = match command {
        Command::Stats(a) => (cmd_stats(&a)?, a.output),
        Command::Rank(a) => (cmd_rank(&a, false)?, a.output),
        Command::Ratio(a) => (cmd_rank(&a, true)?, a.output),
        Command::Hedge(a) => (cmd_hedge(&a)?, a.output),
        Command::Duality(a) => (cmd_duality(&a)?, a.output),
        Command::Axioms(a) => (cmd_axioms(&a)?, a.output),
    };
    match &output.out {
        Some(path) => fs::write(path, &outcome.text).map_err(Error::from)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(Error::from)?;
        }
    }
    if let Some(note) = outcome.note {
        eprintln!("{note}");
    }
    Ok(outcome.code)
}

/// Csv or json; text is rejected outside `axioms`.
fn table_format(o: &OutputArgs) -> Result<Format, Failure> {
    match o.format.unwrap_or(Format::Csv) {
        Format::Text => Err(usage("--format text is only available for axioms")),
        f => Ok(f),
    }
}

fn lambda(v: f64) -> Result<Lambda, Failure> {
    Ok(Lambda::new(v)?)
}

fn cmd_stats(a: &StatsArgs) -> Result<Outcome, Failure> {
    let fmt = table_format(&a.output)?;
    let panel = a.panel.load()?;
    let stats = descriptive_stats(&panel)?;
    let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), num);
    let text = match fmt {
        Format::Json => {
            let rows: Vec<Value> = stats
                .assets
                .iter()
                .map(|s| {
                    json!({
                        "ticker": s.ticker,
                        "ret_mean_ann": json_num(s.ret_mean_ann),
                        "ret_std_ann": json_num(s.ret_std_ann),
                        "esg_mean_ann": json_num(s.esg_mean_ann),
                        "esg_std_ann": json_num(s.esg_std_ann),
                        "corr_ret_esg": s.corr_ret_esg.map_or(Value::String("undefined".into()), json_num),
                    })
                })
                .collect();
            json_text(&json!({ "observations": panel.dates().len(), "assets": rows }))
        }
        _ => {
            let mut out = String::from(
                "ticker,ret_mean_ann,ret_std_ann,esg_mean_ann,esg_std_ann,corr_ret_esg\n",
            );
            for s in &stats.assets {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    s.ticker,
                    num(s.ret_mean_ann),
                    num(s.ret_std_ann),
                    num(s.esg_mean_ann),
                    num(s.esg_std_ann),
                    opt(s.corr_ret_esg)
                ));
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_rank(a: &RankArgs, ratios_only: bool) -> Result<Outcome, Failure> {
    let fmt = table_format(&a.output)?;
    let defaults = RatioDefaults {
        tau: a.tau,
        p: a.ratio.p,
        q: a.ratio.q,
        m: a.ratio.m,
        n: a.ratio.n,
        threshold: a.ratio.threshold,
        safe_asset: SafeAsset::new("safe", a.ratio.rf_r, a.ratio.rf_esg)?,
    };
    let metric = Metric::parse(&a.metric, a.tau, &defaults)?;
    if ratios_only && !metric.is_ratio() {
        return Err(usage(format!(
            "'{}' is not a ratio; use `rank` for measures",
            a.metric
        )));
    }
    let grid = match &a.lambda_grid {
        Some(text) => parse_lambda_grid(text)?,
        None => even_lambda_grid(a.lambda_steps)?,
    };
    let panel = a.panel.load()?;
    let table = rank_panel(&panel, &metric, &grid)?;
    let text = match fmt {
        Format::Json => json_text(&ranking_json(&table)),
        _ => ranking_csv(&table),
    };
    Ok(Outcome::ok(text))
}

fn ranking_csv(t: &RankingTable) -> String {
    let mut out = format!(
        "# metric={} params=\"{}\" direction={}\nlambda,rank,ticker,value\n",
        t.metric,
        t.description,
        t.direction.as_str()
    );
    for row in &t.rows {
        for asset in &row.assets {
            out.push_str(&format!(
                "{},{},{},{}\n",
                num(row.lambda),
                asset.rank,
                asset.ticker,
                ext(asset.value)
            ));
        }
    }
    out
}

fn ranking_json(t: &RankingTable) -> Value {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|row| {
            let assets: Vec<Value> = row
                .assets
                .iter()
                .map(|a| json!({ "rank": a.rank, "ticker": a.ticker, "value": json_ext(a.value) }))
                .collect();
            json!({ "lambda": json_num(row.lambda), "assets": assets })
        })
        .collect();
    json!({
        "metric": t.metric,
        "params": t.description,
        "direction": t.direction.as_str(),
        "lambda_grid": t.lambda_grid.iter().map(|&l| json_num(l)).collect::<Vec<_>>(),
        "rows": rows,
    })
}

fn cmd_hedge(a: &HedgeArgs) -> Result<Outcome, Failure> {
    let fmt = table_format(&a.output)?;
    let l = lambda(a.lambda)?;
    let file = fs::File::open(&a.safe_assets).map_err(Error::from)?;
    let assets = parse_safe_assets(file)?;
    let choice = select_safe_asset(&assets, l)?;
    let rho = match (a.rho, &a.input) {
        (Some(rho), _) => rho,
        (None, Some(path)) => {
            let kind: MeasureKind = a.metric.parse()?;
            if kind.is_reward() {
                return Err(usage(format!("'{}' is not a risk measure", a.metric)));
            }
            let spec = MeasureSpec::new(kind, l, kind.uses_tau().then_some(a.tau))?;
            let cfg = NormalizationConfig::new(a.esg_min, a.esg_max, TRADING_DAYS)?;
            let panel = PanelReader::new(cfg)
                .with_min_observations(a.min_obs)
                .read_path(path)?;
            let ticker = a
                .ticker
                .as_deref()
                .expect("clap requires --ticker with --input");
            spec.evaluate(&to_scenarios(&panel, ticker)?)?
        }
        (None, None) => return Err(usage("either --rho or --input is required")),
    };
    let sa = &assets[choice.index];
    let h = esg_hedge_weight(rho, a.kappa, l, sa)?;
    let floor = safe_asset_risk(sa, l);
    let text = match fmt {
        Format::Json => json_text(&json!({
            "safe_asset": h.safe_asset,
            "ties": choice.ties,
            "lambda": json_num(l.value()),
            "rho": json_num(rho),
            "kappa": json_num(a.kappa),
            "safe_asset_risk": json_num(floor),
            "weight": json_num(h.weight),
            "achieved_risk": json_num(h.achieved_risk),
        })),
        _ => format!(
            "safe_asset,lambda,rho,kappa,safe_asset_risk,weight,achieved_risk\n{},{},{},{},{},{},{}\n",
            h.safe_asset,
            num(l.value()),
            num(rho),
            num(a.kappa),
            num(floor),
            num(h.weight),
            num(h.achieved_risk)
        ),
    };
    Ok(Outcome::ok(text))
}

fn cmd_duality(a: &DualityArgs) -> Result<Outcome, Failure> {
    let fmt = table_format(&a.output)?;
    let mut cfg = DualityConfig {
        max_n: a.n,
        trials: a.trials,
        seed: a.seed,
        ..Default::default()
    };
    if let Some(l) = a.lambda {
        cfg.lambdas = vec![lambda(l)?];
    }
    if let Some(t) = a.tau {
        cfg.taus = vec![t];
    }
    let r = duality_study(&cfg)?;
    let status = if r.passed() { "pass" } else { "fail" };
    let text = match fmt {
        Format::Json => {
            let mut v = serde_json::to_value(&r).expect("report serializes");
            v["status"] = Value::String(status.into());
            json_text(&round_json(v))
        }
        _ => duality_csv(&r, status),
    };
    let mut outcome = Outcome::ok(text);
    if !r.passed() {
        outcome.code = EXIT_CONTRADICTION;
        outcome.note = Some(format!(
            "duality gap {} or residual {} above tolerance",
            num(r.max_gap()),
            num(r.max_residual)
        ));
    }
    Ok(outcome)
}

fn duality_csv(r: &DualityReport, status: &str) -> String {
    let list = |v: &[f64]| v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";");
    format!(
        "# lambdas={} taus={}\n\
         trials,max_n,seed,evaluations,max_gap_esg_avar,max_gap_esg_avar_l,max_residual,status\n\
         {},{},{},{},{},{},{},{}\n",
        list(&r.lambdas),
        list(&r.taus),
        r.trials,
        r.max_n,
        r.seed,
        r.evaluations,
        num(r.max_gap_esg_avar),
        num(r.max_gap_esg_avar_l),
        num(r.max_residual),
        status
    )
}

fn cmd_axioms(a: &AxiomsArgs) -> Result<Outcome, Failure> {
    let scope: Scope = a.scope.parse()?;
    let m = reproduce_property_matrix(scope, a.trials, a.seed)?;
    let text = match a.output.format.unwrap_or(Format::Text) {
        Format::Text => m.render(),
        Format::Csv => matrix_csv(&m),
        Format::Json => json_text(&round_json(
            serde_json::to_value(&m).expect("matrix serializes"),
        )),
    };
    let mut outcome = Outcome::ok(text);
    let contradictions: Vec<String> = m
        .contradictions()
        .map(|c| format!("{} {}", c.row, c.column))
        .collect();
    let inconclusive: Vec<String> = m
        .inconclusive()
        .map(|c| format!("{} {}", c.row, c.column))
        .collect();
    if !contradictions.is_empty() {
        outcome.code = EXIT_CONTRADICTION;
        outcome.note = Some(format!("contradicted cells: {}", contradictions.join(", ")));
    } else if !inconclusive.is_empty() {
        outcome.code = EXIT_INCONCLUSIVE;
        outcome.note = Some(format!(
            "inconclusive: no counterexample found for {}",
            inconclusive.join(", ")
        ));
    }
    Ok(outcome)
}

fn matrix_csv(m: &PropertyMatrix) -> String {
    let mut out = String::from(
        "subject,axiom,expected,status,trials,violations,worst_violation,counterexample\n",
    );
    for c in &m.cells {
        let origin = c
            .report
            .counterexample
            .as_ref()
            .map_or(String::new(), |cx| match (&cx.probe, cx.trial) {
                (Some(p), _) => format!("probe:{p}"),
                (None, Some(t)) => format!("trial:{t}"),
                _ => String::new(),
            });
        let status = match c.status {
            CellStatus::Holds => "holds",
            CellStatus::CounterexampleFound => "counterexample",
            CellStatus::Inconclusive => "inconclusive",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.row,
            c.column,
            if c.expected_holds { "holds" } else { "fails" },
            status,
            c.report.trials,
            c.report.violations,
            num(c.report.worst_violation),
            origin
        ));
    }
    out
}
