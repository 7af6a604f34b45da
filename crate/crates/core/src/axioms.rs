//! Randomized, seeded checks of the risk-measure axioms, the reward-measure
//! axioms and the reward-risk ratio conditions.
//!
//! Every check evaluates a "gap": the amount by which the asserted
//! inequality or identity fails. A trial is a violation when
//! `gap > tol * (1 + scale)`, where `scale` is the magnitude of the values
//! involved. Distribution-based checks (DB-RM) require exact equality.
//!
//! Before the random trials each check runs a few deterministic probes
//! (constants, doubling, two-point mixtures). They cost nothing for cells
//! that hold and guarantee that known counterexamples are always found.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{dominating, random_pair, random_permutation, random_scenarios, trial_rng};
use crate::hedging::SafeAsset;
use crate::measures::{Lambda, MeasureKind, MeasureSpec};
use crate::ratios::{Extended, RatioKind, RatioSpec};
use crate::scenario::BivariateScenarioSet;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Scenario counts drawn by the random generators.
const MIN_SCENARIOS: usize = 2;
const MAX_SCENARIOS: usize = 64;

const LAMBDA_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const TAU_GRID: [f64; 5] = [0.0, 0.5, 0.9, 0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    #[serde(rename = "SUB-M")]
    SubM,
    #[serde(rename = "PH-M")]
    PhM,
    #[serde(rename = "MO-M")]
    MoM,
    #[serde(rename = "LH-M")]
    LhM,
    #[serde(rename = "TI-M")]
    TiM,
    #[serde(rename = "SUP-M+")]
    SupMPlus,
    #[serde(rename = "PH-M+")]
    PhMPlus,
    #[serde(rename = "MO-M+")]
    MoMPlus,
    #[serde(rename = "LH-M+")]
    LhMPlus,
    #[serde(rename = "TI-M+")]
    TiMPlus,
    #[serde(rename = "MO-RM")]
    MoRm,
    #[serde(rename = "QC-RM")]
    QcRm,
    #[serde(rename = "SI-RM")]
    SiRm,
    #[serde(rename = "DB-RM")]
    DbRm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Risk,
    Reward,
    Ratio,
}

impl Axiom {
    pub const ALL: [Axiom; 14] = [
        Axiom::SubM,
        Axiom::PhM,
        Axiom::MoM,
        Axiom::LhM,
        Axiom::TiM,
        Axiom::SupMPlus,
        Axiom::PhMPlus,
        Axiom::MoMPlus,
        Axiom::LhMPlus,
        Axiom::TiMPlus,
        Axiom::MoRm,
        Axiom::QcRm,
        Axiom::SiRm,
        Axiom::DbRm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Axiom::SubM => "SUB-M",
            Axiom::PhM => "PH-M",
            Axiom::MoM => "MO-M",
            Axiom::LhM => "LH-M",
            Axiom::TiM => "TI-M",
            Axiom::SupMPlus => "SUP-M+",
            Axiom::PhMPlus => "PH-M+",
            Axiom::MoMPlus => "MO-M+",
            Axiom::LhMPlus => "LH-M+",
            Axiom::TiMPlus => "TI-M+",
            Axiom::MoRm => "MO-RM",
            Axiom::QcRm => "QC-RM",
            Axiom::SiRm => "SI-RM",
            Axiom::DbRm => "DB-RM",
        }
    }

    fn family(self) -> Family {
        match self {
            Axiom::SubM | Axiom::PhM | Axiom::MoM | Axiom::LhM | Axiom::TiM => Family::Risk,
            Axiom::SupMPlus | Axiom::PhMPlus | Axiom::MoMPlus | Axiom::LhMPlus | Axiom::TiMPlus => {
                Family::Reward
            }
            Axiom::MoRm | Axiom::QcRm | Axiom::SiRm | Axiom::DbRm => Family::Ratio,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axiom {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown axiom '{s}'")))
    }
}

/// What an axiom is checked against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Subject {
    Measure(MeasureSpec),
    Ratio(RatioSpec),
}

impl Subject {
    fn family(&self) -> Family {
        match self {
            Subject::Measure(m) if m.kind.is_reward() => Family::Reward,
            Subject::Measure(_) => Family::Risk,
            Subject::Ratio(_) => Family::Ratio,
        }
    }

    /// Catalog name (`esg_avar`, `omega`, ...).
    pub fn name(&self) -> &'static str {
        match self {
            Subject::Measure(m) => m.kind.as_str(),
            Subject::Ratio(r) => r.kind.name(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Subject::Measure(m) => m.label(),
            Subject::Ratio(r) => r.label(),
        }
    }

    fn with_lambda(&self, lambda: Lambda) -> Self {
        match self {
            Subject::Measure(m) => Subject::Measure(m.with_lambda(lambda)),
            Subject::Ratio(r) => Subject::Ratio(r.with_lambda(lambda)),
        }
    }

    fn lambda(&self) -> Lambda {
        match self {
            Subject::Measure(m) => m.lambda,
            Subject::Ratio(r) => r.lambda,
        }
    }

    fn measure(&self, x: &BivariateScenarioSet) -> Result<f64> {
        match self {
            Subject::Measure(m) => m.evaluate(x),
            Subject::Ratio(_) => Err(Error::param("ratio used as a measure")),
        }
    }

    /// Ratio value under the positive-part convention, undefined read as 0.
    fn ratio(&self, x: &BivariateScenarioSet) -> Result<f64> {
        match self {
            Subject::Ratio(r) => Ok(match r.evaluate(x)?.positive_part() {
                Extended::Undefined => 0.0,
                v => v.to_f64(),
            }),
            Subject::Measure(_) => Err(Error::param("measure used as a ratio")),
        }
    }

    fn ratio_exact(&self, x: &BivariateScenarioSet) -> Result<Extended> {
        match self {
            Subject::Ratio(r) => Ok(r.evaluate(x)?.positive_part()),
            Subject::Measure(_) => Err(Error::param("measure used as a ratio")),
        }
    }
}

/// Inputs of one check, enough to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Witness {
    Pair {
        x1: BivariateScenarioSet,
        x2: BivariateScenarioSet,
    },
    Scaled {
        x: BivariateScenarioSet,
        factor: f64,
    },
    Constant {
        a1: f64,
        a2: f64,
        copies: usize,
    },
    Translated {
        x: BivariateScenarioSet,
        a1: f64,
        a2: f64,
    },
    Mixture {
        x1: BivariateScenarioSet,
        x2: BivariateScenarioSet,
        delta: f64,
    },
    Permuted {
        x: BivariateScenarioSet,
        permutation: Vec<usize>,
    },
}

/// Amount by which a check fails, and the magnitude it is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    #[serde(with = "extended_f64")]
    pub gap: f64,
    #[serde(with = "extended_f64")]
    pub scale: f64,
    /// Exact checks fail on any nonzero gap.
    pub exact: bool,
}

impl Gap {
    fn approx(gap: f64, values: &[f64]) -> Self {
        let scale = values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m: f64, v| m.max(v.abs()));
        Self {
            gap,
            scale,
            exact: false,
        }
    }

    pub fn is_violation(&self, tol: f64) -> bool {
        if self.exact {
            self.gap != 0.0
        } else {
            self.gap > tol * (1.0 + self.scale)
        }
    }
}

/// `a - b` over the extended reals, with equal infinities giving 0.
fn excess(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        a - b
    }
}

fn abs_diff(a: f64, b: f64) -> f64 {
    excess(a, b).abs()
}

fn check_applicable(axiom: Axiom, subject: &Subject) -> Result<()> {
    if axiom.family() != subject.family() {
        return Err(Error::param(format!(
            "{axiom} does not apply to {}",
            subject.name()
        )));
    }
    Ok(())
}

/// Evaluates `axiom` for `subject` on one witness.
pub fn evaluate_witness(axiom: Axiom, subject: &Subject, witness: &Witness) -> Result<Gap> {
    check_applicable(axiom, subject)?;
    let blend = |a1: f64, a2: f64| subject.lambda().blend(a1, a2);
    let mismatch = || Error::param(format!("witness shape does not fit {axiom}"));
    let gap = match (axiom, witness) {
        (Axiom::SubM, Witness::Pair { x1, x2 }) => {
            let (r1, r2, r12) = (
                subject.measure(x1)?,
                subject.measure(x2)?,
                subject.measure(&x1.add(x2)?)?,
            );
            Gap::approx(r12 - r1 - r2, &[r1, r2, r12])
        }
        (Axiom::SupMPlus, Witness::Pair { x1, x2 }) => {
            let (r1, r2, r12) = (
                subject.measure(x1)?,
                subject.measure(x2)?,
                subject.measure(&x1.add(x2)?)?,
            );
            Gap::approx(r1 + r2 - r12, &[r1, r2, r12])
        }
        (Axiom::PhM | Axiom::PhMPlus, Witness::Scaled { x, factor }) => {
            let (r, rs) = (subject.measure(x)?, subject.measure(&x.scale(*factor))?);
            Gap::approx((rs - factor * r).abs(), &[rs, factor * r])
        }
        (Axiom::MoM, Witness::Pair { x1, x2 }) => {
            let (r1, r2) = (subject.measure(x1)?, subject.measure(x2)?);
            Gap::approx(r2 - r1, &[r1, r2])
        }
        (Axiom::MoMPlus, Witness::Pair { x1, x2 }) => {
            let (r1, r2) = (subject.measure(x1)?, subject.measure(x2)?);
            Gap::approx(r1 - r2, &[r1, r2])
        }
        (Axiom::LhM | Axiom::LhMPlus, Witness::Constant { a1, a2, copies }) => {
            let x = BivariateScenarioSet::equally_weighted(vec![(*a1, *a2); (*copies).max(1)])?;
            let v = subject.measure(&x)?;
            let want = if axiom == Axiom::LhM {
                -blend(*a1, *a2)
            } else {
                blend(*a1, *a2)
            };
            Gap::approx((v - want).abs(), &[v, want])
        }
        (Axiom::TiM | Axiom::TiMPlus, Witness::Translated { x, a1, a2 }) => {
            let (r, rt) = (
                subject.measure(x)?,
                subject.measure(&x.translate(*a1, *a2))?,
            );
            let shift = if axiom == Axiom::TiM {
                -blend(*a1, *a2)
            } else {
                blend(*a1, *a2)
            };
            Gap::approx((rt - (r + shift)).abs(), &[r, rt, shift])
        }
        (Axiom::MoRm, Witness::Pair { x1, x2 }) => {
            let (a1, a2) = (subject.ratio(x1)?, subject.ratio(x2)?);
            Gap::approx(excess(a1, a2), &[a1, a2])
        }
        (Axiom::QcRm, Witness::Mixture { x1, x2, delta }) => {
            let (a1, a2) = (subject.ratio(x1)?, subject.ratio(x2)?);
            let am = subject.ratio(&x1.mix(x2, *delta)?)?;
            Gap::approx(excess(a1.min(a2), am), &[a1, a2, am])
        }
        (Axiom::SiRm, Witness::Scaled { x, factor }) => {
            let (a, s) = (subject.ratio(x)?, subject.ratio(&x.scale(*factor))?);
            Gap::approx(abs_diff(a, s), &[a, s])
        }
        (Axiom::DbRm, Witness::Permuted { x, permutation }) => {
            let a = subject.ratio_exact(x)?;
            let b = subject.ratio_exact(&x.permute(permutation)?)?;
            let gap = match (a, b) {
                (Extended::Finite(u), Extended::Finite(v)) => abs_diff(u, v),
                (u, v) if u == v => 0.0,
                _ => f64::INFINITY,
            };
            Gap {
                gap,
                scale: 0.0,
                exact: true,
            }
        }
        _ => return Err(mismatch()),
    };
    Ok(gap)
}

/// One replayable violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Random trial index, or `None` for a deterministic probe.
    pub trial: Option<u64>,
    /// Name of the deterministic probe that produced it.
    pub probe: Option<String>,
    /// The subject as evaluated (lambda and tau may differ from the
    /// requested subject when sweeping).
    pub subject: Subject,
    pub witness: Witness,
    pub gap: Gap,
}

impl Counterexample {
    /// Recomputes the gap directly through the subject.
    pub fn replay(&self, axiom: Axiom) -> Result<Gap> {
        evaluate_witness(axiom, &self.subject, &self.witness)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub subject: String,
    pub seed: u64,
    pub tol: f64,
    /// Total evaluations: deterministic probes plus random trials.
    pub trials: u64,
    /// How many of `trials` were deterministic probes.
    pub targeted: u64,
    pub violations: u64,
    /// Largest gap among violating evaluations (0 when none).
    #[serde(with = "extended_f64")]
    pub worst_violation: f64,
    pub counterexample: Option<Counterexample>,
}

impl AxiomReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabConfig {
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    /// Draw lambda (and tau for the AVaR measures) per trial from fixed
    /// grids that include the endpoints, instead of using the subject's.
    pub sweep: bool,
}

impl LabConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            tol: DEFAULT_TOL,
            sweep: false,
        }
    }
}

/// Runs `trials` random checks (plus the deterministic probes) of `axiom`
/// for a fixed `subject`.
pub fn check_axiom(
    axiom: Axiom,
    subject: &Subject,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<AxiomReport> {
    check_axiom_with(
        axiom,
        subject,
        &LabConfig {
            trials,
            seed,
            tol,
            sweep: false,
        },
    )
}

struct Evaluation {
    trial: Option<u64>,
    probe: Option<&'static str>,
    subject: Subject,
    witness: Witness,
    gap: Gap,
}

pub fn check_axiom_with(axiom: Axiom, subject: &Subject, cfg: &LabConfig) -> Result<AxiomReport> {
    check_applicable(axiom, subject)?;
    if cfg.trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    if !(cfg.tol.is_finite() && cfg.tol >= 0.0) {
        return Err(Error::param("tolerance must be a nonnegative number"));
    }
    let mut evals = Vec::new();
    for (name, witness) in probes(axiom, subject)? {
        let gap = evaluate_witness(axiom, subject, &witness)?;
        evals.push(Evaluation {
            trial: None,
            probe: Some(name),
            subject: subject.clone(),
            witness,
            gap,
        });
    }
    let targeted = evals.len() as u64;
    let random: Vec<Evaluation> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let subj = if cfg.sweep {
                swept(subject, &mut rng)?
            } else {
                subject.clone()
            };
            let witness = random_witness(axiom, &mut rng);
            let gap = evaluate_witness(axiom, &subj, &witness)?;
            Ok(Evaluation {
                trial: Some(t),
                probe: None,
                subject: subj,
                witness,
                gap,
            })
        })
        .collect::<Result<_>>()?;
    evals.extend(random);

    let mut violations = 0;
    let mut worst: Option<&Evaluation> = None;
    for e in &evals {
        if e.gap.is_violation(cfg.tol) {
            violations += 1;
            if worst.is_none_or(|w| e.gap.gap > w.gap.gap) {
                worst = Some(e);
            }
        }
    }
    Ok(AxiomReport {
        axiom,
        subject: subject.label(),
        seed: cfg.seed,
        tol: cfg.tol,
        trials: evals.len() as u64,
        targeted,
        violations,
        worst_violation: worst.map_or(0.0, |w| w.gap.gap),
        counterexample: worst.map(|w| Counterexample {
            trial: w.trial,
            probe: w.probe.map(str::to_string),
            subject: w.subject.clone(),
            witness: w.witness.clone(),
            gap: w.gap,
        }),
    })
}

fn swept<R: Rng>(subject: &Subject, rng: &mut R) -> Result<Subject> {
    let lambda = Lambda::new(LAMBDA_GRID[rng.gen_range(0..LAMBDA_GRID.len())])?;
    let mut s = subject.with_lambda(lambda);
    if let Subject::Measure(m) = &mut s {
        if m.kind.uses_tau() {
            m.tau = Some(TAU_GRID[rng.gen_range(0..TAU_GRID.len())]);
        }
    }
    Ok(s)
}

fn random_witness<R: Rng>(axiom: Axiom, rng: &mut R) -> Witness {
    let n_range = MIN_SCENARIOS..=MAX_SCENARIOS;
    match axiom {
        Axiom::SubM | Axiom::SupMPlus => {
            let (x1, x2) = random_pair(rng, MIN_SCENARIOS, MAX_SCENARIOS);
            Witness::Pair { x1, x2 }
        }
        Axiom::MoM | Axiom::MoMPlus | Axiom::MoRm => {
            let n = rng.gen_range(n_range);
            let equal = rng.gen_bool(0.5);
            let x1 = random_scenarios(rng, n, equal);
            let x2 = dominating(rng, &x1);
            Witness::Pair { x1, x2 }
        }
        Axiom::PhM | Axiom::PhMPlus => {
            let n = rng.gen_range(n_range);
            let equal = rng.gen_bool(0.5);
            let x = random_scenarios(rng, n, equal);
            // (0, 10]
            let factor = 10.0 - rng.gen_range(0.0..10.0);
            Witness::Scaled { x, factor }
        }
        Axiom::SiRm => {
            let n = rng.gen_range(n_range);
            let equal = rng.gen_bool(0.5);
            let x = random_scenarios(rng, n, equal);
            let factor = 10f64.powf(rng.gen_range(-2.0..2.0));
            Witness::Scaled { x, factor }
        }
        Axiom::LhM | Axiom::LhMPlus => Witness::Constant {
            a1: rng.gen_range(-1.0..1.0),
            a2: rng.gen_range(-1.0..1.0),
            copies: rng.gen_range(1..=8),
        },
        Axiom::TiM | Axiom::TiMPlus => {
            let n = rng.gen_range(n_range);
            let equal = rng.gen_bool(0.5);
            let x = random_scenarios(rng, n, equal);
            Witness::Translated {
                x,
                a1: rng.gen_range(-1.0..1.0),
                a2: rng.gen_range(-1.0..1.0),
            }
        }
        Axiom::QcRm => {
            let (x1, x2) = random_pair(rng, MIN_SCENARIOS, MAX_SCENARIOS);
            Witness::Mixture {
                x1,
                x2,
                delta: rng.gen_range(0.0..=1.0),
            }
        }
        Axiom::DbRm => {
            let n = rng.gen_range(n_range);
            let x = random_scenarios(rng, n, true);
            let permutation = random_permutation(rng, n);
            Witness::Permuted { x, permutation }
        }
    }
}

/// Equally weighted set whose two components both equal `ys`, so that the
/// combined outcome is `ys` for every lambda.
fn diagonal(ys: &[f64]) -> Result<BivariateScenarioSet> {
    BivariateScenarioSet::equally_weighted(ys.iter().map(|&y| (y, y)).collect())
}

fn probes(axiom: Axiom, subject: &Subject) -> Result<Vec<(&'static str, Witness)>> {
    let spread = diagonal(&[-0.02, 0.03])?;
    let mut out = Vec::new();
    match axiom {
        Axiom::SubM | Axiom::SupMPlus => out.push((
            "doubled position",
            Witness::Pair {
                x1: spread.clone(),
                x2: spread,
            },
        )),
        Axiom::PhM | Axiom::PhMPlus => out.push((
            "doubling",
            Witness::Scaled {
                x: spread,
                factor: 2.0,
            },
        )),
        Axiom::MoM | Axiom::MoMPlus => out.push((
            "zero below a nonnegative spread",
            Witness::Pair {
                x1: diagonal(&[0.0, 0.0])?,
                x2: diagonal(&[0.0, 0.05])?,
            },
        )),
        Axiom::LhM | Axiom::LhMPlus => out.push((
            "unit constant",
            Witness::Constant {
                a1: 1.0,
                a2: 1.0,
                copies: 3,
            },
        )),
        Axiom::TiM | Axiom::TiMPlus => out.push((
            "unit shift",
            Witness::Translated {
                x: spread,
                a1: 1.0,
                a2: 1.0,
            },
        )),
        Axiom::MoRm => {
            // a dominating position with far more dispersion
            let sa = match subject {
                Subject::Ratio(RatioSpec {
                    kind: RatioKind::Sharpe { safe_asset },
                    ..
                }) => safe_asset.clone(),
                _ => SafeAsset::zero(),
            };
            let lift = |ys: &[f64]| -> Result<BivariateScenarioSet> {
                Ok(diagonal(ys)?.translate(sa.rf_r, sa.rf_esg))
            };
            out.push((
                "dispersed upside",
                Witness::Pair {
                    x1: lift(&[0.01, 0.02])?,
                    x2: lift(&[0.01, 1.0])?,
                },
            ));
        }
        Axiom::QcRm => {
            let t = match subject {
                Subject::Ratio(RatioSpec {
                    kind: RatioKind::Omega { threshold },
                    ..
                }) => *threshold,
                Subject::Ratio(RatioSpec {
                    kind: RatioKind::FarinelliTibiletti { m, n, .. },
                    ..
                }) if m == n => *m,
                _ => 0.0,
            };
            out.push((
                "crossed two-point laws",
                Witness::Mixture {
                    x1: diagonal(&[t + 1.0, t - 2.0])?,
                    x2: diagonal(&[t - 2.0, t + 1.0])?,
                    delta: 0.5,
                },
            ));
            if let Subject::Ratio(RatioSpec {
                kind: RatioKind::Rachev { beta, gamma },
                ..
            }) = subject
            {
                if let Some(w) = rachev_probe(*beta, *gamma)? {
                    out.push(("separated upside tails", w));
                }
            }
        }
        Axiom::SiRm => {
            let x = diagonal(&[-0.02, 0.03, 0.01])?;
            out.push(("tripling", Witness::Scaled { x, factor: 3.0 }));
        }
        Axiom::DbRm => out.push((
            "rotation",
            Witness::Permuted {
                x: BivariateScenarioSet::equally_weighted(vec![
                    (-0.02, 0.001),
                    (0.03, -0.002),
                    (0.01, 0.0),
                ])?,
                permutation: vec![2, 0, 1],
            },
        )),
    }
    Ok(out)
}

/// Two laws whose upside sits on different atoms: each alone has a large
/// upper tail, their mixture halves it while the lower tail stays put.
fn rachev_probe(beta: f64, gamma: f64) -> Result<Option<Witness>> {
    let up = 1.0 - beta;
    let down = 1.0 - gamma;
    let rest = 1.0 - 2.0 * up - down;
    if beta <= 0.0 || rest < 0.0 {
        return Ok(None);
    }
    let probs = vec![up, down, up, rest];
    let with = |ys: [f64; 4]| {
        BivariateScenarioSet::new(ys.iter().map(|&y| (y, y)).collect(), probs.clone())
    };
    let (x1, x2) = match (with([3.0, -1.0, 0.0, 0.0]), with([0.0, -1.0, 3.0, 0.0])) {
        (Ok(a), Ok(b)) => (a, b),
        // rounding pushed the probabilities off the simplex
        _ => return Ok(None),
    };
    Ok(Some(Witness::Mixture { x1, x2, delta: 0.5 }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    RiskMeasures,
    Ratios,
}

impl FromStr for Scope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "risk_measures" => Ok(Scope::RiskMeasures),
            "ratios" => Ok(Scope::Ratios),
            other => Err(Error::param(format!(
                "unknown scope '{other}' (risk_measures or ratios)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Holds,
    CounterexampleFound,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub row: String,
    pub column: Axiom,
    /// Whether the property is claimed to hold.
    pub expected_holds: bool,
    pub status: CellStatus,
    pub report: AxiomReport,
}

impl Cell {
    /// Holds where expected, counterexample where the property is not claimed.
    pub fn matches_expectation(&self) -> bool {
        match self.status {
            CellStatus::Holds => self.expected_holds,
            CellStatus::CounterexampleFound => !self.expected_holds,
            CellStatus::Inconclusive => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyMatrix {
    pub scope: Scope,
    pub rows: Vec<String>,
    pub columns: Vec<Axiom>,
    pub cells: Vec<Cell>,
}

impl PropertyMatrix {
    pub fn cell(&self, row: &str, column: Axiom) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.row == row && c.column == column)
    }

    /// Cells where a claimed property was violated.
    pub fn contradictions(&self) -> impl Iterator<Item = &Cell> {
        self.cells
            .iter()
            .filter(|c| c.expected_holds && c.status == CellStatus::CounterexampleFound)
    }

    pub fn inconclusive(&self) -> impl Iterator<Item = &Cell> {
        self.cells
            .iter()
            .filter(|c| c.status == CellStatus::Inconclusive)
    }

    /// Plain-text checkmark table.
    pub fn render(&self) -> String {
        let width = self.rows.iter().map(String::len).max().unwrap_or(0).max(8);
        let mut out = format!("{:width$}", "");
        for c in &self.columns {
            out.push_str(&format!(" | {:^8}", c.as_str()));
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{row:width$}"));
            for &col in &self.columns {
                let mark = match self.cell(row, col).map(|c| c.status) {
                    Some(CellStatus::Holds) => "yes",
                    Some(CellStatus::CounterexampleFound) => "no",
                    Some(CellStatus::Inconclusive) => "?",
                    None => "",
                };
                out.push_str(&format!(" | {mark:^8}"));
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
        out
    }
}

/// Subjects and claimed properties for one scope, in table order.
pub fn expected_pattern(scope: Scope) -> Result<Vec<(Subject, Vec<Axiom>)>> {
    let half = Lambda::new(0.5)?;
    Ok(match scope {
        Scope::RiskMeasures => {
            let all = vec![Axiom::SubM, Axiom::PhM, Axiom::MoM, Axiom::LhM];
            let sub_ph = vec![Axiom::SubM, Axiom::PhM];
            vec![
                (
                    Subject::Measure(MeasureSpec::avar(half, 0.95)?),
                    all.clone(),
                ),
                (Subject::Measure(MeasureSpec::avar_l(half, 0.95)?), all),
                (
                    Subject::Measure(MeasureSpec::plain(MeasureKind::EsgVariance, half)?),
                    vec![],
                ),
                (
                    Subject::Measure(MeasureSpec::plain(MeasureKind::EsgSigma, half)?),
                    sub_ph.clone(),
                ),
                (
                    Subject::Measure(MeasureSpec::plain(MeasureKind::EsgVarianceL, half)?),
                    vec![],
                ),
                (
                    Subject::Measure(MeasureSpec::plain(MeasureKind::EsgSigmaL, half)?),
                    sub_ph,
                ),
            ]
        }
        Scope::Ratios => {
            use Axiom::{DbRm, MoRm, QcRm, SiRm};
            let ratio = |kind| RatioSpec::new(kind, half).map(Subject::Ratio);
            vec![
                (
                    ratio(RatioKind::Sharpe {
                        safe_asset: SafeAsset::zero(),
                    })?,
                    vec![QcRm, SiRm, DbRm],
                ),
                (
                    ratio(RatioKind::Rachev {
                        beta: 0.95,
                        gamma: 0.95,
                    })?,
                    vec![MoRm, SiRm, DbRm],
                ),
                (
                    ratio(RatioKind::Starr { alpha: 0.95 })?,
                    vec![MoRm, QcRm, SiRm, DbRm],
                ),
                (
                    ratio(RatioKind::SortinoSatchell {
                        p: 2.0,
                        target: None,
                    })?,
                    vec![MoRm, QcRm, SiRm, DbRm],
                ),
                (
                    ratio(RatioKind::Omega { threshold: 0.0 })?,
                    vec![MoRm, SiRm, DbRm],
                ),
                (
                    ratio(RatioKind::FarinelliTibiletti {
                        m: 0.0,
                        n: 0.0,
                        p: 2.0,
                        q: 2.0,
                    })?,
                    vec![MoRm, SiRm, DbRm],
                ),
            ]
        }
    })
}

pub fn scope_columns(scope: Scope) -> Vec<Axiom> {
    match scope {
        Scope::RiskMeasures => vec![Axiom::SubM, Axiom::PhM, Axiom::MoM, Axiom::LhM],
        Scope::Ratios => vec![Axiom::MoRm, Axiom::QcRm, Axiom::SiRm, Axiom::DbRm],
    }
}

/// Checks every (subject, axiom) cell of a scope, sweeping lambda (and tau).
/// Each cell draws its own seed from `seed` and its position.
pub fn reproduce_property_matrix(scope: Scope, trials: u64, seed: u64) -> Result<PropertyMatrix> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let pattern = expected_pattern(scope)?;
    let columns = scope_columns(scope);
    let jobs: Vec<(usize, &Subject, Axiom, bool)> = pattern
        .iter()
        .enumerate()
        .flat_map(|(i, (subject, holds))| {
            columns
                .iter()
                .map(move |&col| (i, subject, col, holds.contains(&col)))
        })
        .collect();
    let cells = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(_, subject, column, expected_holds))| {
            let cfg = LabConfig {
                trials,
                seed: seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(j as u64),
                tol: DEFAULT_TOL,
                sweep: true,
            };
            let report = check_axiom_with(column, subject, &cfg)?;
            let status = match (report.violations > 0, expected_holds) {
                (true, _) => CellStatus::CounterexampleFound,
                (false, true) => CellStatus::Holds,
                (false, false) => CellStatus::Inconclusive,
            };
            Ok(Cell {
                row: subject.name().to_string(),
                column,
                expected_holds,
                status,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PropertyMatrix {
        scope,
        rows: pattern.iter().map(|(s, _)| s.name().to_string()).collect(),
        columns,
        cells,
    })
}

/// Serializes non-finite floats as strings so reports stay valid JSON.
mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad number '{other}'"))),
            },
        }
    }
}
