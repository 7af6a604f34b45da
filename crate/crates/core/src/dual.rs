//! Dual (risk-envelope) evaluation of ESG-AVaR and its linear variant.
//!
//! Both envelopes are boxes intersected with one expectation constraint per
//! weight function, so the supremum of `-E[z1 r + z2 esg]` is reached by
//! loading the upper bound onto the worst scenarios first. The solver here
//! works directly on the scenario weights and shares no code with the
//! primal AVaR evaluation.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{random_scenarios, trial_rng};
use crate::measures::{esg_avar, esg_avar_l, Lambda};
use crate::scenario::BivariateScenarioSet;

/// Feasibility tolerance for emitted certificates.
pub const ENVELOPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// `(z1, z2) = xi (1 - lambda, lambda)`, `0 <= xi <= 1/(1 - tau)`, `E[xi] = 1`.
    EsgAvar,
    /// `E[z1] = 1 - lambda`, `E[z2] = lambda`,
    /// `z1 <= (1 - lambda)/(1 - tau)`, `z2 <= lambda/(1 - tau)`.
    EsgAvarL,
}

/// Per-constraint violations of a certificate; zero means satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnvelopeResiduals {
    /// `|E[z1] - (1 - lambda)|`
    pub expectation_return: f64,
    /// `|E[z2] - lambda|`
    pub expectation_esg: f64,
    /// Largest excess over the upper bound.
    pub upper_bound: f64,
    /// Largest negative weight, as a positive number.
    pub nonnegativity: f64,
    /// Largest `|lambda z1 - (1 - lambda) z2|` (ESG-AVaR envelope only).
    pub proportionality: f64,
}

impl EnvelopeResiduals {
    pub fn max(&self) -> f64 {
        [
            self.expectation_return,
            self.expectation_esg,
            self.upper_bound,
            self.nonnegativity,
            self.proportionality,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub kind: EnvelopeKind,
    pub zeta1: Vec<f64>,
    pub zeta2: Vec<f64>,
    /// `-E[z1 r + z2 esg]` at the certificate.
    pub value: f64,
    pub residuals: EnvelopeResiduals,
}

fn check_dual_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::param(format!(
            "dual evaluation needs a quantile level in (0, 1), got {tau}"
        )));
    }
    Ok(())
}

/// Optimal `xi` for `sup { -E[xi y] : 0 <= xi <= 1/(1 - tau), E[xi] = 1 }`.
///
/// Worst outcomes get the full bound until mass `1 - tau` is used up; the
/// boundary scenario receives the fractional remainder. Ties go in input order.
fn greedy_weights(outcomes: &[f64], probs: &[f64], tau: f64) -> Vec<f64> {
    let bound = 1.0 / (1.0 - tau);
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by(|&a, &b| outcomes[a].total_cmp(&outcomes[b]));
    let mut xi = vec![0.0; outcomes.len()];
    // remaining budget of E[xi]
    let mut budget = 1.0;
    for i in order {
        if budget <= 0.0 {
            break;
        }
        let p = probs[i];
        if p <= 0.0 {
            continue;
        }
        let full = p * bound;
        if full <= budget {
            xi[i] = bound;
            budget -= full;
        } else {
            xi[i] = budget / p;
            budget = 0.0;
        }
    }
    xi
}

fn dual_value(x: &BivariateScenarioSet, zeta1: &[f64], zeta2: &[f64]) -> f64 {
    -x.scenarios()
        .zip(x.probs())
        .zip(zeta1.iter().zip(zeta2))
        .map(|(((r, e), p), (z1, z2))| p * (z1 * r + z2 * e))
        .sum::<f64>()
}

/// Dual certificate for ESG-AVaR: one common `xi` sorted on the combined outcome.
pub fn esg_avar_dual(
    x: &BivariateScenarioSet,
    lambda: Lambda,
    tau: f64,
) -> Result<DualCertificate> {
    check_dual_tau(tau)?;
    let combined: Vec<f64> = x.scenarios().map(|(r, e)| lambda.blend(r, e)).collect();
    let xi = greedy_weights(&combined, x.probs(), tau);
    let l = lambda.value();
    let zeta1: Vec<f64> = xi.iter().map(|w| (1.0 - l) * w).collect();
    let zeta2: Vec<f64> = xi.iter().map(|w| l * w).collect();
    let value = dual_value(x, &zeta1, &zeta2);
    let mut cert = DualCertificate {
        kind: EnvelopeKind::EsgAvar,
        zeta1,
        zeta2,
        value,
        residuals: EnvelopeResiduals::default(),
    };
    cert.residuals = check_envelope(&cert, x.probs(), lambda, tau);
    Ok(cert)
}

/// Dual certificate for the linear variant: an independent `xi` per margin.
pub fn esg_avar_l_dual(
    x: &BivariateScenarioSet,
    lambda: Lambda,
    tau: f64,
) -> Result<DualCertificate> {
    check_dual_tau(tau)?;
    let l = lambda.value();
    let xi_r = greedy_weights(x.returns(), x.probs(), tau);
    let xi_e = greedy_weights(x.esg(), x.probs(), tau);
    let zeta1: Vec<f64> = xi_r.iter().map(|w| (1.0 - l) * w).collect();
    let zeta2: Vec<f64> = xi_e.iter().map(|w| l * w).collect();
    let value = dual_value(x, &zeta1, &zeta2);
    let mut cert = DualCertificate {
        kind: EnvelopeKind::EsgAvarL,
        zeta1,
        zeta2,
        value,
        residuals: EnvelopeResiduals::default(),
    };
    cert.residuals = check_envelope(&cert, x.probs(), lambda, tau);
    Ok(cert)
}

/// Residual of every envelope constraint for `cert` under scenario
/// probabilities `probs`.
pub fn check_envelope(
    cert: &DualCertificate,
    probs: &[f64],
    lambda: Lambda,
    tau: f64,
) -> EnvelopeResiduals {
    let l = lambda.value();
    let cap = 1.0 / (1.0 - tau);
    let expect = |z: &[f64]| z.iter().zip(probs).map(|(z, p)| z * p).sum::<f64>();
    let neg = cert
        .zeta1
        .iter()
        .chain(&cert.zeta2)
        .fold(0.0, |m: f64, z| m.max(-z));
    let mut res = EnvelopeResiduals {
        expectation_return: (expect(&cert.zeta1) - (1.0 - l)).abs(),
        expectation_esg: (expect(&cert.zeta2) - l).abs(),
        nonnegativity: neg,
        ..Default::default()
    };
    match cert.kind {
        EnvelopeKind::EsgAvar => {
            // xi = z1 + z2 under the proportional split
            res.upper_bound = cert
                .zeta1
                .iter()
                .zip(&cert.zeta2)
                .fold(0.0, |m: f64, (a, b)| m.max(a + b - cap));
            res.proportionality = cert
                .zeta1
                .iter()
                .zip(&cert.zeta2)
                .fold(0.0, |m: f64, (a, b)| m.max((l * a - (1.0 - l) * b).abs()));
        }
        EnvelopeKind::EsgAvarL => {
            let over1 = cert
                .zeta1
                .iter()
                .fold(0.0, |m: f64, z| m.max(z - (1.0 - l) * cap));
            let over2 = cert.zeta2.iter().fold(0.0, |m: f64, z| m.max(z - l * cap));
            res.upper_bound = over1.max(over2);
        }
    }
    res
}

/// Settings for a randomized primal/dual comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DualityConfig {
    /// Scenario counts are drawn uniformly from `1..=max_n`.
    pub max_n: usize,
    pub trials: u64,
    pub seed: u64,
    pub lambdas: Vec<Lambda>,
    pub taus: Vec<f64>,
}

impl Default for DualityConfig {
    fn default() -> Self {
        Self {
            max_n: 200,
            trials: 1000,
            seed: 0,
            lambdas: [0.0, 0.25, 0.5, 0.75, 1.0]
                .into_iter()
                .map(|l| Lambda::new(l).expect("grid in [0, 1]"))
                .collect(),
            taus: vec![0.5, 0.9, 0.95, 0.99],
        }
    }
}

/// Largest primal/dual disagreement and certificate residual over a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub trials: u64,
    pub max_n: usize,
    pub seed: u64,
    pub lambdas: Vec<f64>,
    pub taus: Vec<f64>,
    /// Number of (instance, lambda, tau) evaluations per variant.
    pub evaluations: u64,
    pub max_gap_esg_avar: f64,
    pub max_gap_esg_avar_l: f64,
    pub max_residual: f64,
    pub worst_trial: Option<u64>,
}

/// Gap threshold for a duality study to count as passed.
pub const GAP_TOL: f64 = 1e-9;

impl DualityReport {
    pub fn max_gap(&self) -> f64 {
        self.max_gap_esg_avar.max(self.max_gap_esg_avar_l)
    }

    pub fn passed(&self) -> bool {
        self.max_gap() <= GAP_TOL && self.max_residual <= ENVELOPE_TOL
    }
}

#[derive(Clone, Copy)]
struct TrialMax {
    gap: f64,
    gap_l: f64,
    residual: f64,
    // trial with the largest single gap
    worst: Option<(f64, u64)>,
}

impl TrialMax {
    const EMPTY: TrialMax = TrialMax {
        gap: 0.0,
        gap_l: 0.0,
        residual: 0.0,
        worst: None,
    };

    fn merge(self, o: TrialMax) -> TrialMax {
        let worst = match (self.worst, o.worst) {
            (Some(a), Some(b)) => Some(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }),
            (a, b) => a.or(b),
        };
        TrialMax {
            gap: self.gap.max(o.gap),
            gap_l: self.gap_l.max(o.gap_l),
            residual: self.residual.max(o.residual),
            worst,
        }
    }
}

/// Compares both AVaR variants with their dual certificates on random
/// instances. Each trial draws its own generator stream, so the report does
/// not depend on thread scheduling.
pub fn duality_study(cfg: &DualityConfig) -> Result<DualityReport> {
    if cfg.trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    if cfg.max_n == 0 {
        return Err(Error::param("scenario count must be positive"));
    }
    if cfg.lambdas.is_empty() || cfg.taus.is_empty() {
        return Err(Error::param("lambda and tau grids must be non-empty"));
    }
    for &t in &cfg.taus {
        check_dual_tau(t)?;
    }
    let agg = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<TrialMax> {
            let mut rng = trial_rng(cfg.seed, t);
            let n = rng.gen_range(1..=cfg.max_n);
            let equal = rng.gen_bool(0.5);
            let x = random_scenarios(&mut rng, n, equal);
            let mut m = TrialMax::EMPTY;
            for &l in &cfg.lambdas {
                for &tau in &cfg.taus {
                    let c = esg_avar_dual(&x, l, tau)?;
                    let cl = esg_avar_l_dual(&x, l, tau)?;
                    let g = (esg_avar(&x, l, tau)? - c.value).abs();
                    let gl = (esg_avar_l(&x, l, tau)? - cl.value).abs();
                    m = m.merge(TrialMax {
                        gap: g,
                        gap_l: gl,
                        residual: c.residuals.max().max(cl.residuals.max()),
                        worst: Some((g.max(gl), t)),
                    });
                }
            }
            Ok(m)
        })
        .try_reduce(|| TrialMax::EMPTY, |a, b| Ok(a.merge(b)))?;
    Ok(DualityReport {
        trials: cfg.trials,
        max_n: cfg.max_n,
        seed: cfg.seed,
        lambdas: cfg.lambdas.iter().map(|l| l.value()).collect(),
        taus: cfg.taus.clone(),
        evaluations: cfg.trials * (cfg.lambdas.len() * cfg.taus.len()) as u64,
        max_gap_esg_avar: agg.gap,
        max_gap_esg_avar_l: agg.gap_l,
        max_residual: agg.residual,
        worst_trial: agg.worst.map(|w| w.1),
    })
}
