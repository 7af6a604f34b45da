//! Seeded random instances: scenario sets for property checks and
//! synthetic panels for pipeline runs.

use std::fmt::Write as _;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::{BivariateScenarioSet, TRADING_DAYS};

/// Generator stream for trial `index` under `seed`. Streams are
/// independent, so trials can run in any order.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Bounds of the normalized daily ESG flow.
pub fn esg_bound() -> f64 {
    1.0 / f64::from(TRADING_DAYS)
}

/// Approximate standard normal: twelve uniforms minus 6. Uses only
/// additions, so draws are bit-identical on every platform.
pub fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0
}

/// Daily-return-like draw from a heavy-tailed mixture, clipped to [-0.5, 0.5].
pub fn random_return<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    let v: f64 = if u < 0.80 {
        0.0005 + 0.015 * std_normal(rng)
    } else if u < 0.95 {
        0.06 * std_normal(rng)
    } else {
        rng.gen_range(-0.5..=0.5)
    };
    v.clamp(-0.5, 0.5)
}

pub fn random_esg<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let b = esg_bound();
    rng.gen_range(-b..=b)
}

/// Probability vector of length `n`, uniform or random positive weights.
pub fn random_probs<R: Rng + ?Sized>(rng: &mut R, n: usize, equal: bool) -> Vec<f64> {
    if equal {
        return vec![1.0 / n as f64; n];
    }
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Scenario set with `n` scenarios on the given probabilities.
pub fn random_scenarios_on<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> BivariateScenarioSet {
    let scenarios = probs
        .iter()
        .map(|_| (random_return(rng), random_esg(rng)))
        .collect();
    BivariateScenarioSet::new(scenarios, probs.to_vec()).expect("generated set is valid")
}

pub fn random_scenarios<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    equal: bool,
) -> BivariateScenarioSet {
    let probs = random_probs(rng, n, equal);
    random_scenarios_on(rng, &probs)
}

/// Two scenario sets sharing one random scenario index of size in `[min_n, max_n]`.
pub fn random_pair<R: Rng + ?Sized>(
    rng: &mut R,
    min_n: usize,
    max_n: usize,
) -> (BivariateScenarioSet, BivariateScenarioSet) {
    let n = rng.gen_range(min_n..=max_n);
    let equal = rng.gen_bool(0.5);
    let probs = random_probs(rng, n, equal);
    (
        random_scenarios_on(rng, &probs),
        random_scenarios_on(rng, &probs),
    )
}

/// Componentwise nonnegative shift of `x`; about a third of the entries stay
/// unchanged so that the ordering is only partial.
pub fn dominating<R: Rng + ?Sized>(rng: &mut R, x: &BivariateScenarioSet) -> BivariateScenarioSet {
    let mut bump = |scale: f64| -> f64 {
        if rng.gen_bool(0.35) {
            0.0
        } else {
            rng.gen_range(0.0..scale)
        }
    };
    let returns: Vec<f64> = x.returns().iter().map(|r| r + bump(0.1)).collect();
    let esg: Vec<f64> = x
        .esg()
        .iter()
        .map(|e| e + bump(2.0 * esg_bound()))
        .collect();
    BivariateScenarioSet::from_margins(returns, esg, x.probs().to_vec()).expect("valid shift")
}

/// Random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Synthetic panel CSV (`date,ticker,ret,esg_raw`) with `assets` tickers over
/// `dates` business days starting 2020-01-02. Raw ESG lives on [0, 100].
pub fn synthetic_panel_csv(seed: u64, assets: usize, dates: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut days = Vec::with_capacity(dates);
    let mut d = NaiveDate::from_ymd_opt(2020, 1, 2).expect("valid date");
    while days.len() < dates {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            days.push(d.format("%Y-%m-%d").to_string());
        }
        d += Duration::days(1);
    }
    let profiles: Vec<(f64, f64, f64, f64)> = (0..assets)
        .map(|_| {
            (
                rng.gen_range(-0.0004..0.0012),
                rng.gen_range(0.008..0.03),
                rng.gen_range(20.0..80.0),
                rng.gen_range(-0.3..0.3),
            )
        })
        .collect();
    let mut out = String::from("date,ticker,ret,esg_raw\n");
    let mut levels: Vec<f64> = profiles.iter().map(|p| p.2).collect();
    for day in &days {
        for (k, &(drift, vol, _, link)) in profiles.iter().enumerate() {
            let z = std_normal(&mut rng);
            let ret = drift + vol * z;
            let esg_step: f64 =
                1.5 * (link * z + (1.0 - link * link).sqrt() * std_normal(&mut rng));
            let mut level = levels[k] + esg_step;
            if level > 100.0 {
                level = 200.0 - level;
            }
            if level < 0.0 {
                level = -level;
            }
            levels[k] = level.clamp(0.0, 100.0);
            writeln!(out, "{day},A{:02},{ret:.8},{:.4}", k + 1, levels[k])
                .expect("write to string");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_streams_are_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| trial_rng(7, 3).gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| trial_rng(7, 3).gen()).collect();
        assert_eq!(a, b);
        let c: u64 = trial_rng(7, 4).gen();
        let d: u64 = trial_rng(7, 3).gen();
        assert_ne!(c, d);
    }

    #[test]
    fn generated_values_respect_ranges() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..2000 {
            let r = random_return(&mut rng);
            let e = random_esg(&mut rng);
            assert!((-0.5..=0.5).contains(&r));
            assert!(e.abs() <= esg_bound());
        }
        let (x1, x2) = random_pair(&mut rng, 2, 64);
        assert_eq!(x1.probs(), x2.probs());
        let y = dominating(&mut rng, &x1);
        assert!(x1
            .scenarios()
            .zip(y.scenarios())
            .all(|(a, b)| a.0 <= b.0 && a.1 <= b.1));
    }

    #[test]
    fn synthetic_panel_shape() {
        let text = synthetic_panel_csv(42, 3, 40);
        assert_eq!(text.lines().count(), 1 + 3 * 40);
        assert_eq!(text, synthetic_panel_csv(42, 3, 40));
        let panel = crate::panel::PanelReader::new(Default::default())
            .read_str(&text)
            .unwrap();
        assert_eq!(panel.tickers().len(), 3);
        assert_eq!(panel.dates().len(), 40);
    }
}
