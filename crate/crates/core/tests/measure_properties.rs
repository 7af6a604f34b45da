use esgrisk::measures::{combine, esg_avar, esg_avar_l, esg_mean, esg_sigma, esg_sigma_l};
use esgrisk::risk::{avar, mean, DiscreteDistribution};
use esgrisk::{BivariateScenarioSet, Lambda};
use proptest::prelude::*;

fn lam(v: f64) -> Lambda {
    Lambda::new(v).unwrap()
}

/// Rockafellar-Uryasev minimum over the support, computed independently of
/// the sorted-tail evaluation.
fn avar_by_minimization(d: &DiscreteDistribution, tau: f64) -> f64 {
    d.values()
        .iter()
        .map(|&z| {
            let t = -z;
            let excess: f64 = d
                .values()
                .iter()
                .zip(d.probs())
                .map(|(v, p)| p * (-v - t).max(0.0))
                .sum();
            t + excess / (1.0 - tau)
        })
        .fold(f64::INFINITY, f64::min)
}

fn scenarios(max_n: usize) -> impl Strategy<Value = BivariateScenarioSet> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec((-0.5f64..0.5, -0.004f64..0.004), n),
            prop::collection::vec(0.05f64..1.0, n),
        )
            .prop_map(|(s, w)| {
                let total: f64 = w.iter().sum();
                let probs = w.into_iter().map(|x| x / total).collect();
                BivariateScenarioSet::new(s, probs).unwrap()
            })
    })
}

fn pair(max_n: usize) -> impl Strategy<Value = (BivariateScenarioSet, BivariateScenarioSet)> {
    scenarios(max_n).prop_flat_map(|x| {
        let n = x.len();
        prop::collection::vec((-0.5f64..0.5, -0.004f64..0.004), n).prop_map(move |s| {
            let y = BivariateScenarioSet::new(s, x.probs().to_vec()).unwrap();
            (x.clone(), y)
        })
    })
}

fn tau() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(0.5),
        Just(0.9),
        Just(0.95),
        Just(0.99),
        0.0f64..0.999
    ]
}

const TOL: f64 = 1e-12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn avar_matches_minimization_oracle(x in scenarios(40), t in tau(), l in 0.0f64..=1.0) {
        let y = combine(&x, lam(l));
        let direct = avar(&y, t).unwrap();
        let oracle = avar_by_minimization(&y, t);
        prop_assert!((direct - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()), "{direct} vs {oracle}");
    }

    #[test]
    fn avar_at_zero_is_negated_mean(x in scenarios(40), l in 0.0f64..=1.0) {
        let y = combine(&x, lam(l));
        prop_assert!((avar(&y, 0.0).unwrap() + mean(&y)).abs() <= TOL);
    }

    #[test]
    fn coherence_of_esg_avar((x1, x2) in pair(30), t in tau(), l in 0.0f64..=1.0, b in 0.01f64..10.0,
                             a1 in -0.2f64..0.2, a2 in -0.004f64..0.004) {
        let l = lam(l);
        for f in [esg_avar, esg_avar_l] {
            let r1 = f(&x1, l, t).unwrap();
            let r2 = f(&x2, l, t).unwrap();
            let sum = f(&x1.add(&x2).unwrap(), l, t).unwrap();
            prop_assert!(sum <= r1 + r2 + TOL);
            prop_assert!((f(&x1.scale(b), l, t).unwrap() - b * r1).abs() <= 1e-11 * (1.0 + (b * r1).abs()));
            let shifted = f(&x1.translate(a1, a2), l, t).unwrap();
            prop_assert!((shifted - (r1 - l.blend(a1, a2))).abs() <= 1e-12);
        }
    }

    #[test]
    fn monotone_under_dominance(x in scenarios(30), bumps in prop::collection::vec((0.0f64..0.1, 0.0f64..0.004), 30),
                                t in tau(), l in 0.0f64..=1.0) {
        let l = lam(l);
        let r: Vec<f64> = x.returns().iter().zip(&bumps).map(|(r, b)| r + b.0).collect();
        let e: Vec<f64> = x.esg().iter().zip(&bumps).map(|(e, b)| e + b.1).collect();
        let y = BivariateScenarioSet::from_margins(r, e, x.probs().to_vec()).unwrap();
        prop_assert!(esg_avar(&y, l, t).unwrap() <= esg_avar(&x, l, t).unwrap() + TOL);
        prop_assert!(esg_avar_l(&y, l, t).unwrap() <= esg_avar_l(&x, l, t).unwrap() + TOL);
    }

    #[test]
    fn linear_variant_dominates(x in scenarios(40), t in tau(), l in 0.0f64..=1.0) {
        let l = lam(l);
        prop_assert!(esg_avar_l(&x, l, t).unwrap() >= esg_avar(&x, l, t).unwrap() - TOL);
        prop_assert!(esg_sigma_l(&x, l) >= esg_sigma(&x, l) - TOL);
    }

    #[test]
    fn variants_agree_at_endpoints_and_when_comonotone(x in scenarios(40), t in tau(), l in 0.0f64..=1.0) {
        for l in [Lambda::ZERO, Lambda::ONE] {
            prop_assert!((esg_avar_l(&x, l, t).unwrap() - esg_avar(&x, l, t).unwrap()).abs() <= TOL);
        }
        // ESG as an increasing function of the return, scenario by scenario
        let e: Vec<f64> = x.returns().iter().map(|r| 0.004 * r.tanh()).collect();
        let c = x.with_esg(e).unwrap();
        let l = lam(l);
        prop_assert!((esg_avar_l(&c, l, t).unwrap() - esg_avar(&c, l, t).unwrap()).abs() <= TOL);
    }

    #[test]
    fn convex_in_lambda(x in scenarios(30), t in tau(), a in 0.0f64..=1.0, b in 0.0f64..=1.0, w in 0.0f64..=1.0) {
        let mid = lam(w * a + (1.0 - w) * b);
        let lhs = esg_avar(&x, mid, t).unwrap();
        let rhs = w * esg_avar(&x, lam(a), t).unwrap() + (1.0 - w) * esg_avar(&x, lam(b), t).unwrap();
        prop_assert!(lhs <= rhs + TOL);
    }

    #[test]
    fn margins_decouple_at_endpoints(x in scenarios(40), t in tau(),
                                    other in prop::collection::vec(-1e3f64..1e3, 40)) {
        let n = x.len();
        let swapped_esg = x.with_esg(other[..n].to_vec()).unwrap();
        prop_assert_eq!(esg_avar(&x, Lambda::ZERO, t).unwrap(), esg_avar(&swapped_esg, Lambda::ZERO, t).unwrap());
        prop_assert_eq!(esg_mean(&x, Lambda::ZERO), esg_mean(&swapped_esg, Lambda::ZERO));
        let swapped_ret = x.with_returns(other[..n].to_vec()).unwrap();
        prop_assert_eq!(esg_avar(&x, Lambda::ONE, t).unwrap(), esg_avar(&swapped_ret, Lambda::ONE, t).unwrap());
    }

    #[test]
    fn deterministic_positions(a1 in -1.0f64..1.0, a2 in -0.004f64..0.004, l in 0.0f64..=1.0, t in tau()) {
        let x = BivariateScenarioSet::deterministic(a1, a2).unwrap();
        let l = lam(l);
        let want = -l.blend(a1, a2);
        prop_assert!((esg_avar(&x, l, t).unwrap() - want).abs() <= TOL);
        prop_assert!((esg_avar_l(&x, l, t).unwrap() - want).abs() <= TOL);
        prop_assert_eq!(esg_sigma(&x, l), 0.0);
    }
}

#[test]
fn comonotone_additivity() {
    let x = BivariateScenarioSet::equally_weighted(vec![(-0.1, -0.002), (0.0, 0.0), (0.2, 0.003)])
        .unwrap();
    let y = x.scale(2.0).translate(0.01, 0.0);
    let l = lam(0.3);
    let lhs = esg_avar(&x.add(&y).unwrap(), l, 0.6).unwrap();
    let rhs = esg_avar(&x, l, 0.6).unwrap() + esg_avar(&y, l, 0.6).unwrap();
    assert!((lhs - rhs).abs() < 1e-15);
}

#[test]
fn tail_atom_is_split() {
    // worst 10% of mass is half of the first atom
    let d = DiscreteDistribution::new(vec![-1.0, 0.0, 1.0], vec![0.2, 0.3, 0.5]).unwrap();
    assert_eq!(avar(&d, 0.9).unwrap(), 1.0);
    // worst 30%: 0.2 at -1, 0.1 at 0
    assert!((avar(&d, 0.7).unwrap() - 0.2 / 0.3).abs() < 1e-15);
}
