#![no_main]

use esgrisk::ranking::Metric;
use esgrisk::ratios::RatioDefaults;
use esgrisk::{BivariateScenarioSet, Lambda};
use libfuzzer_sys::fuzz_target;

// input: metric name, newline, tau
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (name, tau) = text.split_once('\n').unwrap_or((text, "0.95"));
    let Ok(tau) = tau.trim().parse::<f64>() else {
        return;
    };
    if let Ok(metric) = Metric::parse(name, tau, &RatioDefaults::default()) {
        let x = BivariateScenarioSet::equally_weighted(vec![
            (-0.02, 0.001),
            (0.01, -0.002),
            (0.03, 0.0),
        ])
        .expect("valid set");
        metric
            .evaluate(&x, Lambda::new(0.5).expect("valid lambda"))
            .expect("parsed metric evaluates");
    }
});
