#![no_main]

use esgrisk::panel::{descriptive_stats, PanelReader};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let reader = PanelReader::new(Default::default()).with_min_observations(1);
    if let Ok(panel) = reader.read(data) {
        assert_eq!(panel.returns().len(), panel.tickers().len());
        for (r, e) in panel.returns().iter().zip(panel.esg()) {
            assert_eq!(r.len(), panel.dates().len());
            assert!(e.iter().all(|v| v.abs() <= 1.0 / 252.0));
        }
        let _ = descriptive_stats(&panel);
    }
});
