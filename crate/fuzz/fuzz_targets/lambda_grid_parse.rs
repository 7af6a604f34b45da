#![no_main]

use esgrisk::ranking::parse_lambda_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = parse_lambda_grid(text) {
            assert!(!grid.is_empty());
            assert!(grid.iter().all(|l| (0.0..=1.0).contains(&l.value())));
        }
    }
});
