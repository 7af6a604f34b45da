#![no_main]

use esgrisk::hedging::{parse_safe_assets, select_safe_asset};
use esgrisk::Lambda;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(assets) = parse_safe_assets(data) {
        for l in [Lambda::ZERO, Lambda::ONE] {
            if let Ok(choice) = select_safe_asset(&assets, l) {
                assert!(choice.index < assets.len());
            }
        }
    }
});
