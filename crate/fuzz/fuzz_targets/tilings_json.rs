#![no_main]

use libfuzzer_sys::fuzz_target;
use subdivlab::export::{tilings_from_json, tilings_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((g, tilings)) = tilings_from_json(text) {
        let out = tilings_to_json(&g, &tilings, None);
        assert!(tilings_from_json(&out).is_ok());
    }
});
