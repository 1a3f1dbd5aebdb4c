#![no_main]

use libfuzzer_sys::fuzz_target;
use subdivlab::ball::parse_level_file;
use subdivlab::DefiningGraph;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let g = DefiningGraph::complete(3);
    if let Ok(levels) = parse_level_file(&g, text) {
        assert!(levels.windows(2).all(|w| w[0] < w[1]));
    }
});
