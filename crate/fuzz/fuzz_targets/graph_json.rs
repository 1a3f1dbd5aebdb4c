#![no_main]

use libfuzzer_sys::fuzz_target;
use subdivlab::DefiningGraph;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = DefiningGraph::from_json(text) {
        let again = DefiningGraph::from_json(&g.to_json()).expect("re-parse");
        assert_eq!(g, again);
    }
});
