#![no_main]

use libfuzzer_sys::fuzz_target;
use subdivlab::{DefiningGraph, Element};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let g = DefiningGraph::new(vec!["a", "b", "z"], &[(0, 2), (1, 2)]).unwrap();
    if let Ok(e) = Element::parse(&g, text) {
        if e.word_length() > 4096 {
            return;
        }
        assert_eq!(Element::parse(&g, &e.to_literal(&g)).unwrap(), e);
        assert_eq!(e.normal_form(&g).to_element(&g), e);
    }
});
