#![no_main]

use libfuzzer_sys::fuzz_target;
use subdivlab::special::{check_local_isometry, CubeComplexSpec};
use subdivlab::DefiningGraph;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = CubeComplexSpec::from_json(text) {
        let g = spec
            .embedded_graph
            .clone()
            .unwrap_or_else(|| DefiningGraph::new(vec!["a", "b"], &[(0, 1)]).unwrap());
        let _ = check_local_isometry(&spec, &g);
    }
});
