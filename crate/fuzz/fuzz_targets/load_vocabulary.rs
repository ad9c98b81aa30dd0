#![no_main]

use dlviz_core::vocab::Vocabulary;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = Vocabulary::parse("fuzz", text) {
        for (a, r, b) in v.triples() {
            assert!(v.contains(b, r.inverse(), a));
        }
    }
});
