#![no_main]

use dlviz_core::query::parse_query;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Err(e) = parse_query(text) {
            assert!(e.offset <= text.chars().count());
        }
    }
});
