#![no_main]

use dlviz_core::record::Normalizer;
use dlviz_core::Index;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = Normalizer::default().read_corpus(data) {
        let _ = Index::build(records);
    }
});
