#![no_main]

use dlviz_core::record::parse_record;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(record) = parse_record(line) {
        let back = parse_record(&record.to_line()).expect("serialized record re-parses");
        assert_eq!(back, record);
    }
});
