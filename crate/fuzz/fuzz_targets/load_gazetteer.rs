#![no_main]

use dlviz_core::gazetteer::Gazetteer;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = Gazetteer::parse(text) {
        for line in text.lines() {
            if let Some(c) = line.split('\t').next().and_then(|name| g.resolve(name)) {
                assert!((-90.0..=90.0).contains(&c.lat) && (-180.0..=180.0).contains(&c.lon));
            }
        }
    }
});
