#![no_main]

use dlviz_core::query::parse_query;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(ast) = parse_query(text) else { return };
    let printed = ast.to_string();
    let again =
        parse_query(&printed).unwrap_or_else(|e| panic!("{printed:?} does not re-parse: {e}"));
    assert_eq!(again, ast, "{printed:?}");
});
