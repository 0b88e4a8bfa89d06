#![no_main]

use cmstoch::format::{parse_strategy, serialize_strategy};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(strategy) = parse_strategy(text) else { return };
    let canonical = serialize_strategy(&strategy);
    let reparsed = parse_strategy(&canonical).expect("canonical serialization parses");
    assert_eq!(strategy, reparsed);
});
