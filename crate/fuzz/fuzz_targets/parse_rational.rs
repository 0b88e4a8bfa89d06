#![no_main]

use cmstoch::rational::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(value) = parse_rational(text) else { return };
    let canonical = format_rational(&value);
    let reparsed = parse_rational(&canonical).expect("canonical form parses");
    assert_eq!(value, reparsed);
    assert_eq!(canonical, format_rational(&reparsed));
});
