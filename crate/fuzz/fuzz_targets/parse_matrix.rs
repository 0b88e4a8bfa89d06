#![no_main]

use cmstoch::format::{parse_matrix, serialize_matrix};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(matrix) = parse_matrix(text) else { return };
    let canonical = serialize_matrix(&matrix);
    let reparsed = parse_matrix(&canonical).expect("canonical serialization parses");
    assert_eq!(matrix, reparsed);
});
