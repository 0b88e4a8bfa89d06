//! Parsing must never panic, and anything it accepts must survive a
//! serialize/parse round trip unchanged.

#![no_main]

use cmstoch::format::{parse_game, serialize_game};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(game) = parse_game(text) else { return };
    let canonical = serialize_game(&game);
    let reparsed = parse_game(&canonical).expect("canonical serialization parses");
    assert_eq!(game, reparsed);
    assert_eq!(canonical, serialize_game(&reparsed));
});
