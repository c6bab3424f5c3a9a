#![no_main]
use libfuzzer_sys::fuzz_target;
use teledepth::circuit::{deserialize, serialize};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = deserialize(text) {
        // Canonical output must parse back to the same text.
        let once = serialize(&c);
        let again = deserialize(&once).expect("serialized circuit parses");
        assert_eq!(serialize(&again), once);
    }
});
