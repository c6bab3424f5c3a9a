#![no_main]
use libfuzzer_sys::fuzz_target;
use teledepth::applications::parse_bitstring;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(bits) = parse_bitstring(s) {
            let back: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            assert_eq!(back, s);
        }
    }
});
