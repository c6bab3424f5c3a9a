#![no_main]
use libfuzzer_sys::fuzz_target;
use teledepth::fidelity::BranchMode;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(BranchMode::Sample { count, .. }) = s.parse::<BranchMode>() {
            assert!(count > 0);
        }
    }
});
