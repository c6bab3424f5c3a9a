#![no_main]
use libfuzzer_sys::fuzz_target;
use teledepth::fidelity::{read_sweep_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(grid) = read_sweep_csv(data) {
        assert_eq!(grid.rows.len(), grid.toffoli_rates.len() * grid.epr_rates.len());
        let mut out = Vec::new();
        write_csv(&mut out, &grid.rows).expect("rows serialize");
    }
});
