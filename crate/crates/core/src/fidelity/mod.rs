//! Exact MCT oracle, branch-exhaustive verification, classical fidelities in
//! two complementary bases, process-fidelity bounds and noise sweeps.

mod dense;
mod estimate;
mod oracle;
mod sweep;
mod verify;

pub use dense::{certify_rule, certify_rules, gate_matrix, sequence_matrix, RuleCertificate};
pub use estimate::{
    classical_fidelity, classical_fidelity_c, classical_fidelity_z, derive_key, estimate,
    hofmann_bounds, wilson_interval, Basis, FidelityError, FidelityEstimate, Rate,
};
pub use oracle::{
    bits_of, index_of, mct_oracle, mct_oracle_index, mct_permutation, LengthMismatch,
};
pub use sweep::{
    delta_fidelity, estimate_resources, grid_rates, monotonicity_violations, read_sweep_csv,
    run_sweep, run_sweep_circuit, write_csv, DeltaRow, ResourceEstimate, Spacing, SweepError,
    SweepGrid, SweepRow, SweepSpec, AMPLITUDE_BUDGET, DEFAULT_MAX_N,
};
pub use verify::{
    verify_against, verify_mct, BranchMode, BranchSpecError, CheckBasis, Counterexample,
    VerifyError, VerifyReport,
};
