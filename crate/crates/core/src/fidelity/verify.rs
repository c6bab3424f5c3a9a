use std::collections::BTreeSet;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::estimate::FidelityError;
use super::oracle::mct_permutation;
use crate::circuit::Circuit;
use crate::simulator::{
    inverse_qft, Input, NoiseModel, Program, Readout, RunOptions, SimError, TrajectorySeed,
};

/// Probability the ideal output must carry for a branch to pass.
const EXACT: f64 = 1.0 - 1e-9;

/// Which measurement branches are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchMode {
    Exhaustive,
    /// `count` distinct branch words drawn from `seed`; all of them when the
    /// branch space is not larger than `count`.
    Sample {
        count: usize,
        seed: u64,
    },
}

impl BranchMode {
    /// Exhaustive up to four controls, 256 sampled branches above.
    pub fn default_for(n: usize, seed: u64) -> Self {
        if n <= 4 {
            BranchMode::Exhaustive
        } else {
            BranchMode::Sample { count: 256, seed }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchSpecError {
    #[error("branch mode must be `exhaustive` or `sample:K`, got `{0}`")]
    Syntax(String),
    #[error("sample count must be a positive integer, got `{0}`")]
    Count(String),
}

impl FromStr for BranchMode {
    type Err = BranchSpecError;

    /// Parses `exhaustive` or `sample:K`; the sampling seed is set separately.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "exhaustive" {
            return Ok(BranchMode::Exhaustive);
        }
        let count = s
            .strip_prefix("sample:")
            .ok_or_else(|| BranchSpecError::Syntax(s.to_string()))?;
        match count.parse::<usize>() {
            Ok(k) if k > 0 => Ok(BranchMode::Sample { count: k, seed: 0 }),
            _ => Err(BranchSpecError::Count(count.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckBasis {
    Z,
    Qft,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub basis: CheckBasis,
    pub input: u64,
    /// Bit `k` is the raw outcome of the `k`-th measurement.
    pub branch: u64,
    pub expected: u64,
    /// Most likely data readout on this branch.
    pub observed: u64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct VerifyReport {
    pub measurements: usize,
    pub branches: u64,
    pub impossible_branches: u64,
    pub inputs: u64,
    pub checks: u64,
    pub failures: u64,
    /// The first failures, at most [`VerifyReport::KEPT`].
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub const KEPT: usize = 16;

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Fidelity(#[from] FidelityError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0} measurements are too many to enumerate branches")]
    TooManyMeasurements(usize),
}

fn branch_words(measurements: usize, mode: BranchMode) -> Result<Vec<u64>, VerifyError> {
    if measurements > 63 {
        return Err(VerifyError::TooManyMeasurements(measurements));
    }
    let space = 1u64 << measurements;
    match mode {
        BranchMode::Exhaustive => {
            if measurements > 24 {
                return Err(VerifyError::TooManyMeasurements(measurements));
            }
            Ok((0..space).collect())
        }
        BranchMode::Sample { count, .. } if space <= count as u64 => Ok((0..space).collect()),
        BranchMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut words = BTreeSet::new();
            while words.len() < count {
                words.insert(rng.random_range(0..space));
            }
            Ok(words.into_iter().collect())
        }
    }
}

/// Noiseless check that every tested branch maps each data basis input `x` to
/// `expected[x]` and each QFT input `|phi_x>` to `sum_y <y|phi_x> |expected[y]>`,
/// so deleted phase corrections are caught too.
pub fn verify_against(
    circuit: &Circuit,
    expected: &[u64],
    mode: BranchMode,
) -> Result<VerifyReport, VerifyError> {
    let program = Program::new(circuit)?;
    let d = program.data_qubits().len();
    let dim = 1usize << d;
    if expected.len() != dim {
        return Err(FidelityError::PermutationSize {
            expected: dim,
            got: expected.len(),
        }
        .into());
    }
    let measurements = circuit.measurement_count();
    let words = branch_words(measurements, mode)?;
    let noise = NoiseModel::noiseless();
    let mut report = VerifyReport {
        measurements,
        inputs: dim as u64,
        ..VerifyReport::default()
    };

    for &branch in &words {
        let options = RunOptions {
            forced: Some(branch),
            readout: Readout::None,
            keep_state: true,
        };
        let mut impossible = false;
        for basis in [CheckBasis::Z, CheckBasis::Qft] {
            for x in 0..dim as u64 {
                let input = match basis {
                    CheckBasis::Z => Input::Basis(x),
                    CheckBasis::Qft => Input::Qft(x),
                };
                let mut state =
                    match program.run(&input, &noise, TrajectorySeed::default(), &options) {
                        Ok(r) => r.state.expect("state kept"),
                        Err(SimError::ImpossibleBranch { .. }) => {
                            impossible = true;
                            break;
                        }
                        Err(e) => return Err(e.into()),
                    };
                let want = match basis {
                    CheckBasis::Z => expected[x as usize],
                    CheckBasis::Qft => {
                        state.map_low_blocks(d, |block| {
                            let undone: Vec<_> =
                                expected.iter().map(|&y| block[y as usize]).collect();
                            inverse_qft(&undone)
                        });
                        x
                    }
                };
                let probs = state.low_marginal(d);
                report.checks += 1;
                if probs[want as usize] < EXACT {
                    report.failures += 1;
                    if report.counterexamples.len() < VerifyReport::KEPT {
                        let observed = (0..dim)
                            .max_by(|&a, &b| probs[a].total_cmp(&probs[b]))
                            .unwrap_or(0) as u64;
                        report.counterexamples.push(Counterexample {
                            basis,
                            input: x,
                            branch,
                            expected: want,
                            observed,
                            probability: probs[want as usize],
                        });
                    }
                }
            }
            if impossible {
                break;
            }
        }
        if impossible {
            report.impossible_branches += 1;
        } else {
            report.branches += 1;
        }
    }
    Ok(report)
}

/// [`verify_against`] with the `MCT_{n+1}` oracle.
pub fn verify_mct(
    circuit: &Circuit,
    n: usize,
    mode: BranchMode,
) -> Result<VerifyReport, VerifyError> {
    let got = circuit.data_qubits().len();
    if got != n + 1 {
        return Err(FidelityError::Width { n, got }.into());
    }
    verify_against(circuit, &mct_permutation(n), mode)
}
