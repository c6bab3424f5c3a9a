use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::oracle::mct_permutation;
use crate::circuit::Circuit;
use crate::simulator::{Input, NoiseModel, Program, Readout, RunOptions, SimError, TrajectorySeed};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FidelityError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("shots must be at least 1")]
    NoShots,
    #[error("circuit has {got} data qubits but MCT over {n} controls needs {}", n + 1)]
    Width { n: usize, got: usize },
    #[error("expected permutation has {got} entries, the data space has {expected}")]
    PermutationSize { expected: usize, got: usize },
}

/// Which basis the classical fidelity is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Computational basis inputs, readout compared with the oracle.
    Z,
    /// QFT-rotated inputs, ideal inverse rotation, readout compared with the input label.
    Complementary,
}

impl Basis {
    fn tag(self) -> u64 {
        match self {
            Basis::Z => 0,
            Basis::Complementary => 1,
        }
    }
}

/// Success counts of a classical-fidelity estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rate {
    pub successes: u64,
    pub trials: u64,
}

impl Rate {
    pub fn value(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// Binomial standard error of [`Rate::value`].
    pub fn standard_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let f = self.value();
        (f * (1.0 - f) / self.trials as f64).sqrt()
    }

    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, z)
    }
}

/// Wilson score interval for `successes` out of `trials` at `z` standard deviations.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// `(F_z + F_c - 1, min(F_z, F_c))`, reported as computed.
pub fn hofmann_bounds(f_z: f64, f_c: f64) -> (f64, f64) {
    (f_z + f_c - 1.0, f_z.min(f_c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityEstimate {
    pub z: Rate,
    pub c: Rate,
    pub shots_per_input: u64,
    pub inputs: u64,
}

impl FidelityEstimate {
    pub fn f_z(&self) -> f64 {
        self.z.value()
    }

    pub fn f_c(&self) -> f64 {
        self.c.value()
    }

    pub fn bounds(&self) -> (f64, f64) {
        hofmann_bounds(self.f_z(), self.f_c())
    }

    pub fn lower(&self) -> f64 {
        self.bounds().0
    }

    pub fn upper(&self) -> f64 {
        self.bounds().1
    }
}

/// Key for the trajectories of one `(cell, basis)` pair, drawn from the master
/// seed's ChaCha stream so that neighbouring cells are uncorrelated.
pub fn derive_key(master: u64, cell: u64, basis: Basis) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(2 * cell + basis.tag());
    rng.random()
}

/// Empirical classical fidelity of `circuit` against the basis permutation
/// `expected` (`expected[x]` is the ideal output index for input `x`).
///
/// Trajectory `(input, shot)` uses stream `input * shots + shot` under `key`,
/// and counts are summed, so the result does not depend on scheduling.
pub fn classical_fidelity(
    circuit: &Circuit,
    expected: &[u64],
    noise: &NoiseModel,
    shots: u64,
    key: u64,
    basis: Basis,
) -> Result<Rate, FidelityError> {
    if shots == 0 {
        return Err(FidelityError::NoShots);
    }
    let program = Program::new(circuit)?;
    let dim = 1usize << program.data_qubits().len();
    if expected.len() != dim {
        return Err(FidelityError::PermutationSize {
            expected: dim,
            got: expected.len(),
        });
    }
    let options = RunOptions {
        forced: None,
        readout: match basis {
            Basis::Z => Readout::Z,
            Basis::Complementary => Readout::QftFrame(expected),
        },
        keep_state: false,
    };
    let successes = (0..dim as u64)
        .into_par_iter()
        .map(|input| -> Result<u64, SimError> {
            let (state, target) = match basis {
                Basis::Z => (Input::Basis(input), expected[input as usize]),
                Basis::Complementary => (Input::Qft(input), input),
            };
            let mut hits = 0;
            for shot in 0..shots {
                let seed = TrajectorySeed::new(key, input * shots + shot);
                let r = program.run(&state, noise, seed, &options)?;
                hits += u64::from(r.data_readout == Some(target));
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Rate {
        successes,
        trials: dim as u64 * shots,
    })
}

fn mct_expected(circuit: &Circuit, n: usize) -> Result<Vec<u64>, FidelityError> {
    let got = circuit.data_qubits().len();
    if got != n + 1 {
        return Err(FidelityError::Width { n, got });
    }
    Ok(mct_permutation(n))
}

/// Z-basis classical fidelity of an `MCT_{n+1}` implementation.
pub fn classical_fidelity_z(
    circuit: &Circuit,
    n: usize,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Rate, FidelityError> {
    let expected = mct_expected(circuit, n)?;
    classical_fidelity(
        circuit,
        &expected,
        noise,
        shots,
        derive_key(seed, 0, Basis::Z),
        Basis::Z,
    )
}

/// Complementary-basis classical fidelity of an `MCT_{n+1}` implementation.
pub fn classical_fidelity_c(
    circuit: &Circuit,
    n: usize,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Rate, FidelityError> {
    let expected = mct_expected(circuit, n)?;
    let key = derive_key(seed, 0, Basis::Complementary);
    classical_fidelity(circuit, &expected, noise, shots, key, Basis::Complementary)
}

/// Both fidelities for one noise setting; `cell` selects the key pair.
pub fn estimate(
    circuit: &Circuit,
    expected: &[u64],
    noise: &NoiseModel,
    shots: u64,
    master: u64,
    cell: u64,
) -> Result<FidelityEstimate, FidelityError> {
    let z = classical_fidelity(
        circuit,
        expected,
        noise,
        shots,
        derive_key(master, cell, Basis::Z),
        Basis::Z,
    )?;
    let c = classical_fidelity(
        circuit,
        expected,
        noise,
        shots,
        derive_key(master, cell, Basis::Complementary),
        Basis::Complementary,
    )?;
    Ok(FidelityEstimate {
        z,
        c,
        shots_per_input: shots,
        inputs: expected.len() as u64,
    })
}
