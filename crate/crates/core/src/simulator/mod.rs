//! Dense state-vector trajectory simulator with mid-circuit measurement,
//! classical feedforward and stochastic noise.
//!
//! Data qubits (the non-ancilla qubits, in registry order) occupy the lowest
//! positions of the state vector from the start, so basis index bit `p` is data
//! qubit `p`. Ancillas are appended as the most significant position when first
//! touched and dropped from the vector when measured.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(key)` with
//! `set_stream(stream)`; the harness derives one `(key, stream)` per trajectory
//! so results do not depend on scheduling.

mod noise;
mod state;

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{ensure_valid, Circuit, InvalidCircuit, Operation, QubitKind};

pub use noise::{
    apply_bitflip, apply_depolarizing, noise_insertion_policy, Channel, NoiseError, NoiseModel,
};
pub use state::{inverse_qft, qft_prepare, Pauli, StateVector};

pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Live-qubit cap: `TELEDEPTH_MAX_QUBITS` if set to a positive integer,
/// otherwise [`DEFAULT_MAX_QUBITS`].
pub fn max_qubits() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("TELEDEPTH_MAX_QUBITS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v: &usize| v > 0)
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Invalid(#[from] InvalidCircuit),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("input index {index} out of range for {qubits} data qubits")]
    InputOutOfRange { index: u64, qubits: usize },
    #[error("input state has {got} qubits but the circuit has {expected} data qubits")]
    InputDimension { expected: usize, got: usize },
    #[error("{needed} live qubits exceed the cap of {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("norm drifted to {norm_sqr} before op {op}")]
    NormDrift { op: usize, norm_sqr: f64 },
    #[error(
        "forced outcome of measurement {measurement} (op {op}) has probability {probability:e}"
    )]
    ImpossibleBranch {
        measurement: usize,
        op: usize,
        probability: f64,
    },
    #[error("forced branches cover at most 64 measurements")]
    TooManyMeasurements,
    #[error("data qubit {qubit} was measured mid-circuit and cannot be read out")]
    DataQubitMeasured { qubit: usize },
}

/// Initial state of the data qubits.
#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Basis(u64),
    /// `qft_prepare(i)` over all data qubits.
    Qft(u64),
    State(StateVector),
}

/// How the data qubits are read at the end of a trajectory.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Readout<'a> {
    /// No readout; only the final state is reported.
    None,
    /// Computational-basis readout with `p_readout` flips.
    #[default]
    Z,
    /// Ideal undo of the permutation `perm` (the circuit's intended action on
    /// basis indices), then ideal inverse QFT, then Z readout.
    QftFrame(&'a [u64]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Hash)]
pub struct TrajectorySeed {
    pub key: u64,
    pub stream: u64,
}

impl TrajectorySeed {
    pub fn new(key: u64, stream: u64) -> Self {
        Self { key, stream }
    }

    fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions<'a> {
    /// Bit `k` forces the raw outcome of the `k`-th executed measurement.
    pub forced: Option<u64>,
    pub readout: Readout<'a>,
    /// Keep the state vector as it is before the final readout.
    pub keep_state: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ErrorEvent {
    /// Initialization flip of a data qubit or of an ancilla on first use.
    InitFlip { qubit: usize },
    /// Pauli string inserted after op `op`.
    Pauli {
        op: usize,
        qubits: Vec<usize>,
        paulis: Vec<Pauli>,
    },
    /// Flipped mid-circuit outcome.
    ReadoutFlip { op: usize, bit: usize },
    /// Flipped final readout of data position `position`.
    DataReadoutFlip { position: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryResult {
    pub seed: TrajectorySeed,
    /// Recorded classical bits (after readout flips), indexed like the circuit's bits.
    pub cbits: Vec<bool>,
    /// Final data readout as a basis index, when a readout was requested.
    pub data_readout: Option<u64>,
    /// State before readout, when requested.
    pub state: Option<StateVector>,
    /// Circuit qubit held by each position of `state`.
    pub live_qubits: Vec<usize>,
    pub errors: Vec<ErrorEvent>,
}

/// A validated circuit ready for repeated simulation.
#[derive(Clone, Debug)]
pub struct Program<'c> {
    circuit: &'c Circuit,
    data: Vec<usize>,
}

impl<'c> Program<'c> {
    pub fn new(circuit: &'c Circuit) -> Result<Self, SimError> {
        ensure_valid(circuit)?;
        Ok(Self {
            circuit,
            data: circuit.data_qubits(),
        })
    }

    pub fn circuit(&self) -> &'c Circuit {
        self.circuit
    }

    pub fn data_qubits(&self) -> &[usize] {
        &self.data
    }

    /// Largest number of simultaneously live qubits.
    pub fn peak_live_qubits(&self) -> usize {
        let mut live = vec![false; self.circuit.num_qubits()];
        for &q in &self.data {
            live[q] = true;
        }
        let mut count = self.data.len();
        let mut peak = count;
        for op in self.circuit.ops() {
            for &q in op.qubits() {
                if !live[q] {
                    live[q] = true;
                    count += 1;
                }
            }
            peak = peak.max(count);
            if let Operation::MeasureZ { qubit, .. } | Operation::MeasureX { qubit, .. } = op {
                live[*qubit] = false;
                count -= 1;
            }
        }
        peak
    }

    pub fn run(
        &self,
        input: &Input,
        noise: &NoiseModel,
        seed: TrajectorySeed,
        options: &RunOptions<'_>,
    ) -> Result<TrajectoryResult, SimError> {
        noise.check()?;
        if options.forced.is_some() && self.circuit.measurement_count() > 64 {
            return Err(SimError::TooManyMeasurements);
        }
        let cap = max_qubits();
        let d = self.data.len();
        if d > cap {
            return Err(SimError::CapExceeded { needed: d, cap });
        }
        let mut rng = seed.rng();
        let mut errors = Vec::new();
        let mut state = self.initial_state(input, noise, &mut rng, &mut errors)?;

        let nq = self.circuit.num_qubits();
        let mut pos_of: Vec<Option<usize>> = vec![None; nq];
        let mut order: Vec<usize> = self.data.clone();
        for (p, &q) in self.data.iter().enumerate() {
            pos_of[q] = Some(p);
        }
        let mut cbits = vec![false; self.circuit.num_bits()];
        let mut measurement = 0usize;

        for (i, op) in self.circuit.ops().iter().enumerate() {
            if let Some(c) = op.condition() {
                if !c.evaluate(&cbits) {
                    continue;
                }
            }
            // Bring untouched ancillas to life.
            for &q in op.qubits() {
                if pos_of[q].is_none() {
                    if order.len() + 1 > cap {
                        return Err(SimError::CapExceeded {
                            needed: order.len() + 1,
                            cap,
                        });
                    }
                    let p = state.push_zero_qubit();
                    pos_of[q] = Some(p);
                    order.push(q);
                    if !matches!(op, Operation::BellPrep { .. })
                        && apply_bitflip(&mut state, p, noise.p_init, &mut rng)
                    {
                        errors.push(ErrorEvent::InitFlip { qubit: q });
                    }
                }
            }
            let positions: Vec<usize> = op
                .qubits()
                .iter()
                .map(|&q| pos_of[q].expect("live"))
                .collect();

            match op {
                Operation::Gate { kind, .. } => state.apply_gate(*kind, &positions),
                Operation::BellPrep { .. } => {
                    state.apply_h(positions[0]);
                    state.apply_controlled_x(&positions[..1], positions[1]);
                }
                Operation::MeasureZ { qubit, bit } | Operation::MeasureX { qubit, bit } => {
                    let norm_sqr = state.norm_sqr();
                    if (norm_sqr - 1.0).abs() > 1e-6 {
                        return Err(SimError::NormDrift { op: i, norm_sqr });
                    }
                    let p = positions[0];
                    if matches!(op, Operation::MeasureX { .. }) {
                        state.apply_h(p);
                    }
                    let p1 = state.probability_one(p);
                    let outcome = match options.forced {
                        Some(word) => {
                            let forced = (word >> measurement) & 1 == 1;
                            let probability = if forced { p1 } else { 1.0 - p1 };
                            if probability < 1e-12 {
                                return Err(SimError::ImpossibleBranch {
                                    measurement,
                                    op: i,
                                    probability,
                                });
                            }
                            forced
                        }
                        None => rng.random::<f64>() < p1,
                    };
                    measurement += 1;
                    state.collapse_and_remove(p, outcome);
                    order.remove(p);
                    pos_of[*qubit] = None;
                    for (np, &q) in order.iter().enumerate().skip(p) {
                        pos_of[q] = Some(np);
                    }
                    let flip = noise::bernoulli(&mut rng, noise.p_readout);
                    if flip {
                        errors.push(ErrorEvent::ReadoutFlip { op: i, bit: *bit });
                    }
                    cbits[*bit] = outcome ^ flip;
                    continue;
                }
                Operation::ClassicalXor { source, output } => {
                    cbits[*output] = source.evaluate(&cbits);
                    continue;
                }
            }
            for channel in noise_insertion_policy(op, noise) {
                if let Channel::Depolarizing { qubits, p } = channel {
                    if let Some(paulis) = apply_depolarizing(&mut state, &positions, p, &mut rng)? {
                        errors.push(ErrorEvent::Pauli {
                            op: i,
                            qubits,
                            paulis,
                        });
                    }
                }
            }
        }

        let kept = options.keep_state.then(|| state.clone());
        let data_readout = match options.readout {
            Readout::None => None,
            Readout::Z | Readout::QftFrame(_) => {
                if let Some(&q) = self.data.iter().find(|&&q| pos_of[q].is_none()) {
                    return Err(SimError::DataQubitMeasured { qubit: q });
                }
                if let Readout::QftFrame(perm) = options.readout {
                    state.map_low_blocks(d, |block| {
                        let undone: Vec<_> = perm.iter().map(|&y| block[y as usize]).collect();
                        inverse_qft(&undone)
                    });
                }
                let probs = state.low_marginal(d);
                let mut index = sample_index(&probs, rng.random::<f64>()) as u64;
                for position in 0..d {
                    if noise::bernoulli(&mut rng, noise.p_readout) {
                        index ^= 1 << position;
                        errors.push(ErrorEvent::DataReadoutFlip { position });
                    }
                }
                Some(index)
            }
        };

        Ok(TrajectoryResult {
            seed,
            cbits,
            data_readout,
            state: kept,
            live_qubits: order,
            errors,
        })
    }

    fn initial_state(
        &self,
        input: &Input,
        noise: &NoiseModel,
        rng: &mut ChaCha8Rng,
        errors: &mut Vec<ErrorEvent>,
    ) -> Result<StateVector, SimError> {
        let d = self.data.len();
        let mut flip_index = |index: u64, rng: &mut ChaCha8Rng| -> Result<u64, SimError> {
            if d < 64 && index >> d != 0 {
                return Err(SimError::InputOutOfRange { index, qubits: d });
            }
            let mut index = index;
            for (p, &q) in self.data.iter().enumerate() {
                if noise::bernoulli(rng, noise.p_init) {
                    index ^= 1 << p;
                    errors.push(ErrorEvent::InitFlip { qubit: q });
                }
            }
            Ok(index)
        };
        match input {
            Input::Basis(i) => Ok(StateVector::basis(d, flip_index(*i, rng)?)),
            Input::Qft(i) => {
                let i = flip_index(*i, rng)?;
                Ok(qft_prepare(i, d).expect("index checked"))
            }
            Input::State(s) => {
                if s.num_qubits() != d {
                    return Err(SimError::InputDimension {
                        expected: d,
                        got: s.num_qubits(),
                    });
                }
                let mut s = s.clone();
                for (p, &q) in self.data.iter().enumerate() {
                    if apply_bitflip(&mut s, p, noise.p_init, rng) {
                        errors.push(ErrorEvent::InitFlip { qubit: q });
                    }
                }
                Ok(s)
            }
        }
    }
}

/// Smallest index whose cumulative probability exceeds `u`.
fn sample_index(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if target < acc {
                return i;
            }
        }
    }
    last
}

/// Runs one trajectory with Z readout of the data qubits and the final state kept.
pub fn run_trajectory(
    circuit: &Circuit,
    input: &Input,
    noise: &NoiseModel,
    seed: TrajectorySeed,
) -> Result<TrajectoryResult, SimError> {
    Program::new(circuit)?.run(
        input,
        noise,
        seed,
        &RunOptions {
            keep_state: true,
            ..RunOptions::default()
        },
    )
}

/// Number of data qubits, i.e. qubits that are not ancillas.
pub fn data_width(circuit: &Circuit) -> usize {
    circuit
        .qubits()
        .iter()
        .filter(|q| q.kind != QubitKind::Ancilla)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, Condition, GateKind};
    use crate::decomposer::{decompose_mct, defer_corrections};

    fn seed(stream: u64) -> TrajectorySeed {
        TrajectorySeed::new(42, stream)
    }

    #[test]
    fn mct5_noiseless_examples() {
        let c = defer_corrections(&decompose_mct(4).unwrap()).unwrap();
        let noise = NoiseModel::noiseless();
        for s in 0..20 {
            let r = run_trajectory(&c, &Input::Basis(0b01111), &noise, seed(s)).unwrap();
            assert_eq!(r.data_readout, Some(0b11111));
            let r = run_trajectory(&c, &Input::Basis(0b01110), &noise, seed(s)).unwrap();
            assert_eq!(r.data_readout, Some(0b01110));
            assert_eq!(r.live_qubits, vec![0, 1, 2, 3, 4]);
            assert!(r.errors.is_empty());
        }
    }

    #[test]
    fn same_seed_same_result() {
        let c = decompose_mct(5).unwrap();
        let noise = NoiseModel::hierarchy(0.1, 0.1).unwrap();
        let a = run_trajectory(&c, &Input::Qft(17), &noise, seed(3)).unwrap();
        let b = run_trajectory(&c, &Input::Qft(17), &noise, seed(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forced_branches_pick_outcomes() {
        let mut b = CircuitBuilder::new("coin");
        let q = b.add_qubit(QubitKind::Target);
        b.gate(GateKind::H, &[q]);
        let m = b.measure_z(q);
        let c = b.finish();
        let p = Program::new(&c).unwrap();
        for forced in [0u64, 1] {
            let opts = RunOptions {
                forced: Some(forced),
                readout: Readout::None,
                keep_state: false,
            };
            let r = p
                .run(&Input::Basis(0), &NoiseModel::noiseless(), seed(0), &opts)
                .unwrap();
            assert_eq!(r.cbits[m], forced == 1);
        }
        let mut b = CircuitBuilder::new("zero");
        let q = b.add_qubit(QubitKind::Target);
        b.measure_z(q);
        let c = b.finish();
        let opts = RunOptions {
            forced: Some(1),
            readout: Readout::None,
            keep_state: false,
        };
        let err = Program::new(&c).unwrap().run(
            &Input::Basis(0),
            &NoiseModel::noiseless(),
            seed(0),
            &opts,
        );
        assert!(matches!(
            err,
            Err(SimError::ImpossibleBranch { measurement: 0, .. })
        ));
    }

    #[test]
    fn unfired_conditional_gets_no_noise() {
        let mut b = CircuitBuilder::new("cond");
        let q = b.add_qubits(QubitKind::Target, 2);
        let m = b.measure_z(q[0]);
        b.conditional(GateKind::X, &q[1..], Condition::on(m));
        let c = b.finish();
        let noise = NoiseModel::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let opts = RunOptions {
            forced: None,
            readout: Readout::None,
            keep_state: false,
        };
        let r = Program::new(&c)
            .unwrap()
            .run(&Input::Basis(0), &noise, seed(0), &opts)
            .unwrap();
        assert!(r.errors.is_empty());
        let r = Program::new(&c)
            .unwrap()
            .run(&Input::Basis(1), &noise, seed(0), &opts)
            .unwrap();
        assert_eq!(r.errors.len(), 1);
    }

    #[test]
    fn input_checks() {
        let c = decompose_mct(2).unwrap();
        let noise = NoiseModel::noiseless();
        assert!(matches!(
            run_trajectory(&c, &Input::Basis(8), &noise, seed(0)),
            Err(SimError::InputOutOfRange {
                index: 8,
                qubits: 3
            })
        ));
        assert!(matches!(
            run_trajectory(&c, &Input::State(StateVector::basis(2, 0)), &noise, seed(0)),
            Err(SimError::InputDimension {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn peak_liveness() {
        let c = decompose_mct(7).unwrap();
        let p = Program::new(&c).unwrap();
        assert!(p.peak_live_qubits() <= c.num_qubits());
        assert!(p.peak_live_qubits() > 8);
    }
}
