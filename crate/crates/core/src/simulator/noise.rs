use rand::Rng;
use thiserror::Error;

use super::state::{Pauli, StateVector};
use crate::circuit::{GateKind, Operation};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum NoiseError {
    #[error("{name} = {value} is not a probability")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("depolarizing channel on {0} qubits; expected 1 to 3")]
    Width(usize),
}

/// Error probabilities of the six channels.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct NoiseModel {
    pub p_toffoli: f64,
    pub p_2q: f64,
    pub p_1q: f64,
    pub p_init: f64,
    pub p_readout: f64,
    pub p_epr: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn new(
        p_toffoli: f64,
        p_2q: f64,
        p_1q: f64,
        p_init: f64,
        p_readout: f64,
        p_epr: f64,
    ) -> Result<Self, NoiseError> {
        let model = Self {
            p_toffoli,
            p_2q,
            p_1q,
            p_init,
            p_readout,
            p_epr,
        };
        model.check()?;
        Ok(model)
    }

    /// Rates tied to the Toffoli rate: two-qubit gates and readout one order
    /// of magnitude lower, single-qubit gates and initialization two orders lower.
    pub fn hierarchy(p_toffoli: f64, p_epr: f64) -> Result<Self, NoiseError> {
        let p_2q = p_toffoli / 10.0;
        let p_1q = p_toffoli / 100.0;
        Self::new(p_toffoli, p_2q, p_1q, p_1q, p_2q, p_epr)
    }

    pub fn check(&self) -> Result<(), NoiseError> {
        for (name, value) in [
            ("p_toffoli", self.p_toffoli),
            ("p_2q", self.p_2q),
            ("p_1q", self.p_1q),
            ("p_init", self.p_init),
            ("p_readout", self.p_readout),
            ("p_epr", self.p_epr),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(NoiseError::OutOfRange { name, value });
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        *self == Self::default()
    }
}

/// A noise channel attached to an operation.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    /// Depolarizing on the listed circuit qubits after the operation.
    Depolarizing { qubits: Vec<usize>, p: f64 },
    /// Flip of the recorded outcome bit.
    Readout { bit: usize, p: f64 },
}

/// Channels that follow `op` when it physically executes. A conditional gate
/// that does not fire executes nothing and receives no channel; multi-controlled
/// gates with three or more controls are ideal reference gates. Initialization
/// flips are applied by the runner when a qubit first comes alive.
pub fn noise_insertion_policy(op: &Operation, noise: &NoiseModel) -> Vec<Channel> {
    let depol = |p: f64| {
        vec![Channel::Depolarizing {
            qubits: op.qubits().to_vec(),
            p,
        }]
    };
    match op {
        Operation::Gate { kind, .. } => match kind {
            GateKind::Ccx | GateKind::Ccz => depol(noise.p_toffoli),
            GateKind::Cx | GateKind::Cz => depol(noise.p_2q),
            GateKind::Mcx | GateKind::Mcz => Vec::new(),
            _ => depol(noise.p_1q),
        },
        Operation::BellPrep { .. } => depol(noise.p_epr),
        Operation::MeasureZ { bit, .. } | Operation::MeasureX { bit, .. } => {
            vec![Channel::Readout {
                bit: *bit,
                p: noise.p_readout,
            }]
        }
        Operation::ClassicalXor { .. } => Vec::new(),
    }
}

/// Draws `true` with probability `p`. No randomness is consumed when `p` is 0
/// so that noiseless runs only draw for measurements.
pub(crate) fn bernoulli<R: Rng>(rng: &mut R, p: f64) -> bool {
    p > 0.0 && (p >= 1.0 || rng.random::<f64>() < p)
}

/// Trajectory unravelling of the `k`-qubit depolarizing channel: with
/// probability `p` a Pauli string drawn uniformly from all `4^k` strings
/// (identity included) is applied. Returns the applied string, if any.
pub fn apply_depolarizing<R: Rng>(
    state: &mut StateVector,
    positions: &[usize],
    p: f64,
    rng: &mut R,
) -> Result<Option<Vec<Pauli>>, NoiseError> {
    if positions.is_empty() || positions.len() > 3 {
        return Err(NoiseError::Width(positions.len()));
    }
    if !bernoulli(rng, p) {
        return Ok(None);
    }
    let draw = rng.random_range(0..4usize.pow(positions.len() as u32));
    let paulis: Vec<Pauli> = (0..positions.len())
        .map(|j| Pauli::ALL[(draw >> (2 * j)) & 3])
        .collect();
    for (&pos, &pauli) in positions.iter().zip(&paulis) {
        state.apply_pauli(pauli, pos);
    }
    Ok(Some(paulis))
}

/// Applies X at `pos` with probability `p`; returns whether it did.
pub fn apply_bitflip<R: Rng>(state: &mut StateVector, pos: usize, p: f64, rng: &mut R) -> bool {
    let flip = bernoulli(rng, p);
    if flip {
        state.apply_x(pos);
    }
    flip
}
