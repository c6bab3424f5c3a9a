//! Circuits built from MCT gates: the +1 adder, a single-word QROM lookup, a
//! conjunction neuron and a pattern-matching decision rule.
//!
//! Every builder takes a [`Strategy`]. Under [`Strategy::Teleport`] each MCT
//! with at least two controls is expanded with fresh ancillas and the whole
//! circuit then goes through [`defer_corrections`].

use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{toffoli_depth, Circuit, CircuitBuilder, GateKind, QubitKind};
use crate::decomposer::{defer_corrections, expand_mct, DecomposeError, DeferError};
use crate::schedule::ceil_log2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Each MCT stays a single gate.
    Unitary,
    Teleport,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unitary" => Ok(Strategy::Unitary),
            "teleport" => Ok(Strategy::Teleport),
            other => Err(format!(
                "unknown strategy `{other}` (expected `unitary` or `teleport`)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AppError {
    #[error("adder register needs at least 2 qubits, got {0}")]
    RegisterTooSmall(usize),
    #[error("{what} must have {expected} bits, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} must have at least {min} bits, got {got}")]
    TooShort {
        what: &'static str,
        min: usize,
        got: usize,
    },
    #[error(transparent)]
    Bits(#[from] BitstringError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Defer(#[from] DeferError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitstringError {
    #[error("empty bitstring")]
    Empty,
    #[error("bitstring longer than {max} characters")]
    TooLong { max: usize },
    #[error("invalid character {found:?} at position {position}; only 0 and 1 are allowed")]
    Invalid { position: usize, found: char },
}

/// Longest accepted bitstring.
pub const MAX_BITSTRING: usize = 64;

/// Parses a string of `0`/`1` characters; character `j` becomes element `j`.
pub fn parse_bitstring(s: &str) -> Result<Vec<bool>, BitstringError> {
    if s.is_empty() {
        return Err(BitstringError::Empty);
    }
    let mut bits = Vec::new();
    for (position, found) in s.chars().enumerate() {
        if position >= MAX_BITSTRING {
            return Err(BitstringError::TooLong { max: MAX_BITSTRING });
        }
        match found {
            '0' => bits.push(false),
            '1' => bits.push(true),
            _ => return Err(BitstringError::Invalid { position, found }),
        }
    }
    Ok(bits)
}

fn emit_mct(
    b: &mut CircuitBuilder,
    controls: &[usize],
    target: usize,
    strategy: Strategy,
) -> Result<(), AppError> {
    match strategy {
        Strategy::Teleport if controls.len() >= 2 => expand_mct(b, controls, target)?,
        _ => {
            b.mct(controls, target);
        }
    }
    Ok(())
}

fn finish(b: CircuitBuilder, strategy: Strategy) -> Result<Circuit, AppError> {
    let c = b.finish();
    Ok(match strategy {
        Strategy::Unitary => c,
        Strategy::Teleport => defer_corrections(&c)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdderSpec {
    pub q: usize,
    pub strategy: Strategy,
}

/// `|i> -> |i + 1 mod 2^q>` on a `q`-qubit register (qubit `p` is bit `p`),
/// as the cascade `MCT_q, MCT_{q-1}, ..., CX, X` with the most significant
/// target first.
pub fn build_adder(spec: AdderSpec) -> Result<Circuit, AppError> {
    if spec.q < 2 {
        return Err(AppError::RegisterTooSmall(spec.q));
    }
    let mut b = CircuitBuilder::new(format!("adder{}", spec.q));
    let reg = b.add_qubits(QubitKind::Target, spec.q);
    for j in (1..spec.q).rev() {
        emit_mct(&mut b, &reg[..j], reg[j], spec.strategy)?;
    }
    b.gate(GateKind::X, &reg[..1]);
    finish(b, spec.strategy)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AdderDepthRow {
    pub q: usize,
    pub teleportation: u64,
    /// Sum of the per-MCT depth lower bounds; an optimistic proxy.
    pub dutta_proxy: u64,
    /// No closed form is available.
    pub vedral: Option<u64>,
}

/// `sum_{j=2}^{q-1} ceil(log2 j)`: the depth bound of every MCT in the cascade.
pub fn dutta_adder_proxy(q: usize) -> u64 {
    (2..q).map(|j| ceil_log2(j) as u64).sum()
}

pub fn adder_depth_table(
    qs: impl IntoIterator<Item = usize>,
) -> Result<Vec<AdderDepthRow>, AppError> {
    qs.into_iter()
        .map(|q| {
            let c = build_adder(AdderSpec {
                q,
                strategy: Strategy::Teleport,
            })?;
            Ok(AdderDepthRow {
                q,
                teleportation: toffoli_depth(&c).expect("builder output is valid") as u64,
                dutta_proxy: dutta_adder_proxy(q),
                vedral: None,
            })
        })
        .collect()
}

/// One stored word behind one address. Qubits in order
/// `r, a_0.., s, d_0..`; address bit `j` is compared with `a_j` and word bit
/// `j` is written to `d_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QromWordSpec {
    pub address: Vec<bool>,
    pub word: Vec<bool>,
    pub strategy: Strategy,
}

pub struct QromQubits {
    pub r: usize,
    pub address: Vec<usize>,
    pub s: usize,
    pub data: Vec<usize>,
}

/// Qubit indices of [`build_qrom_word`] for the given widths.
pub fn qrom_qubits(address_bits: usize, word_bits: usize) -> QromQubits {
    QromQubits {
        r: 0,
        address: (1..=address_bits).collect(),
        s: address_bits + 1,
        data: (address_bits + 2..address_bits + 2 + word_bits).collect(),
    }
}

/// Flips `d_j` for every 1 in the word iff `r = 1` and the address register
/// holds the spec's address; `s` is computed and uncomputed around the copies.
pub fn build_qrom_word(spec: &QromWordSpec) -> Result<Circuit, AppError> {
    if spec.address.is_empty() {
        return Err(AppError::TooShort {
            what: "address",
            min: 1,
            got: 0,
        });
    }
    if spec.word.is_empty() {
        return Err(AppError::TooShort {
            what: "word",
            min: 1,
            got: 0,
        });
    }
    let mut b = CircuitBuilder::new("qrom-word");
    let r = b.add_qubit(QubitKind::Control);
    let a = b.add_qubits(QubitKind::Control, spec.address.len());
    let s = b.add_qubit(QubitKind::Target);
    let d = b.add_qubits(QubitKind::Target, spec.word.len());
    let zeros: Vec<usize> = a
        .iter()
        .zip(&spec.address)
        .filter(|(_, &bit)| !bit)
        .map(|(&q, _)| q)
        .collect();
    let mut controls = vec![r];
    controls.extend(&a);

    for &q in &zeros {
        b.gate(GateKind::X, &[q]);
    }
    emit_mct(&mut b, &controls, s, spec.strategy)?;
    for (&q, _) in d.iter().zip(&spec.word).filter(|(_, &bit)| bit) {
        b.gate(GateKind::Cx, &[s, q]);
    }
    emit_mct(&mut b, &controls, s, spec.strategy)?;
    for &q in &zeros {
        b.gate(GateKind::X, &[q]);
    }
    finish(b, spec.strategy)
}

/// `|x, y> -> |x, y XOR AND(x)>` over `features` inputs.
pub fn build_neuron(features: usize, strategy: Strategy) -> Result<Circuit, AppError> {
    if features < 2 {
        return Err(AppError::TooShort {
            what: "feature register",
            min: 2,
            got: features,
        });
    }
    let mut b = CircuitBuilder::new(format!("neuron{features}"));
    let x = b.add_qubits(QubitKind::Control, features);
    let y = b.add_qubit(QubitKind::Target);
    emit_mct(&mut b, &x, y, strategy)?;
    finish(b, strategy)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSpec {
    /// Feature values for which the class qubit flips; bit `j` is feature `f_j`.
    pub pattern: Vec<bool>,
    pub strategy: Strategy,
}

/// X on each feature whose pattern bit is 0, MCT onto the class qubit, X undo.
pub fn build_decision_rule(spec: &RuleSpec) -> Result<Circuit, AppError> {
    if spec.pattern.len() < 2 {
        return Err(AppError::TooShort {
            what: "pattern",
            min: 2,
            got: spec.pattern.len(),
        });
    }
    let mut b = CircuitBuilder::new("decision-rule");
    let f = b.add_qubits(QubitKind::Control, spec.pattern.len());
    let c = b.add_qubit(QubitKind::Target);
    let zeros: Vec<usize> = f
        .iter()
        .zip(&spec.pattern)
        .filter(|(_, &bit)| !bit)
        .map(|(&q, _)| q)
        .collect();
    for &q in &zeros {
        b.gate(GateKind::X, &[q]);
    }
    emit_mct(&mut b, &f, c, spec.strategy)?;
    for &q in &zeros {
        b.gate(GateKind::X, &[q]);
    }
    finish(b, spec.strategy)
}

/// `expected[i] = i + 1 mod 2^q`.
pub fn adder_permutation(q: usize) -> Vec<u64> {
    let mask = (1u64 << q) - 1;
    (0..=mask).map(|i| (i + 1) & mask).collect()
}

/// Basis action of [`build_qrom_word`] on all of its qubits: `d ^= word` when
/// `s XOR (r AND a == address)` is 1.
pub fn qrom_permutation(address: &[bool], word: &[bool]) -> Vec<u64> {
    let q = qrom_qubits(address.len(), word.len());
    let width = 2 + address.len() + word.len();
    let addr: u64 = address
        .iter()
        .enumerate()
        .map(|(j, &b)| u64::from(b) << j)
        .sum();
    let flip: u64 = word
        .iter()
        .enumerate()
        .map(|(j, &b)| u64::from(b) << q.data[j])
        .sum();
    (0..1u64 << width)
        .map(|x| {
            let r = x & 1 == 1;
            let a = (x >> 1) & ((1 << address.len()) - 1);
            let s = (x >> q.s) & 1 == 1;
            if s ^ (r && a == addr) {
                x ^ flip
            } else {
                x
            }
        })
        .collect()
}

/// The class (target) bit is the last data qubit; it flips iff the features
/// equal `pattern`. The neuron is the all-ones pattern.
pub fn pattern_permutation(pattern: &[bool]) -> Vec<u64> {
    let f = pattern.len();
    let want: u64 = pattern
        .iter()
        .enumerate()
        .map(|(j, &b)| u64::from(b) << j)
        .sum();
    (0..1u64 << (f + 1))
        .map(|x| {
            if x & ((1 << f) - 1) == want {
                x ^ (1 << f)
            } else {
                x
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{toffoli_count, validate, Operation};

    #[test]
    fn bitstrings() {
        assert_eq!(parse_bitstring("101"), Ok(vec![true, false, true]));
        assert_eq!(parse_bitstring(""), Err(BitstringError::Empty));
        assert_eq!(
            parse_bitstring("10a"),
            Err(BitstringError::Invalid {
                position: 2,
                found: 'a'
            })
        );
        assert_eq!(
            parse_bitstring(&"1".repeat(65)),
            Err(BitstringError::TooLong { max: 64 })
        );
        assert!(parse_bitstring(&"1".repeat(64)).is_ok());
    }

    #[test]
    fn adder_depths() {
        let d = |q| {
            toffoli_depth(
                &build_adder(AdderSpec {
                    q,
                    strategy: Strategy::Teleport,
                })
                .unwrap(),
            )
            .unwrap()
        };
        assert_eq!(d(3), 1);
        assert_eq!(d(4), 2);
        assert_eq!(dutta_adder_proxy(4), 3);
        for row in adder_depth_table(3..=10).unwrap() {
            assert_eq!(row.teleportation, row.q as u64 - 2);
            assert!(row.teleportation <= row.dutta_proxy);
        }
    }

    #[test]
    fn adder_structures() {
        let u = build_adder(AdderSpec {
            q: 4,
            strategy: Strategy::Unitary,
        })
        .unwrap();
        let kinds: Vec<_> = u
            .ops()
            .iter()
            .map(|op| match op {
                Operation::Gate { kind, .. } => *kind,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(
            kinds,
            vec![GateKind::Mcx, GateKind::Ccx, GateKind::Cx, GateKind::X]
        );
        assert!(matches!(
            build_adder(AdderSpec {
                q: 1,
                strategy: Strategy::Unitary
            }),
            Err(AppError::RegisterTooSmall(1))
        ));
        let t = build_adder(AdderSpec {
            q: 5,
            strategy: Strategy::Teleport,
        })
        .unwrap();
        assert!(validate(&t).is_empty());
        assert_eq!(t.data_qubits(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn qrom_layout() {
        let spec = QromWordSpec {
            address: vec![false; 3],
            word: vec![true, false, true],
            strategy: Strategy::Teleport,
        };
        let c = build_qrom_word(&spec).unwrap();
        assert!(validate(&c).is_empty());
        assert_eq!(c.data_qubits(), (0..8).collect::<Vec<_>>());
        assert_eq!(toffoli_count(&c), 6);
        let q = qrom_qubits(3, 3);
        assert_eq!(
            (q.r, q.address, q.s, q.data),
            (0, vec![1, 2, 3], 4, vec![5, 6, 7])
        );
    }

    #[test]
    fn small_inputs_rejected() {
        assert!(build_neuron(1, Strategy::Unitary).is_err());
        assert!(build_decision_rule(&RuleSpec {
            pattern: vec![true],
            strategy: Strategy::Unitary
        })
        .is_err());
        assert!(build_qrom_word(&QromWordSpec {
            address: vec![],
            word: vec![true],
            strategy: Strategy::Unitary
        })
        .is_err());
    }
}
