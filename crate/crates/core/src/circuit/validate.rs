use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{BitOrigin, Circuit, Operation, QubitKind};

/// A single invariant violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("qubit registry: index {index} appears more than once")]
    DuplicateQubitIndex { index: usize },
    #[error("qubit registry: indices must cover 0..{count}, found {index}")]
    QubitIndexOutOfRange { index: usize, count: usize },
    #[error("bit registry: entry {position} has index {index}")]
    BitIndexMismatch { position: usize, index: usize },
    #[error("op {op}: unknown qubit {qubit}")]
    UnknownQubit { op: usize, qubit: usize },
    #[error("op {op}: unknown classical bit {bit}")]
    UnknownBit { op: usize, bit: usize },
    #[error("op {op}: {kind} takes a different number of qubits than {got}")]
    Arity { op: usize, kind: String, got: usize },
    #[error("op {op}: qubit {qubit} given twice")]
    RepeatedQubit { op: usize, qubit: usize },
    #[error("op {op}: use-after-measure of qubit {qubit}")]
    UseAfterMeasure { op: usize, qubit: usize },
    #[error("op {op}: dangling condition bit {bit} (not yet written)")]
    DanglingConditionBit { op: usize, bit: usize },
    #[error("op {op}: empty condition")]
    EmptyCondition { op: usize },
    #[error("op {op}: classical bit {bit} written twice")]
    BitWrittenTwice { op: usize, bit: usize },
    #[error("op {op}: bit {bit} has origin {declared:?} but is written by a different operation")]
    OriginMismatch {
        op: usize,
        bit: usize,
        declared: BitOrigin,
    },
    #[error("op {op}: bell preparation on qubit {qubit}, which is not a fresh ancilla")]
    StaleBellQubit { op: usize, qubit: usize },
    #[error("classical bit {bit} is never written")]
    UnwrittenBit { bit: usize },
}

/// A circuit that failed [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid circuit ({} violation(s)); first: {}", .0.len(), .0[0])]
pub struct InvalidCircuit(pub Vec<ValidationError>);

/// Runs [`validate`] and turns a non-empty error list into [`InvalidCircuit`].
pub fn ensure_valid(circuit: &Circuit) -> Result<(), InvalidCircuit> {
    let errors = validate(circuit);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(InvalidCircuit(errors))
    }
}

/// Returns every invariant violation; an empty list means the circuit is valid.
pub fn validate(circuit: &Circuit) -> Vec<ValidationError> {
    let mut errors = Vec::new();
    let nq = circuit.num_qubits();
    let nb = circuit.num_bits();

    let mut kinds: HashMap<usize, QubitKind> = HashMap::new();
    for q in circuit.qubits() {
        if q.index >= nq {
            errors.push(ValidationError::QubitIndexOutOfRange {
                index: q.index,
                count: nq,
            });
        }
        if kinds.insert(q.index, q.kind).is_some() {
            errors.push(ValidationError::DuplicateQubitIndex { index: q.index });
        }
    }
    for (position, b) in circuit.bits().iter().enumerate() {
        if b.index != position {
            errors.push(ValidationError::BitIndexMismatch {
                position,
                index: b.index,
            });
        }
    }

    let mut touched: HashSet<usize> = HashSet::new();
    let mut measured: HashSet<usize> = HashSet::new();
    let mut written = vec![false; nb];

    for (i, op) in circuit.ops().iter().enumerate() {
        let qubits = op.qubits();

        if let Operation::Gate {
            kind, condition, ..
        } = op
        {
            if !kind.accepts_arity(qubits.len()) {
                errors.push(ValidationError::Arity {
                    op: i,
                    kind: kind.to_string(),
                    got: qubits.len(),
                });
            }
            if let Some(c) = condition {
                if c.terms().is_empty() {
                    errors.push(ValidationError::EmptyCondition { op: i });
                }
            }
        }
        if let Operation::ClassicalXor { source, .. } = op {
            if source.terms().is_empty() {
                errors.push(ValidationError::EmptyCondition { op: i });
            }
        }

        let mut seen = HashSet::new();
        for &q in qubits {
            if !kinds.contains_key(&q) {
                errors.push(ValidationError::UnknownQubit { op: i, qubit: q });
                continue;
            }
            if !seen.insert(q) {
                errors.push(ValidationError::RepeatedQubit { op: i, qubit: q });
            }
            if measured.contains(&q) {
                errors.push(ValidationError::UseAfterMeasure { op: i, qubit: q });
            }
        }

        if let Operation::BellPrep { qubits } = op {
            for &q in qubits {
                let fresh = kinds.get(&q) == Some(&QubitKind::Ancilla) && !touched.contains(&q);
                if kinds.contains_key(&q) && !fresh {
                    errors.push(ValidationError::StaleBellQubit { op: i, qubit: q });
                }
            }
        }

        for &b in op.reads() {
            if b >= nb {
                errors.push(ValidationError::UnknownBit { op: i, bit: b });
            } else if !written[b] {
                errors.push(ValidationError::DanglingConditionBit { op: i, bit: b });
            }
        }

        if let Some(b) = op.writes() {
            if b >= nb {
                errors.push(ValidationError::UnknownBit { op: i, bit: b });
            } else {
                if written[b] {
                    errors.push(ValidationError::BitWrittenTwice { op: i, bit: b });
                }
                written[b] = true;
                let expected = match op {
                    Operation::MeasureZ { .. } => BitOrigin::ZMeasurement,
                    Operation::MeasureX { .. } => BitOrigin::XMeasurement,
                    _ => BitOrigin::DerivedXor,
                };
                let declared = circuit.bits()[b].origin;
                if declared != expected {
                    errors.push(ValidationError::OriginMismatch {
                        op: i,
                        bit: b,
                        declared,
                    });
                }
            }
        }

        touched.extend(qubits.iter().copied());
        if let Operation::MeasureZ { qubit, .. } | Operation::MeasureX { qubit, .. } = op {
            measured.insert(*qubit);
        }
    }

    for (bit, w) in written.iter().enumerate() {
        if !w {
            errors.push(ValidationError::UnwrittenBit { bit });
        }
    }
    errors
}
