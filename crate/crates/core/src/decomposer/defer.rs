use std::collections::HashSet;

use thiserror::Error;

use super::rules::{rewrite_rule_table, RewriteRule, RuleOp, Slot};
use crate::circuit::{
    ensure_valid, toffoli_layers, BitOrigin, Circuit, ClassicalBit, Condition, GateKind,
    InvalidCircuit, Operation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeferError {
    #[error(transparent)]
    Invalid(#[from] InvalidCircuit),
    #[error("rewrite did not reach a fixpoint within {limit} sweeps")]
    SweepLimit { limit: usize },
    #[error("Toffoli at op {toffoli} still depends on conditional op {blocking} ({description})")]
    Blocked {
        toffoli: usize,
        blocking: usize,
        description: String,
    },
}

/// Pushes classically conditioned X/Z gates to the right with the rules of
/// [`rewrite_rule_table`] until no rule applies. The result is rejected if
/// conditional operations still lengthen the Toffoli critical path.
///
/// Circuits without conditional gates come back unchanged.
pub fn defer_corrections(circuit: &Circuit) -> Result<Circuit, DeferError> {
    ensure_valid(circuit)?;
    let table = rewrite_rule_table();
    let mut parts = circuit.clone().into_parts();
    let limit = 10 * parts.ops.len().max(1);

    let mut sweeps = 0;
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < parts.ops.len() {
            if let Some((anchor, rhs)) = try_rewrite(&parts.ops, i, &table, &mut parts.bits) {
                parts.ops.remove(i);
                parts.ops.splice(anchor - 1..anchor, rhs);
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            break;
        }
        sweeps += 1;
        if sweeps >= limit {
            return Err(DeferError::SweepLimit { limit });
        }
    }

    let out = Circuit::from_parts(
        parts.name,
        parts.qubits,
        parts.bits,
        parts.ops,
        parts.source,
        parts.layout,
    );
    check_unblocked(&out)?;
    Ok(out)
}

/// Index of the next op after `i` that touches `qubit`.
fn next_on_qubit(ops: &[Operation], i: usize, qubit: usize) -> Option<usize> {
    (i + 1..ops.len()).find(|&j| ops[j].qubits().contains(&qubit))
}

fn try_rewrite(
    ops: &[Operation],
    i: usize,
    table: &[RewriteRule],
    bits: &mut Vec<ClassicalBit>,
) -> Option<(usize, Vec<Operation>)> {
    let Operation::Gate {
        kind: kind @ (GateKind::X | GateKind::Z),
        qubits,
        condition: Some(cond),
    } = &ops[i]
    else {
        return None;
    };
    let q = qubits[0];
    let j = next_on_qubit(ops, i, q)?;
    let anchor = &ops[j];

    let (binding, anchor_pattern): ([Option<usize>; 3], RuleOp) = match anchor {
        Operation::Gate {
            kind: GateKind::Ccx,
            qubits: aq,
            condition: None,
        } => (
            [Some(aq[0]), Some(aq[1]), Some(aq[2])],
            RuleOp::Gate(GateKind::Ccx, vec![Slot::A, Slot::B, Slot::T]),
        ),
        Operation::MeasureZ { qubit, .. } => {
            ([None, None, Some(*qubit)], RuleOp::MeasureZ(Slot::T))
        }
        Operation::MeasureX { qubit, .. } => {
            ([None, None, Some(*qubit)], RuleOp::MeasureX(Slot::T))
        }
        _ => return None,
    };
    let slot_of_q = [Slot::A, Slot::B, Slot::T]
        .into_iter()
        .find(|s| binding[*s as usize] == Some(q))?;
    let rule = table.iter().find(|r| {
        r.lhs[0] == RuleOp::Conditional(*kind, vec![slot_of_q]) && r.lhs[1] == anchor_pattern
    })?;

    let at = |s: Slot| binding[s as usize].expect("slot bound by anchor");
    let mut rhs = Vec::with_capacity(rule.rhs.len() + 1);
    for op in &rule.rhs {
        match op {
            RuleOp::Gate(k, slots) => {
                rhs.push(Operation::gate(*k, slots.iter().map(|s| at(*s)).collect()))
            }
            RuleOp::Conditional(k, slots) => rhs.push(Operation::conditional(
                *k,
                slots.iter().map(|s| at(*s)).collect(),
                cond.clone(),
            )),
            RuleOp::MeasureZ(_) | RuleOp::MeasureX(_) => rhs.push(anchor.clone()),
            RuleOp::MeasureZFlipped(s) | RuleOp::MeasureXFlipped(s) => {
                let (origin, recorded) = match anchor {
                    Operation::MeasureZ { bit, .. } => (BitOrigin::ZMeasurement, *bit),
                    Operation::MeasureX { bit, .. } => (BitOrigin::XMeasurement, *bit),
                    _ => unreachable!("flipped measurement anchored on {anchor}"),
                };
                let raw = bits.len();
                bits.push(ClassicalBit { index: raw, origin });
                bits[recorded].origin = BitOrigin::DerivedXor;
                let qubit = at(*s);
                rhs.push(match origin {
                    BitOrigin::ZMeasurement => Operation::MeasureZ { qubit, bit: raw },
                    _ => Operation::MeasureX { qubit, bit: raw },
                });
                let source =
                    Condition::new(cond.terms().iter().copied().chain([raw]), cond.parity());
                rhs.push(Operation::ClassicalXor {
                    source,
                    output: recorded,
                });
            }
        }
    }
    Some((j, rhs))
}

/// Fails if conditional operations still raise the level of some Toffoli above
/// the level forced by the unconditional operations alone.
fn check_unblocked(circuit: &Circuit) -> Result<(), DeferError> {
    let with = toffoli_layers(circuit)?;
    let without = levels_ignoring_conditionals(circuit);
    let Some(toffoli) =
        (0..with.len()).find(|&i| circuit.ops()[i].is_toffoli() && with[i] > without[i])
    else {
        return Ok(());
    };
    let blocking = latest_conditional_in_cone(circuit.ops(), toffoli).unwrap_or(toffoli);
    Err(DeferError::Blocked {
        toffoli,
        blocking,
        description: circuit.ops()[blocking].to_string(),
    })
}

/// Toffoli levels when conditional gates are treated as absent.
fn levels_ignoring_conditionals(circuit: &Circuit) -> Vec<usize> {
    let mut qubit_level = vec![0usize; circuit.num_qubits()];
    let mut bit_level = vec![0usize; circuit.num_bits()];
    let mut levels = Vec::with_capacity(circuit.ops().len());
    for op in circuit.ops() {
        if op.condition().is_some() {
            levels.push(0);
            continue;
        }
        let incoming = op
            .qubits()
            .iter()
            .map(|&q| qubit_level[q])
            .chain(op.reads().iter().map(|&b| bit_level[b]))
            .max()
            .unwrap_or(0);
        let level = incoming + usize::from(op.is_toffoli());
        for &q in op.qubits() {
            qubit_level[q] = level;
        }
        if let Some(b) = op.writes() {
            bit_level[b] = level;
        }
        levels.push(level);
    }
    levels
}

/// Walks the dependency cone of op `at` backwards and returns the first
/// conditional operation met.
fn latest_conditional_in_cone(ops: &[Operation], at: usize) -> Option<usize> {
    let mut qubits: HashSet<usize> = ops[at].qubits().iter().copied().collect();
    let mut bits: HashSet<usize> = HashSet::new();
    for j in (0..at).rev() {
        let op = &ops[j];
        let touches = op.qubits().iter().any(|q| qubits.contains(q))
            || op.writes().is_some_and(|b| bits.contains(&b));
        if !touches {
            continue;
        }
        if op.condition().is_some() {
            return Some(j);
        }
        qubits.extend(op.qubits());
        bits.extend(op.reads());
    }
    None
}

/// Merges runs of conditional gates of the same kind on the same qubits that
/// are adjacent on those qubits. The merged gate fires on the XOR of the two
/// conditions; a merged condition that is constantly 0 drops the gate and one
/// that is constantly 1 leaves it unconditional.
pub fn merge_conditionals(circuit: &Circuit) -> Result<Circuit, InvalidCircuit> {
    ensure_valid(circuit)?;
    let mut parts = circuit.clone().into_parts();
    let ops = &mut parts.ops;
    let mut i = 0;
    while i < ops.len() {
        let merged = match &ops[i] {
            Operation::Gate {
                kind,
                qubits,
                condition: Some(c),
            } => {
                let next = (i + 1..ops.len())
                    .find(|&j| ops[j].qubits().iter().any(|q| qubits.contains(q)));
                next.and_then(|j| match &ops[j] {
                    Operation::Gate {
                        kind: k2,
                        qubits: q2,
                        condition: Some(c2),
                    } if k2 == kind && same_support(*kind, qubits, q2) => {
                        Some((j, *kind, q2.clone(), c.xor(c2)))
                    }
                    _ => None,
                })
            }
            _ => None,
        };
        match merged {
            Some((j, kind, qubits, cond)) => {
                let replacement = if !cond.terms().is_empty() {
                    Some(Operation::conditional(kind, qubits, cond))
                } else if cond.parity() {
                    Some(Operation::gate(kind, qubits))
                } else {
                    None
                };
                match replacement {
                    Some(op) => ops[j] = op,
                    None => {
                        ops.remove(j);
                    }
                }
                ops.remove(i);
            }
            None => i += 1,
        }
    }
    Ok(Circuit::from_parts(
        parts.name,
        parts.qubits,
        parts.bits,
        parts.ops,
        parts.source,
        parts.layout,
    ))
}

fn same_support(kind: GateKind, a: &[usize], b: &[usize]) -> bool {
    match kind {
        // Diagonal gates are symmetric in their qubits.
        GateKind::Z | GateKind::Cz | GateKind::Ccz | GateKind::Mcz => {
            let (mut a, mut b) = (a.to_vec(), b.to_vec());
            a.sort_unstable();
            b.sort_unstable();
            a == b
        }
        _ => a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{toffoli_depth, validate, CircuitBuilder, QubitKind};
    use crate::decomposer::decompose_mct;

    #[test]
    fn deferred_circuits_have_unit_depth() {
        for n in 2..=40 {
            let c = defer_corrections(&decompose_mct(n).unwrap()).unwrap();
            assert!(validate(&c).is_empty(), "n = {n}: {:?}", validate(&c));
            assert_eq!(toffoli_depth(&c).unwrap(), 1, "n = {n}");
        }
    }

    #[test]
    fn remaining_ops_are_measurements_xors_and_conditionals() {
        let c = defer_corrections(&decompose_mct(7).unwrap()).unwrap();
        for op in c.ops() {
            match op {
                Operation::Gate {
                    kind,
                    condition: None,
                    ..
                } => assert!(kind.is_toffoli(), "{op}"),
                Operation::Gate {
                    kind,
                    condition: Some(_),
                    ..
                } => {
                    assert!(
                        matches!(
                            kind,
                            GateKind::X | GateKind::Z | GateKind::Cx | GateKind::Cz
                        ),
                        "{op}"
                    )
                }
                _ => {}
            }
        }
    }

    #[test]
    fn conditional_free_circuit_is_unchanged() {
        let mut b = CircuitBuilder::new("plain");
        let q = b.add_qubits(QubitKind::Control, 4);
        b.gate(GateKind::Ccx, &q[..3])
            .gate(GateKind::Ccx, &q[1..])
            .gate(GateKind::H, &q[..1]);
        let c = b.finish();
        assert_eq!(defer_corrections(&c).unwrap(), c);
    }

    #[test]
    fn unmovable_conditional_is_reported() {
        let mut b = CircuitBuilder::new("blocked");
        let q = b.add_qubits(QubitKind::Control, 6);
        b.gate(GateKind::Ccx, &q[3..]);
        let m = b.measure_z(q[5]);
        b.conditional(GateKind::H, &q[..1], Condition::on(m));
        b.gate(GateKind::Ccx, &q[..3]);
        match defer_corrections(&b.finish()) {
            Err(DeferError::Blocked {
                toffoli: 3,
                blocking: 2,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conditional_that_adds_no_depth_is_accepted() {
        // Both Toffolis share controls, so depth 2 is forced anyway.
        let mut b = CircuitBuilder::new("chained");
        let q = b.add_qubits(QubitKind::Control, 5);
        let m = b.measure_z(q[4]);
        b.gate(GateKind::Ccx, &q[..3]);
        b.conditional(GateKind::Cz, &q[..2], Condition::on(m));
        b.gate(GateKind::Ccx, &[q[0], q[1], q[3]]);
        let c = b.finish();
        assert_eq!(defer_corrections(&c).unwrap(), c);
    }

    #[test]
    fn x_before_measure_becomes_derived_bit() {
        let mut b = CircuitBuilder::new("flip");
        let q = b.add_qubits(QubitKind::Control, 2);
        let m = b.measure_z(q[1]);
        b.conditional(GateKind::X, &q[..1], Condition::on(m));
        let out = b.measure_z(q[0]);
        let c = defer_corrections(&b.finish()).unwrap();
        assert!(validate(&c).is_empty());
        assert_eq!(c.bits()[out].origin, BitOrigin::DerivedXor);
        assert_eq!(
            c.ops().last(),
            Some(&Operation::ClassicalXor {
                source: Condition::new([m, 2], false),
                output: out
            })
        );
    }

    #[test]
    fn merge_cancels_and_combines() {
        let mut b = CircuitBuilder::new("merge");
        let q = b.add_qubits(QubitKind::Control, 3);
        let m0 = b.measure_z(q[2]);
        b.conditional(GateKind::X, &q[..1], Condition::on(m0));
        b.conditional(GateKind::X, &q[..1], Condition::on(m0));
        b.conditional(GateKind::Cz, &[q[0], q[1]], Condition::on(m0));
        b.conditional(GateKind::Cz, &[q[1], q[0]], Condition::new([m0], true));
        let c = merge_conditionals(&b.finish()).unwrap();
        assert_eq!(c.ops().len(), 2);
        assert_eq!(c.ops()[1], Operation::gate(GateKind::Cz, vec![q[1], q[0]]));
    }
}
