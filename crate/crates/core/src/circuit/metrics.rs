use std::collections::HashSet;

use super::validate::{ensure_valid, InvalidCircuit};
use super::{Circuit, Operation, QubitKind};

/// Toffoli level of every operation: the number of CCX/CCZ gates on the longest
/// dependency chain ending at (and including) that operation.
///
/// Dependencies are shared qubits, measurement outcomes and condition bits. Ops
/// are visited in order, which is ASAP layering with ties broken by index.
pub fn toffoli_layers(circuit: &Circuit) -> Result<Vec<usize>, InvalidCircuit> {
    ensure_valid(circuit)?;
    let mut qubit_level = vec![0usize; circuit.num_qubits()];
    let mut bit_level = vec![0usize; circuit.num_bits()];
    let mut levels = Vec::with_capacity(circuit.ops().len());

    for op in circuit.ops() {
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
    Ok(levels)
}

pub fn toffoli_depth(circuit: &Circuit) -> Result<usize, InvalidCircuit> {
    Ok(toffoli_layers(circuit)?.into_iter().max().unwrap_or(0))
}

pub fn toffoli_count(circuit: &Circuit) -> usize {
    circuit.ops().iter().filter(|op| op.is_toffoli()).count()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResourceCounts {
    pub ancillas: usize,
    pub bell_pairs: usize,
    pub measurements_z: usize,
    pub measurements_x: usize,
    pub conditional_gates: usize,
}

impl ResourceCounts {
    pub fn measurements(&self) -> usize {
        self.measurements_z + self.measurements_x
    }
}

pub fn resource_counts(circuit: &Circuit) -> ResourceCounts {
    let mut counts = ResourceCounts {
        ancillas: circuit
            .qubits()
            .iter()
            .filter(|q| q.kind == QubitKind::Ancilla)
            .count(),
        ..Default::default()
    };
    for op in circuit.ops() {
        match op {
            Operation::BellPrep { .. } => counts.bell_pairs += 1,
            Operation::MeasureZ { .. } => counts.measurements_z += 1,
            Operation::MeasureX { .. } => counts.measurements_x += 1,
            Operation::Gate {
                condition: Some(_), ..
            } => counts.conditional_gates += 1,
            _ => {}
        }
    }
    counts
}

/// Distinct qubit supports of the Toffoli gates, in first-use order.
pub(crate) fn toffoli_supports(circuit: &Circuit) -> Vec<Vec<usize>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for op in circuit.ops().iter().filter(|op| op.is_toffoli()) {
        let mut key = op.qubits().to_vec();
        key.sort_unstable();
        if seen.insert(key) {
            out.push(op.qubits().to_vec());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, Condition, GateKind};

    #[test]
    fn single_and_parallel_toffolis() {
        let mut b = CircuitBuilder::new("one");
        let q = b.add_qubits(QubitKind::Control, 6);
        b.gate(GateKind::Ccx, &q[..3]);
        let one = b.clone().finish();
        assert_eq!(toffoli_depth(&one).unwrap(), 1);
        b.gate(GateKind::Ccz, &q[3..]);
        let two = b.finish();
        assert_eq!(toffoli_depth(&two).unwrap(), 1);
        assert_eq!(toffoli_count(&two), 2);
    }

    #[test]
    fn empty_circuit_has_no_toffolis() {
        let c = CircuitBuilder::new("empty").finish();
        assert_eq!(toffoli_depth(&c).unwrap(), 0);
        assert_eq!(toffoli_count(&c), 0);
    }

    #[test]
    fn condition_bits_carry_dependencies() {
        // The second Toffoli shares no qubit with the first but is conditioned on
        // an outcome downstream of it.
        let mut b = CircuitBuilder::new("cond");
        let q = b.add_qubits(QubitKind::Control, 6);
        b.gate(GateKind::Ccx, &q[..3]);
        let m = b.measure_z(q[2]);
        b.conditional(GateKind::X, &[q[3]], Condition::on(m));
        b.gate(GateKind::Ccx, &q[3..]);
        let c = b.finish();
        assert_eq!(toffoli_layers(&c).unwrap(), vec![1, 1, 1, 2]);
        assert_eq!(toffoli_depth(&c).unwrap(), 2);
    }

    #[test]
    fn invalid_circuit_has_no_depth() {
        let mut b = CircuitBuilder::new("bad");
        let q = b.add_qubit(QubitKind::Target);
        b.measure_z(q);
        b.gate(GateKind::X, &[q]);
        assert!(toffoli_depth(&b.finish()).is_err());
    }

    #[test]
    fn counts_by_category() {
        let mut b = CircuitBuilder::new("counts");
        let c = b.add_qubit(QubitKind::Control);
        let (e, f) = b.bell_pair();
        let z = b.measure_z(e);
        b.conditional(GateKind::X, &[f], Condition::on(z));
        b.measure_x(f);
        b.gate(GateKind::X, &[c]);
        let r = resource_counts(&b.finish());
        assert_eq!(
            r,
            ResourceCounts {
                ancillas: 2,
                bell_pairs: 1,
                measurements_z: 1,
                measurements_x: 1,
                conditional_gates: 1
            }
        );
        assert_eq!(r.measurements(), 2);
    }
}
