use thiserror::Error;

use crate::circuit::{ensure_valid, toffoli_supports, Circuit, InvalidCircuit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error(transparent)]
    Invalid(#[from] InvalidCircuit),
    #[error("Toffoli supports {first:?} and {second:?} overlap, so both cannot be consecutive")]
    Infeasible {
        first: Vec<usize>,
        second: Vec<usize>,
    },
}

/// Relabels qubits so that every Toffoli acts on three consecutive indices.
///
/// Each distinct Toffoli support receives the next three labels in the order
/// the supports first appear; all other qubits follow in their original order.
/// The registry order is kept and `layout[old] = new` is recorded.
pub fn neighbor_layout(circuit: &Circuit) -> Result<Circuit, LayoutError> {
    ensure_valid(circuit)?;
    let supports = toffoli_supports(circuit);
    for (a, first) in supports.iter().enumerate() {
        for second in &supports[a + 1..] {
            if first.iter().any(|q| second.contains(q)) {
                return Err(LayoutError::Infeasible {
                    first: first.clone(),
                    second: second.clone(),
                });
            }
        }
    }

    let nq = circuit.num_qubits();
    let mut map: Vec<Option<usize>> = vec![None; nq];
    let mut next = 0;
    for &q in supports.iter().flatten() {
        map[q] = Some(next);
        next += 1;
    }
    for slot in map.iter_mut().filter(|m| m.is_none()) {
        *slot = Some(next);
        next += 1;
    }
    let map: Vec<usize> = map
        .into_iter()
        .map(|m| m.expect("every qubit labelled"))
        .collect();

    let mut parts = circuit.clone().into_parts();
    for q in &mut parts.qubits {
        q.index = map[q.index];
    }
    for op in &mut parts.ops {
        op.map_qubits(|q| map[q]);
    }
    // Compose with an earlier relabelling so the layout always maps original
    // wire labels.
    let layout = match parts.layout {
        Some(prev) => prev.iter().map(|&mid| map[mid]).collect(),
        None => map,
    };
    Ok(Circuit::from_parts(
        parts.name,
        parts.qubits,
        parts.bits,
        parts.ops,
        parts.source,
        Some(layout),
    ))
}
