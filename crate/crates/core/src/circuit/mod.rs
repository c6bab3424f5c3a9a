//! Circuit intermediate representation with classical feedforward.
//!
//! A [`Circuit`] is an ordered list of [`Operation`]s over a qubit registry and
//! a classical-bit registry. Gates may carry a [`Condition`]: an XOR of earlier
//! classical bits plus a constant parity. Measured qubits are never reused.
//!
//! The registry order of the non-ancilla qubits defines the *data order* used by
//! simulation inputs and oracles; the `index` of each qubit is its wire label.
//! Relabelling wires (see [`crate::decomposer::neighbor_layout`]) changes the
//! indices but never the registry order.

mod metrics;
mod serial;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub(crate) use metrics::toffoli_supports;
pub use metrics::{resource_counts, toffoli_count, toffoli_depth, toffoli_layers, ResourceCounts};
pub use serial::{deserialize, serialize, ParseError, FORMAT_VERSION};
pub use validate::{ensure_valid, validate, InvalidCircuit, ValidationError};

/// Role of a qubit inside a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitKind {
    Control,
    Target,
    Ancilla,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitRef {
    pub index: usize,
    pub kind: QubitKind,
}

/// How a classical bit gets its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BitOrigin {
    ZMeasurement,
    XMeasurement,
    DerivedXor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalBit {
    pub index: usize,
    pub origin: BitOrigin,
}

/// XOR-of-bits predicate. A conditioned gate fires iff `XOR(terms) ^ parity == 1`.
///
/// Terms are kept sorted and free of duplicates, so two conditions describing the
/// same predicate compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Condition {
    terms: Vec<usize>,
    parity: bool,
}

impl Condition {
    /// Fires iff `bit` is 1.
    pub fn on(bit: usize) -> Self {
        Self {
            terms: vec![bit],
            parity: false,
        }
    }

    pub fn new(terms: impl IntoIterator<Item = usize>, parity: bool) -> Self {
        // Repeated terms cancel pairwise under XOR.
        let mut set = BTreeSet::new();
        for t in terms {
            if !set.remove(&t) {
                set.insert(t);
            }
        }
        Self {
            terms: set.into_iter().collect(),
            parity,
        }
    }

    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    pub fn parity(&self) -> bool {
        self.parity
    }

    /// Predicate that fires iff exactly one of `self` and `other` fires.
    pub fn xor(&self, other: &Condition) -> Condition {
        Condition::new(
            self.terms.iter().chain(other.terms.iter()).copied(),
            self.parity ^ other.parity,
        )
    }

    pub fn evaluate(&self, bits: &[bool]) -> bool {
        self.terms.iter().fold(self.parity, |acc, &t| acc ^ bits[t])
    }
}

/// Gate kinds of the working set. `Mcx`/`Mcz` carry three or more controls and
/// only appear in unitary reference circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Cx,
    Cz,
    Ccx,
    Ccz,
    Mcx,
    Mcz,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Ccx,
        GateKind::Ccz,
        GateKind::Mcx,
        GateKind::Mcz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Ccx => "ccx",
            GateKind::Ccz => "ccz",
            GateKind::Mcx => "mcx",
            GateKind::Mcz => "mcz",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether `n` qubit arguments are acceptable for this kind.
    pub fn accepts_arity(self, n: usize) -> bool {
        match self {
            GateKind::X | GateKind::Y | GateKind::Z | GateKind::H | GateKind::S | GateKind::Sdg => {
                n == 1
            }
            GateKind::Cx | GateKind::Cz => n == 2,
            GateKind::Ccx | GateKind::Ccz => n == 3,
            GateKind::Mcx | GateKind::Mcz => n >= 4,
        }
    }

    pub fn is_toffoli(self) -> bool {
        matches!(self, GateKind::Ccx | GateKind::Ccz)
    }

    /// X-type target with `n - 1` controls for an `n`-qubit MCT.
    pub fn controlled_x(controls: usize) -> GateKind {
        match controls {
            0 => GateKind::X,
            1 => GateKind::Cx,
            2 => GateKind::Ccx,
            _ => GateKind::Mcx,
        }
    }

    /// Phase flip on the all-ones subspace of `qubits` qubits.
    pub fn multi_z(qubits: usize) -> GateKind {
        match qubits {
            1 => GateKind::Z,
            2 => GateKind::Cz,
            3 => GateKind::Ccz,
            _ => GateKind::Mcz,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One step of a circuit. Controlled gates list their controls first and the
/// target last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operation {
    Gate {
        kind: GateKind,
        qubits: Vec<usize>,
        condition: Option<Condition>,
    },
    /// Prepares `(|00> + |11>)/sqrt(2)` on two fresh ancillas.
    BellPrep {
        qubits: [usize; 2],
    },
    MeasureZ {
        qubit: usize,
        bit: usize,
    },
    MeasureX {
        qubit: usize,
        bit: usize,
    },
    /// `output = XOR(source.terms) ^ source.parity`.
    ClassicalXor {
        source: Condition,
        output: usize,
    },
}

impl Operation {
    pub fn gate(kind: GateKind, qubits: Vec<usize>) -> Self {
        Operation::Gate {
            kind,
            qubits,
            condition: None,
        }
    }

    pub fn conditional(kind: GateKind, qubits: Vec<usize>, condition: Condition) -> Self {
        Operation::Gate {
            kind,
            qubits,
            condition: Some(condition),
        }
    }

    pub fn qubits(&self) -> &[usize] {
        match self {
            Operation::Gate { qubits, .. } => qubits,
            Operation::BellPrep { qubits } => qubits,
            Operation::MeasureZ { qubit, .. } | Operation::MeasureX { qubit, .. } => {
                std::slice::from_ref(qubit)
            }
            Operation::ClassicalXor { .. } => &[],
        }
    }

    /// Classical bits read by this operation.
    pub fn reads(&self) -> &[usize] {
        match self {
            Operation::Gate {
                condition: Some(c), ..
            } => c.terms(),
            Operation::ClassicalXor { source, .. } => source.terms(),
            _ => &[],
        }
    }

    /// Classical bit written by this operation.
    pub fn writes(&self) -> Option<usize> {
        match self {
            Operation::MeasureZ { bit, .. } | Operation::MeasureX { bit, .. } => Some(*bit),
            Operation::ClassicalXor { output, .. } => Some(*output),
            _ => None,
        }
    }

    pub fn is_toffoli(&self) -> bool {
        matches!(self, Operation::Gate { kind, .. } if kind.is_toffoli())
    }

    pub fn condition(&self) -> Option<&Condition> {
        match self {
            Operation::Gate { condition, .. } => condition.as_ref(),
            _ => None,
        }
    }

    pub(crate) fn map_qubits(&mut self, f: impl Fn(usize) -> usize) {
        match self {
            Operation::Gate { qubits, .. } => qubits.iter_mut().for_each(|q| *q = f(*q)),
            Operation::BellPrep { qubits } => qubits.iter_mut().for_each(|q| *q = f(*q)),
            Operation::MeasureZ { qubit, .. } | Operation::MeasureX { qubit, .. } => {
                *qubit = f(*qubit)
            }
            Operation::ClassicalXor { .. } => {}
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operation::Gate {
                kind,
                qubits,
                condition,
            } => {
                write!(f, "{kind}{qubits:?}")?;
                if let Some(c) = condition {
                    write!(f, " if {c}")?;
                }
                Ok(())
            }
            Operation::BellPrep { qubits } => write!(f, "bell{qubits:?}"),
            Operation::MeasureZ { qubit, bit } => write!(f, "mz[{qubit}] -> c{bit}"),
            Operation::MeasureX { qubit, bit } => write!(f, "mx[{qubit}] -> c{bit}"),
            Operation::ClassicalXor { source, output } => write!(f, "c{output} = {source}"),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms.iter().map(|t| format!("c{t}")).collect();
        write!(f, "{}", terms.join("^"))?;
        if self.parity {
            write!(f, "^1")?;
        }
        Ok(())
    }
}

/// Where a circuit came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Source {
    #[default]
    Synthesized,
    Loaded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    qubits: Vec<QubitRef>,
    bits: Vec<ClassicalBit>,
    ops: Vec<Operation>,
    source: Source,
    layout: Option<Vec<usize>>,
}

impl Circuit {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn qubits(&self) -> &[QubitRef] {
        &self.qubits
    }

    pub fn bits(&self) -> &[ClassicalBit] {
        &self.bits
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Wire permutation applied by layout, `layout[old_index] = new_index`.
    pub fn layout(&self) -> Option<&[usize]> {
        self.layout.as_deref()
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn num_bits(&self) -> usize {
        self.bits.len()
    }

    /// Wire indices of non-ancilla qubits in data order.
    pub fn data_qubits(&self) -> Vec<usize> {
        self.qubits
            .iter()
            .filter(|q| q.kind != QubitKind::Ancilla)
            .map(|q| q.index)
            .collect()
    }

    pub fn kind_of(&self, index: usize) -> Option<QubitKind> {
        self.qubits
            .iter()
            .find(|q| q.index == index)
            .map(|q| q.kind)
    }

    pub fn measurement_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, Operation::MeasureZ { .. } | Operation::MeasureX { .. }))
            .count()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub(crate) fn from_parts(
        name: String,
        qubits: Vec<QubitRef>,
        bits: Vec<ClassicalBit>,
        ops: Vec<Operation>,
        source: Source,
        layout: Option<Vec<usize>>,
    ) -> Self {
        Self {
            name,
            qubits,
            bits,
            ops,
            source,
            layout,
        }
    }

    pub(crate) fn into_parts(self) -> CircuitParts {
        CircuitParts {
            name: self.name,
            qubits: self.qubits,
            bits: self.bits,
            ops: self.ops,
            source: self.source,
            layout: self.layout,
        }
    }
}

pub(crate) struct CircuitParts {
    pub name: String,
    pub qubits: Vec<QubitRef>,
    pub bits: Vec<ClassicalBit>,
    pub ops: Vec<Operation>,
    pub source: Source,
    pub layout: Option<Vec<usize>>,
}

/// Incremental circuit construction. Qubit indices are handed out densely in
/// allocation order.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    name: String,
    qubits: Vec<QubitRef>,
    bits: Vec<ClassicalBit>,
    ops: Vec<Operation>,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_qubit(&mut self, kind: QubitKind) -> usize {
        let index = self.qubits.len();
        self.qubits.push(QubitRef { index, kind });
        index
    }

    pub fn add_qubits(&mut self, kind: QubitKind, count: usize) -> Vec<usize> {
        (0..count).map(|_| self.add_qubit(kind)).collect()
    }

    pub fn add_bit(&mut self, origin: BitOrigin) -> usize {
        let index = self.bits.len();
        self.bits.push(ClassicalBit { index, origin });
        index
    }

    pub fn push(&mut self, op: Operation) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn gate(&mut self, kind: GateKind, qubits: &[usize]) -> &mut Self {
        self.push(Operation::gate(kind, qubits.to_vec()))
    }

    pub fn conditional(
        &mut self,
        kind: GateKind,
        qubits: &[usize],
        condition: Condition,
    ) -> &mut Self {
        self.push(Operation::conditional(kind, qubits.to_vec(), condition))
    }

    /// Allocates two ancillas and prepares them as a Bell pair.
    pub fn bell_pair(&mut self) -> (usize, usize) {
        let a = self.add_qubit(QubitKind::Ancilla);
        let b = self.add_qubit(QubitKind::Ancilla);
        self.push(Operation::BellPrep { qubits: [a, b] });
        (a, b)
    }

    pub fn measure_z(&mut self, qubit: usize) -> usize {
        let bit = self.add_bit(BitOrigin::ZMeasurement);
        self.push(Operation::MeasureZ { qubit, bit });
        bit
    }

    pub fn measure_x(&mut self, qubit: usize) -> usize {
        let bit = self.add_bit(BitOrigin::XMeasurement);
        self.push(Operation::MeasureX { qubit, bit });
        bit
    }

    /// Unitary multi-controlled X, lowered to the narrowest gate kind.
    pub fn mct(&mut self, controls: &[usize], target: usize) -> &mut Self {
        let mut qubits = controls.to_vec();
        qubits.push(target);
        self.gate(GateKind::controlled_x(controls.len()), &qubits)
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn finish(self) -> Circuit {
        Circuit {
            name: self.name,
            qubits: self.qubits,
            bits: self.bits,
            ops: self.ops,
            source: Source::Synthesized,
            layout: None,
        }
    }
}
