//! Text format for circuits.
//!
//! A JSON document with a `header` (`version`, `name`, `qubits`, `cbits` and an
//! optional `layout`) and an ordered `ops` array of `{op, qubits, cbit?,
//! condition?}` records. Unknown fields are rejected. [`serialize`] emits one
//! canonical layout (one record per line), so `serialize(deserialize(s)) == s`
//! for any `s` it produced.
//!
//! `xor` records carry their inputs in `condition`: the written bit equals
//! `XOR(terms) ^ parity`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BitOrigin, Circuit, ClassicalBit, Condition, GateKind, Operation, QubitRef, Source};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

impl ParseError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRecord {
    header: HeaderRecord,
    ops: Vec<OpRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderRecord {
    version: u32,
    name: String,
    qubits: Vec<QubitRef>,
    cbits: Vec<ClassicalBit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layout: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpRecord {
    op: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cbit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    condition: Option<ConditionRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionRecord {
    terms: Vec<usize>,
    parity: u8,
}

impl From<&Condition> for ConditionRecord {
    fn from(c: &Condition) -> Self {
        Self {
            terms: c.terms().to_vec(),
            parity: u8::from(c.parity()),
        }
    }
}

fn op_record(op: &Operation) -> OpRecord {
    match op {
        Operation::Gate {
            kind,
            qubits,
            condition,
        } => OpRecord {
            op: kind.name().to_owned(),
            qubits: qubits.clone(),
            cbit: None,
            condition: condition.as_ref().map(ConditionRecord::from),
        },
        Operation::BellPrep { qubits } => OpRecord {
            op: "bell".into(),
            qubits: qubits.to_vec(),
            cbit: None,
            condition: None,
        },
        Operation::MeasureZ { qubit, bit } => OpRecord {
            op: "mz".into(),
            qubits: vec![*qubit],
            cbit: Some(*bit),
            condition: None,
        },
        Operation::MeasureX { qubit, bit } => OpRecord {
            op: "mx".into(),
            qubits: vec![*qubit],
            cbit: Some(*bit),
            condition: None,
        },
        Operation::ClassicalXor { source, output } => OpRecord {
            op: "xor".into(),
            qubits: vec![],
            cbit: Some(*output),
            condition: Some(source.into()),
        },
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records always serialize")
}

fn write_array<T: Serialize>(out: &mut String, key: &str, items: &[T], indent: &str) {
    if items.is_empty() {
        let _ = write!(out, "{indent}\"{key}\": []");
        return;
    }
    let _ = writeln!(out, "{indent}\"{key}\": [");
    for (i, item) in items.iter().enumerate() {
        let sep = if i + 1 < items.len() { "," } else { "" };
        let _ = writeln!(out, "{indent}  {}{sep}", json(item));
    }
    let _ = write!(out, "{indent}]");
}

/// Canonical text form of a circuit.
pub fn serialize(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("{\n  \"header\": {\n");
    let _ = writeln!(out, "    \"version\": {FORMAT_VERSION},");
    let _ = writeln!(out, "    \"name\": {},", json(&circuit.name()));
    write_array(&mut out, "qubits", circuit.qubits(), "    ");
    out.push_str(",\n");
    write_array(&mut out, "cbits", circuit.bits(), "    ");
    if let Some(layout) = circuit.layout() {
        let _ = write!(out, ",\n    \"layout\": {}", json(&layout));
    }
    out.push_str("\n  },\n");
    let ops: Vec<OpRecord> = circuit.ops().iter().map(op_record).collect();
    write_array(&mut out, "ops", &ops, "  ");
    out.push_str("\n}\n");
    out
}

fn parse_op(i: usize, rec: OpRecord) -> Result<Operation, ParseError> {
    let at = |f: &str| format!("ops[{i}].{f}");
    let condition = rec.condition.map(|c| match c.parity {
        0 | 1 => Ok(Condition::new(c.terms, c.parity == 1)),
        p => Err(ParseError::field(
            at("condition.parity"),
            format!("parity must be 0 or 1, got {p}"),
        )),
    });
    let condition = condition.transpose()?;

    let single_qubit = |qubits: &[usize]| match qubits {
        [q] => Ok(*q),
        _ => Err(ParseError::field(
            at("qubits"),
            format!("`{}` takes exactly one qubit", rec.op),
        )),
    };
    let need_bit = || {
        rec.cbit
            .ok_or_else(|| ParseError::field(at("cbit"), format!("`{}` requires a cbit", rec.op)))
    };
    let no_bit = || match rec.cbit {
        Some(_) => Err(ParseError::field(
            at("cbit"),
            format!("`{}` does not write a cbit", rec.op),
        )),
        None => Ok(()),
    };
    let no_condition = |c: &Option<Condition>| match c {
        Some(_) => Err(ParseError::field(
            at("condition"),
            format!("`{}` cannot be conditioned", rec.op),
        )),
        None => Ok(()),
    };

    match rec.op.as_str() {
        "bell" => {
            no_bit()?;
            no_condition(&condition)?;
            match rec.qubits.as_slice() {
                [a, b] => Ok(Operation::BellPrep { qubits: [*a, *b] }),
                _ => Err(ParseError::field(
                    at("qubits"),
                    "`bell` takes exactly two qubits",
                )),
            }
        }
        "mz" | "mx" => {
            no_condition(&condition)?;
            let qubit = single_qubit(&rec.qubits)?;
            let bit = need_bit()?;
            Ok(if rec.op == "mz" {
                Operation::MeasureZ { qubit, bit }
            } else {
                Operation::MeasureX { qubit, bit }
            })
        }
        "xor" => {
            if !rec.qubits.is_empty() {
                return Err(ParseError::field(at("qubits"), "`xor` acts on no qubits"));
            }
            let output = need_bit()?;
            let source = condition
                .ok_or_else(|| ParseError::field(at("condition"), "`xor` requires its inputs"))?;
            Ok(Operation::ClassicalXor { source, output })
        }
        name => {
            let kind = GateKind::from_name(name).ok_or_else(|| {
                ParseError::field(at("op"), format!("unknown operation `{name}`"))
            })?;
            no_bit()?;
            Ok(Operation::Gate {
                kind,
                qubits: rec.qubits,
                condition,
            })
        }
    }
}

/// Parses the text form. Structural problems are reported here; semantic
/// invariants are left to [`super::validate`].
pub fn deserialize(text: &str) -> Result<Circuit, ParseError> {
    let file: FileRecord = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let header = file.header;
    if header.version != FORMAT_VERSION {
        return Err(ParseError::field(
            "header.version",
            format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                header.version
            ),
        ));
    }
    if let Some(layout) = &header.layout {
        let mut seen = vec![false; layout.len()];
        let is_permutation = layout.len() == header.qubits.len()
            && layout
                .iter()
                .all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true));
        if !is_permutation {
            return Err(ParseError::field(
                "header.layout",
                "must be a permutation of the qubit indices",
            ));
        }
    }
    let ops = file
        .ops
        .into_iter()
        .enumerate()
        .map(|(i, rec)| parse_op(i, rec))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Circuit::from_parts(
        header.name,
        header.qubits,
        header.cbits,
        ops,
        Source::Loaded,
        header.layout,
    ))
}

impl BitOrigin {
    pub fn name(self) -> &'static str {
        match self {
            BitOrigin::ZMeasurement => "z-measurement",
            BitOrigin::XMeasurement => "x-measurement",
            BitOrigin::DerivedXor => "derived-xor",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, QubitKind};

    fn sample() -> Circuit {
        let mut b = CircuitBuilder::new("sample");
        let c = b.add_qubits(QubitKind::Control, 2);
        let t = b.add_qubit(QubitKind::Target);
        let (e, f) = b.bell_pair();
        b.gate(GateKind::Ccx, &[c[0], c[1], e]);
        let z = b.measure_z(e);
        b.conditional(GateKind::X, &[f], Condition::on(z));
        b.gate(GateKind::Cx, &[f, t]);
        let x = b.measure_x(f);
        let d = b.add_bit(BitOrigin::DerivedXor);
        b.push(Operation::ClassicalXor {
            source: Condition::new([x], true),
            output: d,
        });
        b.conditional(GateKind::Cz, &c, Condition::on(d));
        b.finish()
    }

    #[test]
    fn round_trip_is_identity() {
        let c = sample();
        let text = serialize(&c);
        let back = deserialize(&text).unwrap();
        assert_eq!(back.ops(), c.ops());
        assert_eq!(back.qubits(), c.qubits());
        assert_eq!(back.bits(), c.bits());
        assert_eq!(back.source(), Source::Loaded);
        assert_eq!(serialize(&back), text);
    }

    #[test]
    fn canonical_text_shape() {
        let text = serialize(&sample());
        assert!(text
            .starts_with("{\n  \"header\": {\n    \"version\": 1,\n    \"name\": \"sample\",\n"));
        assert!(text.contains(
            "\n    {\"op\":\"x\",\"qubits\":[4],\"condition\":{\"terms\":[0],\"parity\":0}},\n"
        ));
        assert!(text.contains(
            "{\"op\":\"xor\",\"qubits\":[],\"cbit\":2,\"condition\":{\"terms\":[1],\"parity\":1}}"
        ));
        assert!(text.contains("{\"index\":1,\"origin\":\"x-measurement\"}"));
        assert!(text.ends_with("]\n}\n"));
    }

    #[test]
    fn unknown_gate_kind_is_named() {
        let text = serialize(&sample()).replace("\"op\":\"ccx\"", "\"op\":\"toffoli\"");
        let err = deserialize(&text).unwrap_err();
        assert_eq!(
            err,
            ParseError::Field {
                field: "ops[1].op".into(),
                message: "unknown operation `toffoli`".into()
            }
        );
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text =
            serialize(&sample()).replace("\"version\": 1,", "\"version\": 1, \"author\": \"x\",");
        let err = deserialize(&text).unwrap_err();
        match err {
            ParseError::Syntax { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("unknown field `author`"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn structural_errors_have_field_paths() {
        let cases = [
            (
                "\"op\":\"bell\",\"qubits\":[3,4]",
                "\"op\":\"bell\",\"qubits\":[3]",
                "ops[0].qubits",
            ),
            (
                "\"op\":\"mz\",\"qubits\":[3],\"cbit\":0",
                "\"op\":\"mz\",\"qubits\":[3]",
                "ops[2].cbit",
            ),
            (
                "\"terms\":[1],\"parity\":1",
                "\"terms\":[1],\"parity\":2",
                "ops[6].condition.parity",
            ),
            ("\"version\": 1", "\"version\": 2", "header.version"),
        ];
        for (from, to, field) in cases {
            let text = serialize(&sample()).replace(from, to);
            match deserialize(&text).unwrap_err() {
                ParseError::Field { field: f, .. } => assert_eq!(f, field),
                other => panic!("{from}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn layout_must_be_permutation() {
        let text = serialize(&sample()).replace(
            "\n  },\n  \"ops\"",
            ",\n    \"layout\": [0,0,1,2,3]\n  },\n  \"ops\"",
        );
        match deserialize(&text).unwrap_err() {
            ParseError::Field { field, .. } => assert_eq!(field, "header.layout"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
