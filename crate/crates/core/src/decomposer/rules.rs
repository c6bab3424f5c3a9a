//! Commutation rules that push a classically conditioned Pauli past the next
//! operation on its qubit.
//!
//! A rule's left-hand side is always `[conditional P, anchor]` and its
//! right-hand side starts with the anchor. Every conditional op on the
//! right-hand side carries the same condition as the moved Pauli. Rules are
//! checked against dense matrices in [`crate::fidelity::certify_rule`].

use crate::circuit::GateKind;

/// Pattern variable for a qubit. For Toffoli anchors `A`, `B` are the controls
/// and `T` the target; measurement rules only use `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    A,
    B,
    T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOp {
    Conditional(GateKind, Vec<Slot>),
    Gate(GateKind, Vec<Slot>),
    MeasureZ(Slot),
    MeasureX(Slot),
    /// Measurement whose recorded outcome is the raw result XOR the condition.
    MeasureZFlipped(Slot),
    MeasureXFlipped(Slot),
}

impl RuleOp {
    pub fn slots(&self) -> Vec<Slot> {
        match self {
            RuleOp::Conditional(_, s) | RuleOp::Gate(_, s) => s.clone(),
            RuleOp::MeasureZ(s)
            | RuleOp::MeasureX(s)
            | RuleOp::MeasureZFlipped(s)
            | RuleOp::MeasureXFlipped(s) => {
                vec![*s]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub name: &'static str,
    pub lhs: [RuleOp; 2],
    pub rhs: Vec<RuleOp>,
}

impl RewriteRule {
    /// Qubits touched by the rule; every rule reads one condition.
    pub fn support_size(&self) -> usize {
        let mut slots: Vec<Slot> = self
            .lhs
            .iter()
            .chain(&self.rhs)
            .flat_map(RuleOp::slots)
            .collect();
        slots.sort_by_key(|s| *s as u8);
        slots.dedup();
        slots.len()
    }

    /// The conditional Pauli being moved.
    pub fn pauli(&self) -> (GateKind, Slot) {
        match &self.lhs[0] {
            RuleOp::Conditional(kind, slots) => (*kind, slots[0]),
            other => unreachable!("rule lhs starts with {other:?}"),
        }
    }
}

pub fn rewrite_rule_table() -> Vec<RewriteRule> {
    use GateKind::{Ccx, Cx, Cz, X, Z};
    use RuleOp::{Conditional as C, Gate as G};
    use Slot::{A, B, T};

    let ccx = || G(Ccx, vec![A, B, T]);
    vec![
        RewriteRule {
            name: "x-on-first-control",
            lhs: [C(X, vec![A]), ccx()],
            rhs: vec![ccx(), C(Cx, vec![B, T]), C(X, vec![A])],
        },
        RewriteRule {
            name: "x-on-second-control",
            lhs: [C(X, vec![B]), ccx()],
            rhs: vec![ccx(), C(Cx, vec![A, T]), C(X, vec![B])],
        },
        RewriteRule {
            name: "x-on-target",
            lhs: [C(X, vec![T]), ccx()],
            rhs: vec![ccx(), C(X, vec![T])],
        },
        RewriteRule {
            name: "z-on-first-control",
            lhs: [C(Z, vec![A]), ccx()],
            rhs: vec![ccx(), C(Z, vec![A])],
        },
        RewriteRule {
            name: "z-on-second-control",
            lhs: [C(Z, vec![B]), ccx()],
            rhs: vec![ccx(), C(Z, vec![B])],
        },
        RewriteRule {
            name: "z-on-target",
            lhs: [C(Z, vec![T]), ccx()],
            rhs: vec![ccx(), C(Cz, vec![A, B]), C(Z, vec![T])],
        },
        RewriteRule {
            name: "x-before-measure-z",
            lhs: [C(X, vec![T]), RuleOp::MeasureZ(T)],
            rhs: vec![RuleOp::MeasureZFlipped(T)],
        },
        RewriteRule {
            name: "z-before-measure-z",
            lhs: [C(Z, vec![T]), RuleOp::MeasureZ(T)],
            rhs: vec![RuleOp::MeasureZ(T)],
        },
        RewriteRule {
            name: "z-before-measure-x",
            lhs: [C(Z, vec![T]), RuleOp::MeasureX(T)],
            rhs: vec![RuleOp::MeasureXFlipped(T)],
        },
        RewriteRule {
            name: "x-before-measure-x",
            lhs: [C(X, vec![T]), RuleOp::MeasureX(T)],
            rhs: vec![RuleOp::MeasureX(T)],
        },
    ]
}
