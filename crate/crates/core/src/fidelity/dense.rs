//! Dense matrices built from each gate's action on basis states, and the
//! brute-force certificates of the rewrite rules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::circuit::GateKind;
use crate::decomposer::{rewrite_rule_table, RewriteRule, RuleOp, Slot};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(output index, amplitude)` pairs of `gate |x>` on `qubits` (controls first).
fn basis_action(kind: GateKind, qubits: &[usize], x: usize) -> Vec<(usize, Complex64)> {
    let bit = |q: usize| (x >> q) & 1 == 1;
    let all_set = |qs: &[usize]| qs.iter().all(|&q| bit(q));
    let one = c(1.0, 0.0);
    match kind {
        GateKind::X => vec![(x ^ (1 << qubits[0]), one)],
        GateKind::Y => {
            let phase = if bit(qubits[0]) {
                c(0.0, -1.0)
            } else {
                c(0.0, 1.0)
            };
            vec![(x ^ (1 << qubits[0]), phase)]
        }
        GateKind::Z => vec![(x, if bit(qubits[0]) { -one } else { one })],
        GateKind::S => vec![(x, if bit(qubits[0]) { c(0.0, 1.0) } else { one })],
        GateKind::Sdg => vec![(x, if bit(qubits[0]) { c(0.0, -1.0) } else { one })],
        GateKind::H => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let q = qubits[0];
            let sign = if bit(q) { -h } else { h };
            vec![(x & !(1 << q), c(h, 0.0)), (x | (1 << q), c(sign, 0.0))]
        }
        GateKind::Cx | GateKind::Ccx | GateKind::Mcx => {
            let (t, controls) = qubits.split_last().expect("gate has qubits");
            if all_set(controls) {
                vec![(x ^ (1 << t), one)]
            } else {
                vec![(x, one)]
            }
        }
        GateKind::Cz | GateKind::Ccz | GateKind::Mcz => {
            vec![(x, if all_set(qubits) { -one } else { one })]
        }
    }
}

/// Matrix of `kind` on `qubits` within an `n`-qubit space; qubit `q` is bit `q`
/// of the basis index.
pub fn gate_matrix(kind: GateKind, qubits: &[usize], n: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        for (y, a) in basis_action(kind, qubits, x) {
            m[(y, x)] += a;
        }
    }
    m
}

/// Product of a gate sequence, first gate applied first.
pub fn sequence_matrix(gates: &[(GateKind, Vec<usize>)], n: usize) -> DMatrix<Complex64> {
    gates
        .iter()
        .fold(DMatrix::identity(1 << n, 1 << n), |acc, (k, q)| {
            gate_matrix(*k, q, n) * acc
        })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleCertificate {
    pub rule: &'static str,
    /// Largest entrywise (gate rules) or row-functional (measurement rules)
    /// deviation over both condition values.
    pub max_deviation: f64,
}

impl RuleCertificate {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_deviation <= tolerance
    }
}

fn slot_qubit(s: Slot) -> usize {
    match s {
        Slot::A => 0,
        Slot::B => 1,
        Slot::T => 2,
    }
}

/// Checks `rule` on a three-qubit space (`A`, `B`, `T` = qubits 0, 1, 2) for
/// both values of the condition.
///
/// Gate rules must agree as matrices. Measurement rules must give, for each
/// recorded outcome `r`, the same row functional `<r|B U` up to a phase, where
/// `B` rotates the measured basis to Z; the post-measurement qubit is discarded
/// so a per-outcome phase is unobservable.
pub fn certify_rule(rule: &RewriteRule) -> RuleCertificate {
    const N: usize = 3;
    let mut worst: f64 = 0.0;
    for fired in [false, true] {
        let expand = |ops: &[RuleOp]| -> (Vec<(GateKind, Vec<usize>)>, Option<(bool, bool)>) {
            let mut gates = Vec::new();
            let mut measurement = None;
            for op in ops {
                match op {
                    RuleOp::Gate(k, s) => {
                        gates.push((*k, s.iter().map(|&s| slot_qubit(s)).collect()))
                    }
                    RuleOp::Conditional(k, s) => {
                        if fired {
                            gates.push((*k, s.iter().map(|&s| slot_qubit(s)).collect()))
                        }
                    }
                    RuleOp::MeasureZ(_) => measurement = Some((false, false)),
                    RuleOp::MeasureX(_) => measurement = Some((true, false)),
                    RuleOp::MeasureZFlipped(_) => measurement = Some((false, fired)),
                    RuleOp::MeasureXFlipped(_) => measurement = Some((true, fired)),
                }
            }
            (gates, measurement)
        };
        let (lhs, lm) = expand(&rule.lhs);
        let (rhs, rm) = expand(&rule.rhs);
        let ul = sequence_matrix(&lhs, N);
        let ur = sequence_matrix(&rhs, N);
        match (lm, rm) {
            (None, None) => {
                worst = worst.max((ul - ur).iter().map(|z| z.norm()).fold(0.0, f64::max))
            }
            (Some((lx, lflip)), Some((rx, rflip))) => {
                let t = slot_qubit(Slot::T);
                let basis = |x_basis: bool| {
                    if x_basis {
                        gate_matrix(GateKind::H, &[t], N)
                    } else {
                        DMatrix::identity(1 << N, 1 << N)
                    }
                };
                let fl = basis(lx) * ul;
                let fr = basis(rx) * ur;
                for recorded in [false, true] {
                    let row_l = projected(&fl, t, recorded ^ lflip);
                    let row_r = projected(&fr, t, recorded ^ rflip);
                    worst = worst.max(phase_distance(&row_l, &row_r));
                }
            }
            _ => worst = f64::INFINITY,
        }
    }
    RuleCertificate {
        rule: rule.name,
        max_deviation: worst,
    }
}

/// `(<r| on qubit t) * m`: the rows with bit `t` equal to `r`, flattened.
fn projected(m: &DMatrix<Complex64>, t: usize, r: bool) -> DVector<Complex64> {
    let rows: Vec<usize> = (0..m.nrows())
        .filter(|row| ((row >> t) & 1 == 1) == r)
        .collect();
    DVector::from_iterator(
        rows.len() * m.ncols(),
        rows.iter()
            .flat_map(|&row| m.row(row).iter().copied().collect::<Vec<_>>()),
    )
}

/// `min over theta of |a - e^{i theta} b|`.
fn phase_distance(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    let inner = b.dotc(a);
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        c(1.0, 0.0)
    };
    (a - b * phase).norm()
}

/// Certificates for every rule of [`rewrite_rule_table`].
pub fn certify_rules() -> Vec<RuleCertificate> {
    rewrite_rule_table().iter().map(certify_rule).collect()
}
