//! Cost formulas of other MCT decompositions, as far as they are stated in
//! closed form, next to the teleportation decomposition.
//!
//! Quantities without a stated formula are `None` and render as empty cells.

use serde::Serialize;

use crate::schedule::{build_schedule, ceil_log2, epr_and_ancilla, toffoli_count_formula};

#[derive(Clone, Copy, Debug)]
pub struct CostFormula {
    pub name: &'static str,
    /// Raw (possibly fractional) Toffoli depth.
    pub depth: fn(usize) -> f64,
    pub count: Option<fn(usize) -> u64>,
    pub ancillas: Option<fn(usize) -> u64>,
    pub note: &'static str,
}

impl CostFormula {
    /// Depth rounded up to an integer.
    pub fn depth_ceil(&self, n: usize) -> u64 {
        let raw = (self.depth)(n);
        // Guard against values like 60.000000000001 from the logarithm.
        let rounded = raw.round();
        if (raw - rounded).abs() < 1e-9 {
            rounded as u64
        } else {
            raw.ceil() as u64
        }
    }
}

fn teleport_count(n: usize) -> u64 {
    toffoli_count_formula(&build_schedule(n).expect("n >= 2")) as u64
}

fn teleport_ancillas(n: usize) -> u64 {
    epr_and_ancilla(&build_schedule(n).expect("n >= 2")).1 as u64
}

pub fn registry() -> Vec<CostFormula> {
    vec![
        CostFormula {
            name: "nie",
            depth: |n| 20.0 * (n as f64).log2(),
            count: None,
            ancillas: Some(|_| 1),
            note: "depth 20 log2 n with one ancilla",
        },
        CostFormula {
            name: "khattar_1anc",
            depth: |n| (2 * n - 3) as f64,
            count: None,
            ancillas: Some(|_| 1),
            note: "depth 2n - 3 with one ancilla",
        },
        CostFormula {
            name: "khattar_2anc",
            depth: |n| 4.0 * (n as f64).log2(),
            count: None,
            ancillas: Some(|_| 2),
            note: "depth approximately 4 log2 n with two ancillas",
        },
        CostFormula {
            name: "dutta_bound",
            depth: |n| ceil_log2(n) as f64,
            count: None,
            ancillas: None,
            note: "lower bound ceil(log2 n) on the depth",
        },
        CostFormula {
            name: "teleportation",
            depth: |_| 1.0,
            count: Some(teleport_count),
            ancillas: Some(teleport_ancillas),
            note: "unit depth, 1 + sum(m_i) Toffolis, 2 sum(m_i) ancillas",
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub method: &'static str,
    pub toffoli_depth: u64,
    pub toffoli_depth_raw: f64,
    pub toffoli_count: Option<u64>,
    pub ancillas: Option<u64>,
}

/// Rows for every `n` in the range (outer) and every registry entry (inner).
/// Values of `n` below 2 are skipped.
pub fn comparison_table(ns: impl IntoIterator<Item = usize>) -> Vec<TableRow> {
    let registry = registry();
    let mut rows = Vec::new();
    for n in ns.into_iter().filter(|&n| n >= 2) {
        for f in &registry {
            rows.push(TableRow {
                n,
                method: f.name,
                toffoli_depth: f.depth_ceil(n),
                toffoli_depth_raw: (f.depth)(n),
                toffoli_count: f.count.map(|c| c(n)),
                ancillas: f.ancillas.map(|a| a(n)),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(name: &str) -> CostFormula {
        registry().into_iter().find(|f| f.name == name).unwrap()
    }

    #[test]
    fn quoted_values() {
        assert_eq!(entry("khattar_1anc").depth_ceil(10), 17);
        assert_eq!(entry("dutta_bound").depth_ceil(7), 3);
        assert_eq!(entry("nie").depth_ceil(8), 60);
        assert_eq!(entry("nie").depth_ceil(7), 57);
        assert_eq!(entry("khattar_2anc").depth_ceil(16), 16);
        for n in 2..100 {
            assert_eq!(entry("teleportation").depth_ceil(n), 1);
        }
    }

    #[test]
    fn teleportation_n2() {
        let t = entry("teleportation");
        assert_eq!(((t.count.unwrap())(2), (t.ancillas.unwrap())(2)), (2, 2));
    }

    #[test]
    fn table_shape_and_missing_cells() {
        let rows = comparison_table(2..=20);
        assert_eq!(rows.len(), 19 * 5);
        assert!(rows
            .iter()
            .filter(|r| r.method != "teleportation")
            .all(|r| r.toffoli_count.is_none()));
        assert!(rows
            .iter()
            .filter(|r| r.method == "dutta_bound")
            .all(|r| r.ancillas.is_none()));
    }
}
