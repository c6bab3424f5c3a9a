mod common;

use common::{and_table, haar_state};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use teledepth::applications::{
    build_adder, build_decision_rule, build_neuron, build_qrom_word, parse_bitstring, AdderSpec,
    QromWordSpec, RuleSpec, Strategy,
};
use teledepth::circuit::{toffoli_depth, validate, Circuit};
use teledepth::fidelity::{verify_against, BranchMode};
use teledepth::simulator::{Input, NoiseModel, Program, Readout, RunOptions, TrajectorySeed};

const BOTH: [Strategy; 2] = [Strategy::Unitary, Strategy::Teleport];

fn check(c: &Circuit, table: &[u64]) {
    assert!(validate(c).is_empty());
    let r = verify_against(c, table, BranchMode::Exhaustive).unwrap();
    assert!(r.passed(), "{}: {:?}", c.name(), r.counterexamples.first());
}

fn run_basis(c: &Circuit, input: u64, seed: u64) -> u64 {
    let options = RunOptions {
        forced: None,
        readout: Readout::Z,
        keep_state: false,
    };
    Program::new(c)
        .unwrap()
        .run(
            &Input::Basis(input),
            &NoiseModel::noiseless(),
            TrajectorySeed::new(seed, input),
            &options,
        )
        .unwrap()
        .data_readout
        .unwrap()
}

#[test]
fn adder_adds_one() {
    for q in 2..=5 {
        let table: Vec<u64> = (0..1u64 << q).map(|i| (i + 1) % (1 << q)).collect();
        for s in BOTH {
            check(&build_adder(AdderSpec { q, strategy: s }).unwrap(), &table);
        }
    }
}

#[test]
fn adder_power_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let options = RunOptions {
        forced: None,
        readout: Readout::None,
        keep_state: true,
    };
    for q in 2..=4 {
        let c = build_adder(AdderSpec {
            q,
            strategy: Strategy::Teleport,
        })
        .unwrap();
        let program = Program::new(&c).unwrap();
        let psi = haar_state(q, &mut rng);
        let mut state = psi.clone();
        for k in 0..1u64 << q {
            let r = program.run(
                &Input::State(state),
                &NoiseModel::noiseless(),
                TrajectorySeed::new(q as u64, k),
                &options,
            );
            state = r.unwrap().state.unwrap();
        }
        assert!((state.overlap_sqr(&psi) - 1.0).abs() < 1e-10, "q={q}");
    }
}

#[test]
fn adder_teleport_depths() {
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
    assert_eq!((d(3), d(4)), (1, 2));
}

/// Qubits `r, a0, a1, a2, s, d0, d1, d2` at bit positions 0..8.
fn qrom_index(r: bool, a: u64, s: bool, d: u64) -> u64 {
    u64::from(r) | a << 1 | u64::from(s) << 4 | d << 5
}

#[test]
fn qrom_worked_example() {
    for s in BOTH {
        let spec = QromWordSpec {
            address: parse_bitstring("000").unwrap(),
            word: parse_bitstring("101").unwrap(),
            strategy: s,
        };
        let c = build_qrom_word(&spec).unwrap();
        // d0 and d2 flip only for r = 1 with the stored address.
        assert_eq!(
            run_basis(&c, qrom_index(true, 0, false, 0), 1),
            qrom_index(true, 0, false, 0b101)
        );
        assert_eq!(
            run_basis(&c, qrom_index(false, 0, false, 0), 1),
            qrom_index(false, 0, false, 0)
        );
        // Address 001 means a0 = 0, a1 = 0, a2 = 1.
        assert_eq!(
            run_basis(&c, qrom_index(true, 0b100, false, 0), 1),
            qrom_index(true, 0b100, false, 0)
        );
        for r in [false, true] {
            for a in 0..8 {
                let out = run_basis(&c, qrom_index(r, a, false, 0b010), a + 7);
                assert_eq!(out >> 4 & 1, 0, "s returns to 0");
                let d = if r && a == 0 { 0b111 } else { 0b010 };
                assert_eq!(out, qrom_index(r, a, false, d));
            }
        }
    }
}

#[test]
fn neuron_is_the_conjunction() {
    for f in 2..=5 {
        for s in BOTH {
            check(&build_neuron(f, s).unwrap(), &and_table(f));
        }
    }
    let c = build_neuron(4, Strategy::Teleport).unwrap();
    assert_eq!(run_basis(&c, 0b01111, 3), 0b11111);
}

#[test]
fn decision_rule_is_the_pattern_indicator() {
    let c = build_decision_rule(&RuleSpec {
        pattern: parse_bitstring("0101").unwrap(),
        strategy: Strategy::Teleport,
    })
    .unwrap();
    // f0 = 0, f1 = 1, f2 = 0, f3 = 1 is index 0b1010.
    assert_eq!(run_basis(&c, 0b01010, 5), 0b11010);
    for pattern in ["0101", "1111", "0000", "110", "10"] {
        let bits = parse_bitstring(pattern).unwrap();
        let f = bits.len();
        let want: u64 = bits
            .iter()
            .enumerate()
            .map(|(j, &b)| u64::from(b) << j)
            .sum();
        let table: Vec<u64> = (0..1u64 << (f + 1))
            .map(|x| if x % (1 << f) == want { x ^ 1 << f } else { x })
            .collect();
        for s in BOTH {
            check(
                &build_decision_rule(&RuleSpec {
                    pattern: bits.clone(),
                    strategy: s,
                })
                .unwrap(),
                &table,
            );
        }
    }
}
