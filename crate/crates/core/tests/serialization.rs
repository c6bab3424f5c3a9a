use proptest::prelude::*;
use teledepth::applications::{
    build_adder, build_qrom_word, AdderSpec, QromWordSpec, Strategy as Build,
};
use teledepth::circuit::{
    deserialize, serialize, Circuit, CircuitBuilder, ClassicalBit, GateKind, Operation, QubitKind,
    QubitRef,
};
use teledepth::decomposer::{decompose_mct, defer_corrections, neighbor_layout};
use teledepth::simulator::{Input, NoiseModel, Program, Readout, RunOptions, TrajectorySeed};

fn trace(c: &Circuit, input: u64, seed: u64) -> (Vec<bool>, Option<u64>) {
    let noise = NoiseModel::hierarchy(0.05, 0.05).unwrap();
    let options = RunOptions {
        forced: None,
        readout: Readout::Z,
        keep_state: false,
    };
    let r = Program::new(c)
        .unwrap()
        .run(
            &Input::Basis(input),
            &noise,
            TrajectorySeed::new(seed, 0),
            &options,
        )
        .unwrap();
    (r.cbits, r.data_readout)
}

/// Everything except where the circuit came from.
fn structure(
    c: &Circuit,
) -> (
    &str,
    &[QubitRef],
    &[ClassicalBit],
    &[Operation],
    Option<&[usize]>,
) {
    (c.name(), c.qubits(), c.bits(), c.ops(), c.layout())
}

fn samples() -> Vec<Circuit> {
    let mut v: Vec<Circuit> = (2..=6).map(|n| decompose_mct(n).unwrap()).collect();
    v.extend((2..=6).map(|n| defer_corrections(&decompose_mct(n).unwrap()).unwrap()));
    v.push(neighbor_layout(&defer_corrections(&decompose_mct(5).unwrap()).unwrap()).unwrap());
    v.push(
        build_adder(AdderSpec {
            q: 4,
            strategy: Build::Teleport,
        })
        .unwrap(),
    );
    v.push(
        build_qrom_word(&QromWordSpec {
            address: vec![false; 3],
            word: vec![true, false, true],
            strategy: Build::Teleport,
        })
        .unwrap(),
    );
    v
}

#[test]
fn round_trip_preserves_ops_and_simulation() {
    for c in samples() {
        let text = serialize(&c);
        let back = deserialize(&text).unwrap();
        assert_eq!(structure(&back), structure(&c));
        assert_eq!(serialize(&back), text);
        let width = c.data_qubits().len();
        for seed in 0..20 {
            let input = seed % (1 << width);
            assert_eq!(
                trace(&c, input, seed),
                trace(&back, input, seed),
                "{}",
                c.name()
            );
        }
    }
}

#[test]
fn layout_preserves_simulation() {
    for n in 2..=6 {
        let c = defer_corrections(&decompose_mct(n).unwrap()).unwrap();
        let l = neighbor_layout(&c).unwrap();
        for seed in 0..20 {
            let input = (seed * 7) % (1 << (n + 1));
            assert_eq!(trace(&c, input, seed).1, trace(&l, input, seed).1, "n={n}");
        }
    }
}

const KINDS: [GateKind; 10] = [
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
];

fn arity(k: GateKind) -> usize {
    match k {
        GateKind::Ccx | GateKind::Ccz => 3,
        GateKind::Cx | GateKind::Cz => 2,
        _ => 1,
    }
}

proptest! {
    #[test]
    fn random_gate_lists_round_trip(ops in prop::collection::vec((0..KINDS.len(), Just(vec![0usize, 1, 2, 3]).prop_shuffle()), 0..30)) {
        let mut b = CircuitBuilder::new("random");
        b.add_qubits(QubitKind::Target, 4);
        for (k, qs) in &ops {
            let kind = KINDS[*k];
            b.gate(kind, &qs[..arity(kind)]);
        }
        let c = b.finish();
        let text = serialize(&c);
        let back = deserialize(&text).unwrap();
        prop_assert_eq!(structure(&back), structure(&c));
    }
}
