use teledepth::decomposer::{decompose_mct, defer_corrections, unitary_mct};
use teledepth::fidelity::{classical_fidelity_c, classical_fidelity_z, Rate};
use teledepth::simulator::NoiseModel;

fn within_sigmas(a: Rate, b: Rate, k: f64) -> bool {
    let se = (a.standard_error().powi(2) + b.standard_error().powi(2)).sqrt();
    (a.value() - b.value()).abs() <= k * se.max(1e-3)
}

#[test]
fn raw_and_decomposed_toffoli_agree_under_toffoli_noise() {
    let p = 0.2;
    let noise = NoiseModel::new(p, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
    let raw = unitary_mct(2);
    let dec = defer_corrections(&decompose_mct(2).unwrap()).unwrap();
    let (zr, zd) = (
        classical_fidelity_z(&raw, 2, &noise, 500, 1).unwrap(),
        classical_fidelity_z(&dec, 2, &noise, 500, 2).unwrap(),
    );
    // An output bit survives only if none of the three qubits gets an X or Y.
    let analytic = 1.0 - p + p / 8.0;
    assert!(
        within_sigmas(zr, zd, 3.0),
        "{} vs {}",
        zr.value(),
        zd.value()
    );
    assert!(
        (zr.value() - analytic).abs() < 3.0 * zr.standard_error(),
        "{} vs {analytic}",
        zr.value()
    );
}

#[test]
fn noiseless_fidelities_are_exactly_one() {
    for n in 2..=5 {
        let c = defer_corrections(&decompose_mct(n).unwrap()).unwrap();
        let noise = NoiseModel::noiseless();
        assert_eq!(
            classical_fidelity_z(&c, n, &noise, 2, 0).unwrap().value(),
            1.0
        );
        assert_eq!(
            classical_fidelity_c(&c, n, &noise, 2, 0).unwrap().value(),
            1.0
        );
    }
}

#[test]
fn fidelity_falls_with_the_toffoli_rate() {
    let c = defer_corrections(&decompose_mct(4).unwrap()).unwrap();
    let lo = NoiseModel::hierarchy(1e-3, 1e-3).unwrap();
    let hi = NoiseModel::hierarchy(1e-1, 1e-3).unwrap();
    let a = classical_fidelity_z(&c, 4, &lo, 50, 3).unwrap();
    let b = classical_fidelity_z(&c, 4, &hi, 50, 3).unwrap();
    assert!(b.value() < a.value());
}
