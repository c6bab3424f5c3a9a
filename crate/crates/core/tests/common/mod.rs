#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use teledepth::simulator::StateVector;

/// Flip bit `n` of `x` when bits `0..n` are all set.
pub fn and_oracle(n: usize, x: u64) -> u64 {
    let mut all = true;
    for p in 0..n {
        all &= x >> p & 1 == 1;
    }
    if all {
        x ^ 1 << n
    } else {
        x
    }
}

pub fn and_table(n: usize) -> Vec<u64> {
    (0..1u64 << (n + 1)).map(|x| and_oracle(n, x)).collect()
}

/// Normalized complex Gaussian vector, which is Haar distributed.
pub fn haar_state<R: Rng>(qubits: usize, rng: &mut R) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << qubits)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// `sum_x a_x |perm[x]>`.
pub fn permuted(state: &StateVector, perm: &[u64]) -> StateVector {
    let mut out = vec![Complex64::new(0.0, 0.0); perm.len()];
    for (x, a) in state.amplitudes().iter().enumerate() {
        out[perm[x] as usize] += a;
    }
    StateVector::from_amplitudes(out).unwrap()
}
