use num_complex::Complex64;

use crate::circuit::GateKind;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Single-qubit Pauli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

/// Dense amplitudes over `num_qubits` positions, position 0 being the least
/// significant bit of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    pub fn basis(num_qubits: usize, index: u64) -> Self {
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Self { amps, num_qubits }
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Option<Self> {
        if !amps.len().is_power_of_two() {
            return None;
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        Some(Self { amps, num_qubits })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// Appends a qubit in `|0>` as the new most significant position.
    pub fn push_zero_qubit(&mut self) -> usize {
        self.amps.resize(self.amps.len() * 2, ZERO);
        self.num_qubits += 1;
        self.num_qubits - 1
    }

    pub fn apply_x(&mut self, pos: usize) {
        let bit = 1usize << pos;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    pub fn apply_z(&mut self, pos: usize) {
        self.apply_phase(1 << pos, Complex64::new(-1.0, 0.0));
    }

    pub fn apply_y(&mut self, pos: usize) {
        // Y = i X Z
        let bit = 1usize << pos;
        let i_unit = Complex64::new(0.0, 1.0);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = -i_unit * a1;
                self.amps[i | bit] = i_unit * a0;
            }
        }
    }

    pub fn apply_h(&mut self, pos: usize) {
        let bit = 1usize << pos;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a0 + a1) * s;
                self.amps[i | bit] = (a0 - a1) * s;
            }
        }
    }

    pub fn apply_pauli(&mut self, pauli: Pauli, pos: usize) {
        match pauli {
            Pauli::I => {}
            Pauli::X => self.apply_x(pos),
            Pauli::Y => self.apply_y(pos),
            Pauli::Z => self.apply_z(pos),
        }
    }

    /// Multiplies every amplitude whose index contains all bits of `mask`.
    fn apply_phase(&mut self, mask: usize, phase: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    /// X on `target` when every position in `controls` is 1.
    pub fn apply_controlled_x(&mut self, controls: &[usize], target: usize) {
        let cmask = controls.iter().fold(0usize, |m, &c| m | (1 << c));
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask == cmask && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    /// Phase flip on the all-ones subspace of `positions`.
    pub fn apply_multi_z(&mut self, positions: &[usize]) {
        let mask = positions.iter().fold(0usize, |m, &c| m | (1 << c));
        self.apply_phase(mask, Complex64::new(-1.0, 0.0));
    }

    /// Applies a gate to the given positions (controls first, target last).
    pub fn apply_gate(&mut self, kind: GateKind, positions: &[usize]) {
        match kind {
            GateKind::X => self.apply_x(positions[0]),
            GateKind::Y => self.apply_y(positions[0]),
            GateKind::Z => self.apply_z(positions[0]),
            GateKind::H => self.apply_h(positions[0]),
            GateKind::S => self.apply_phase(1 << positions[0], Complex64::new(0.0, 1.0)),
            GateKind::Sdg => self.apply_phase(1 << positions[0], Complex64::new(0.0, -1.0)),
            GateKind::Cx | GateKind::Ccx | GateKind::Mcx => {
                let (target, controls) = positions.split_last().expect("gate has qubits");
                self.apply_controlled_x(controls, *target)
            }
            GateKind::Cz | GateKind::Ccz | GateKind::Mcz => self.apply_multi_z(positions),
        }
    }

    /// Probability of reading 1 at `pos`.
    pub fn probability_one(&self, pos: usize) -> f64 {
        let bit = 1usize << pos;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects `pos` onto `outcome`, removes that position and renormalises.
    /// Positions above `pos` shift down by one. Returns the outcome's probability.
    pub fn collapse_and_remove(&mut self, pos: usize, outcome: bool) -> f64 {
        let low = (1usize << pos) - 1;
        let keep = usize::from(outcome) << pos;
        let half = self.amps.len() / 2;
        let mut out = Vec::with_capacity(half);
        for j in 0..half {
            let i = ((j & !low) << 1) | keep | (j & low);
            out.push(self.amps[i]);
        }
        let p: f64 = out.iter().map(Complex64::norm_sqr).sum();
        if p > 0.0 {
            let scale = 1.0 / p.sqrt();
            out.iter_mut().for_each(|a| *a *= scale);
        }
        self.amps = out;
        self.num_qubits -= 1;
        p
    }

    /// Marginal distribution of the lowest `d` positions.
    pub fn low_marginal(&self, d: usize) -> Vec<f64> {
        let mask = (1usize << d) - 1;
        let mut probs = vec![0.0; 1 << d];
        for (i, a) in self.amps.iter().enumerate() {
            probs[i & mask] += a.norm_sqr();
        }
        probs
    }

    /// Applies `f` to each block of `2^d` consecutive amplitudes, i.e. to the
    /// lowest `d` positions for every configuration of the others.
    pub fn map_low_blocks(&mut self, d: usize, mut f: impl FnMut(&[Complex64]) -> Vec<Complex64>) {
        let size = 1usize << d;
        for block in self.amps.chunks_mut(size) {
            let new = f(block);
            block.copy_from_slice(&new);
        }
    }

    /// `|<self|other>|^2`.
    pub fn overlap_sqr(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

/// QFT of the basis state `|i>` on `q` qubits:
/// amplitude of `|j>` is `exp(2 pi i j i / 2^q) / sqrt(2^q)`.
pub fn qft_prepare(i: u64, q: usize) -> Option<StateVector> {
    let dim = 1u64 << q;
    if i >= dim {
        return None;
    }
    let norm = 1.0 / (dim as f64).sqrt();
    let amps = (0..dim)
        .map(|j| {
            // Reduce the exponent modulo 2^q before converting to a float.
            let k = (j * i) % dim;
            Complex64::from_polar(norm, std::f64::consts::TAU * k as f64 / dim as f64)
        })
        .collect();
    StateVector::from_amplitudes(amps)
}

/// Inverse QFT of a `2^q` block: `b_k = sum_j exp(-2 pi i j k / 2^q) a_j / sqrt(2^q)`.
pub fn inverse_qft(block: &[Complex64]) -> Vec<Complex64> {
    let dim = block.len() as u64;
    let norm = 1.0 / (dim as f64).sqrt();
    let twiddle: Vec<Complex64> = (0..dim)
        .map(|k| Complex64::from_polar(1.0, -std::f64::consts::TAU * k as f64 / dim as f64))
        .collect();
    (0..dim)
        .map(|k| {
            let mut acc = ZERO;
            for (j, a) in block.iter().enumerate() {
                acc += a * twiddle[((j as u64 * k) % dim) as usize];
            }
            acc * norm
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn qft_examples() {
        let s = qft_prepare(0, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| close(*a, Complex64::new(h, 0.0))));
        let s = qft_prepare(1, 2).unwrap();
        let expect = [(0.5, 0.0), (0.0, 0.5), (-0.5, 0.0), (0.0, -0.5)];
        for (a, (re, im)) in s.amplitudes().iter().zip(expect) {
            assert!(close(*a, Complex64::new(re, im)), "{a}");
        }
        assert!(qft_prepare(4, 2).is_none());
    }

    #[test]
    fn qft_is_unbiased_against_the_computational_basis() {
        for q in 1..=6 {
            let dim = 1u64 << q;
            for i in 0..dim {
                let phi = qft_prepare(i, q).unwrap();
                for j in 0..dim {
                    let psi = StateVector::basis(q, j);
                    assert!((phi.overlap_sqr(&psi) - 1.0 / dim as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn inverse_qft_undoes_prepare() {
        for i in 0..16 {
            let back = inverse_qft(qft_prepare(i, 4).unwrap().amplitudes());
            for (k, a) in back.iter().enumerate() {
                let want = if k as u64 == i { 1.0 } else { 0.0 };
                assert!(close(*a, Complex64::new(want, 0.0)));
            }
        }
    }

    #[test]
    fn collapse_removes_the_measured_position() {
        // (|000> + |101>)/sqrt2 on positions 0..3, measure position 1 -> 0.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 8];
        amps[0] = Complex64::new(h, 0.0);
        amps[5] = Complex64::new(h, 0.0);
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        assert_eq!(s.probability_one(1), 0.0);
        let p = s.collapse_and_remove(1, false);
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(s.num_qubits(), 2);
        assert!(close(s.amplitudes()[0], Complex64::new(h, 0.0)));
        assert!(close(s.amplitudes()[3], Complex64::new(h, 0.0)));
    }

    #[test]
    fn y_matches_ixz() {
        let mut a = StateVector::basis(1, 0);
        a.apply_y(0);
        assert!(close(a.amplitudes()[1], Complex64::new(0.0, 1.0)));
        let mut b = StateVector::basis(1, 1);
        b.apply_y(0);
        assert!(close(b.amplitudes()[0], Complex64::new(0.0, -1.0)));
    }
}
