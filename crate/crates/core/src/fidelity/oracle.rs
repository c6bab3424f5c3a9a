use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("expected {expected} bits, got {got}")]
pub struct LengthMismatch {
    pub expected: usize,
    pub got: usize,
}

/// `(c_1..c_n, t) -> (c_1..c_n, t XOR AND(c))`. The target is the last bit.
pub fn mct_oracle(n: usize, input: &[bool]) -> Result<Vec<bool>, LengthMismatch> {
    if input.len() != n + 1 {
        return Err(LengthMismatch {
            expected: n + 1,
            got: input.len(),
        });
    }
    let mut out = input.to_vec();
    out[n] ^= input[..n].iter().all(|&c| c);
    Ok(out)
}

/// The oracle on basis indices: bit `p` of the index is data qubit `p`, the
/// controls are bits `0..n` and the target is bit `n`.
pub fn mct_oracle_index(n: usize, index: u64) -> u64 {
    let controls = (1u64 << n) - 1;
    if index & controls == controls {
        index ^ (1 << n)
    } else {
        index
    }
}

/// `perm[x] = mct_oracle_index(n, x)` for every `x < 2^(n+1)`.
pub fn mct_permutation(n: usize) -> Vec<u64> {
    (0..1u64 << (n + 1))
        .map(|x| mct_oracle_index(n, x))
        .collect()
}

pub fn bits_of(index: u64, width: usize) -> Vec<bool> {
    (0..width).map(|p| (index >> p) & 1 == 1).collect()
}

pub fn index_of(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (p, &b)| acc | (u64::from(b) << p))
}
