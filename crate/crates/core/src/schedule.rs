//! Recursion arithmetic for the k = 2 teleportation decomposition.
//!
//! At each level the `n_i` controls are split into `m_i` pairs plus `ell_i`
//! leftover controls, and the next level works on `n_{i+1} = m_i + ell_i`
//! controls. The recursion stops once a level leaves exactly two controls (a
//! plain Toffoli), except for `n = 2` which is expanded once.
//!
//! Everything here is integer arithmetic; `ceil(log2 n)` comes from the bit length.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("control count must be at least 2, got {0}")]
pub struct TooFewControls(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecursionLevel {
    /// Controls entering this level.
    pub n: usize,
    /// Number of teleported pairs.
    pub m: usize,
    /// Leftover controls passed straight to the residual gate (0 or 1).
    pub ell: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    n: usize,
    levels: Vec<RecursionLevel>,
}

impl Schedule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> &[RecursionLevel] {
        &self.levels
    }

    pub fn i_max(&self) -> usize {
        self.levels.len()
    }

    pub fn total_pairs(&self) -> usize {
        self.levels.iter().map(|l| l.m).sum()
    }
}

/// `(m, ell)` for a level with `n` controls: `ell = (1 - (-1)^n) / 2`,
/// `m = (2n - 1 + (-1)^n) / 4`.
pub fn level_params(n: usize) -> Result<(usize, usize), TooFewControls> {
    if n < 2 {
        return Err(TooFewControls(n));
    }
    let sign: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
    let n = n as i64;
    let ell = (1 - sign) / 2;
    let m4 = 2 * n - 1 + sign;
    debug_assert_eq!(m4 % 4, 0);
    Ok(((m4 / 4) as usize, ell as usize))
}

pub fn build_schedule(n: usize) -> Result<Schedule, TooFewControls> {
    let mut levels = Vec::new();
    let mut current = n;
    loop {
        let (m, ell) = level_params(current)?;
        levels.push(RecursionLevel { n: current, m, ell });
        if current == 2 || m + ell == 2 {
            break;
        }
        current = m + ell;
    }
    Ok(Schedule { n, levels })
}

/// `ceil(log2 n)` for `n >= 1`, from the bit length of `n - 1`.
pub fn ceil_log2(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize
}

/// Number of recursion levels without iterating: 1 for `n = 2`, otherwise
/// `ceil(log2 n) - 1`.
pub fn i_max_closed_form(n: usize) -> Result<usize, TooFewControls> {
    match n {
        0 | 1 => Err(TooFewControls(n)),
        2 => Ok(1),
        _ => Ok(ceil_log2(n) - 1),
    }
}

/// `1 + sum(m_i)`: one Toffoli per teleported pair plus the final gate.
pub fn toffoli_count_formula(schedule: &Schedule) -> usize {
    1 + schedule.total_pairs()
}

/// `(bell_pairs, ancillas) = (sum(m_i), 2 * sum(m_i))`.
pub fn epr_and_ancilla(schedule: &Schedule) -> (usize, usize) {
    let pairs = schedule.total_pairs();
    (pairs, 2 * pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lv(n: usize, m: usize, ell: usize) -> RecursionLevel {
        RecursionLevel { n, m, ell }
    }

    #[test]
    fn level_params_examples() {
        assert_eq!(level_params(7), Ok((3, 1)));
        assert_eq!(level_params(4), Ok((2, 0)));
        assert_eq!(level_params(2), Ok((1, 0)));
        assert_eq!(level_params(1), Err(TooFewControls(1)));
        assert_eq!(level_params(0), Err(TooFewControls(0)));
    }

    #[test]
    fn schedule_examples() {
        let s7 = build_schedule(7).unwrap();
        assert_eq!(s7.levels(), &[lv(7, 3, 1), lv(4, 2, 0)]);
        assert_eq!(s7.i_max(), 2);

        let s2 = build_schedule(2).unwrap();
        assert_eq!(s2.levels(), &[lv(2, 1, 0)]);
        assert_eq!(s2.i_max(), 1);

        // 16 -> 8 -> 4 -> stop, iterated by hand.
        let s16 = build_schedule(16).unwrap();
        assert_eq!(s16.levels(), &[lv(16, 8, 0), lv(8, 4, 0), lv(4, 2, 0)]);
        assert_eq!(s16.i_max(), 3);
        assert!(build_schedule(1).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(i_max_closed_form(3), Ok(1));
        assert_eq!(i_max_closed_form(2), Ok(1));
        assert_eq!(i_max_closed_form(1024), Ok(9));
        assert_eq!(i_max_closed_form(1025), Ok(10));
        assert_eq!(build_schedule(1024).unwrap().i_max(), 9);
    }

    #[test]
    fn count_and_resources() {
        assert_eq!(toffoli_count_formula(&build_schedule(7).unwrap()), 6);
        assert_eq!(toffoli_count_formula(&build_schedule(2).unwrap()), 2);
        assert_eq!(toffoli_count_formula(&build_schedule(4).unwrap()), 3);
        assert_eq!(epr_and_ancilla(&build_schedule(7).unwrap()), (5, 10));
        assert_eq!(epr_and_ancilla(&build_schedule(2).unwrap()), (1, 2));
        assert_eq!(epr_and_ancilla(&build_schedule(4).unwrap()), (2, 4));
    }

    #[test]
    fn closed_form_matches_recursion_exhaustively() {
        for n in 2..=(1usize << 16) {
            let s = build_schedule(n).unwrap();
            assert_eq!(i_max_closed_form(n).unwrap(), s.i_max(), "n = {n}");
            for (i, l) in s.levels().iter().enumerate() {
                // n_i = ceil(n / 2^(i-1)) with 1-based i
                assert_eq!(l.n, n.div_ceil(1 << i), "n = {n}, level {i}");
                assert_eq!(l.n, 2 * l.m + l.ell);
            }
            for w in s.levels().windows(2) {
                assert_eq!(w[1].n, w[0].n.div_ceil(2));
                assert_eq!(w[1].n, w[0].m + w[0].ell);
            }
        }
    }

    proptest! {
        #[test]
        fn count_formula_is_monotone(n in 2usize..100_000) {
            let a = toffoli_count_formula(&build_schedule(n).unwrap());
            let b = toffoli_count_formula(&build_schedule(n + 1).unwrap());
            prop_assert!(a <= b);
        }

        #[test]
        fn last_level_leaves_a_toffoli(n in 3usize..1_000_000) {
            let s = build_schedule(n).unwrap();
            let last = s.levels().last().unwrap();
            prop_assert_eq!(last.m + last.ell, 2);
            prop_assert!(last.n == 3 || last.n == 4);
        }
    }
}
