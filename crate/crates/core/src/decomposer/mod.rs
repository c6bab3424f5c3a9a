//! Teleportation-based MCT synthesis.
//!
//! One level of the expansion splits the controls into `m` groups of `k`
//! (plus `ell` leftovers). For each group a Bell pair `(e, e')` is prepared, the
//! group's AND is computed onto `e` with an `MCT_{k+1}`, and `e` is measured in
//! Z; a conditional X on `e'` leaves `e'` holding the group's AND. A single
//! residual `MCT_{m+ell+1}` over `{e'} ∪ leftovers` then hits the target. Finally
//! each `e'` is measured in X and a conditional `C^{k-1}Z` on the group removes
//! the phase kickback.
//!
//! [`decompose_mct`] fixes `k = 2` and recursively expands the residual until
//! it is a Toffoli, following [`crate::schedule`].

mod defer;
mod layout;
mod rules;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder, Condition, GateKind, QubitKind};
use crate::schedule::TooFewControls;

pub use defer::{defer_corrections, merge_conditionals, DeferError};
pub use layout::{neighbor_layout, LayoutError};
pub use rules::{rewrite_rule_table, RewriteRule, RuleOp, Slot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    TooFewControls(#[from] TooFewControls),
    #[error("group size k = {k} leaves nothing to teleport for {n} controls")]
    GroupTooLarge { k: usize, n: usize },
    #[error("group size must be at least 1")]
    EmptyGroups,
}

/// Bookkeeping for one emitted teleportation level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeleportLevelPlan {
    pub groups: Vec<Vec<usize>>,
    pub leftovers: Vec<usize>,
    /// `(e_j, e'_j)`; `e_j` is measured in Z, `e'_j` in X.
    pub bell_pairs: Vec<(usize, usize)>,
    pub z_bits: Vec<usize>,
    pub x_bits: Vec<usize>,
}

impl TeleportLevelPlan {
    /// Controls of the residual gate: the teleported halves, then leftovers.
    pub fn residual_controls(&self) -> Vec<usize> {
        self.bell_pairs
            .iter()
            .map(|&(_, e)| e)
            .chain(self.leftovers.iter().copied())
            .collect()
    }
}

fn emit_level<F>(
    b: &mut CircuitBuilder,
    controls: &[usize],
    target: usize,
    k: usize,
    residual: F,
) -> Result<TeleportLevelPlan, DecomposeError>
where
    F: FnOnce(&mut CircuitBuilder, &[usize], usize) -> Result<(), DecomposeError>,
{
    let n = controls.len();
    if n < 2 {
        return Err(TooFewControls(n).into());
    }
    if k == 0 {
        return Err(DecomposeError::EmptyGroups);
    }
    if k >= n && !(k == 2 && n == 2) {
        return Err(DecomposeError::GroupTooLarge { k, n });
    }
    let m = n / k;
    let groups: Vec<Vec<usize>> = controls[..m * k].chunks(k).map(<[usize]>::to_vec).collect();
    let leftovers = controls[m * k..].to_vec();

    let mut plan = TeleportLevelPlan {
        groups,
        leftovers,
        bell_pairs: Vec::with_capacity(m),
        z_bits: Vec::with_capacity(m),
        x_bits: Vec::with_capacity(m),
    };

    for group in &plan.groups {
        let (e, e_prime) = b.bell_pair();
        b.mct(group, e);
        let z = b.measure_z(e);
        b.conditional(GateKind::X, &[e_prime], Condition::on(z));
        plan.bell_pairs.push((e, e_prime));
        plan.z_bits.push(z);
    }

    residual(b, &plan.residual_controls(), target)?;

    for (group, &(_, e_prime)) in plan.groups.iter().zip(&plan.bell_pairs) {
        let x = b.measure_x(e_prime);
        b.conditional(GateKind::multi_z(group.len()), group, Condition::on(x));
        plan.x_bits.push(x);
    }
    Ok(plan)
}

/// Emits one teleportation level with group size `k`; the residual
/// `MCT_{m+ell+1}` is left as a single unitary gate.
///
/// `n = k = 2` is accepted as the one-group base case.
pub fn teleport_expand(
    b: &mut CircuitBuilder,
    controls: &[usize],
    target: usize,
    k: usize,
) -> Result<TeleportLevelPlan, DecomposeError> {
    emit_level(b, controls, target, k, |b, residual, target| {
        b.mct(residual, target);
        Ok(())
    })
}

/// Appends the recursive `k = 2` expansion of `MCT(controls -> target)`.
/// Fewer than two controls are emitted directly as X/CX.
pub fn expand_mct(
    b: &mut CircuitBuilder,
    controls: &[usize],
    target: usize,
) -> Result<(), DecomposeError> {
    if controls.len() < 2 {
        b.mct(controls, target);
        return Ok(());
    }
    expand_level(b, controls, target)
}

fn expand_level(
    b: &mut CircuitBuilder,
    controls: &[usize],
    target: usize,
) -> Result<(), DecomposeError> {
    emit_level(b, controls, target, 2, |b, residual, target| {
        if residual.len() > 2 {
            expand_level(b, residual, target)
        } else {
            b.mct(residual, target);
            Ok(())
        }
    })?;
    Ok(())
}

/// Builds the teleportation decomposition of `MCT_{n+1}` over `n` controls,
/// one target and `2 * sum(m_i)` ancillas. Conditional corrections are still in
/// place; see [`defer_corrections`].
pub fn decompose_mct(n: usize) -> Result<Circuit, DecomposeError> {
    if n < 2 {
        return Err(TooFewControls(n).into());
    }
    let mut b = CircuitBuilder::new(format!("mct{}", n + 1));
    let controls = b.add_qubits(QubitKind::Control, n);
    let target = b.add_qubit(QubitKind::Target);
    expand_level(&mut b, &controls, target)?;
    Ok(b.finish())
}

/// Unitary reference `MCT_{n+1}` as a single gate.
pub fn unitary_mct(n: usize) -> Circuit {
    let mut b = CircuitBuilder::new(format!("mct{}-unitary", n + 1));
    let controls = b.add_qubits(QubitKind::Control, n);
    let target = b.add_qubit(QubitKind::Target);
    b.mct(&controls, target);
    b.finish()
}
