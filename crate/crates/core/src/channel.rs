//! The four primitive protocol transformations on a [`DiagonalState`].
//!
//! The noisy black box applies the completion permutation with probability
//! `1 - p` and replaces the output register with the uniform mixture over all
//! `2^N` labels with probability `p`; the ancilla register is never touched.
//! The adjoint is fused with the post-selection that absorbs every branch
//! whose output register is not all-zero: for an ancilla label `b != y` the
//! noiseless adjoint output has zero overlap with the zero label (its inner
//! product equals the overlap of `|b>` with `U|0> = |y>`), so only the
//! depolarized uniform term survives. The fused form is therefore exact for
//! any unitary completion, not just permutations, and keeps the state
//! diagonal.

use std::collections::BTreeMap;

use crate::state::{BasisLabel, DiagonalState, SchemeParams};
use crate::{Error, Result};

/// Noisy forward algorithm on the output register.
///
/// Entry `((a, b), w)` spreads into `(completion(a), b)` with weight
/// `w (1 - p)` plus `(j, b)` with weight `w p / 2^N` for every label `j`.
pub fn apply_forward_qa(state: &DiagonalState, params: &SchemeParams) -> DiagonalState {
    let dim = state.dim();
    let uniform = params.p() / dim as f64;
    let survive = 1.0 - params.p();
    let mut weights: BTreeMap<(BasisLabel, BasisLabel), f64> = BTreeMap::new();
    for ((a, b), w) in state.entries() {
        if survive > 0.0 {
            let image = params.apply_completion(a);
            *weights.entry((image, b)).or_insert(0.0) += w * survive;
        }
        if uniform > 0.0 {
            for j in 0..dim {
                *weights
                    .entry((BasisLabel::new(j, state.n_qubits()).unwrap(), b))
                    .or_insert(0.0) += w * uniform;
            }
        }
    }
    DiagonalState::from_raw(state.n_qubits(), weights, state.absorbed())
}

/// CNOT group copying register 1 onto register 2: `(a, b) -> (a, b XOR a)`.
pub fn apply_cnot2(state: &DiagonalState) -> DiagonalState {
    state.map_labels(|a, b| (a, b.xor(a)))
}

/// CNOT group restoring register 1 from register 2: `(a, b) -> (a XOR b, b)`.
pub fn apply_cnot1(state: &DiagonalState) -> DiagonalState {
    state.map_labels(|a, b| (a.xor(b), b))
}

/// Noisy adjoint fused with the absorbing post-selection on register 1.
///
/// Requires every entry to have matching registers (the protocol invariant
/// after a copy or restore step). Entry `((b, b), w)` survives into `(0, b)`
/// with weight `w [(1 - p) δ(b = y) + p / 2^N]`; the rest of `w` is added to
/// the absorbed sink.
pub fn apply_adjoint_and_absorb(
    state: &DiagonalState,
    params: &SchemeParams,
) -> Result<DiagonalState> {
    let dim = state.dim();
    let uniform = params.p() / dim as f64;
    let reverse = 1.0 - params.p();
    let mut weights: BTreeMap<(BasisLabel, BasisLabel), f64> = BTreeMap::new();
    let mut absorbed = state.absorbed();
    for ((a, b), w) in state.entries() {
        if a != b {
            return Err(Error::Invariant(format!(
                "adjoint step requires matching registers, found ({a}, {b})"
            )));
        }
        let mut survive = uniform;
        if b == params.marked() {
            survive += reverse;
        }
        let surviving = w * survive;
        if surviving > 0.0 {
            *weights.entry((BasisLabel::ZERO, b)).or_insert(0.0) += surviving;
        }
        absorbed += w - surviving;
    }
    Ok(DiagonalState::from_raw(state.n_qubits(), weights, absorbed))
}
