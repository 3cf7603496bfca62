//! Two-register classical-mixture state and experiment parameters.
//!
//! Every state reachable by the protocol is a classical mixture of products
//! of computational-basis states, so it is stored as a sparse map from pairs
//! of basis labels (output register, ancilla register) to probability
//! weights, plus a scalar `absorbed` sink that collects the mass terminated
//! by post-selection. Weights plus `absorbed` always sum to one.

use std::collections::BTreeMap;

use crate::{Error, Result, MAX_QUBITS};

/// Absolute slack allowed on the unit-mass invariant at construction time.
/// Tighter 1e-12 conformance is a tested contract, not a constructor gate.
const MASS_TOL: f64 = 1e-9;

/// A computational-basis label: an integer in `[0, 2^N)` read as an N-bit
/// string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel(u64);

impl BasisLabel {
    /// The all-zero label `|0...0>`.
    pub const ZERO: BasisLabel = BasisLabel(0);

    /// Checked constructor: `value` must fit in `n_qubits` bits.
    pub fn new(value: u64, n_qubits: u32) -> Result<Self> {
        if n_qubits < 64 && value >= 1u64 << n_qubits {
            return Err(Error::LabelOutOfRange { value, n_qubits });
        }
        Ok(BasisLabel(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Bitwise XOR, the action of a transversal CNOT group on the target.
    pub fn xor(self, other: BasisLabel) -> BasisLabel {
        BasisLabel(self.0 ^ other.0)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which of the two N-qubit registers to address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    /// Register 1: the algorithm's output register, where the answer is read.
    Output,
    /// Register 2: the ancilla register the answer is copied onto.
    Ancilla,
}

/// Extension of the black-box contract `U|0> = |y>` to a full permutation of
/// the label space. The protocol's surviving output is independent of this
/// choice; it only matters when the forward algorithm is applied to labels
/// other than zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completion {
    /// Transposition exchanging 0 and the marked label (the default).
    Swap,
    /// Explicit permutation table: `table[i]` is the image of label `i`.
    Permutation(Vec<u64>),
}

/// Configuration of one experiment: register width, depolarization
/// probability, total application count, marked answer, and the unitary
/// completion choice.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    n_qubits: u32,
    p: f64,
    k: u32,
    marked: BasisLabel,
    completion: Completion,
}

impl SchemeParams {
    /// Validated constructor with the default swap completion.
    ///
    /// `k` counts total algorithm applications: one forward run plus `k - 1`
    /// adjoint cycles.
    pub fn new(n_qubits: u32, p: f64, k: u32, marked: u64) -> Result<Self> {
        Self::with_completion(n_qubits, p, k, marked, Completion::Swap)
    }

    /// Validated constructor with an explicit completion choice.
    pub fn with_completion(
        n_qubits: u32,
        p: f64,
        k: u32,
        marked: u64,
        completion: Completion,
    ) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCountOutOfRange {
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        if k < 1 {
            return Err(Error::ZeroApplications);
        }
        let marked = BasisLabel::new(marked, n_qubits)?;
        if let Completion::Permutation(table) = &completion {
            let dim = 1usize << n_qubits;
            if table.len() != dim || table[0] != marked.value() {
                return Err(Error::InvalidCompletion);
            }
            let mut seen = vec![false; dim];
            for &image in table {
                if image as usize >= dim || seen[image as usize] {
                    return Err(Error::InvalidCompletion);
                }
                seen[image as usize] = true;
            }
        }
        Ok(SchemeParams {
            n_qubits,
            p,
            k,
            marked,
            completion,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Label-space dimension `2^N`.
    pub fn dim(&self) -> u64 {
        1u64 << self.n_qubits
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn marked(&self) -> BasisLabel {
        self.marked
    }

    pub fn completion(&self) -> &Completion {
        &self.completion
    }

    /// Image of `label` under the noiseless forward algorithm.
    pub fn apply_completion(&self, label: BasisLabel) -> BasisLabel {
        match &self.completion {
            Completion::Swap => {
                if label.is_zero() {
                    self.marked
                } else if label == self.marked {
                    BasisLabel::ZERO
                } else {
                    label
                }
            }
            Completion::Permutation(table) => BasisLabel(table[label.value() as usize]),
        }
    }

    /// Copy of these parameters with a different application count.
    pub fn with_k(&self, k: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::ZeroApplications);
        }
        let mut params = self.clone();
        params.k = k;
        Ok(params)
    }
}

/// Sparse diagonal mixture over pairs of basis labels, plus absorbed mass.
///
/// Entry `((a, b), w)` carries weight `w` on output-register label `a` and
/// ancilla label `b`. Entries with weight exactly zero are never stored;
/// tiny positive weights are kept, they are meaningful wrong-branch masses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    n_qubits: u32,
    weights: BTreeMap<(BasisLabel, BasisLabel), f64>,
    absorbed: f64,
}

impl DiagonalState {
    /// Both registers initialized to the all-zero label with unit weight.
    pub fn initial(n_qubits: u32) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCountOutOfRange {
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut weights = BTreeMap::new();
        weights.insert((BasisLabel::ZERO, BasisLabel::ZERO), 1.0);
        Ok(DiagonalState {
            n_qubits,
            weights,
            absorbed: 0.0,
        })
    }

    /// Build a state from explicit entries. Labels must fit the register
    /// width, weights must be nonnegative, and total mass must be 1 within
    /// a loose construction tolerance. Zero-weight entries are pruned.
    pub fn from_entries<I>(n_qubits: u32, entries: I, absorbed: f64) -> Result<Self>
    where
        I: IntoIterator<Item = ((u64, u64), f64)>,
    {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCountOutOfRange {
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        if !absorbed.is_finite() || absorbed < 0.0 {
            return Err(Error::InvalidWeight(absorbed));
        }
        let mut weights = BTreeMap::new();
        for ((a, b), w) in entries {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight(w));
            }
            let a = BasisLabel::new(a, n_qubits)?;
            let b = BasisLabel::new(b, n_qubits)?;
            if w > 0.0 {
                *weights.entry((a, b)).or_insert(0.0) += w;
            }
        }
        let state = DiagonalState {
            n_qubits,
            weights,
            absorbed,
        };
        let mass = state.total_mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::UnnormalizedState(mass));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Label-space dimension `2^N`.
    pub fn dim(&self) -> u64 {
        1u64 << self.n_qubits
    }

    /// Mass terminated by post-selection so far.
    pub fn absorbed(&self) -> f64 {
        self.absorbed
    }

    /// Surviving mass as `1 - absorbed`. Agrees with
    /// [`surviving_mass`](Self::surviving_mass) to the total-mass tolerance,
    /// but loses relative precision once almost everything is absorbed.
    pub fn survival(&self) -> f64 {
        1.0 - self.absorbed
    }

    /// Surviving mass as the direct sum of stored weights. Free of the
    /// cancellation in `1 - absorbed`, so it keeps full relative precision
    /// however deep the absorption runs.
    pub fn surviving_mass(&self) -> f64 {
        // + 0.0 canonicalizes the -0.0 an empty float sum produces.
        self.weights.values().sum::<f64>() + 0.0
    }

    /// Weight stored on `(a, b)`, zero if the entry is absent.
    pub fn weight(&self, a: BasisLabel, b: BasisLabel) -> f64 {
        self.weights.get(&(a, b)).copied().unwrap_or(0.0)
    }

    /// Iterate stored entries in label order.
    pub fn entries(&self) -> impl Iterator<Item = ((BasisLabel, BasisLabel), f64)> + '_ {
        self.weights.iter().map(|(&labels, &w)| (labels, w))
    }

    pub fn entry_count(&self) -> usize {
        self.weights.len()
    }

    /// Sum of stored weights plus absorbed mass. Equals 1 within 1e-12 for
    /// every state this crate produces.
    pub fn total_mass(&self) -> f64 {
        self.weights.values().sum::<f64>() + self.absorbed
    }

    /// Unnormalized marginal over one register: sums surviving weights over
    /// the other register. Absorbed mass is not included.
    pub fn marginal(&self, register: Register) -> BTreeMap<BasisLabel, f64> {
        let mut out = BTreeMap::new();
        for (&(a, b), &w) in &self.weights {
            let label = match register {
                Register::Output => a,
                Register::Ancilla => b,
            };
            *out.entry(label).or_insert(0.0) += w;
        }
        out
    }

    /// Marginal divided by the surviving mass. Sums to 1 within 1e-12
    /// whenever any mass survives; errs with [`Error::AllAbsorbed`]
    /// otherwise. Normalizes by the summed weights rather than
    /// `1 - absorbed` so the result keeps relative precision at deep
    /// absorption.
    pub fn conditional_distribution(
        &self,
        register: Register,
    ) -> Result<BTreeMap<BasisLabel, f64>> {
        let surviving = self.surviving_mass();
        if surviving <= 0.0 {
            return Err(Error::AllAbsorbed);
        }
        let mut out = self.marginal(register);
        for w in out.values_mut() {
            *w /= surviving;
        }
        Ok(out)
    }

    /// Rebuild with transformed labels and unchanged weights. Used by the
    /// CNOT groups, which permute entries.
    pub(crate) fn map_labels<F>(&self, f: F) -> DiagonalState
    where
        F: Fn(BasisLabel, BasisLabel) -> (BasisLabel, BasisLabel),
    {
        let mut weights = BTreeMap::new();
        for (&(a, b), &w) in &self.weights {
            let (a2, b2) = f(a, b);
            *weights.entry((a2, b2)).or_insert(0.0) += w;
        }
        DiagonalState {
            n_qubits: self.n_qubits,
            weights,
            absorbed: self.absorbed,
        }
    }

    /// Assemble a successor state from accumulated entries. Zero weights are
    /// pruned; calling code is responsible for mass bookkeeping.
    pub(crate) fn from_raw(
        n_qubits: u32,
        weights: BTreeMap<(BasisLabel, BasisLabel), f64>,
        absorbed: f64,
    ) -> DiagonalState {
        let mut weights = weights;
        weights.retain(|_, w| *w != 0.0);
        DiagonalState {
            n_qubits,
            weights,
            absorbed,
        }
    }
}
