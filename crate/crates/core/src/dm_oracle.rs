//! Dense density-matrix implementation of the scheme, used as a brute-force
//! oracle for the sparse diagonal fast path.
//!
//! The oracle stores the full `4^N`-dimensional joint operator and applies
//! every step literally: the noisy algorithm as
//! `rho -> (1-p) (U ⊗ I) rho (U ⊗ I)^† + p (I/2^N) ⊗ tr_1(rho)`, the CNOT
//! groups as explicit permutation unitaries, and the post-selection as the
//! unrenormalized projection `(|0..0><0..0| ⊗ I) rho (...)`. Nothing here
//! assumes the state stays diagonal; that the off-diagonals stay at zero is
//! exactly what the comparison certifies.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::protocol::{CycleStats, SchemeResult};
use crate::state::{BasisLabel, Completion, DiagonalState, Register, SchemeParams};
use crate::{Error, Result, DM_MAX_QUBITS};

type Matrix = DMatrix<Complex64>;

/// Dense Hermitian joint operator over both registers. The trace may fall
/// below one; the deficit is the absorbed mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: u32,
    mat: Matrix,
}

impl DensityMatrix {
    /// Joint pure state `|0..0><0..0|` over both registers.
    pub fn initial(n_qubits: u32) -> Result<Self> {
        if !(1..=DM_MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCountOutOfRange {
                got: n_qubits,
                max: DM_MAX_QUBITS,
            });
        }
        let joint = 1usize << (2 * n_qubits);
        let mut mat = Matrix::zeros(joint, joint);
        mat[(0, 0)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { n_qubits, mat })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Single-register dimension `2^N`.
    pub fn register_dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Joint dimension `4^N`.
    pub fn joint_dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Largest `|m[i][j] - conj(m[j][i])|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.joint_dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.joint_dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.mat[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Gershgorin lower bound on the spectrum: `min_i (Re m[i][i] - sum of
    /// off-diagonal row magnitudes)`. Certifies positive semidefiniteness
    /// up to tolerance for the near-diagonal matrices this protocol
    /// produces.
    pub fn eigenvalue_floor(&self) -> f64 {
        let n = self.joint_dim();
        let mut floor = f64::INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            for j in 0..n {
                if i != j {
                    radius += self.mat[(i, j)].norm();
                }
            }
            floor = floor.min(self.mat[(i, i)].re - radius);
        }
        floor
    }

    /// Real diagonal, indexed by joint label `a * 2^N + b`.
    pub fn diagonal_weights(&self) -> Vec<f64> {
        (0..self.joint_dim()).map(|i| self.mat[(i, i)].re).collect()
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Permutation matrix on the output register implementing the completion:
/// column `i` holds `|completion(i)>`, so column 0 is the marked label.
pub fn build_completion_unitary(params: &SchemeParams) -> Matrix {
    let dim = params.dim() as usize;
    let mut mat = Matrix::zeros(dim, dim);
    for source in 0..dim {
        let image = match params.completion() {
            Completion::Swap | Completion::Permutation(_) => params
                .apply_completion(BasisLabel::new(source as u64, params.n_qubits()).unwrap())
                .value() as usize,
        };
        mat[(image, source)] = c(1.0);
    }
    mat
}

/// Joint permutation unitary from a map on label pairs.
fn joint_permutation<F>(n_qubits: u32, map: F) -> Matrix
where
    F: Fn(usize, usize) -> (usize, usize),
{
    let dim = 1usize << n_qubits;
    let joint = dim * dim;
    let mut mat = Matrix::zeros(joint, joint);
    for a in 0..dim {
        for b in 0..dim {
            let (a2, b2) = map(a, b);
            mat[(a2 * dim + b2, a * dim + b)] = c(1.0);
        }
    }
    mat
}

/// `tr_1(rho)`: reduced operator on register 2.
fn partial_trace_register1(rho: &Matrix, dim: usize) -> Matrix {
    let mut reduced = Matrix::zeros(dim, dim);
    for b in 0..dim {
        for b2 in 0..dim {
            let mut sum = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                sum += rho[(a * dim + b, a * dim + b2)];
            }
            reduced[(b, b2)] = sum;
        }
    }
    reduced
}

/// Depolarizing application of a register-1 unitary:
/// `(1-p) (U ⊗ I) rho (U ⊗ I)^† + p (I/2^N) ⊗ tr_1(rho)`.
fn apply_noisy_register1(rho: &Matrix, unitary: &Matrix, p: f64, dim: usize) -> Matrix {
    let joint_unitary = unitary.kronecker(&Matrix::identity(dim, dim));
    let coherent = &joint_unitary * rho * joint_unitary.adjoint();
    let mixed = Matrix::identity(dim, dim).kronecker(&partial_trace_register1(rho, dim));
    coherent * c(1.0 - p) + mixed * c(p / dim as f64)
}

struct Checkpoints {
    max_off_diagonal: f64,
    max_hermiticity_deviation: f64,
    min_eigenvalue_floor: f64,
    max_algorithm_trace_drift: f64,
    max_absorb_trace_gain: f64,
}

impl Checkpoints {
    fn observe(&mut self, dm: &DensityMatrix) {
        self.max_off_diagonal = self.max_off_diagonal.max(dm.max_off_diagonal());
        self.max_hermiticity_deviation = self
            .max_hermiticity_deviation
            .max(dm.hermiticity_deviation());
        self.min_eigenvalue_floor = self.min_eigenvalue_floor.min(dm.eigenvalue_floor());
    }

    /// The noisy algorithm channel is trace preserving.
    fn observe_algorithm(&mut self, before: f64, after: f64) {
        self.max_algorithm_trace_drift = self.max_algorithm_trace_drift.max((after - before).abs());
    }

    /// The absorbing projection never increases trace.
    fn observe_absorb(&mut self, before: f64, after: f64) {
        self.max_absorb_trace_gain = self.max_absorb_trace_gain.max(after - before);
    }
}

fn execute(params: &SchemeParams) -> Result<(SchemeResult, DensityMatrix, Checkpoints)> {
    let mut dm = DensityMatrix::initial(params.n_qubits())?;
    let dim = dm.register_dim();
    let completion = build_completion_unitary(params);
    let cnot2 = joint_permutation(params.n_qubits(), |a, b| (a, b ^ a));
    let cnot1 = joint_permutation(params.n_qubits(), |a, b| (a ^ b, b));
    // Projector |0..0><0..0| ⊗ I: keeps the register-1 zero block only.
    let mut absorb = Matrix::zeros(dim * dim, dim * dim);
    for b in 0..dim {
        absorb[(b, b)] = c(1.0);
    }

    let mut checkpoints = Checkpoints {
        max_off_diagonal: 0.0,
        max_hermiticity_deviation: 0.0,
        min_eigenvalue_floor: f64::INFINITY,
        max_algorithm_trace_drift: 0.0,
        max_absorb_trace_gain: 0.0,
    };
    let marked_joint = (params.marked().value() as usize) * dim + params.marked().value() as usize;

    let mut per_cycle = Vec::with_capacity(params.k() as usize);
    let mut all_absorbed_at = None;
    let observe =
        |dm: &DensityMatrix, applications: u32, flag: &mut Option<u32>, cp: &mut Checkpoints| {
            cp.observe(dm);
            let trace = dm.trace();
            let correct = dm.mat[(marked_joint, marked_joint)].re;
            let wrong = (0..dim * dim)
                .filter(|&i| i != marked_joint)
                .map(|i| dm.mat[(i, i)].re)
                .sum::<f64>()
                + 0.0;
            if trace <= 0.0 && flag.is_none() {
                *flag = Some(applications);
            }
            CycleStats {
                applications,
                survival: trace,
                correct_weight: correct,
                wrong_weight: wrong,
            }
        };

    let before = dm.trace();
    dm.mat = apply_noisy_register1(&dm.mat, &completion, params.p(), dim);
    checkpoints.observe_algorithm(before, dm.trace());
    checkpoints.observe(&dm);
    dm.mat = &cnot2 * &dm.mat * cnot2.adjoint();
    per_cycle.push(observe(&dm, 1, &mut all_absorbed_at, &mut checkpoints));

    let adjoint = completion.adjoint();
    for applications in 2..=params.k() {
        let before = dm.trace();
        dm.mat = apply_noisy_register1(&dm.mat, &adjoint, params.p(), dim);
        checkpoints.observe_algorithm(before, dm.trace());
        checkpoints.observe(&dm);
        let before = dm.trace();
        dm.mat = &absorb * &dm.mat * absorb.adjoint();
        checkpoints.observe_absorb(before, dm.trace());
        checkpoints.observe(&dm);
        dm.mat = &cnot1 * &dm.mat * cnot1.adjoint();
        per_cycle.push(observe(
            &dm,
            applications,
            &mut all_absorbed_at,
            &mut checkpoints,
        ));
    }

    let trace = dm.trace();
    let entries = (0..dim)
        .flat_map(|a| (0..dim).map(move |b| (a, b)))
        .filter_map(|(a, b)| {
            let w = dm.mat[(a * dim + b, a * dim + b)].re;
            (w != 0.0).then_some(((a as u64, b as u64), w))
        });
    let final_state = DiagonalState::from_entries(params.n_qubits(), entries, 1.0 - trace)?;
    let error_rate = final_state
        .conditional_distribution(Register::Output)
        .ok()
        .map(|cond| {
            cond.iter()
                .filter(|(&label, _)| label != params.marked())
                .map(|(_, &w)| w)
                .sum::<f64>()
                + 0.0
        });

    let result = SchemeResult {
        params: params.clone(),
        survival: final_state.surviving_mass(),
        error_rate,
        all_absorbed_at,
        per_cycle,
        final_state,
    };
    Ok((result, dm, checkpoints))
}

/// Run the scheme on the dense density matrix. Same contract as the sparse
/// [`crate::protocol::run_scheme`], but errs above the oracle width cap.
pub fn run_scheme_dm(params: &SchemeParams) -> Result<SchemeResult> {
    execute(params).map(|(result, _, _)| result)
}

/// Outcome of one sparse-versus-dense comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub params: SchemeParams,
    /// Largest absolute difference between the dense diagonal and the
    /// sparse weights, over all `4^N` joint labels.
    pub max_diagonal_deviation: f64,
    /// Largest off-diagonal magnitude seen at any protocol checkpoint.
    pub max_off_diagonal: f64,
    /// Largest Hermiticity deviation seen at any checkpoint.
    pub max_hermiticity_deviation: f64,
    /// Smallest Gershgorin spectrum bound seen at any checkpoint.
    pub min_eigenvalue_floor: f64,
    /// Largest trace change across any noisy-algorithm application, which
    /// is trace preserving.
    pub max_algorithm_trace_drift: f64,
    /// Largest trace increase across any absorbing projection, which never
    /// raises the trace.
    pub max_absorb_trace_gain: f64,
    /// |dense trace deficit - sparse absorbed mass|.
    pub absorbed_deviation: f64,
    pub survival_deviation: f64,
    pub error_rate_deviation: f64,
    pub pass: bool,
}

const COMPARE_TOL: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Run both implementations and compare: diagonal entry-for-entry within
/// 1e-12 absolute, off-diagonals below 1e-12, matching survival, error
/// rate, and absorbed mass, plus Hermiticity, spectrum floor, and trace
/// bounds on the dense side.
pub fn compare(params: &SchemeParams) -> Result<CompareReport> {
    let (dense, dm, checkpoints) = execute(params)?;
    let sparse = crate::protocol::run_scheme(params);

    let dim = dm.register_dim();
    let mut max_diagonal_deviation: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let dense_w = dm.mat[(a * dim + b, a * dim + b)].re;
            let sparse_w = sparse.final_state.weight(
                BasisLabel::new(a as u64, params.n_qubits()).unwrap(),
                BasisLabel::new(b as u64, params.n_qubits()).unwrap(),
            );
            max_diagonal_deviation = max_diagonal_deviation.max((dense_w - sparse_w).abs());
        }
    }

    let absorbed_deviation = ((1.0 - dm.trace()) - sparse.final_state.absorbed()).abs();
    let survival_deviation = (dense.survival - sparse.survival).abs();
    let error_rate_deviation = match (dense.error_rate, sparse.error_rate) {
        (Some(a), Some(b)) => (a - b).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };

    let trace = dm.trace();
    let pass = max_diagonal_deviation <= COMPARE_TOL
        && checkpoints.max_off_diagonal <= COMPARE_TOL
        && checkpoints.max_hermiticity_deviation <= COMPARE_TOL
        && checkpoints.min_eigenvalue_floor >= EIGENVALUE_FLOOR
        && checkpoints.max_algorithm_trace_drift <= COMPARE_TOL
        && checkpoints.max_absorb_trace_gain <= 0.0
        && absorbed_deviation <= COMPARE_TOL
        && survival_deviation <= COMPARE_TOL
        && error_rate_deviation <= COMPARE_TOL
        && (0.0..=1.0 + COMPARE_TOL).contains(&trace);

    Ok(CompareReport {
        params: params.clone(),
        max_diagonal_deviation,
        max_off_diagonal: checkpoints.max_off_diagonal,
        max_hermiticity_deviation: checkpoints.max_hermiticity_deviation,
        min_eigenvalue_floor: checkpoints.min_eigenvalue_floor,
        max_algorithm_trace_drift: checkpoints.max_algorithm_trace_drift,
        max_absorb_trace_gain: checkpoints.max_absorb_trace_gain,
        absorbed_deviation,
        survival_deviation,
        error_rate_deviation,
        pass,
    })
}
