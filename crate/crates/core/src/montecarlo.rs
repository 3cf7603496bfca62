//! Stochastic single-shot trajectories through the scheme, the abstract
//! analogue of one photon cycling through the optical loop until it is
//! either absorbed or read out.
//!
//! Per-trial randomness is a pure function of `(seed, trial_index)`, so an
//! estimate is reproducible bit for bit and independent of how trials are
//! scheduled across threads. The generator is SplitMix64 (Steele et al.,
//! "Fast splittable pseudorandom number generators"): each trial runs its
//! own substream whose start state is the mixed hash of seed and trial
//! index.

use rayon::prelude::*;

use crate::state::{BasisLabel, SchemeParams};
use crate::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; bijective on `u64`.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream with counter-derived substreams.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Substream for one trial. Distinct trial indices map to distinct
    /// start states under the same seed (multiplication by an odd constant
    /// and the finalizer are both bijections).
    pub fn for_trial(seed: u64, trial_index: u64) -> Self {
        SplitMix64 {
            state: mix64(seed ^ mix64(trial_index.wrapping_mul(GOLDEN_GAMMA))),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw from `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform label below `2^n_qubits`; exact, the modulus divides 2^64.
    pub fn next_label(&mut self, n_qubits: u32) -> u64 {
        self.next_u64() & ((1u64 << n_qubits) - 1)
    }
}

/// Fate of a single trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryOutcome {
    /// The run survived every post-selection; the output register reads
    /// `final_label`.
    Survived { final_label: BasisLabel },
    /// The run was terminated at the given application index (2..=k).
    Absorbed { at_application: u32 },
}

/// Sample one trajectory. Deterministic in `(seed, trial_index)`.
///
/// The forward application leaves the output register on the marked label
/// unless depolarization fires, in which case the register is uniform over
/// all labels. The label is then copied onto the ancilla, which never
/// changes again. Each adjoint cycle survives post-selection with the
/// register restored from the ancilla, or is absorbed: a noiseless adjoint
/// of a wrong label has zero overlap with the all-zero register, so it is
/// absorbed with certainty, while a depolarized cycle survives only if the
/// uniform draw lands on zero.
pub fn sample_trajectory(params: &SchemeParams, trial_index: u64, seed: u64) -> TrajectoryOutcome {
    let mut rng = SplitMix64::for_trial(seed, trial_index);
    let p = params.p();
    let n = params.n_qubits();

    let label = if rng.next_f64() < p {
        BasisLabel::new(rng.next_label(n), n).expect("masked label is in range")
    } else {
        params.marked()
    };

    for applications in 2..=params.k() {
        if rng.next_f64() < p {
            if rng.next_label(n) != 0 {
                return TrajectoryOutcome::Absorbed {
                    at_application: applications,
                };
            }
        } else if label != params.marked() {
            return TrajectoryOutcome::Absorbed {
                at_application: applications,
            };
        }
    }
    TrajectoryOutcome::Survived { final_label: label }
}

/// Frequency estimate over many trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub trials: u64,
    pub seed: u64,
    /// Fraction of trials that survived to an output.
    pub survival_freq: f64,
    /// Fraction of surviving trials that read a wrong label; `None` if no
    /// trial survived.
    pub error_freq: Option<f64>,
    /// Binomial standard error of `survival_freq`.
    pub stderr_survival: f64,
    /// Binomial standard error of `error_freq`, over surviving trials.
    pub stderr_error: Option<f64>,
    /// Final-label counts over surviving trials, indexed by label value.
    pub histogram: Vec<u64>,
}

impl McEstimate {
    pub fn survived(&self) -> u64 {
        self.histogram.iter().sum()
    }
}

#[derive(Clone)]
struct Counts {
    survived: u64,
    histogram: Vec<u64>,
}

impl Counts {
    fn new(dim: usize) -> Self {
        Counts {
            survived: 0,
            histogram: vec![0; dim],
        }
    }

    fn record(mut self, outcome: TrajectoryOutcome) -> Self {
        if let TrajectoryOutcome::Survived { final_label } = outcome {
            self.survived += 1;
            self.histogram[final_label.value() as usize] += 1;
        }
        self
    }

    fn merge(mut self, other: Counts) -> Self {
        self.survived += other.survived;
        for (into, from) in self.histogram.iter_mut().zip(&other.histogram) {
            *into += from;
        }
        self
    }
}

fn binomial_stderr(freq: f64, n: u64) -> f64 {
    (freq * (1.0 - freq) / n as f64).sqrt()
}

/// Aggregate `trials` independent trajectories. Deterministic for fixed
/// `(params, trials, seed)`: trials may run in parallel, and the integer
/// counts make the aggregation schedule-independent.
pub fn estimate(params: &SchemeParams, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials < 1 {
        return Err(Error::ZeroTrials);
    }
    let dim = params.dim() as usize;
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || Counts::new(dim),
            |counts, trial| counts.record(sample_trajectory(params, trial, seed)),
        )
        .reduce(|| Counts::new(dim), Counts::merge);

    let survival_freq = counts.survived as f64 / trials as f64;
    let wrong = counts.survived - counts.histogram[params.marked().value() as usize];
    let (error_freq, stderr_error) = if counts.survived > 0 {
        let freq = wrong as f64 / counts.survived as f64;
        (Some(freq), Some(binomial_stderr(freq, counts.survived)))
    } else {
        (None, None)
    };

    Ok(McEstimate {
        trials,
        seed,
        survival_freq,
        error_freq,
        stderr_survival: binomial_stderr(survival_freq, trials),
        stderr_error,
        histogram: counts.histogram,
    })
}
