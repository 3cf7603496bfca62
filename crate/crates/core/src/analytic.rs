//! Closed-form error rate, absorption probability, branch weights, and
//! expected repetitions, evaluated without underflow.
//!
//! After `k` total applications the correct branch carries
//! `q^k = (1 - (2^N-1)p/2^N)^k` and each of the `2^N - 1` wrong labels
//! carries `r^k = (p/2^N)^k`. The conditional error rate is
//!
//! ```text
//! epsilon = (2^N-1) r^k / ((2^N-1) r^k + q^k) = 1 / (1 + B^k / (2^N-1))
//! ```
//!
//! with `B = q/r = 2^N (1/p - 1) + 1`. The ratio form is the primary
//! evaluation path: computed in the log domain it avoids both catastrophic
//! cancellation for small epsilon and underflow for large `k`. Raw weights
//! are reported alongside natural-log companions that stay finite long after
//! the raw doubles flush to zero.

use crate::{Error, Result};

/// Largest register width the closed forms accept. Far beyond the sparse
/// simulation cap; label arithmetic stays exact in `f64` well past this.
const MAX_ANALYTIC_QUBITS: u32 = 64;

/// Branch weights after `k` applications, raw and in natural log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchWeights {
    /// `q^k`, the weight on the marked label.
    pub correct: f64,
    /// `(2^N - 1) r^k`, the total weight over all wrong labels.
    pub wrong_total: f64,
    /// `ln(correct)`; always finite.
    pub log_correct: f64,
    /// `ln(wrong_total)`; negative infinity when `p = 0`.
    pub log_wrong_total: f64,
}

impl BranchWeights {
    /// Total surviving mass `correct + wrong_total`, i.e. `1 - zeta`.
    pub fn surviving_mass(&self) -> f64 {
        self.correct + self.wrong_total
    }
}

/// Every closed-form quantity for one `(N, p, k)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPoint {
    pub n_qubits: u32,
    pub p: f64,
    pub k: u32,
    /// Conditional error rate of the surviving output.
    pub epsilon: f64,
    /// Probability that a whole run of the scheme is absorbed.
    pub zeta: f64,
    /// Expected number of whole-scheme runs until one survives,
    /// `1 / (1 - zeta)`; infinite if the surviving mass underflows to zero.
    pub expected_runs: f64,
    /// `ln` of the correct-branch weight.
    pub log_correct_weight: f64,
    /// `ln` of the total wrong-branch weight; negative infinity at `p = 0`.
    pub log_wrong_weight_total: f64,
}

impl AnalyticPoint {
    /// `log10(epsilon)`; negative infinity at `p = 0`.
    pub fn log10_epsilon(&self) -> f64 {
        log10_epsilon(self.n_qubits, self.p, self.k).expect("fields were validated at construction")
    }
}

fn validate(n_qubits: u32, p: f64, k: u32) -> Result<()> {
    if !(1..=MAX_ANALYTIC_QUBITS).contains(&n_qubits) {
        return Err(Error::QubitCountOutOfRange {
            got: n_qubits,
            max: MAX_ANALYTIC_QUBITS,
        });
    }
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if k < 1 {
        return Err(Error::ZeroApplications);
    }
    Ok(())
}

fn dim_f(n_qubits: u32) -> f64 {
    2f64.powi(n_qubits as i32)
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `ln(q/r) = ln(2^N (1/p - 1) + 1)`, the per-application decay rate of the
/// error-rate odds. Requires `p > 0`.
pub fn log_weight_ratio(n_qubits: u32, p: f64) -> Result<f64> {
    validate(n_qubits, p, 1)?;
    if p == 0.0 {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok((dim_f(n_qubits) * (1.0 / p - 1.0) + 1.0).ln())
}

/// Correct and wrong-branch weights after `k` applications.
pub fn branch_weights(n_qubits: u32, p: f64, k: u32) -> Result<BranchWeights> {
    validate(n_qubits, p, k)?;
    let dim = dim_f(n_qubits);
    let q = 1.0 - (dim - 1.0) * p / dim;
    let r = p / dim;
    Ok(BranchWeights {
        correct: q.powi(k as i32),
        wrong_total: (dim - 1.0) * r.powi(k as i32),
        log_correct: k as f64 * q.ln(),
        log_wrong_total: (dim - 1.0).ln() + k as f64 * r.ln(),
    })
}

/// Conditional error rate of the surviving output after `k` applications.
///
/// Endpoints take their analytic limits: exactly 0 at `p = 0` and exactly
/// `(2^N - 1)/2^N` at `p = 1`, where the output carries no information and
/// the error rate equals uniform guessing for every `k`.
pub fn epsilon(n_qubits: u32, p: f64, k: u32) -> Result<f64> {
    validate(n_qubits, p, k)?;
    let dim = dim_f(n_qubits);
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok((dim - 1.0) / dim);
    }
    let t = k as f64 * (dim * (1.0 / p - 1.0) + 1.0).ln() - (dim - 1.0).ln();
    Ok(1.0 / (1.0 + t.exp()))
}

/// `ln(epsilon)`: finite for every `p > 0` and `k`, including deep-tail
/// points where the raw value underflows; negative infinity at `p = 0`.
pub fn log_epsilon(n_qubits: u32, p: f64, k: u32) -> Result<f64> {
    validate(n_qubits, p, k)?;
    let dim = dim_f(n_qubits);
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(((dim - 1.0) / dim).ln());
    }
    let t = k as f64 * (dim * (1.0 / p - 1.0) + 1.0).ln() - (dim - 1.0).ln();
    Ok(-softplus(t))
}

/// `log10(epsilon)`.
pub fn log10_epsilon(n_qubits: u32, p: f64, k: u32) -> Result<f64> {
    Ok(log_epsilon(n_qubits, p, k)? / std::f64::consts::LN_10)
}

/// Probability of failing to obtain any output: one minus the total
/// surviving mass `(2^N - 1) r^k + q^k`.
pub fn zeta(n_qubits: u32, p: f64, k: u32) -> Result<f64> {
    let weights = branch_weights(n_qubits, p, k)?;
    Ok((1.0 - weights.surviving_mass()).max(0.0))
}

/// Expected number of whole-scheme runs until one survives. Returns
/// positive infinity in the degenerate case where the surviving mass
/// underflows to zero in double precision.
pub fn expected_runs(n_qubits: u32, p: f64, k: u32) -> Result<f64> {
    let mass = branch_weights(n_qubits, p, k)?.surviving_mass();
    Ok(1.0 / mass)
}

/// All closed-form quantities for one parameter point.
pub fn point(n_qubits: u32, p: f64, k: u32) -> Result<AnalyticPoint> {
    let weights = branch_weights(n_qubits, p, k)?;
    Ok(AnalyticPoint {
        n_qubits,
        p,
        k,
        epsilon: epsilon(n_qubits, p, k)?,
        zeta: (1.0 - weights.surviving_mass()).max(0.0),
        expected_runs: 1.0 / weights.surviving_mass(),
        log_correct_weight: weights.log_correct,
        log_wrong_weight_total: weights.log_wrong_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Exact rational values of the ratio form, frozen from integer
    // arithmetic: 5^10 = 9765625 and 145^5 = 64097340625.
    const EPS_2_HALF_10: f64 = 3.0 / 9765628.0;
    const EPS_4_TENTH_5: f64 = 15.0 / 64097340640.0;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }

    #[test]
    fn epsilon_matches_exact_rational_values() {
        let eps = epsilon(2, 0.5, 10).unwrap();
        assert!(rel(eps, EPS_2_HALF_10) < 1e-12, "{eps}");
        assert!((eps - 3.0720e-7).abs() < 1e-11);

        let eps = epsilon(4, 0.1, 5).unwrap();
        assert!(rel(eps, EPS_4_TENTH_5) < 1e-12, "{eps}");
        assert!((eps - 2.3402e-10).abs() < 1e-14);
    }

    #[test]
    fn epsilon_endpoints_are_exact() {
        for k in [1, 7, 50] {
            for n in [1, 2, 5] {
                assert_eq!(epsilon(n, 0.0, k).unwrap(), 0.0);
                let dim = (1u64 << n) as f64;
                assert_eq!(epsilon(n, 1.0, k).unwrap(), (dim - 1.0) / dim);
            }
        }
        assert_eq!(epsilon(2, 1.0, 7).unwrap(), 0.75);
    }

    #[test]
    fn epsilon_rejects_bad_arguments() {
        assert!(epsilon(0, 0.5, 1).is_err());
        assert!(epsilon(2, -0.5, 1).is_err());
        assert!(epsilon(2, 1.5, 1).is_err());
        assert!(epsilon(2, f64::NAN, 1).is_err());
        assert!(epsilon(2, 0.5, 0).is_err());
    }

    #[test]
    fn zeta_examples() {
        // 1 - 3 * 0.125^3 - 0.625^3, all dyadic.
        assert_eq!(zeta(2, 0.5, 3).unwrap(), 0.75);
        // Absorbed cross terms 2 * (0.75 * 0.25) of the one-qubit case.
        assert_eq!(zeta(1, 0.5, 2).unwrap(), 0.375);
        for k in [1, 3, 20] {
            assert_eq!(zeta(3, 0.0, k).unwrap(), 0.0);
        }
        // k = 1 never absorbs: the first forward run is not post-selected.
        for p in [0.0, 0.3, 1.0] {
            assert!(zeta(2, p, 1).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn expected_runs_examples() {
        assert_eq!(expected_runs(2, 0.5, 3).unwrap(), 4.0);
        assert_eq!(expected_runs(3, 0.0, 11).unwrap(), 1.0);

        // Independent oracle: sequential products instead of powi.
        let (q, r) = (1.0 - 15.0 * 0.1 / 16.0, 0.1 / 16.0);
        let (mut qk, mut rk) = (1.0, 1.0);
        for _ in 0..5 {
            qk *= q;
            rk *= r;
        }
        let oracle = 1.0 / (qk + 15.0 * rk);
        let runs = expected_runs(4, 0.1, 5).unwrap();
        assert!(rel(runs, oracle) < 1e-12);
        assert!((runs - 1.6359).abs() < 1e-3);
    }

    #[test]
    fn branch_weights_examples() {
        let w = branch_weights(1, 0.5, 2).unwrap();
        assert_eq!(w.correct, 0.5625);
        assert_eq!(w.wrong_total, 0.0625);

        let w = branch_weights(2, 0.4, 1).unwrap();
        assert!((w.correct - 0.7).abs() < 1e-15);
        assert!((w.wrong_total - 0.3).abs() < 1e-15);

        let w = branch_weights(3, 0.0, 9).unwrap();
        assert_eq!(w.correct, 1.0);
        assert_eq!(w.wrong_total, 0.0);
        assert_eq!(w.log_wrong_total, f64::NEG_INFINITY);
    }

    #[test]
    fn log_companions_agree_with_raw_weights() {
        for n in [1, 3, 6] {
            for p in [0.05, 0.5, 0.9, 1.0] {
                for k in [1, 4, 19] {
                    let w = branch_weights(n, p, k).unwrap();
                    assert!(rel(w.log_correct.exp(), w.correct) < 1e-12);
                    assert!(rel(w.log_wrong_total.exp(), w.wrong_total) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn point_fields_are_mutually_consistent() {
        for (n, p, k) in [(1, 0.5, 2), (2, 0.5, 10), (4, 0.1, 5), (3, 0.9, 7)] {
            let pt = point(n, p, k).unwrap();
            let survive = pt.log_correct_weight.exp() + pt.log_wrong_weight_total.exp();
            assert!((survive - (1.0 - pt.zeta)).abs() < 1e-12);
            assert!(rel(pt.expected_runs, 1.0 / (1.0 - pt.zeta)) < 1e-12);
            assert!(pt.epsilon >= 0.0);
            assert!(pt.epsilon <= (dim_f(n) - 1.0) / dim_f(n));
            assert!(rel(pt.log10_epsilon(), pt.epsilon.log10()) < 1e-9);
        }
    }

    #[test]
    fn epsilon_matches_branch_weight_ratio_in_log_domain() {
        for n in 1..=6 {
            for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
                for k in [1, 2, 5, 13, 20] {
                    let w = branch_weights(n, p, k).unwrap();
                    // log(wrong / (wrong + correct)) via the larger pivot.
                    let pivot = w.log_correct.max(w.log_wrong_total);
                    let ratio = (w.log_wrong_total - pivot).exp()
                        / ((w.log_wrong_total - pivot).exp() + (w.log_correct - pivot).exp());
                    assert!(
                        rel(epsilon(n, p, k).unwrap(), ratio) < 1e-12,
                        "N={n} p={p} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn deep_tail_stays_finite_in_log_domain() {
        let raw = epsilon(2, 0.5, 10_000).unwrap();
        assert_eq!(raw, 0.0);
        let log10 = log10_epsilon(2, 0.5, 10_000).unwrap();
        assert!(log10.is_finite());
        assert!(log10 < -6000.0);
    }

    #[test]
    fn decay_rate_reaches_its_limit_by_k_50() {
        // Restricted to p <= 0.75, where the odds term e^{-t} at k = 50 is
        // far below the 1e-9 assertion budget for every width.
        for n in 1..=6 {
            for p in [0.1, 0.25, 0.5, 0.75] {
                let step = log_epsilon(n, p, 50).unwrap() - log_epsilon(n, p, 51).unwrap();
                let limit = log_weight_ratio(n, p).unwrap();
                assert!((step - limit).abs() < 1e-9, "N={n} p={p}");
            }
        }
    }

    #[test]
    fn monotone_in_k_and_flat_at_p_one() {
        for p in [0.1, 0.5, 0.9] {
            for k in 1..50 {
                assert!(epsilon(2, p, k + 1).unwrap() < epsilon(2, p, k).unwrap());
            }
        }
        let flat = epsilon(2, 1.0, 1).unwrap();
        for k in 2..=50 {
            assert_eq!(epsilon(2, 1.0, k).unwrap(), flat);
        }
    }

    #[test]
    fn monotone_in_width_except_single_application() {
        // One application: more labels means more spread mass, any p.
        for p in [0.1, 0.5, 0.9] {
            for n in 1..10 {
                assert!(epsilon(n + 1, p, 1).unwrap() > epsilon(n, p, 1).unwrap());
            }
        }
        // For k >= 2 the drop with width holds once the odds gain
        // k ln(B(N+1)/B(N)) exceeds the label-count term
        // ln((2^(N+1)-1)/(2^N-1)); the binding step is N = 1 -> 2, which
        // bounds p below roughly 0.42 at k = 2, 0.72 at k = 3, 0.86 at
        // k = 5.
        for p in [0.1, 0.25, 0.4] {
            for k in [2, 3, 5] {
                for n in 1..10 {
                    assert!(
                        epsilon(n + 1, p, k).unwrap() < epsilon(n, p, k).unwrap(),
                        "N={n} p={p} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn width_monotonicity_reverses_at_two_applications_near_the_bound() {
        // Regression pinning the valid region above: at p = 0.5, k = 2 the
        // first width step raises the error rate, 1/10 -> 3/28.
        let narrow = epsilon(1, 0.5, 2).unwrap();
        let wide = epsilon(2, 0.5, 2).unwrap();
        assert!((narrow - 0.1).abs() < 1e-15);
        assert!((wide - 3.0 / 28.0).abs() < 1e-15);
        assert!(wide > narrow);
    }
}
