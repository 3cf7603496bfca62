//! The `validate` command: run every implementation route against every
//! other and report the first disagreement.

use std::io::Write;

use revsup_core::{
    analytic, dm_oracle, estimate, protocol, verify_against_analytic, SchemeParams, DM_MAX_QUBITS,
};

use crate::commands::{CmdError, ValidateArgs};

/// Fixed seed for the sampling spot checks; recorded so reruns are
/// deterministic.
pub const MC_SEED: u64 = 0xBA5E_BA11;
const MC_TRIALS: u64 = 1_000_000;

/// Closed-form versus simulation check for one point, also used as the
/// negative-control hook in tests: a corrupted result must be rejected.
pub fn check_simulation_point(result: &protocol::SchemeResult) -> Result<(), String> {
    let report = verify_against_analytic(result).map_err(|e| e.to_string())?;
    if report.pass {
        Ok(())
    } else {
        let params = &result.params;
        Err(format!(
            "(N={}, p={}, k={}): {report:?}",
            params.n_qubits(),
            params.p(),
            params.k()
        ))
    }
}

fn five_sigma(observed: f64, truth: f64, samples: u64) -> bool {
    let sigma = (truth * (1.0 - truth) / samples as f64).sqrt();
    (observed - truth).abs() <= 5.0 * sigma
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<(), CmdError> {
    if args.max_n < 1 || args.max_n > DM_MAX_QUBITS {
        return Err(CmdError::Config(format!(
            "--max-n must be in 1..={DM_MAX_QUBITS}"
        )));
    }

    // Density-matrix oracle against the sparse fast path.
    let mut points = 0;
    for n in 1..=args.max_n {
        for p in [0.0, 0.1, 0.5, 0.9, 1.0] {
            for k in [1, 2, 3, 5] {
                let params = SchemeParams::new(n, p, k, 1)?;
                let report = dm_oracle::compare(&params)?;
                if !report.pass {
                    writeln!(
                        out,
                        "FAIL oracle comparison (N={n}, p={p}, k={k}): {report:?}"
                    )?;
                    return Err(CmdError::Validation(format!(
                        "oracle comparison failed at (N={n}, p={p}, k={k})"
                    )));
                }
                points += 1;
            }
        }
    }
    writeln!(
        out,
        "oracle vs simulation: {points} points agree (N <= {}, diagonal and trace to 1e-12)",
        args.max_n
    )?;

    // Simulation against the closed forms on a denser grid.
    let mut points = 0;
    for n in 1..=6 {
        for p in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            for k in 1..=20 {
                let params = SchemeParams::new(n, p, k, 1)?;
                let result = protocol::run_scheme(&params);
                if let Err(detail) = check_simulation_point(&result) {
                    writeln!(out, "FAIL simulation vs closed form {detail}")?;
                    return Err(CmdError::Validation(format!(
                        "simulation vs closed form failed at {detail}"
                    )));
                }
                points += 1;
            }
        }
    }
    writeln!(
        out,
        "simulation vs closed forms: {points} points agree (1e-12 relative)"
    )?;

    // Monte Carlo spot checks at five standard errors.
    let params = SchemeParams::new(2, 0.5, 3, 1)?;
    let est = estimate(&params, MC_TRIALS, MC_SEED)?;
    let survival = 1.0 - analytic::zeta(2, 0.5, 3)?;
    let epsilon = analytic::epsilon(2, 0.5, 3)?;
    let survival_ok = five_sigma(est.survival_freq, survival, MC_TRIALS);
    let error_ok = match est.error_freq {
        Some(freq) => five_sigma(freq, epsilon, est.survived()),
        None => false,
    };
    if !survival_ok || !error_ok {
        writeln!(
            out,
            "FAIL sampling (N=2, p=0.5, k=3, trials={MC_TRIALS}, seed={MC_SEED}): \
             survival {} vs {survival}, error {:?} vs {epsilon}",
            est.survival_freq, est.error_freq
        )?;
        return Err(CmdError::Validation(
            "Monte Carlo spot check failed at (N=2, p=0.5, k=3)".into(),
        ));
    }
    let noiseless = estimate(&SchemeParams::new(3, 0.0, 4, 5)?, 10_000, MC_SEED)?;
    if noiseless.survival_freq != 1.0 || noiseless.error_freq != Some(0.0) {
        writeln!(
            out,
            "FAIL sampling (N=3, p=0, k=4): noiseless trials must all survive"
        )?;
        return Err(CmdError::Validation(
            "Monte Carlo noiseless check failed".into(),
        ));
    }
    writeln!(
        out,
        "sampling vs closed forms: spot checks within five standard errors \
         ({MC_TRIALS} trials, seed {MC_SEED})"
    )?;

    writeln!(out, "all validation checks passed")?;
    Ok(())
}
