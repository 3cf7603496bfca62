//! Acceptance suite: one test per criterion, each printing a pass line
//! with its elapsed time (visible under `cargo test -- --nocapture`).
//!
//! Tolerances are pinned in the asserts; a criterion that cannot meet its
//! tolerance fails its test rather than loosening it.

use std::process::Command;
use std::time::Instant;

use revsup_core::dm_oracle::compare;
use revsup_core::montecarlo::SplitMix64;
use revsup_core::{
    analytic, estimate, run_scheme, verify_against_analytic, Completion, SchemeParams,
};

fn pass(criterion: u32, started: Instant, detail: &str) {
    println!(
        "criterion {criterion}: PASS ({} ms) - {detail}",
        started.elapsed().as_millis()
    );
}

#[test]
fn criterion_1_quoted_error_rate_at_two_qubits() {
    let started = Instant::now();
    let eps = analytic::epsilon(2, 0.5, 10).unwrap();
    assert!(
        (3.05e-7..=3.10e-7).contains(&eps),
        "epsilon(2, 0.5, 10) = {eps} outside [3.05e-7, 3.10e-7]"
    );
    // Exact rational value of the ratio form: 3 / (3 + 5^10).
    assert!((eps - 3.0 / 9765628.0).abs() <= 1e-12 * eps);
    pass(1, started, &format!("epsilon(2, 0.5, 10) = {eps:.4e}"));
}

#[test]
fn criterion_2_quoted_error_rate_and_repetitions_at_four_qubits() {
    let started = Instant::now();
    let eps = analytic::epsilon(4, 0.1, 5).unwrap();
    assert!(eps < 3e-10, "epsilon(4, 0.1, 5) = {eps} not below 3e-10");
    let runs = analytic::expected_runs(4, 0.1, 5).unwrap();
    assert!(
        (1.60..=1.67).contains(&runs),
        "expected_runs(4, 0.1, 5) = {runs} outside [1.60, 1.67]"
    );
    pass(
        2,
        started,
        &format!("epsilon = {eps:.4e}, expected runs = {runs:.4}"),
    );
}

#[test]
fn criterion_3_simulation_matches_closed_forms_on_the_dense_grid() {
    let started = Instant::now();
    let mut points = 0;
    for n in 1..=6u32 {
        for p in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            for k in 1..=20u32 {
                let params = SchemeParams::new(n, p, k, (1 << n) - 1).unwrap();
                let report = verify_against_analytic(&run_scheme(&params)).unwrap();
                assert!(
                    report.pass,
                    "disagreement at (N={n}, p={p}, k={k}): {report:?}"
                );
                points += 1;
            }
        }
    }
    pass(
        3,
        started,
        &format!("{points} grid points at 1e-12 relative"),
    );
}

#[test]
fn criterion_4_density_matrix_oracle_agrees_on_the_full_grid() {
    let started = Instant::now();
    let mut points = 0;
    for n in 1..=3u32 {
        for p in [0.0, 0.1, 0.5, 0.9, 1.0] {
            for k in [1, 2, 3, 5] {
                let params = SchemeParams::new(n, p, k, 1).unwrap();
                let report = compare(&params).unwrap();
                assert!(
                    report.pass,
                    "oracle mismatch at (N={n}, p={p}, k={k}): {report:?}"
                );
                assert!(report.max_off_diagonal <= 1e-12);
                assert!(report.absorbed_deviation <= 1e-12);
                points += 1;
            }
        }
    }
    pass(
        4,
        started,
        &format!("{points} oracle comparisons, off-diagonals and trace deficits to 1e-12"),
    );
}

#[test]
fn criterion_5_completion_choice_leaves_surviving_states_bit_identical() {
    let started = Instant::now();
    let (n, y, p, k) = (3u32, 5u64, 0.37, 4u32);
    let dim = 1u64 << n;
    let reference = run_scheme(&SchemeParams::new(n, p, k, y).unwrap());
    for shuffle_seed in 1..=5u64 {
        // Fisher-Yates over the non-marked images, marked image pinned at 0.
        let mut rest: Vec<u64> = (0..dim).filter(|&v| v != y).collect();
        let mut rng = SplitMix64::new(shuffle_seed);
        for i in (1..rest.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            rest.swap(i, j);
        }
        let mut table = vec![y];
        table.extend(rest);
        let params =
            SchemeParams::with_completion(n, p, k, y, Completion::Permutation(table)).unwrap();
        let result = run_scheme(&params);
        assert_eq!(
            result.final_state, reference.final_state,
            "completion {shuffle_seed} changed the surviving state"
        );
        assert_eq!(result.survival.to_bits(), reference.survival.to_bits());
        assert_eq!(result.error_rate, reference.error_rate);
    }
    pass(
        5,
        started,
        "five random completions, surviving states bit-identical",
    );
}

#[test]
fn criterion_6_monte_carlo_frequencies_within_five_standard_errors() {
    let started = Instant::now();
    let (trials, seed) = (1_000_000u64, 42u64);
    let params = SchemeParams::new(2, 0.5, 3, 1).unwrap();
    let est = estimate(&params, trials, seed).unwrap();
    let survival_dev = (est.survival_freq - 0.25).abs();
    assert!(
        survival_dev <= 5.0 * est.stderr_survival,
        "survival {} deviates {survival_dev} > 5 * {}",
        est.survival_freq,
        est.stderr_survival
    );
    let error_dev = (est.error_freq.unwrap() - 3.0 / 128.0).abs();
    assert!(
        error_dev <= 5.0 * est.stderr_error.unwrap(),
        "error {:?} deviates {error_dev} > 5 * {:?}",
        est.error_freq,
        est.stderr_error
    );
    pass(
        6,
        started,
        &format!(
            "seed {seed}, {trials} trials: survival {} (target 0.25), error {:.6} (target {:.6})",
            est.survival_freq,
            est.error_freq.unwrap(),
            3.0 / 128.0
        ),
    );
}

#[test]
fn criterion_7_limit_properties() {
    let started = Instant::now();
    for n in 1..=10u32 {
        let dim = (1u64 << n) as f64;
        for k in 1..=50u32 {
            assert_eq!(analytic::epsilon(n, 0.0, k).unwrap(), 0.0);
            assert_eq!(analytic::zeta(n, 0.0, k).unwrap(), 0.0);
            assert_eq!(analytic::epsilon(n, 1.0, k).unwrap(), (dim - 1.0) / dim);
        }
    }
    for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
        for n in [1u32, 2, 4, 8] {
            for k in 1..50u32 {
                assert!(
                    analytic::epsilon(n, p, k + 1).unwrap() < analytic::epsilon(n, p, k).unwrap(),
                    "not strictly decreasing at N={n} p={p} k={k}"
                );
            }
        }
    }
    // Width monotonicity: increasing at k = 1 for any p; decreasing for
    // k >= 2 where the closed form supports it (the first width step
    // requires k ln(B(2)/B(1)) > ln 3, bounding p near 0.42 at k = 2).
    for n in 1..10u32 {
        for p in [0.1, 0.5, 0.9] {
            assert!(analytic::epsilon(n + 1, p, 1).unwrap() > analytic::epsilon(n, p, 1).unwrap());
        }
        for p in [0.1, 0.25, 0.4] {
            for k in [2, 3, 5] {
                assert!(
                    analytic::epsilon(n + 1, p, k).unwrap() < analytic::epsilon(n, p, k).unwrap(),
                    "not decreasing in width at N={n} p={p} k={k}"
                );
            }
        }
    }
    pass(
        7,
        started,
        "endpoint limits exact, k- and N-monotonicity hold",
    );
}

#[test]
fn criterion_8_log_domain_tail_is_finite_and_monotone_to_ten_thousand() {
    let started = Instant::now();
    let values: Vec<f64> = (1..=10_001u32)
        .map(|k| analytic::log10_epsilon(2, 0.5, k).unwrap())
        .collect();
    let target = 5f64.log10();
    for (i, window) in values.windows(2).enumerate() {
        let k = i as u32 + 1;
        assert!(window[0].is_finite() && window[1].is_finite(), "k={k}");
        assert!(window[1] < window[0], "not monotone at k={k}");
        if k >= 30 {
            let slope = window[1] - window[0];
            assert!(
                (slope + target).abs() < 1e-9,
                "slope {slope} at k={k} misses -log10(5) by {}",
                (slope + target).abs()
            );
        }
    }
    pass(
        8,
        started,
        &format!(
            "log10(epsilon) finite and monotone to k=10^4 (final {:.1}), slope -log10(5) +/- 1e-9",
            values.last().unwrap()
        ),
    );
}

#[test]
fn criterion_9_cli_output_is_byte_deterministic() {
    let started = Instant::now();
    let binary = env!("CARGO_BIN_EXE_revsup");
    let fig3 = |_: u32| {
        let output = Command::new(binary)
            .arg("fig3")
            .output()
            .expect("spawn fig3");
        assert!(output.status.success());
        output.stdout
    };
    let first = fig3(0);
    assert_eq!(first, fig3(1), "fig3 output differs between runs");
    assert_eq!(first.iter().filter(|&&b| b == b'\n').count(), 271);

    let mc = |_: u32| {
        let output = Command::new(binary)
            .args([
                "mc",
                "--n-qubits",
                "2",
                "--p",
                "0.5",
                "--k",
                "3",
                "--trials",
                "1000000",
                "--seed",
                "42",
            ])
            .output()
            .expect("spawn mc");
        assert!(output.status.success());
        output.stdout
    };
    let first_mc = mc(0);
    assert_eq!(
        first_mc,
        mc(1),
        "mc output differs between identically seeded runs"
    );
    pass(
        9,
        started,
        "fig3 twice byte-identical (270 rows), mc with fixed seed byte-identical",
    );
}
