//! Output records and their CSV/JSON renderings.
//!
//! CSV columns are fixed in order and name; JSON objects carry the same
//! field names. Floats print in their shortest exact decimal form, so
//! parsing a value back recovers the identical double, and emitting the
//! same record twice is byte-identical.

use std::io::{self, Write};

use revsup_core::{analytic, montecarlo, protocol, SchemeParams};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str =
    "N,p,k,y,epsilon_analytic,log10_epsilon,epsilon_sim,zeta,expected_runs,survival_sim";
pub const CSV_MC_SUFFIX: &str = ",mc_survival,mc_error,trials,seed";

/// One output row: a parameter point with its simulated and closed-form
/// quantities, plus Monte Carlo columns when sampling was requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(rename = "N")]
    pub n: u32,
    pub p: f64,
    pub k: u32,
    pub y: u64,
    pub epsilon_analytic: f64,
    /// `log10` of the closed-form error rate; `None` encodes the `p = 0`
    /// limit where the rate is exactly zero (CSV prints `-inf`).
    pub log10_epsilon: Option<f64>,
    /// Simulated conditional error rate; `None` if nothing survived.
    pub epsilon_sim: Option<f64>,
    pub zeta: f64,
    /// `None` when the surviving mass underflows (CSV prints `inf`).
    pub expected_runs: Option<f64>,
    pub survival_sim: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none", default)]
    pub mc: Option<McColumns>,
}

/// Monte Carlo columns appended to a record by the `mc` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McColumns {
    pub mc_survival: f64,
    /// `None` when no trial survived.
    pub mc_error: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl RunRecord {
    /// Run the scheme and the closed forms for one parameter point.
    pub fn collect(params: &SchemeParams) -> revsup_core::Result<RunRecord> {
        let result = protocol::run_scheme(params);
        Self::from_result(&result)
    }

    /// Assemble the record from an existing simulation result.
    pub fn from_result(result: &protocol::SchemeResult) -> revsup_core::Result<RunRecord> {
        let params = &result.params;
        let point = analytic::point(params.n_qubits(), params.p(), params.k())?;
        let log10_epsilon = analytic::log10_epsilon(params.n_qubits(), params.p(), params.k())?;
        Ok(RunRecord {
            n: params.n_qubits(),
            p: params.p(),
            k: params.k(),
            y: params.marked().value(),
            epsilon_analytic: point.epsilon,
            log10_epsilon: log10_epsilon.is_finite().then_some(log10_epsilon),
            epsilon_sim: result.error_rate,
            zeta: point.zeta,
            expected_runs: point
                .expected_runs
                .is_finite()
                .then_some(point.expected_runs),
            survival_sim: result.survival,
            mc: None,
        })
    }

    /// Attach Monte Carlo columns from an estimate.
    pub fn with_mc(mut self, estimate: &montecarlo::McEstimate) -> RunRecord {
        self.mc = Some(McColumns {
            mc_survival: estimate.survival_freq,
            mc_error: estimate.error_freq,
            trials: estimate.trials,
            seed: estimate.seed,
        });
        self
    }

    pub fn csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            format_f64(self.p),
            self.k,
            self.y,
            format_f64(self.epsilon_analytic),
            format_opt(self.log10_epsilon, "-inf"),
            format_opt(self.epsilon_sim, ""),
            format_f64(self.zeta),
            format_opt(self.expected_runs, "inf"),
            format_f64(self.survival_sim),
        );
        if let Some(mc) = &self.mc {
            row.push_str(&format!(
                ",{},{},{},{}",
                format_f64(mc.mc_survival),
                format_opt(mc.mc_error, ""),
                mc.trials,
                mc.seed,
            ));
        }
        row
    }
}

/// Shortest decimal string that parses back to the identical double:
/// plain notation unless the scientific form is shorter.
pub fn format_f64(x: f64) -> String {
    let plain = format!("{x}");
    let scientific = format!("{x:e}");
    if scientific.len() < plain.len() {
        scientific
    } else {
        plain
    }
}

fn format_opt(x: Option<f64>, none: &str) -> String {
    match x {
        Some(v) => format_f64(v),
        None => none.to_string(),
    }
}

/// CSV with the fixed header, one row per record in input order, LF line
/// endings.
pub fn write_csv<W: Write + ?Sized>(out: &mut W, records: &[RunRecord]) -> io::Result<()> {
    let with_mc = records.iter().any(|r| r.mc.is_some());
    out.write_all(CSV_HEADER.as_bytes())?;
    if with_mc {
        out.write_all(CSV_MC_SUFFIX.as_bytes())?;
    }
    out.write_all(b"\n")?;
    for record in records {
        out.write_all(record.csv_row().as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Compact JSON: a single object for one record, an array otherwise.
pub fn write_json<W: Write + ?Sized>(out: &mut W, records: &[RunRecord]) -> io::Result<()> {
    let body = if records.len() == 1 {
        serde_json::to_string(&records[0])
    } else {
        serde_json::to_string(records)
    }
    .map_err(io::Error::other)?;
    out.write_all(body.as_bytes())?;
    out.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_form_round_trips() {
        for x in [
            0.5,
            0.1,
            1.0,
            0.0,
            3.072_001_835_228_405e-7,
            1.4350653954259637e-47,
            123456.789,
            f64::MIN_POSITIVE,
        ] {
            let printed = format_f64(x);
            assert_eq!(printed.parse::<f64>().unwrap(), x, "{printed}");
        }
        assert_eq!(format_f64(0.5), "0.5");
        assert_eq!(format_f64(4.0), "4");
    }

    #[test]
    fn csv_schema_is_stable() {
        let params = SchemeParams::new(2, 0.5, 3, 1).unwrap();
        let record = RunRecord::collect(&params).unwrap();
        let mut buffer = Vec::new();
        write_csv(&mut buffer, std::slice::from_ref(&record)).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("2,0.5,3,1,"));
        assert!(text.ends_with('\n'));

        let mc = record.with_mc(&revsup_core::estimate(&params, 10, 7).unwrap());
        let mut buffer = Vec::new();
        write_csv(&mut buffer, &[mc]).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        assert!(text.starts_with(&format!("{CSV_HEADER}{CSV_MC_SUFFIX}\n")));
    }

    #[test]
    fn zero_noise_prints_its_limits() {
        let params = SchemeParams::new(1, 0.0, 3, 1).unwrap();
        let record = RunRecord::collect(&params).unwrap();
        let row = record.csv_row();
        assert_eq!(row, "1,0,3,1,0,-inf,0,0,1,1");
    }

    #[test]
    fn json_round_trips_byte_identically() {
        let params = SchemeParams::new(2, 0.5, 10, 1).unwrap();
        let record = RunRecord::collect(&params).unwrap();
        let mut first = Vec::new();
        write_json(&mut first, &[record]).unwrap();
        let parsed: RunRecord = serde_json::from_slice(&first).unwrap();
        let mut second = Vec::new();
        write_json(&mut second, &[parsed]).unwrap();
        assert_eq!(first, second);

        // Arrays and Monte Carlo columns round-trip the same way.
        let records: Vec<RunRecord> = (1..=4)
            .map(|k| {
                let params = SchemeParams::new(2, 0.25, k, 1).unwrap();
                RunRecord::collect(&params)
                    .unwrap()
                    .with_mc(&revsup_core::estimate(&params, 100, k as u64).unwrap())
            })
            .collect();
        let mut first = Vec::new();
        write_json(&mut first, &records).unwrap();
        let parsed: Vec<RunRecord> = serde_json::from_slice(&first).unwrap();
        assert_eq!(parsed, records);
        let mut second = Vec::new();
        write_json(&mut second, &parsed).unwrap();
        assert_eq!(first, second);
    }
}
