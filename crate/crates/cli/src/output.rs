//! Output records and number formatting for the CLI.

use std::io::Write;

use beamselect::{SweepCell, SweepResult};
use serde::{Deserialize, Serialize};

/// Significant digits printed for every real value in CSV and text output.
pub const SIG_DIGITS: usize = 9;

/// Formats `value` with [`SIG_DIGITS`] significant digits, '.' decimal
/// separator and no locale dependence.
pub fn fmt_sig(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let exponent = value.abs().log10().floor() as i32;
    if (-5..15).contains(&exponent) {
        let decimals = (SIG_DIGITS as i32 - 1 - exponent).max(0) as usize;
        format!("{value:.decimals$}")
    } else {
        format!("{value:.prec$e}", prec = SIG_DIGITS - 1)
    }
}

/// One row of sweep output. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub algorithm: String,
    pub k: usize,
    pub mean_power: f64,
    pub mean_power_over_k: f64,
    pub mean_fraction: f64,
    pub std_err: f64,
    pub trials: usize,
}

impl From<&SweepCell> for OutputRecord {
    fn from(cell: &SweepCell) -> Self {
        OutputRecord {
            algorithm: cell.algorithm.name().to_string(),
            k: cell.k,
            mean_power: cell.mean_power,
            mean_power_over_k: cell.mean_power_over_k(),
            mean_fraction: cell.mean_fraction,
            std_err: cell.std_err_power,
            trials: cell.trials,
        }
    }
}

pub fn records(result: &SweepResult) -> Vec<OutputRecord> {
    result.cells.iter().map(OutputRecord::from).collect()
}

pub const CSV_HEADER: [&str; 7] = [
    "algorithm",
    "k",
    "mean_power",
    "mean_power_over_k",
    "mean_fraction",
    "std_err",
    "trials",
];

pub fn write_csv<W: Write>(out: W, rows: &[OutputRecord]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record([
            row.algorithm.clone(),
            row.k.to_string(),
            fmt_sig(row.mean_power),
            fmt_sig(row.mean_power_over_k),
            fmt_sig(row.mean_fraction),
            fmt_sig(row.std_err),
            row.trials.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, rows: &[OutputRecord]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}

/// Writes `name,value` CSV rows under a header.
pub fn write_key_values_csv<W: Write>(out: W, pairs: &[(&str, String)]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["key", "value"])?;
    for (key, value) in pairs {
        writer.write_record([*key, value.as_str()])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(0.852109269084597), "0.852109269");
        assert_eq!(fmt_sig(6.370447380771193), "6.37044738");
        assert_eq!(fmt_sig(8521.092690845974), "8521.09269");
        assert_eq!(fmt_sig(1.0), "1.00000000");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.25), "-0.250000000");
        assert_eq!(fmt_sig(1.234e-7), "1.23400000e-7");
        assert_eq!(fmt_sig(123456789012.0), "123456789012");
    }

    #[test]
    fn formatted_values_parse_back_within_precision() {
        for v in [0.1965398188, 2.928968253968254, 5187.377517639621, 3.3e-9, 0.999999999951] {
            let back: f64 = fmt_sig(v).parse().unwrap();
            assert!((back - v).abs() <= 5e-9 * v.abs(), "{v} -> {back}");
        }
    }

    #[test]
    fn csv_layout() {
        let rows = vec![OutputRecord {
            algorithm: "greedy".into(),
            k: 4,
            mean_power: 2.5,
            mean_power_over_k: 0.625,
            mean_fraction: 0.5,
            std_err: 0.01,
            trials: 10,
        }];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "algorithm,k,mean_power,mean_power_over_k,mean_fraction,std_err,trials\n\
             greedy,4,2.50000000,0.625000000,0.500000000,0.0100000000,10\n"
        );
    }
}
