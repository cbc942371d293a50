use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunResult;
use crate::error::{Error, Result};
use crate::metrics::EBN0_CONVENTION;

pub const SUMMARY_COLUMNS: [&str; 8] = [
    "stage",
    "n_carriers",
    "n_frames",
    "papr_db_mean",
    "papr_db_ccdf1e2",
    "snr_db",
    "ber",
    "seed_fingerprint",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Table,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "table" => Ok(OutputFormat::Table),
            other => Err(Error::Config(format!(
                "unknown output format `{other}` (csv, json, table)"
            ))),
        }
    }
}

/// Published figures for the combined peak-window / kernel-filter method and
/// two baselines, shown next to the measurements. They are never used as
/// pass/fail thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    pub carriers: Vec<usize>,
    pub proposed_papr_db: Vec<f64>,
    pub proposed_snr_db: Vec<f64>,
    pub proposed_ccdf_db: Vec<f64>,
    pub ber_slm: f64,
    pub ber_pts: f64,
    pub ber_proposed: f64,
}

impl Default for ReferenceValues {
    fn default() -> Self {
        Self {
            carriers: vec![8, 12, 32, 64],
            proposed_papr_db: vec![3.72, 4.44, 4.30, 3.79],
            proposed_snr_db: vec![20.09, 21.39, 20.56, 19.69],
            proposed_ccdf_db: vec![4.21, 4.23, 4.25, 4.20],
            ber_slm: 0.00452,
            ber_pts: 0.00446,
            ber_proposed: 0.0037,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RowReference {
    pub papr_db: Option<f64>,
    pub snr_db: Option<f64>,
    pub ccdf_db: Option<f64>,
    pub ber: Option<f64>,
}

impl ReferenceValues {
    pub fn for_row(&self, kind: &str, n_carriers: usize) -> RowReference {
        let at = self.carriers.iter().position(|&c| c == n_carriers);
        let pick = |v: &Vec<f64>| at.map(|i| v[i]);
        match kind {
            "proposed" => RowReference {
                papr_db: pick(&self.proposed_papr_db),
                snr_db: pick(&self.proposed_snr_db),
                ccdf_db: pick(&self.proposed_ccdf_db),
                ber: (n_carriers == 64).then_some(self.ber_proposed),
            },
            "slm" => RowReference {
                ber: (n_carriers == 64).then_some(self.ber_slm),
                ..RowReference::default()
            },
            "pts" => RowReference {
                ber: (n_carriers == 64).then_some(self.ber_pts),
                ..RowReference::default()
            },
            _ => RowReference::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub ebn0_convention: String,
    pub rows: Vec<RunResult>,
    pub reference_values: ReferenceValues,
}

pub fn compare_stages(results: &[RunResult]) -> ComparisonReport {
    ComparisonReport {
        ebn0_convention: EBN0_CONVENTION.to_owned(),
        rows: results.to_vec(),
        reference_values: ReferenceValues::default(),
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        format!("{v}")
    }
}

pub fn summary_csv(report: &ComparisonReport) -> String {
    let mut s = SUMMARY_COLUMNS.join(",");
    s.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.stage,
            r.n_carriers,
            r.n_frames,
            num(r.papr_db_mean),
            num(r.papr_db_ccdf1e2),
            num(r.snr_db),
            num(r.ber),
            r.seed_fingerprint
        );
    }
    s
}

fn ccdf_csv(r: &RunResult) -> String {
    let mut s = String::from("threshold_db,value,n_samples\n");
    for (t, p) in r.ccdf.thresholds_db.iter().zip(&r.ccdf.prob_exceed) {
        let _ = writeln!(s, "{},{},{}", num(*t), num(*p), r.ccdf.n_samples);
    }
    s
}

fn ber_csv(r: &RunResult, convention: &str) -> String {
    let mut s = format!("# {convention}\nebn0_db,value,n_samples\n");
    for p in &r.ber_curve {
        let _ = writeln!(s, "{},{},{}", num(p.ebn0_db), num(p.ber), p.bits_sent);
    }
    s
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.digits$}"))
}

/// Aligned text for terminals, with the reference figures in the right-hand columns.
pub fn render_table(report: &ComparisonReport) -> String {
    let header = [
        "stage",
        "N",
        "frames",
        "PAPR",
        "PAPR@1e-2",
        "SNR",
        "BER",
        "ref PAPR",
        "ref SNR",
        "ref CCDF",
        "ref BER",
    ];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
    for r in &report.rows {
        let reference = report.reference_values.for_row(&r.kind, r.n_carriers);
        let mut row = vec![
            r.stage.clone(),
            r.n_carriers.to_string(),
            r.n_frames.to_string(),
            format!("{:.2}", r.papr_db_mean),
            format!("{:.2}", r.papr_db_ccdf1e2),
            format!("{:.2}", r.snr_db),
            format!("{:.2e}", r.ber),
            opt(reference.papr_db, 2),
            opt(reference.snr_db, 2),
            opt(reference.ccdf_db, 2),
            opt(reference.ber, 5),
        ];
        if let Some(e) = &r.error {
            row.push(format!("error: {e}"));
        }
        rows.push(row);
    }
    let cols = header.len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut s = format!("# {}\n", report.ebn0_convention);
    for row in &rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            if c < cols {
                if c == 0 {
                    let _ = write!(line, "{cell:<w$}", w = widths[c]);
                } else {
                    let _ = write!(line, "{cell:>w$}", w = widths[c]);
                }
            } else {
                line.push_str(cell);
            }
        }
        s.push_str(line.trim_end());
        s.push('\n');
    }
    s
}

fn file_stem(stage: &str, n: usize) -> String {
    let clean: String = stage
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{clean}_n{n}")
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Write the report under `dir` and return the files written.
///
/// - CSV: `summary.csv`, plus `ccdf_<stage>_n<N>.csv` and `ber_<stage>_n<N>.csv` per row
/// - JSON: `report.json`
/// - TABLE: `report.txt`
pub fn emit_results(
    report: &ComparisonReport,
    format: OutputFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    match format {
        OutputFormat::Csv => {
            write(dir.join("summary.csv"), &summary_csv(report), &mut written)?;
            for r in report.rows.iter().filter(|r| r.error.is_none()) {
                let stem = file_stem(&r.stage, r.n_carriers);
                write(
                    dir.join(format!("ccdf_{stem}.csv")),
                    &ccdf_csv(r),
                    &mut written,
                )?;
                write(
                    dir.join(format!("ber_{stem}.csv")),
                    &ber_csv(r, &report.ebn0_convention),
                    &mut written,
                )?;
            }
        }
        OutputFormat::Json => {
            let mut text =
                serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))?;
            text.push('\n');
            write(dir.join("report.json"), &text, &mut written)?;
        }
        OutputFormat::Table => write(dir.join("report.txt"), &render_table(report), &mut written)?,
    }
    Ok(written)
}
