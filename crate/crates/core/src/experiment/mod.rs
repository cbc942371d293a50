//! Experiment files, Monte-Carlo runs over (stage, N) cells, and the
//! comparison report.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metrics::{
    awgn_samples, ccdf, ebn0_to_snr_db, papr_of, BerRecord, CcdfCurve, PaprSampleSet,
};
use crate::modem::{
    decode_spectrum, demodulate, encode_payload, BitBlock, FrameConfig, OfdmSymbol,
};
use crate::signal::{derive_seed, RandomStream};
use crate::stages::StageConfig;

pub use report::{
    compare_stages, emit_results, render_table, summary_csv, ComparisonReport, OutputFormat,
    ReferenceValues, SUMMARY_COLUMNS,
};

pub const DEFAULT_CARRIERS: [usize; 4] = [8, 12, 32, 64];
pub const DEFAULT_FRAMES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub carriers: Vec<usize>,
    pub n_frames: usize,
    /// BER curve points.
    pub ebn0_points_db: Vec<f64>,
    /// Operating point of the summary `ber` and `snr_db` columns.
    pub report_ebn0_db: f64,
    /// Defaults to 0 to 14 dB in 0.1 dB steps.
    pub ccdf_thresholds_db: Option<Vec<f64>>,
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            carriers: DEFAULT_CARRIERS.to_vec(),
            n_frames: DEFAULT_FRAMES,
            ebn0_points_db: (0..=6).map(|k| 2.0 * k as f64).collect(),
            report_ebn0_db: 10.0,
            ccdf_thresholds_db: None,
            master_seed: DEFAULT_SEED,
        }
    }
}

impl SweepConfig {
    pub fn thresholds(&self) -> Vec<f64> {
        self.ccdf_thresholds_db
            .clone()
            .unwrap_or_else(|| (0..=140).map(|k| k as f64 / 10.0).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::from("results"),
            format: OutputFormat::Csv,
        }
    }
}

/// A whole experiment file: `[frame]`, `[stages.<name>]`, `[sweep]`, `[output]`.
/// `frame.n_subcarriers` is replaced by each entry of `sweep.carriers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub frame: FrameConfig,
    pub stages: IndexMap<String, StageConfig>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// One default-configured stage per kind name, named after the kind.
    pub fn with_stage_kinds(kinds: &[&str]) -> Result<Self> {
        let mut stages = IndexMap::new();
        for &k in kinds {
            let stage = StageConfig::default_for(k)
                .ok_or_else(|| Error::Config(format!("unknown stage kind `{k}`")))?;
            if stages.insert(k.to_owned(), stage).is_some() {
                return Err(Error::Config(format!("stage `{k}` listed twice")));
            }
        }
        Ok(Self {
            frame: FrameConfig::default(),
            stages,
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::Config(
                "no stages configured; add a [stages.<name>] table".into(),
            ));
        }
        if self.sweep.n_frames == 0 {
            return Err(Error::Config("sweep.n_frames must be at least 1".into()));
        }
        if self.sweep.carriers.is_empty() {
            return Err(Error::Config("sweep.carriers must not be empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &n in &self.sweep.carriers {
            if !seen.insert(n) {
                return Err(Error::Config(format!("sweep.carriers lists N = {n} twice")));
            }
            self.frame
                .with_subcarriers(n)
                .validate()
                .map_err(|e| Error::Config(format!("frame with N = {n}: {e}")))?;
        }
        // a stage that fits none of the carrier counts is a configuration
        // mistake; one that fits only some is reported per cell instead
        for (name, stage) in &self.stages {
            let mut errors = self
                .sweep
                .carriers
                .iter()
                .map(|&n| stage.validate(&self.frame.with_subcarriers(n)));
            if let Some(Err(first)) = errors.next() {
                if errors.all(|r| r.is_err()) {
                    return Err(Error::Config(format!("stage `{name}`: {first}")));
                }
            }
        }
        let finite = |v: &f64| v.is_finite();
        if !self.sweep.ebn0_points_db.iter().all(finite) || !self.sweep.report_ebn0_db.is_finite() {
            return Err(Error::Config("sweep Eb/N0 points must be finite".into()));
        }
        if !self.sweep.thresholds().iter().all(finite) {
            return Err(Error::Config(
                "sweep.ccdf_thresholds_db must be finite".into(),
            ));
        }
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentConfig::parse(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub snr_db: f64,
    pub ber: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub stage: String,
    pub kind: String,
    pub n_carriers: usize,
    pub n_frames: usize,
    pub papr_db_mean: f64,
    pub papr_db_ccdf1e2: f64,
    pub ccdf: CcdfCurve,
    pub ber_curve: Vec<BerPoint>,
    pub report_ebn0_db: f64,
    /// Data-bin SNR after the receiver at the report point: stage distortion plus channel noise.
    pub snr_db: f64,
    pub ber: f64,
    pub seed_fingerprint: String,
    /// Means of the stage's per-frame diagnostics.
    pub diagnostics: BTreeMap<String, f64>,
    pub error: Option<String>,
}

/// Seed of one trial; independent of scheduling.
pub fn trial_seed(master: u64, stage: &str, n_carriers: usize, trial: usize) -> u64 {
    derive_seed(
        master,
        &[
            stage.as_bytes(),
            &(n_carriers as u64).to_le_bytes(),
            &(trial as u64).to_le_bytes(),
        ],
    )
}

pub fn seed_fingerprint(master: u64, stage: &str, n_carriers: usize) -> String {
    format!(
        "{:016x}",
        derive_seed(
            master,
            &[
                b"cell",
                stage.as_bytes(),
                &(n_carriers as u64).to_le_bytes()
            ]
        )
    )
}

struct Trial {
    papr_db: f64,
    ber: Vec<BerRecord>,
    report: BerRecord,
    signal_energy: f64,
    error_energy: f64,
    diagnostics: BTreeMap<String, f64>,
}

struct Receiver<'a> {
    frame: &'a FrameConfig,
    stage: &'a StageConfig,
}

impl Receiver<'_> {
    /// Noisy reception at one Eb/N0 point. Returns bit errors and the data-bin
    /// signal/error energies.
    fn receive(
        &self,
        emitted: &[Complex64],
        side_info: &crate::stages::SideInfo,
        sent: &BitBlock,
        reference: &[Complex64],
        ebn0_db: f64,
        rng: &mut RandomStream,
    ) -> Result<(BerRecord, f64, f64)> {
        let noisy = awgn_samples(emitted, ebn0_to_snr_db(ebn0_db, self.frame), rng)?;
        let symbol = OfdmSymbol::from_received(&noisy, self.frame)?;
        let spectrum = self
            .stage
            .restore(&demodulate(&symbol, self.frame)?, side_info)?;
        let bits = decode_spectrum(&spectrum, self.frame)?;
        let record = crate::metrics::ber(sent, &bits)?;
        let (mut es, mut ee) = (0.0, 0.0);
        for b in self.frame.data_bins() {
            es += reference[b].norm_sqr();
            ee += (spectrum.bins()[b] - reference[b]).norm_sqr();
        }
        Ok((record, es, ee))
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    frame: &FrameConfig,
    name: &str,
    stage: &StageConfig,
    trial: usize,
) -> Result<Trial> {
    let mut rng = RandomStream::new(trial_seed(
        cfg.sweep.master_seed,
        name,
        frame.n_subcarriers,
        trial,
    ));
    let bits = BitBlock::new(rng.bits(frame.payload_bits()))?;
    let spectrum = encode_payload(&bits, frame)?;
    let out = stage.apply(&spectrum, frame)?;
    let papr_db = papr_of(out.signal.samples())?.db;
    let emitted = OfdmSymbol::from_body(out.signal, frame.cp_len())?.emitted();
    let rx = Receiver { frame, stage };
    let mut ber = Vec::with_capacity(cfg.sweep.ebn0_points_db.len());
    for &p in &cfg.sweep.ebn0_points_db {
        ber.push(
            rx.receive(
                &emitted,
                &out.side_info,
                &bits,
                spectrum.bins(),
                p,
                &mut rng,
            )?
            .0,
        );
    }
    let (report, signal_energy, error_energy) = rx.receive(
        &emitted,
        &out.side_info,
        &bits,
        spectrum.bins(),
        cfg.sweep.report_ebn0_db,
        &mut rng,
    )?;
    Ok(Trial {
        papr_db,
        ber,
        report,
        signal_energy,
        error_energy,
        diagnostics: out.diagnostics,
    })
}

fn failed_cell(
    cfg: &ExperimentConfig,
    name: &str,
    stage: &StageConfig,
    n: usize,
    err: Error,
) -> RunResult {
    RunResult {
        stage: name.to_owned(),
        kind: stage.kind().to_owned(),
        n_carriers: n,
        n_frames: 0,
        papr_db_mean: f64::NAN,
        papr_db_ccdf1e2: f64::NAN,
        ccdf: CcdfCurve {
            thresholds_db: vec![],
            prob_exceed: vec![],
            n_samples: 0,
        },
        ber_curve: vec![],
        report_ebn0_db: cfg.sweep.report_ebn0_db,
        snr_db: f64::NAN,
        ber: f64::NAN,
        seed_fingerprint: seed_fingerprint(cfg.sweep.master_seed, name, n),
        diagnostics: BTreeMap::new(),
        error: Some(err.to_string()),
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    name: &str,
    stage: &StageConfig,
    n: usize,
    exec: Execution,
) -> Result<RunResult> {
    let frame = cfg.frame.with_subcarriers(n);
    frame.validate()?;
    stage.validate(&frame)?;
    let trials = exec.map_indexed(cfg.sweep.n_frames, |t| {
        run_trial(cfg, &frame, name, stage, t)
    });

    // reduce in trial order
    let mut paprs = Vec::with_capacity(trials.len());
    let mut ber = vec![BerRecord::default(); cfg.sweep.ebn0_points_db.len()];
    let mut report = BerRecord::default();
    let (mut es, mut ee) = (0.0, 0.0);
    let mut diag: BTreeMap<String, f64> = BTreeMap::new();
    for t in trials {
        let t = t?;
        paprs.push(t.papr_db);
        for (acc, r) in ber.iter_mut().zip(t.ber) {
            *acc = acc.merge(r);
        }
        report = report.merge(t.report);
        es += t.signal_energy;
        ee += t.error_energy;
        for (k, v) in t.diagnostics {
            *diag.entry(k).or_default() += v;
        }
    }
    let count = paprs.len();
    diag.values_mut().for_each(|v| *v /= count as f64);
    let set = PaprSampleSet::from_values(paprs);
    let curve = ccdf(&set, &cfg.sweep.thresholds())?;
    let ber_curve = cfg
        .sweep
        .ebn0_points_db
        .iter()
        .zip(ber)
        .map(|(&p, r)| BerPoint {
            ebn0_db: p,
            snr_db: ebn0_to_snr_db(p, &frame),
            ber: r.ber(),
            bits_sent: r.bits_sent,
            bit_errors: r.bit_errors,
        })
        .collect();
    Ok(RunResult {
        stage: name.to_owned(),
        kind: stage.kind().to_owned(),
        n_carriers: n,
        n_frames: count,
        papr_db_mean: set.mean_db(),
        papr_db_ccdf1e2: set.exceedance_threshold(0.01).unwrap_or(f64::NAN),
        ccdf: curve,
        ber_curve,
        report_ebn0_db: cfg.sweep.report_ebn0_db,
        snr_db: if ee == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (es / ee).log10()
        },
        ber: report.ber(),
        seed_fingerprint: seed_fingerprint(cfg.sweep.master_seed, name, n),
        diagnostics: diag,
        error: None,
    })
}

/// All (stage, N) cells in configuration order, stages outermost. A cell that
/// fails is reported with `error` set and the remaining cells still run.
pub fn run_experiment_with(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for (name, stage) in &cfg.stages {
        for &n in &cfg.sweep.carriers {
            out.push(
                run_cell(cfg, name, stage, n, exec)
                    .unwrap_or_else(|e| failed_cell(cfg, name, stage, n, e)),
            );
        }
    }
    Ok(out)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunResult>> {
    run_experiment_with(cfg, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[stages.baseline]\nkind = \"none\"\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.sweep.carriers, vec![8, 12, 32, 64]);
        assert_eq!(cfg.sweep.n_frames, 10_000);
        assert_eq!(cfg.stages.len(), 1);
    }

    #[test]
    fn stage_invalid_for_every_carrier_is_rejected() {
        let mut cfg = small(&["none"]);
        cfg.stages.insert(
            "pts3".into(),
            StageConfig::Pts(crate::stages::PtsConfig {
                n_subblocks: 3,
                ..Default::default()
            }),
        );
        cfg.sweep.carriers = vec![8, 64];
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("pts3"), "{err}");
        cfg.sweep.carriers = vec![12, 64];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejected_configs() {
        for text in [
            format!("{MINIMAL}[sweep]\nn_frames = 0\n"),
            format!("{MINIMAL}[sweep]\ncarriers = []\n"),
            format!("{MINIMAL}[stages.baseline]\nkind = \"clip\"\n"),
            format!("{MINIMAL}[sweep]\nbogus = 1\n"),
            format!("{MINIMAL}[frame]\ncp_fraction = 2.0\n"),
            "[sweep]\nn_frames = 5\n".to_owned(),
            "[stages.a]\nkind = \"wavelet\"\n".to_owned(),
        ] {
            let err = ExperimentConfig::parse(&text).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{text}: {err}");
        }
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err =
            ExperimentConfig::parse("[stages.a]\nkind = \"none\"\n\n[sweep]\nn_frames = \"ten\"\n")
                .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 5") && msg.contains("n_frames"), "{msg}");
    }

    #[test]
    fn stage_order_is_file_order() {
        let cfg = ExperimentConfig::parse("[stages.z]\nkind = \"none\"\n[stages.a]\nkind = \"clip\"\n[stages.m]\nkind = \"slm\"\n")
            .unwrap();
        assert_eq!(cfg.stages.keys().collect::<Vec<_>>(), ["z", "a", "m"]);
    }

    fn small(kinds: &[&str]) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::with_stage_kinds(kinds).unwrap();
        cfg.sweep.carriers = vec![8, 64];
        cfg.sweep.n_frames = 40;
        cfg.sweep.ebn0_points_db = vec![4.0, 40.0];
        cfg
    }

    #[test]
    fn passthrough_high_snr_is_error_free() {
        let mut cfg = small(&["none"]);
        cfg.sweep.report_ebn0_db = 40.0;
        for r in run_experiment(&cfg).unwrap() {
            assert_eq!(r.n_frames, 40);
            assert_eq!(r.ber, 0.0);
            assert_eq!(r.ber_curve[1].bit_errors, 0);
            assert!(r.snr_db > 30.0);
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let cfg = small(&["clip", "slm"]);
        assert_eq!(
            run_experiment_with(&cfg, Execution::Sequential).unwrap(),
            run_experiment_with(&cfg, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn renaming_a_stage_only_moves_its_rows() {
        let a = run_experiment(&small(&["none", "clip"])).unwrap();
        let mut cfg = small(&["none", "clip"]);
        let clip = cfg.stages.shift_remove("clip").unwrap();
        cfg.stages.insert("renamed".into(), clip);
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a[..2], b[..2]);
        assert_ne!(a[2].seed_fingerprint, b[2].seed_fingerprint);
        assert_ne!(a[2].papr_db_mean, b[2].papr_db_mean);
    }

    #[test]
    fn failing_cell_is_recorded() {
        let mut cfg = small(&["none"]);
        cfg.stages.insert(
            "pts3".into(),
            StageConfig::Pts(crate::stages::PtsConfig {
                n_subblocks: 3,
                ..Default::default()
            }),
        );
        cfg.sweep.carriers = vec![12, 64];
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out[2].error.is_none() && out[2].n_frames == 40);
        assert!(out[3].error.as_deref().unwrap().contains("divide"));
        assert_eq!(out[3].n_frames, 0);
    }
}
