use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use papr_core::exec::Execution;
use papr_core::experiment::{
    compare_stages, emit_results, load_config, render_table, run_experiment_with, ExperimentConfig,
    OutputFormat,
};
use papr_core::metrics::analytic_ccdf;
use papr_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "papr", version, about = "OFDM PAPR-reduction experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Run trials on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        format: Option<OutputFormat>,
    },
    /// Default-configured stages over a carrier sweep.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "8,12,32,64")]
        carriers: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "none,clip,slm,pts,proposed"
        )]
        stages: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        frames: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Analytic-versus-simulated self tests.
    Oracle {
        #[command(subcommand)]
        which: Oracle,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Unmodified OFDM at the Nyquist rate against 1 - (1 - e^-g)^N.
    Ccdf {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        frames: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Largest allowed absolute deviation where P >= 1e-2.
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
}

#[derive(Args)]
struct SeedArg {
    /// Master seed; falls back to PAPR_SEED, then to the config value.
    #[arg(long, env = "PAPR_SEED")]
    seed: Option<u64>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter { .. } | Error::SearchTooLarge { .. } => {
            EXIT_CONFIG
        }
        Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn execute(
    cfg: &ExperimentConfig,
    exec: Execution,
    format: OutputFormat,
    out: &Path,
) -> Result<(), Error> {
    let results = run_experiment_with(cfg, exec)?;
    let report = compare_stages(&results);
    let files = emit_results(&report, format, out)?;
    print!("{}", render_table(&report));
    eprintln!("wrote {} file(s) to {}", files.len(), out.display());
    if let Some(bad) = results.iter().find(|r| r.error.is_some()) {
        eprintln!(
            "cell {} / N = {} failed: {}",
            bad.stage,
            bad.n_carriers,
            bad.error.as_deref().unwrap_or_default()
        );
    }
    Ok(())
}

fn oracle_ccdf(
    n: usize,
    frames: usize,
    seed: Option<u64>,
    tolerance: f64,
    exec: Execution,
) -> Result<bool, Error> {
    let mut cfg = ExperimentConfig::with_stage_kinds(&["none"])?;
    cfg.frame.n_subcarriers = n;
    cfg.frame.oversampling = 1;
    cfg.sweep.carriers = vec![n];
    cfg.sweep.n_frames = frames;
    cfg.sweep.ebn0_points_db.clear();
    if let Some(s) = seed {
        cfg.sweep.master_seed = s;
    }
    let result = run_experiment_with(&cfg, exec)?.remove(0);
    if let Some(e) = result.error {
        return Err(Error::Config(e));
    }
    let mut worst: f64 = 0.0;
    println!("threshold_db,simulated,analytic");
    for (t, p) in result
        .ccdf
        .thresholds_db
        .iter()
        .zip(&result.ccdf.prob_exceed)
    {
        let a = analytic_ccdf(*t, n);
        if *p >= 1e-2 {
            worst = worst.max((p - a).abs());
        }
        println!("{t:.1},{p:.6},{a:.6}");
    }
    let ok = worst <= tolerance;
    eprintln!(
        "N = {n}, {frames} frames: max |simulated - analytic| = {worst:.4} where P >= 1e-2 ({})",
        if ok { "pass" } else { "FAIL" }
    );
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };

    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            frames,
            format,
        } => load_config(&config).and_then(|mut cfg| {
            if let Some(s) = seed.seed {
                cfg.sweep.master_seed = s;
            }
            if let Some(f) = frames {
                cfg.sweep.n_frames = f;
            }
            cfg.validate()?;
            let out = out.unwrap_or_else(|| cfg.output.path.clone());
            execute(&cfg, exec, format.unwrap_or(cfg.output.format), &out)
        }),
        Command::Sweep {
            carriers,
            stages,
            frames,
            seed,
            out,
            format,
        } => {
            let kinds: Vec<&str> = stages.iter().map(|s| s.trim()).collect();
            ExperimentConfig::with_stage_kinds(&kinds).and_then(|mut cfg| {
                cfg.sweep.carriers = carriers;
                cfg.sweep.n_frames = frames;
                if let Some(s) = seed.seed {
                    cfg.sweep.master_seed = s;
                }
                cfg.validate()?;
                execute(&cfg, exec, format, &out)
            })
        }
        Command::Oracle {
            which:
                Oracle::Ccdf {
                    n,
                    frames,
                    seed,
                    tolerance,
                },
        } => match oracle_ccdf(n, frames, seed.seed, tolerance, exec) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(EXIT_RUNTIME),
            Err(e) => Err(e),
        },
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
