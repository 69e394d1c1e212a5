use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use cvqkd::harness::{run_calibration, run_pipeline, svg_chart, sweep, write_bundle, write_csv, ExperimentConfig};
use cvqkd::reconciliation::ldpc::library;
use cvqkd::rxdsp::FixedPoint;
use cvqkd::Error;

#[derive(Parser)]
#[command(name = "cvqkd", version, about = "CV-QKD link simulator and post-processing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the global seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Quantize every receiver stage boundary, as wordlen:fraclen.
    #[arg(long = "fixed-point", global = true, value_name = "WORDLEN:FRACLEN")]
    fixed_point: Option<String>,
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one end-to-end experiment and write its bundle.
    Run,
    /// Sweep the configured parameter axis and write a CSV table.
    Sweep,
    /// Run the configured shot-noise calibration only.
    Calibrate,
    /// Print the fully explicit configuration after defaults and overrides.
    ShowConfig,
    /// Inspect the shipped LDPC codes.
    Codes {
        #[command(subcommand)]
        action: CodesAction,
    },
}

#[derive(Subcommand)]
enum CodesAction {
    List,
}

const EXIT_CONFIG: u8 = 4;

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = Some(o.clone());
    }
    if let Some(f) = &cli.fixed_point {
        cfg.receiver.fixed_point = Some(FixedPoint::parse(f).map_err(|e| Error::Config(e.to_string()))?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig, default: &str) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    if let Command::Codes { action: CodesAction::List } = cli.command {
        println!("{:<16} {:>3} {:>6} {:>6} {:>6} {:>5}", "name", "id", "n", "k", "rate", "Z");
        for c in library() {
            println!("{:<16} {:>3} {:>6} {:>6} {:>6.3} {:>5}", c.name, c.id, c.n, c.k, c.rate, c.circulant_size);
        }
        return Ok(0);
    }
    let cfg = match load(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return Ok(EXIT_CONFIG);
        }
    };
    match cli.command {
        Command::ShowConfig => {
            print!("{}", cfg.to_toml()?);
            Ok(0)
        }
        Command::Run => {
            let dir = out_dir(&cfg, "run-out");
            let result = run_pipeline(&cfg)?;
            write_bundle(&dir, &result).with_context(|| format!("writing bundle to {}", dir.display()))?;
            let r = &result.record;
            if !cli.quiet {
                println!("outcome: {:?}", r.outcome);
                if let Some(s) = &r.security {
                    println!("skr_asymptotic: {:.6} bits/symbol", s.skr_asymptotic);
                    println!("skr_finite: {:.6} bits/symbol", s.skr_finite);
                }
                if let Some(rec) = &r.reconciliation {
                    println!("code: {} (FER {:.4})", rec.code, rec.performance.fer);
                }
                println!("final key: {} bits, identical: {}", r.final_key_bits, r.keys_identical);
                println!("bundle: {}", dir.display());
            }
            Ok(r.outcome.exit_code() as u8)
        }
        Command::Sweep => {
            if cfg.sweep.is_none() {
                eprintln!("config error: no [sweep] block");
                return Ok(EXIT_CONFIG);
            }
            let dir = out_dir(&cfg, "sweep-out");
            std::fs::create_dir_all(&dir)?;
            let report = sweep(&cfg)?;
            write_csv(&dir.join("sweep.csv"), &report.rows)?;
            if cfg.sweep.as_ref().is_some_and(|s| s.chart) {
                std::fs::write(dir.join("sweep.svg"), svg_chart(&report))?;
            }
            if !cli.quiet {
                println!("{} rows written to {}", report.rows.len(), dir.join("sweep.csv").display());
                match report.argmax {
                    Some(v) => println!("argmax {} = {v}", report.parameter),
                    None => println!("no point with a finite key rate"),
                }
            }
            Ok(0)
        }
        Command::Calibrate => {
            let sps = match cfg.detector.kind {
                cvqkd::channel::DetectionKind::Heterodyne => cfg.pulse.samples_per_symbol,
                cvqkd::channel::DetectionKind::Homodyne => 1,
            };
            let rec = run_calibration(&cfg, sps)?;
            let json = serde_json::to_string_pretty(&rec)?;
            if let Some(dir) = &cfg.output_dir {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("calibration.json"), &json)?;
            }
            if !cli.quiet {
                println!("{json}");
            }
            Ok(0)
        }
        Command::Codes { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.downcast_ref::<Error>().is_some_and(|e| matches!(e.root(), Error::Config(_)));
            ExitCode::from(if config { EXIT_CONFIG } else { 1 })
        }
    }
}
