use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fluxopt_cli::commands;
use fluxopt_cli::config::{parse_real, Format, RunConfig};
use fluxopt_cli::CliError;

#[derive(Parser)]
#[command(
    name = "fluxopt",
    version,
    about = "Charge-noise coherence of fluxonium versus array junction count"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derived charging scales and per-N array junction parameters.
    Derive(Common),
    /// Lowest two levels, f01 and the charge matrix element.
    Spectrum(Common),
    /// Coherence times over a range of N and the T2 optimum.
    Sweep(Common),
    /// Exact small-N circuit versus the effective model.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override qubit.lambda (accepts forms like `2/pi`).
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Write the main artifact here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Worker threads for the sweep.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    /// Wavefunction dump path (spectrum).
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
    /// JSON summary path (sweep).
    #[arg(long, value_name = "PATH")]
    summary: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::from_path(&self.config)?;
        if let Some(l) = self.lambda {
            cfg.set_lambda(l)?;
        }
        if let Some(f) = &self.format {
            cfg.format = Some(f.parse::<Format>().expect("validated by clap"));
        }
        if self.out.is_some() {
            cfg.output_path = self.out.clone();
        }
        if self.n_min.is_some() {
            cfg.n_min = self.n_min;
        }
        if self.n_max.is_some() {
            cfg.n_max = self.n_max;
        }
        if self.dump.is_some() {
            cfg.dump_path = self.dump.clone();
        }
        if self.summary.is_some() {
            cfg.summary_path = self.summary.clone();
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, which) = match &cli.command {
        Command::Derive(c) => (c, 0),
        Command::Spectrum(c) => (c, 1),
        Command::Sweep(c) => (c, 2),
        Command::Oracle(c) => (c, 3),
    };
    let cfg = common.load()?;
    let mut out: Box<dyn Write> = match &cfg.output_path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match which {
        0 => commands::cmd_derive(&cfg, &mut out)?,
        1 => commands::cmd_spectrum(&cfg, &mut out)?,
        2 => {
            let r = commands::cmd_sweep(&cfg, common.jobs.map(|j| j as usize), &mut out)?;
            eprintln!(
                "n_opt = {}, T2 = {} us, rule-of-thumb band [{:.1}, {:.1}]",
                r.n_opt,
                commands::fmt_num(r.t2_opt),
                r.band_low,
                r.band_high
            );
        }
        _ => {
            commands::cmd_oracle(&cfg, &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fluxopt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
