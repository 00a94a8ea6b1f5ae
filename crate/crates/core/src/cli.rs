//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::gates::{cnot_sequence, phase_pulse, run_step_masked, sig12, truth_table, Model};
use crate::hamiltonian::{lamb_dicke_ops, TermMask};
use crate::noise::{feasibility_report, NoiseParams, Scenario};
use crate::space::{basis_state, Ion};

#[derive(Debug, Parser)]
#[command(name = "ion-cavity", version, about = "Ion-cavity CNOT simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; overrides `output_path` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the three-pulse CNOT on the four logical inputs, write a JSON report.
    TruthTable {
        #[command(flatten)]
        common: Common,
    },
    /// Phase pulse on (e,1,0) under reduced term sets, write CSV.
    RwaCompare {
        #[command(flatten)]
        common: Common,
        /// Term set, e.g. `ii`, `ii+vi`, `all`, `none`. Repeatable.
        #[arg(long = "mask")]
        masks: Vec<TermMask>,
    },
    /// Noisy gate fidelities and timing budget; writes `<out>.csv` and `<out>.json`.
    NoiseSweep {
        #[command(flatten)]
        common: Common,
        /// `optical`, `microwave`, `zero` or `kappa=..,gamma=..,heating=..`. Repeatable.
        #[arg(long = "scenario")]
        scenarios: Vec<Scenario>,
    },
    /// Lamb-Dicke linearization error over a log grid of η, write CSV.
    LambDickeCheck {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::TruthTable { common }
            | Command::RwaCompare { common, .. }
            | Command::NoiseSweep { common, .. }
            | Command::LambDickeCheck { common } => common,
        }
    }
}

pub const LAMB_DICKE_ETAS: [f64; 11] = [1e-6, 1e-4, 1e-3, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5];

/// Parse arguments, run, and return the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let common = cli.command.common();
    let config = match RunConfig::from_path(&common.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", common.config.display());
            return 2;
        }
    };
    let result = match common.jobs {
        Some(0) => Err(Error::invalid("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| dispatch(&cli.command, &config))),
        None => dispatch(&cli.command, &config),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command, config: &RunConfig) -> Result<()> {
    let out = cmd.common().out.clone().or_else(|| config.output_path.clone());
    match cmd {
        Command::TruthTable { .. } => cmd_truth_table(config, out.as_deref()),
        Command::RwaCompare { masks, .. } => cmd_rwa_compare(config, masks, out.as_deref()),
        Command::NoiseSweep { scenarios, .. } => cmd_noise_sweep(config, scenarios, out.as_deref()),
        Command::LambDickeCheck { .. } => cmd_lamb_dicke_check(config, out.as_deref()),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn cmd_truth_table(config: &RunConfig, out: Option<&Path>) -> Result<()> {
    let seq = cnot_sequence(&config.params, config.layout, config.model)?;
    log::info!("truth table: model {}, {} s total", config.model, seq.total_duration());
    let report = truth_table(&seq, config.grid_policy)?;
    let mut w = sink(out)?;
    w.write_all(report.to_json_string().as_bytes())?;
    w.flush()?;
    Ok(())
}

pub const RWA_HEADER: [&str; 5] = ["mask", "e10_re", "e10_im", "g01_re", "g01_im"];

/// Full-model phase pulse from `(e,1,0)` for each term mask.
pub fn cmd_rwa_compare(config: &RunConfig, masks: &[TermMask], out: Option<&Path>) -> Result<()> {
    let defaults = [TermMask::none(), "ii".parse()?, TermMask::all()];
    let masks = if masks.is_empty() { &defaults[..] } else { masks };
    let step = phase_pulse(&config.params, Model::Full)?;
    let layout = config.layout;
    let input = basis_state(Ion::E, 1, 0, layout)?;
    let rows: Vec<(Complex64, Complex64)> = masks
        .par_iter()
        .map(|&mask| {
            let psi = run_step_masked(&step, &config.params, &input, 0.0, config.grid_policy, mask)?;
            Ok((psi.amplitude(Ion::E, 1, 0)?, psi.amplitude(Ion::G, 0, 1)?))
        })
        .collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(RWA_HEADER)?;
    for (mask, (e10, g01)) in masks.iter().zip(rows) {
        w.write_record([
            mask.to_string(),
            sig12(e10.re).to_string(),
            sig12(e10.im).to_string(),
            sig12(g01.re).to_string(),
            sig12(g01.im).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Scenario list: explicit arguments, else the config's noise block, else
/// the optical and microwave presets.
pub fn cmd_noise_sweep(config: &RunConfig, scenarios: &[Scenario], out: Option<&Path>) -> Result<()> {
    let scenarios = if !scenarios.is_empty() {
        scenarios.to_vec()
    } else if let Some(n) = config.noise {
        vec![Scenario::new("config", n)]
    } else {
        vec![
            Scenario::new("optical", NoiseParams::optical()),
            Scenario::new("microwave", NoiseParams::microwave()),
        ]
    };
    let out = out.ok_or_else(|| Error::invalid("noise-sweep needs --out or output_path"))?;
    let seq = cnot_sequence(&config.params, config.layout, config.model)?;
    let report = feasibility_report(&seq, &scenarios, config.grid_policy)?;
    report.write_csv(BufWriter::new(File::create(out.with_extension("csv"))?))?;
    std::fs::write(out.with_extension("json"), report.to_json_string())?;
    Ok(())
}

pub const LAMB_DICKE_HEADER: [&str; 5] = ["eta", "cutoff", "error_norm", "spectral_bound", "within_bound"];

pub fn cmd_lamb_dicke_check(config: &RunConfig, out: Option<&Path>) -> Result<()> {
    let cutoff = config.layout.vib_cutoff();
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(LAMB_DICKE_HEADER)?;
    for eta in LAMB_DICKE_ETAS {
        let c = lamb_dicke_ops(eta, cutoff)?;
        w.write_record([
            eta.to_string(),
            cutoff.to_string(),
            format!("{:.12e}", c.error_norm),
            format!("{:.12e}", c.bound),
            (c.error_norm <= c.bound).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
