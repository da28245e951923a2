//! Library side of the `ffq` executable: configuration, sweeps and file
//! output.

pub mod commands;
pub mod config;
pub mod dft;
pub mod output;

use clap::{Args, Parser, Subcommand};
use commands::{CommandError, Result};
use config::{Config, Propagator};
use output::{emit, write_atomic, Manifest};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "ffq", version, about = "Flip-flop qubits under 1/f charge noise")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration; missing fields take defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: logical CPUs).
    #[arg(long, global = true, env = "FFQ_THREADS")]
    pub threads: Option<usize>,
    /// Low noise cutoff in Hz.
    #[arg(long = "omega-l", global = true)]
    pub omega_l: Option<f64>,
    /// High noise cutoff in Hz.
    #[arg(long = "omega-h", global = true)]
    pub omega_h: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energies, ω_10 and |z_jk| against E_z − E_c.
    Spectrum,
    /// Single-qubit T_2 over (E_z − E_c, B).
    DephaseMap,
    /// Two-qubit T_1 over (E_z − E_c, B).
    RelaxMap,
    /// Population traces at an operating point, plus the DFT of P_01.
    Evolve {
        /// a, b or c.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, value_enum)]
        propagator: Option<Propagator>,
    },
    /// Mode table of the four-level model against δ.
    Fourlevel {
        /// Take parameters from the flip-flop pair at this point.
        #[arg(long)]
        point: Option<String>,
    },
    /// Fix V_dd from the point-a gate time.
    CalibrateVdd {
        #[arg(long)]
        target_ns: Option<f64>,
    },
}

/// Config file plus flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    if let Some(x) = cli.common.omega_l {
        cfg.noise.omega_l_hz = x;
    }
    if let Some(x) = cli.common.omega_h {
        cfg.noise.omega_h_hz = x;
    }
    match &cli.command {
        Command::Evolve { point, propagator } => {
            if let Some(p) = point {
                cfg.evolve.point = p.clone();
                cfg.evolve.bias = None;
            }
            if let Some(p) = propagator {
                cfg.evolve.propagator = *p;
            }
        }
        Command::Fourlevel { point: Some(p) } => cfg.fourlevel.point = Some(p.clone()),
        Command::CalibrateVdd { target_ns: Some(t) } => cfg.calibrate.target_ns = *t,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one subcommand and returns the files written.
pub fn execute(cfg: &Config, command: &Command, out: &Path) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| CommandError::Io(e);
    match command {
        Command::Spectrum => {
            let (t, m) = commands::run_spectrum(cfg)?;
            emit(out, cfg, "spectrum", m, &[("spectrum", &t)]).map_err(io)
        }
        Command::DephaseMap => {
            let (t, m) = commands::run_dephase_map(cfg)?;
            emit(out, cfg, "dephase_map", m, &[("dephase_map", &t)]).map_err(io)
        }
        Command::RelaxMap => {
            let vdd = commands::resolve_vdd(cfg, out)?;
            let (t, m) = commands::run_relax_map(cfg, &vdd)?;
            emit(out, cfg, "relax_map", m, &[("relax_map", &t)]).map_err(io)
        }
        Command::Evolve { .. } => {
            let vdd = commands::resolve_vdd(cfg, out)?;
            let r = commands::run_evolve(cfg, &vdd)?;
            let stem = format!("evolve_{}", r.label);
            let trace = format!("{stem}_trace");
            let dft = format!("{stem}_dft");
            emit(out, cfg, &stem, r.manifest, &[(&trace, &r.trace), (&dft, &r.dft)]).map_err(io)
        }
        Command::Fourlevel { .. } => {
            let vdd = match cfg.fourlevel.point {
                Some(_) => Some(commands::resolve_vdd(cfg, out)?),
                None => None,
            };
            let (t, m) = commands::run_fourlevel(cfg, vdd.as_ref())?;
            emit(out, cfg, "fourlevel", m, &[("fourlevel", &t)]).map_err(io)
        }
        Command::CalibrateVdd { .. } => {
            let m: Manifest = commands::run_calibrate(cfg)?;
            std::fs::create_dir_all(out).map_err(io)?;
            let p = out.join(commands::CALIBRATION_FILE);
            let mut text = serde_json::to_string_pretty(&m.to_json(cfg)).map_err(|e| io(std::io::Error::other(e)))?;
            text.push('\n');
            write_atomic(&p, &text).map_err(io)?;
            Ok(vec![p])
        }
    }
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = resolve_config(cli)?;
    let work = || execute(&cfg, &cli.command, &cli.common.out);
    match cli.common.threads {
        Some(n) => ffq_core::par::with_threads(n, work),
        None => work(),
    }
}
