//! Command-line front end for the atom-photon entanglement model.
//!
//! Every command writes CSV. Sweeps and phase diagrams run their points on
//! a pool of `--jobs` threads; output order and content do not depend on
//! the pool size.

pub mod catalog;
pub mod error;
pub mod phase;
pub mod sweep;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use atomphoton_core::entangle::{
    classify, doppler_rank_estimate, doppler_threshold, effective_linewidth_ratio,
    recoil_rank_estimate,
};
use atomphoton_core::qmc::{QmcConfig, MIN_REPLICATES, MIN_SAMPLES};
use atomphoton_core::spectra::{reduce, SpectralLine, Temperature};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use error::{CliError, Result};
use phase::{phase_diagram, GridAxis};
use sweep::{compute_row, run_sweep, write_rows, Axis, Method, PointOptions, RowCache, SweepSpec};

#[derive(Debug, Parser)]
#[command(
    name = "atomphoton",
    version,
    about = "Atom-photon entanglement after spontaneous emission"
)]
pub struct Cli {
    /// JSON line catalog; overrides ATOMPHOTON_CATALOG and the built-in table.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Purity at a single uncertainty temperature.
    Purity {
        #[arg(long)]
        line: String,
        #[arg(long = "tu-uK")]
        tu_uk: f64,
        #[command(flatten)]
        qmc: QmcArgs,
        #[arg(long, value_enum, default_value = "td")]
        axis: Axis,
    },
    /// Log-spaced purity sweep over the uncertainty temperature.
    Sweep {
        #[arg(long)]
        line: String,
        /// Lower end in µK [default: T_R/100].
        #[arg(long = "tu-min-uK")]
        tu_min_uk: Option<f64>,
        /// Upper end in µK [default: 40 (T_D/T_R)² T_R].
        #[arg(long = "tu-max-uK")]
        tu_max_uk: Option<f64>,
        #[arg(long, default_value_t = sweep::DEFAULT_POINTS)]
        points: usize,
        #[command(flatten)]
        qmc: QmcArgs,
        #[arg(long, value_enum, default_value = "td")]
        axis: Axis,
        #[command(flatten)]
        run: RunArgs,
        /// Reuse finished points from the cache beside --out.
        #[arg(long, requires = "out")]
        resume: bool,
    },
    /// Regime map over a log grid of (u, d).
    PhaseDiagram {
        #[arg(long, default_value_t = 1e-2)]
        u_min: f64,
        #[arg(long, default_value_t = 1e8)]
        u_max: f64,
        #[arg(long, default_value_t = 41)]
        u_points: usize,
        #[arg(long, default_value_t = 0.1)]
        d_min: f64,
        #[arg(long, default_value_t = 1e3)]
        d_max: f64,
        #[arg(long, default_value_t = 17)]
        d_points: usize,
        /// Also compute the purity in every cell. Slow.
        #[arg(long)]
        numeric: bool,
        #[command(flatten)]
        qmc: QmcArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Thresholds, scaled parameters and rank estimates for one point.
    Estimate {
        #[arg(long)]
        line: String,
        #[arg(long = "tu-uK")]
        tu_uk: f64,
    },
    /// Lines in the catalog.
    Lines,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct QmcArgs {
    /// Sobol points per replicate.
    #[arg(long, default_value_t = 1 << 16)]
    pub samples: u64,
    #[arg(long, default_value_t = 8)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Keep the first-order Γ/ω₀ corrections.
    #[arg(long)]
    pub epsilon: bool,
    #[arg(long, value_enum, default_value_t = Method::Qmc)]
    pub method: Method,
}

impl QmcArgs {
    pub fn config(&self) -> Result<QmcConfig> {
        QmcConfig::new(self.samples, self.replicates, self.seed, 12).map_err(|e| {
            CliError::Invalid(format!(
                "{e} (samples >= {MIN_SAMPLES}, replicates >= {MIN_REPLICATES})"
            ))
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = default_jobs())]
    pub jobs: usize,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Serialize)]
struct EstimateRow {
    line: String,
    #[serde(rename = "t_u_uK")]
    t_u_uk: f64,
    #[serde(rename = "t_recoil_uK")]
    t_recoil_uk: f64,
    #[serde(rename = "t_doppler_uK")]
    t_doppler_uk: f64,
    #[serde(rename = "t_de_uK")]
    t_de_uk: f64,
    u: f64,
    d: f64,
    linewidth_ratio: f64,
    k_recoil: f64,
    k_doppler: f64,
    regime: String,
}

#[derive(Debug, Serialize)]
struct LineRow {
    name: String,
    transition: String,
    #[serde(rename = "t_recoil_uK")]
    t_recoil_uk: f64,
    #[serde(rename = "t_doppler_uK")]
    t_doppler_uk: f64,
    d: f64,
    #[serde(rename = "t_de_uK")]
    t_de_uk: f64,
}

fn emit<R: Serialize>(out: Option<&Path>, rows: &[R]) -> Result<()> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).map_err(|e| CliError::io("<csv>", io::Error::other(e)))?;
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            fs::write(path, &buf).map_err(|e| CliError::io(path, e))
        }
        None => io::stdout()
            .write_all(&buf)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn line_by_name(cli_catalog: Option<&Path>, name: &str) -> Result<SpectralLine> {
    let lines = catalog::load_catalog(cli_catalog)?;
    catalog::lookup(&lines, name).cloned()
}

fn positive(flag: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Invalid(format!(
            "{flag} must be positive, got {v}"
        )))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let catalog_path = cli.catalog.as_deref();
    match cli.command {
        Command::Purity {
            line,
            tu_uk,
            qmc,
            axis,
        } => {
            let line = line_by_name(catalog_path, &line)?;
            let options = PointOptions {
                method: qmc.method,
                qmc: qmc.config()?,
                axis,
                epsilon: qmc.epsilon,
            };
            if qmc.epsilon && qmc.method == Method::ClosedForm {
                return Err(CliError::Invalid(
                    "the closed form has no epsilon corrections".into(),
                ));
            }
            let row = compute_row(&line, positive("--tu-uK", tu_uk)?, &options)?;
            emit(None, &[row])
        }
        Command::Sweep {
            line,
            tu_min_uk,
            tu_max_uk,
            points,
            qmc,
            axis,
            run,
            resume,
        } => {
            let line = line_by_name(catalog_path, &line)?;
            let (lo, hi) = SweepSpec::default_range(&line);
            let spec = SweepSpec {
                t_u_min_uk: tu_min_uk.unwrap_or(lo),
                t_u_max_uk: tu_max_uk.unwrap_or(hi),
                line,
                points,
                options: PointOptions {
                    method: qmc.method,
                    qmc: qmc.config()?,
                    axis,
                    epsilon: qmc.epsilon,
                },
            };
            let cache = run.out.as_deref().map(RowCache::beside);
            let (rows, stats) = run_sweep(&spec, run.jobs, cache.as_ref(), resume)?;
            eprintln!(
                "{} points computed, {} reused",
                stats.computed, stats.reused
            );
            emit(run.out.as_deref(), &rows)
        }
        Command::PhaseDiagram {
            u_min,
            u_max,
            u_points,
            d_min,
            d_max,
            d_points,
            numeric,
            qmc,
            run,
        } => {
            if qmc.epsilon {
                return Err(CliError::Invalid("--epsilon needs a spectral line".into()));
            }
            let config = qmc.config()?;
            let cells = phase_diagram(
                &GridAxis {
                    min: u_min,
                    max: u_max,
                    points: u_points,
                },
                &GridAxis {
                    min: d_min,
                    max: d_max,
                    points: d_points,
                },
                numeric.then_some((qmc.method, &config)),
                run.jobs,
            )?;
            emit(run.out.as_deref(), &cells)
        }
        Command::Estimate { line, tu_uk } => {
            let line = line_by_name(catalog_path, &line)?;
            let params = reduce(
                &line,
                Temperature::from_micro_kelvin(positive("--tu-uK", tu_uk)?),
            )?;
            let (u, d) = (params.u(), params.d());
            let row = EstimateRow {
                line: line.name().to_string(),
                t_u_uk: tu_uk,
                t_recoil_uk: line.recoil_temperature().micro_kelvin(),
                t_doppler_uk: line.doppler_temperature().micro_kelvin(),
                t_de_uk: doppler_threshold(&line).micro_kelvin(),
                u,
                d,
                linewidth_ratio: effective_linewidth_ratio(u, d),
                k_recoil: recoil_rank_estimate(u),
                k_doppler: doppler_rank_estimate(u, d),
                regime: classify(&params).label.to_string(),
            };
            emit(None, &[row])
        }
        Command::Lines => {
            let rows: Vec<LineRow> = catalog::load_catalog(catalog_path)?
                .iter()
                .map(|l| LineRow {
                    name: l.name().to_string(),
                    transition: l.transition().to_string(),
                    t_recoil_uk: l.recoil_temperature().micro_kelvin(),
                    t_doppler_uk: l.doppler_temperature().micro_kelvin(),
                    d: l.doppler_recoil_ratio(),
                    t_de_uk: doppler_threshold(l).micro_kelvin(),
                })
                .collect();
            emit(None, &rows)
        }
    }
}
