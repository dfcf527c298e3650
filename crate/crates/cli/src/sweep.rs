//! Purity sweeps over the uncertainty temperature of one line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use atomphoton_core::entangle::{
    classify, doppler_rank_estimate, purity, purity_reduced, recoil_rank_estimate, schmidt_rank,
};
use atomphoton_core::qmc::QmcConfig;
use atomphoton_core::spectra::{reduce, ModelParams, SpectralLine, Temperature};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const CSV_HEADER: &str = "line,t_u_uK,u,d,axis_value,purity,std_error,schmidt_rank,recoil_estimate,doppler_estimate,regime,warnings";

pub const DEFAULT_POINTS: usize = 25;

/// Which scaled temperature goes in the `axis_value` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
pub enum Axis {
    /// T_u / T_D
    #[value(name = "td")]
    Doppler,
    /// T_u / T_R
    #[value(name = "tr")]
    Recoil,
    /// T_u T_R / (4 T_D²), i.e. T_u / T_DE
    #[value(name = "tde")]
    Entanglement,
}

impl Axis {
    pub fn value(self, u: f64, d: f64) -> f64 {
        match self {
            Self::Doppler => u / d,
            Self::Recoil => u,
            Self::Entanglement => u / (4.0 * d * d),
        }
    }
}

/// How a purity value is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, ValueEnum, Serialize, Deserialize)]
pub enum Method {
    /// Randomized quasi-Monte Carlo over the full integrals.
    #[default]
    Qmc,
    /// One-dimensional reduction, deterministic, ε = 0 only.
    ClosedForm,
}

/// Purity of one point with its flags.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityPoint {
    pub purity: f64,
    /// Zero for the closed form.
    pub std_error: f64,
    pub schmidt_rank: f64,
    pub warnings: String,
}

pub fn evaluate(params: &ModelParams, method: Method, qmc: &QmcConfig) -> Result<PurityPoint> {
    let (p, std_error, rank, low) = match method {
        Method::Qmc => {
            let r = purity(params, qmc)?;
            (r.purity, r.std_error, r.schmidt_rank, r.low_precision)
        }
        Method::ClosedForm => {
            let p = purity_reduced(params)?;
            (p, 0.0, schmidt_rank(p)?, false)
        }
    };
    let mut warnings = Vec::new();
    if low {
        warnings.push("low-precision");
    }
    if p <= 0.0 {
        warnings.push("non-positive");
    }
    if p > 1.0 {
        warnings.push("purity-above-one");
    }
    Ok(PurityPoint {
        purity: p,
        std_error,
        schmidt_rank: rank,
        warnings: warnings.join(";"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub line: String,
    #[serde(rename = "t_u_uK")]
    pub t_u_uk: f64,
    pub u: f64,
    pub d: f64,
    pub axis_value: f64,
    pub purity: f64,
    pub std_error: f64,
    pub schmidt_rank: f64,
    pub recoil_estimate: f64,
    pub doppler_estimate: f64,
    pub regime: String,
    /// `;`-separated flags, empty when clean.
    pub warnings: String,
}

/// Everything one sweep point depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOptions {
    pub method: Method,
    /// Ignored by the closed form.
    pub qmc: QmcConfig,
    pub axis: Axis,
    /// Keep the first-order `Γ/ω₀` terms.
    pub epsilon: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub line: SpectralLine,
    pub t_u_min_uk: f64,
    pub t_u_max_uk: f64,
    pub points: usize,
    pub options: PointOptions,
}

impl SweepSpec {
    /// Default range `u ∈ [10⁻², 40 d²]`: two decades below the recoil
    /// threshold to one decade above the Doppler one.
    pub fn default_range(line: &SpectralLine) -> (f64, f64) {
        let t_r = line.recoil_temperature().micro_kelvin();
        let d = line.doppler_recoil_ratio();
        (1e-2 * t_r, 40.0 * d * d * t_r)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.t_u_min_uk, self.t_u_max_uk);
        if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CliError::Invalid(format!(
                "need 0 < t_u_min < t_u_max, got {lo} and {hi}"
            )));
        }
        if self.points < 2 {
            return Err(CliError::Invalid(format!(
                "need at least 2 points, got {}",
                self.points
            )));
        }
        if self.options.epsilon && self.options.method == Method::ClosedForm {
            return Err(CliError::Invalid(
                "the closed form has no epsilon corrections".into(),
            ));
        }
        self.options
            .qmc
            .validate()
            .map_err(|e| CliError::Invalid(e.to_string()))
    }

    pub fn temperatures(&self) -> Vec<f64> {
        log_space(self.t_u_min_uk, self.t_u_max_uk, self.points)
    }
}

/// `n ≥ 2` log-spaced values with exact endpoints.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => lo * (ratio * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

pub fn compute_row(line: &SpectralLine, t_u_uk: f64, options: &PointOptions) -> Result<SweepRow> {
    let params = reduce(line, Temperature::from_micro_kelvin(t_u_uk))?;
    let params = if options.epsilon {
        params
    } else {
        params.without_epsilon()
    };
    let point = evaluate(&params, options.method, &options.qmc)?;
    let (u, d) = (params.u(), params.d());
    Ok(SweepRow {
        line: line.name().to_string(),
        t_u_uk,
        u,
        d,
        axis_value: options.axis.value(u, d),
        purity: point.purity,
        std_error: point.std_error,
        schmidt_rank: point.schmidt_rank,
        recoil_estimate: recoil_rank_estimate(u),
        doppler_estimate: doppler_rank_estimate(u, d),
        regime: classify(&params).label.to_string(),
        warnings: point.warnings,
    })
}

/// Hash of every input a row depends on.
pub fn cache_key(line: &SpectralLine, t_u_uk: f64, options: &PointOptions) -> String {
    let spec = line.spec();
    let opt_bits = |v: Option<f64>| v.map_or(0, f64::to_bits);
    let mut h = Sha256::new();
    h.update(b"atomphoton-row-1\0");
    h.update(spec.name.as_bytes());
    h.update([0]);
    h.update(spec.transition.as_bytes());
    h.update([0]);
    for bits in [
        spec.t_recoil_uk.to_bits(),
        spec.t_doppler_uk.to_bits(),
        opt_bits(spec.wavelength_nm),
        opt_bits(spec.linewidth_2pi_mhz),
        opt_bits(spec.mass_amu),
        t_u_uk.to_bits(),
        options.qmc.samples_per_replicate,
        options.qmc.replicates as u64,
        options.qmc.seed,
        options.axis as u64,
        options.epsilon as u64,
        options.method as u64,
    ] {
        h.update(bits.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Sidecar directory of per-point results, next to the output file.
#[derive(Debug, Clone)]
pub struct RowCache {
    dir: PathBuf,
}

impl RowCache {
    pub fn beside(out: &Path) -> Self {
        let mut name = out
            .file_name()
            .map(|n| n.to_os_string())
            .unwrap_or_default();
        name.push(".cache");
        Self {
            dir: out.with_file_name(name),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A missing or unreadable entry is a miss.
    pub fn get(&self, key: &str) -> Option<SweepRow> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, row: &SweepRow) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let path = self.path(key);
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string(row).expect("rows always serialize");
        fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub computed: usize,
    pub reused: usize,
}

/// Runs every point of `spec`, at most `jobs` at a time. Rows come back in
/// temperature order whatever the scheduling. With a cache, finished points
/// are stored as they complete; with `resume`, stored points are reused.
pub fn run_sweep(
    spec: &SweepSpec,
    jobs: usize,
    cache: Option<&RowCache>,
    resume: bool,
) -> Result<(Vec<SweepRow>, SweepStats)> {
    spec.validate()?;
    let temperatures = spec.temperatures();
    let pool = thread_pool(jobs)?;
    let results: Vec<Result<(SweepRow, bool)>> = pool.install(|| {
        temperatures
            .par_iter()
            .map(|&t_u| {
                let key = cache.map(|_| cache_key(&spec.line, t_u, &spec.options));
                if let (true, Some(c), Some(k)) = (resume, cache, key.as_deref()) {
                    if let Some(row) = c.get(k) {
                        return Ok((row, true));
                    }
                }
                let row = compute_row(&spec.line, t_u, &spec.options)?;
                if let (Some(c), Some(k)) = (cache, key.as_deref()) {
                    c.put(k, &row)?;
                }
                Ok((row, false))
            })
            .collect()
    });
    let mut stats = SweepStats::default();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        let (row, reused) = r?;
        if reused {
            stats.reused += 1;
        } else {
            stats.computed += 1;
        }
        rows.push(row);
    }
    Ok((rows, stats))
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(CliError::Invalid("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))
}

pub fn write_rows<W: Write, R: Serialize>(out: W, rows: &[R]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(text: &str) -> csv::Result<Vec<SweepRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}
