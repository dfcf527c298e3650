//! Regime map over a log grid of `(u, d)`.

use atomphoton_core::entangle::{
    classify, doppler_rank_estimate, effective_linewidth_ratio, recoil_rank_estimate,
};
use atomphoton_core::qmc::QmcConfig;
use atomphoton_core::spectra::ModelParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::sweep::{evaluate, log_space, thread_pool, Method};

pub const PHASE_HEADER: &str =
    "u,d,regime,recoil_estimate,doppler_estimate,linewidth_ratio,purity,std_error,schmidt_rank,warnings";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub u: f64,
    pub d: f64,
    pub regime: String,
    pub recoil_estimate: f64,
    pub doppler_estimate: f64,
    pub linewidth_ratio: f64,
    /// Empty unless the numeric mode ran.
    pub purity: Option<f64>,
    pub std_error: Option<f64>,
    pub schmidt_rank: Option<f64>,
    pub warnings: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridAxis {
    /// A single point sits at `min`.
    pub fn values(&self) -> Result<Vec<f64>> {
        let ok = self.min > 0.0 && self.min.is_finite() && self.max.is_finite() && self.points >= 1;
        if !ok || (self.points > 1 && self.min >= self.max) {
            return Err(CliError::Invalid(format!("bad grid axis {self:?}")));
        }
        Ok(log_space(self.min, self.max, self.points))
    }
}

fn analytic_cell(u: f64, d: f64) -> Result<PhaseCell> {
    let params = ModelParams::new(u, d)?;
    Ok(PhaseCell {
        u,
        d,
        regime: classify(&params).label.to_string(),
        recoil_estimate: recoil_rank_estimate(u),
        doppler_estimate: doppler_rank_estimate(u, d),
        linewidth_ratio: effective_linewidth_ratio(u, d),
        purity: None,
        std_error: None,
        schmidt_rank: None,
        warnings: String::new(),
    })
}

/// Cells in `d`-major order. `numeric` adds a purity value per cell.
pub fn phase_diagram(
    u_axis: &GridAxis,
    d_axis: &GridAxis,
    numeric: Option<(Method, &QmcConfig)>,
    jobs: usize,
) -> Result<Vec<PhaseCell>> {
    let us = u_axis.values()?;
    let ds = d_axis.values()?;
    let cells: Vec<(f64, f64)> = ds
        .iter()
        .flat_map(|&d| us.iter().map(move |&u| (u, d)))
        .collect();
    let Some((method, config)) = numeric else {
        return cells
            .into_iter()
            .map(|(u, d)| analytic_cell(u, d))
            .collect();
    };
    let pool = thread_pool(jobs)?;
    pool.install(|| {
        cells
            .par_iter()
            .map(|&(u, d)| {
                let mut cell = analytic_cell(u, d)?;
                let r = evaluate(&ModelParams::new(u, d)?, method, config)?;
                cell.purity = Some(r.purity);
                cell.std_error = Some(r.std_error);
                cell.schmidt_rank = Some(r.schmidt_rank);
                cell.warnings = r.warnings;
                Ok(cell)
            })
            .collect()
    })
}
