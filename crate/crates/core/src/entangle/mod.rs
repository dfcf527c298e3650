//! Entanglement measures for the asymptotic atom-photon state.

mod estimates;
mod oracle;
mod purity;
mod reduced;

use thiserror::Error;

use crate::qmc::QmcError;

pub use estimates::{
    classify, doppler_rank_estimate, doppler_shift, doppler_threshold, doppler_threshold_u,
    effective_linewidth, effective_linewidth_ratio, recoil_rank_estimate, recoil_threshold,
    schmidt_rank, Regime, RegimeLabel,
};
pub use oracle::{
    amplitude_matrix, atom_half_width, detuning_half_width, gauss_legendre, matrix_purity_riemann,
    matrix_purity_svd, purity_oracle, OracleGrid, OracleResult, MAX_MATRIX_ENTRIES,
};
pub use purity::{
    purity, purity_with, AmplitudeModel, PurityResult, LOW_PRECISION, NORM_DIMENSION,
    QUAD_DIMENSION,
};
pub use reduced::{doppler_overlap, purity_reduced};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntangleError {
    #[error("purity must be positive, got {0}")]
    Purity(f64),
    #[error("norm integral came out non-positive ({0})")]
    Norm(f64),
    #[error(transparent)]
    Qmc(#[from] QmcError),
    #[error("oracle grid has no nodes")]
    EmptyGrid,
    #[error("oracle matrix {rows}x{cols} needs {bytes} bytes, above the {MAX_MATRIX_ENTRIES}-entry limit")]
    GridTooLarge {
        rows: usize,
        cols: usize,
        bytes: usize,
    },
    #[error("the closed-form reduction needs epsilon = 0, got {0}")]
    Epsilon(f64),
}
