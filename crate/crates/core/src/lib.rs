//! Momentum entanglement between an atom and the photon it spontaneously
//! emits, in the Weisskopf-Wigner model with a Gaussian atomic wavepacket.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectra`]: physical constants, the spectral-line catalog and the
//!   reduction of a physical configuration to the dimensionless pair
//!   `(u, d) = (T_u / T_R, T_D / T_R)`.
//! - [`kernel`]: the Gaussian wavepacket and the asymptotic emission
//!   amplitude in dimensionless variables.
//! - [`qmc`]: a digitally shifted Sobol sequence, inverse-CDF transforms and
//!   a replicated integrator with error bars.
//! - [`entangle`]: purity of the reduced atomic state, Schmidt rank, analytic
//!   rank estimates and thresholds, regime classification, and a grid/SVD
//!   oracle for the purity.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled; the `std` feature only adds parallel replicate evaluation.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod entangle;
pub mod kernel;
pub mod qmc;
pub mod spectra;

pub use entangle::{
    classify, doppler_rank_estimate, purity, purity_oracle, recoil_rank_estimate, schmidt_rank,
    OracleGrid, PurityResult, Regime, RegimeLabel,
};
pub use kernel::{amplitude, denominator, wavepacket, AtomCoord, PhotonCoord};
pub use qmc::{integrate, Estimate, QmcConfig};
pub use spectra::{builtin_catalog, reduce, ModelParams, SpectralLine, Temperature};
