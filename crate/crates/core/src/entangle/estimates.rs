//! Closed-form rank estimates, thresholds and the regime map.

use core::f64::consts::LN_2;
use core::fmt;

use crate::spectra::{ModelParams, SpectraError, SpectralLine, Temperature, CODATA_2018};

use super::EntangleError;

/// Schmidt rank `K = 1/p`. Purity estimates that overshoot 1 within their
/// error bar are treated as 1.
pub fn schmidt_rank(purity: f64) -> Result<f64, EntangleError> {
    if purity.is_nan() || purity <= 0.0 {
        return Err(EntangleError::Purity(purity));
    }
    Ok(1.0 / purity.min(1.0))
}

/// Number of wavepacket-sized patches on the recoil sphere, `2/u`, floored
/// at 1.
pub fn recoil_rank_estimate(u: f64) -> f64 {
    debug_assert!(u > 0.0);
    (2.0 / u).max(1.0)
}

/// Doppler FWHM over the natural linewidth, `√(2 ln 2)·√u/d`; 1 while the
/// Doppler FWHM is narrower than Γ.
pub fn doppler_rank_estimate(u: f64, d: f64) -> f64 {
    debug_assert!(u > 0.0 && d > 0.0);
    if u < d * d / (2.0 * LN_2) {
        return 1.0;
    }
    libm::sqrt(2.0 * LN_2 * u) / d
}

/// `Γ_e / Γ = √u / (2d)`.
pub fn effective_linewidth_ratio(u: f64, d: f64) -> f64 {
    libm::sqrt(u) / (2.0 * d)
}

/// Recoil threshold `T_u = T_R` (`u = 1`).
pub fn recoil_threshold(line: &SpectralLine) -> Temperature {
    line.recoil_temperature()
}

/// Doppler entanglement temperature `T_DE = 4 (T_D/T_R) T_D`.
pub fn doppler_threshold(line: &SpectralLine) -> Temperature {
    let t_d = line.doppler_temperature().micro_kelvin();
    Temperature::from_micro_kelvin(4.0 * line.doppler_recoil_ratio() * t_d)
}

/// `T_DE / T_R = 4d²`.
pub fn doppler_threshold_u(d: f64) -> f64 {
    4.0 * d * d
}

/// Homogeneous Doppler width `Γ_e = √(k_B T_u / mc²) ω₀`, rad/s.
pub fn effective_linewidth(t_u: Temperature, line: &SpectralLine) -> Result<f64, SpectraError> {
    let omega0 = line.require(line.omega0(), "wavelength")?;
    let mass = line.require(line.mass_kg(), "mass")?;
    let c = CODATA_2018.light_speed;
    Ok(libm::sqrt(CODATA_2018.boltzmann * t_u.kelvin() / (mass * c * c)) * omega0)
}

/// Doppler shift of the emission centre, `(ω₀/mc)·q_∥`, rad/s, for an atomic
/// momentum component `q_∥` (kg·m/s) along the emission direction.
pub fn doppler_shift(q_parallel: f64, line: &SpectralLine) -> Result<f64, SpectraError> {
    let omega0 = line.require(line.omega0(), "wavelength")?;
    let mass = line.require(line.mass_kg(), "mass")?;
    Ok(omega0 / (mass * CODATA_2018.light_speed) * q_parallel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeLabel {
    Recoil,
    Plateau,
    Doppler,
    Mixed,
}

impl RegimeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Recoil => "Recoil",
            Self::Plateau => "Plateau",
            Self::Doppler => "Doppler",
            Self::Mixed => "Mixed",
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub label: RegimeLabel,
    pub recoil_threshold_u: f64,
    pub doppler_threshold_u: f64,
}

/// Places `(u, d)` on the phase diagram.
///
/// Lines with `d ≤ 1/2` have `4d² ≤ 1`: the two high-entanglement regions
/// overlap and every `u` is `Mixed`. Otherwise both boundaries belong to the
/// entangled side (`u = 1` is `Recoil`, `u = 4d²` is `Doppler`).
pub fn classify(params: &ModelParams) -> Regime {
    let (u, d) = (params.u(), params.d());
    let doppler_threshold_u = doppler_threshold_u(d);
    let label = if d <= 0.5 {
        RegimeLabel::Mixed
    } else if u <= 1.0 {
        RegimeLabel::Recoil
    } else if u >= doppler_threshold_u {
        RegimeLabel::Doppler
    } else {
        RegimeLabel::Plateau
    };
    Regime {
        label,
        recoil_threshold_u: 1.0,
        doppler_threshold_u,
    }
}
