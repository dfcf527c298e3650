//! Physical constants, spectral lines and the dimensionless reduction.
//!
//! Every quantity the purity integrand depends on collapses to two ratios of
//! characteristic temperatures:
//!
//! - `u = T_u / T_R`, the wavepacket width against the photon recoil scale;
//! - `d = T_D / T_R`, the natural linewidth against the photon recoil scale.
//!
//! SI units only appear here, at the boundary. Catalog temperatures are kept
//! in microkelvin, as tabulated, and converted on access.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use thiserror::Error;

/// Largest `Γ/ω₀` accepted by [`ModelParams`]; the first-order corrections
/// are meaningless beyond this.
pub const MAX_EPSILON: f64 = 1e-3;

/// Relative tolerance between tabulated temperatures and the ones recomputed
/// from the SI parameters of a line.
pub const CATALOG_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("{quantity} must be positive, got {value}")]
    NonPositive { quantity: &'static str, value: f64 },
    #[error("{quantity} must be finite, got {value}")]
    NonFinite { quantity: &'static str, value: f64 },
    #[error("epsilon = {0} outside [0, {MAX_EPSILON}]")]
    Epsilon(f64),
    #[error("line `{line}` lacks {missing} needed for this quantity")]
    MissingData { line: String, missing: &'static str },
    #[error(
        "line `{line}`: tabulated {quantity} = {stored_uk} uK but SI parameters give {derived_uk} uK"
    )]
    Inconsistent {
        line: String,
        quantity: &'static str,
        stored_uk: f64,
        derived_uk: f64,
    },
}

fn positive(quantity: &'static str, value: f64) -> Result<f64, SpectraError> {
    if !value.is_finite() {
        return Err(SpectraError::NonFinite { quantity, value });
    }
    if value <= 0.0 {
        return Err(SpectraError::NonPositive { quantity, value });
    }
    Ok(value)
}

/// SI constants (CODATA 2018; `ħ`, `k_B` and `c` are exact by definition).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub boltzmann: f64,
    /// Speed of light in vacuum, m/s.
    pub light_speed: f64,
    /// Atomic mass unit, kg.
    pub amu: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    boltzmann: 1.380_649e-23,
    light_speed: 299_792_458.0,
    amu: 1.660_539_066_60e-27,
};

/// An absolute temperature. Stored in microkelvin, the unit every catalog
/// and command line uses, so those values round-trip exactly.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Temperature(f64);

impl Temperature {
    pub const fn from_kelvin(kelvin: f64) -> Self {
        Self(kelvin * 1e6)
    }

    pub const fn from_micro_kelvin(micro_kelvin: f64) -> Self {
        Self(micro_kelvin)
    }

    pub const fn kelvin(self) -> f64 {
        self.0 * 1e-6
    }

    pub const fn micro_kelvin(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} uK", self.micro_kelvin())
    }
}

/// `k_B T_u = Δp² / 2m`: the kinetic-energy equivalent of a momentum width.
pub fn uncertainty_temperature(delta_p: f64, mass_kg: f64) -> Result<Temperature, SpectraError> {
    let delta_p = positive("momentum width", delta_p)?;
    let mass = positive("mass", mass_kg)?;
    Ok(Temperature::from_kelvin(
        delta_p * delta_p / (2.0 * mass * CODATA_2018.boltzmann),
    ))
}

/// Momentum width whose uncertainty temperature is `t_u`; inverse of
/// [`uncertainty_temperature`].
pub fn momentum_width(t_u: Temperature, mass_kg: f64) -> Result<f64, SpectraError> {
    let t = positive("uncertainty temperature", t_u.kelvin())?;
    let mass = positive("mass", mass_kg)?;
    Ok(libm::sqrt(2.0 * mass * CODATA_2018.boltzmann * t))
}

/// `k_B T_R = ħ²ω₀² / (m c²)`.
pub fn recoil_temperature_si(omega0: f64, mass_kg: f64) -> Result<Temperature, SpectraError> {
    let omega0 = positive("transition frequency", omega0)?;
    let mass = positive("mass", mass_kg)?;
    let c = &CODATA_2018;
    let p = c.hbar * omega0 / c.light_speed;
    Ok(Temperature::from_kelvin(p * p / (mass * c.boltzmann)))
}

/// `k_B T_D = ħΓ / 2`.
pub fn doppler_temperature_si(gamma: f64) -> Result<Temperature, SpectraError> {
    let gamma = positive("linewidth", gamma)?;
    Ok(Temperature::from_kelvin(
        CODATA_2018.hbar * gamma / (2.0 * CODATA_2018.boltzmann),
    ))
}

/// An atomic transition.
///
/// The tabulated recoil and Doppler temperatures are mandatory and are what
/// [`reduce`] uses. The SI parameters are optional; when present they are
/// cross-checked against the tabulated temperatures on construction and
/// enable the quantities that need absolute units (`Γ/ω₀`, `Γ_e` in rad/s,
/// Doppler shifts).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    name: String,
    transition: String,
    t_recoil: Temperature,
    t_doppler: Temperature,
    wavelength_nm: Option<f64>,
    linewidth_2pi_mhz: Option<f64>,
    mass_amu: Option<f64>,
}

/// Raw fields of a [`SpectralLine`], before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLineSpec {
    pub name: String,
    pub transition: String,
    pub t_recoil_uk: f64,
    pub t_doppler_uk: f64,
    pub wavelength_nm: Option<f64>,
    pub linewidth_2pi_mhz: Option<f64>,
    pub mass_amu: Option<f64>,
}

impl SpectralLine {
    pub fn new(spec: SpectralLineSpec) -> Result<Self, SpectraError> {
        positive("recoil temperature", spec.t_recoil_uk)?;
        positive("Doppler temperature", spec.t_doppler_uk)?;
        for (quantity, value) in [
            ("wavelength", spec.wavelength_nm),
            ("linewidth", spec.linewidth_2pi_mhz),
            ("mass", spec.mass_amu),
        ] {
            if let Some(v) = value {
                positive(quantity, v)?;
            }
        }
        let line = Self {
            name: spec.name,
            transition: spec.transition,
            t_recoil: Temperature::from_micro_kelvin(spec.t_recoil_uk),
            t_doppler: Temperature::from_micro_kelvin(spec.t_doppler_uk),
            wavelength_nm: spec.wavelength_nm,
            linewidth_2pi_mhz: spec.linewidth_2pi_mhz,
            mass_amu: spec.mass_amu,
        };
        line.check_consistency()?;
        Ok(line)
    }

    fn check_consistency(&self) -> Result<(), SpectraError> {
        let pairs = [
            ("T_R", self.t_recoil, self.derived_recoil_temperature()),
            ("T_D", self.t_doppler, self.derived_doppler_temperature()),
        ];
        for (quantity, stored, derived) in pairs {
            if let Some(derived) = derived {
                if libm::fabs(derived.kelvin() / stored.kelvin() - 1.0) >= CATALOG_TOLERANCE {
                    return Err(SpectraError::Inconsistent {
                        line: self.name.clone(),
                        quantity,
                        stored_uk: stored.micro_kelvin(),
                        derived_uk: derived.micro_kelvin(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> SpectralLineSpec {
        SpectralLineSpec {
            name: self.name.clone(),
            transition: self.transition.clone(),
            t_recoil_uk: self.t_recoil.micro_kelvin(),
            t_doppler_uk: self.t_doppler.micro_kelvin(),
            wavelength_nm: self.wavelength_nm,
            linewidth_2pi_mhz: self.linewidth_2pi_mhz,
            mass_amu: self.mass_amu,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn transition(&self) -> &str {
        &self.transition
    }

    pub fn wavelength_nm(&self) -> Option<f64> {
        self.wavelength_nm
    }

    pub fn linewidth_2pi_mhz(&self) -> Option<f64> {
        self.linewidth_2pi_mhz
    }

    pub fn mass_amu(&self) -> Option<f64> {
        self.mass_amu
    }

    /// Tabulated recoil temperature `T_R`.
    pub fn recoil_temperature(&self) -> Temperature {
        self.t_recoil
    }

    /// Tabulated Doppler temperature `T_D`.
    pub fn doppler_temperature(&self) -> Temperature {
        self.t_doppler
    }

    /// `T_R` recomputed from wavelength and mass, if both are known.
    pub fn derived_recoil_temperature(&self) -> Option<Temperature> {
        recoil_temperature_si(self.omega0()?, self.mass_kg()?).ok()
    }

    /// `T_D` recomputed from the natural linewidth, if known.
    pub fn derived_doppler_temperature(&self) -> Option<Temperature> {
        doppler_temperature_si(self.gamma()?).ok()
    }

    /// `T_D / T_R`.
    pub fn doppler_recoil_ratio(&self) -> f64 {
        self.t_doppler.micro_kelvin() / self.t_recoil.micro_kelvin()
    }

    /// Transition angular frequency `ω₀ = 2πc/λ`, rad/s.
    pub fn omega0(&self) -> Option<f64> {
        self.wavelength_nm
            .map(|nm| 2.0 * PI * CODATA_2018.light_speed / (nm * 1e-9))
    }

    /// Natural linewidth `Γ`, rad/s.
    pub fn gamma(&self) -> Option<f64> {
        self.linewidth_2pi_mhz.map(|mhz| 2.0 * PI * mhz * 1e6)
    }

    pub fn mass_kg(&self) -> Option<f64> {
        self.mass_amu.map(|amu| amu * CODATA_2018.amu)
    }

    pub(crate) fn require<T>(
        &self,
        value: Option<T>,
        missing: &'static str,
    ) -> Result<T, SpectraError> {
        value.ok_or_else(|| SpectraError::MissingData {
            line: self.name.clone(),
            missing,
        })
    }
}

/// The dimensionless parameters that fully determine the purity integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    u: f64,
    d: f64,
    epsilon: f64,
}

impl ModelParams {
    /// `u = T_u/T_R`, `d = T_D/T_R`, with `ε = Γ/ω₀ = 0`.
    pub fn new(u: f64, d: f64) -> Result<Self, SpectraError> {
        Self::with_epsilon(u, d, 0.0)
    }

    pub fn with_epsilon(u: f64, d: f64, epsilon: f64) -> Result<Self, SpectraError> {
        let u = positive("u", u)?;
        let d = positive("d", d)?;
        if !(0.0..=MAX_EPSILON).contains(&epsilon) {
            return Err(SpectraError::Epsilon(epsilon));
        }
        Ok(Self { u, d, epsilon })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Same `(u, d)` with the `Γ/ω₀` corrections switched off.
    pub fn without_epsilon(self) -> Self {
        Self {
            epsilon: 0.0,
            ..self
        }
    }
}

/// Reduces a line and an uncertainty temperature to [`ModelParams`].
///
/// `ε` is `Γ/ω₀` when the line carries wavelength and linewidth, else 0.
pub fn reduce(line: &SpectralLine, t_u: Temperature) -> Result<ModelParams, SpectraError> {
    let t_u = positive("uncertainty temperature", t_u.micro_kelvin())?;
    let t_r = line.recoil_temperature().micro_kelvin();
    let epsilon = match (line.gamma(), line.omega0()) {
        (Some(gamma), Some(omega0)) => gamma / omega0,
        _ => 0.0,
    };
    ModelParams::with_epsilon(t_u / t_r, line.doppler_recoil_ratio(), epsilon)
}

struct Row {
    name: &'static str,
    transition: &'static str,
    t_recoil_uk: f64,
    t_doppler_uk: f64,
    wavelength_nm: Option<f64>,
    linewidth_2pi_mhz: Option<f64>,
    mass_amu: Option<f64>,
}

// Temperatures as tabulated. SI data from standard references; the narrow
// K and Li lines carry no mass because their tabulated T_R does not follow
// from ħ²ω₀²/(mc²k_B) for any isotope.
const BUILTIN: [Row; 6] = [
    Row {
        name: "Cs-D2",
        transition: "6S1/2 -> 6P3/2",
        t_recoil_uk: 0.20,
        t_doppler_uk: 125.0,
        wavelength_nm: Some(852.347),
        linewidth_2pi_mhz: Some(5.234),
        mass_amu: Some(132.905),
    },
    Row {
        name: "K-D2",
        transition: "4S1/2 -> 4P3/2",
        t_recoil_uk: 0.82,
        t_doppler_uk: 144.0,
        wavelength_nm: Some(766.701),
        linewidth_2pi_mhz: Some(6.035),
        mass_amu: Some(38.9637),
    },
    Row {
        name: "Li-D2",
        transition: "2S1/2 -> 2P3/2",
        t_recoil_uk: 6.36,
        t_doppler_uk: 140.0,
        wavelength_nm: Some(670.961),
        linewidth_2pi_mhz: Some(5.872),
        mass_amu: Some(7.016003),
    },
    Row {
        name: "K-narrow",
        transition: "4 2S1/2 -> 5 2P3/2",
        t_recoil_uk: 1.46,
        t_doppler_uk: 28.6,
        wavelength_nm: Some(404.53),
        linewidth_2pi_mhz: Some(1.19),
        mass_amu: None,
    },
    Row {
        name: "Li-narrow",
        transition: "2 2S1/2 -> 3 2P3/2",
        t_recoil_uk: 15.3,
        t_doppler_uk: 18.1,
        wavelength_nm: Some(323.36),
        linewidth_2pi_mhz: Some(0.754),
        mass_amu: None,
    },
    Row {
        name: "Sr-narrow",
        transition: "5s2 1S0 -> 5s5p 3P1",
        t_recoil_uk: 0.46,
        t_doppler_uk: 0.18,
        wavelength_nm: Some(689.449),
        linewidth_2pi_mhz: Some(0.0075),
        mass_amu: Some(87.9056),
    },
];

/// The six reference lines: Cs, K and Li D2, the narrow K and Li lines, and
/// the Sr intercombination line.
pub fn builtin_catalog() -> Vec<SpectralLine> {
    BUILTIN
        .iter()
        .map(|row| {
            SpectralLine::new(SpectralLineSpec {
                name: row.name.into(),
                transition: row.transition.into(),
                t_recoil_uk: row.t_recoil_uk,
                t_doppler_uk: row.t_doppler_uk,
                wavelength_nm: row.wavelength_nm,
                linewidth_2pi_mhz: row.linewidth_2pi_mhz,
                mass_amu: row.mass_amu,
            })
            .expect("built-in catalog is self-consistent")
        })
        .collect()
}

/// Looks a line up by exact name.
pub fn find_line<'a>(catalog: &'a [SpectralLine], name: &str) -> Option<&'a SpectralLine> {
    catalog.iter().find(|line| line.name() == name)
}
