//! Gaussian wavepacket and the asymptotic emission amplitude.
//!
//! Atomic momenta are measured in units of the photon momentum `ħω₀/c`,
//! photon frequencies as detunings `δ = (ω_k − ω₀)/Γ`. In these units the
//! amplitude for finding the atom with final momentum `Q` and the photon in
//! mode `(δ, κ̂)` is, up to a constant that cancels in every purity ratio,
//!
//! ```text
//! A = sin θ · exp(−|Q + κ̂|² / 4u) / (δ − Q·κ̂/(2d) − 1/(4d) + i/2)
//! ```
//!
//! The three real terms of the denominator are the detuning, the Doppler
//! shift `q·k/m` and the photon recoil `ħk²/2m`.

use core::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::spectra::ModelParams;

/// Photon mode: detuning and emission direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonCoord {
    pub delta: f64,
    /// `cos θ ∈ [−1, 1]`, measured from the dipole (z) axis.
    pub cos_theta: f64,
    /// Azimuth `φ ∈ [0, 2π)`.
    pub phi: f64,
}

impl PhotonCoord {
    pub fn new(delta: f64, cos_theta: f64, phi: f64) -> Self {
        debug_assert!((-1.0..=1.0).contains(&cos_theta));
        Self {
            delta,
            cos_theta,
            phi,
        }
    }

    pub fn sin_theta(&self) -> f64 {
        libm::sqrt((1.0 - self.cos_theta * self.cos_theta).max(0.0))
    }

    /// Unit vector κ̂.
    pub fn direction(&self) -> Vector3<f64> {
        let s = self.sin_theta();
        Vector3::new(
            s * libm::cos(self.phi),
            s * libm::sin(self.phi),
            self.cos_theta,
        )
    }

    /// Precomputes the direction vector for repeated evaluation.
    pub fn resolve(&self) -> PhotonMode {
        PhotonMode {
            delta: self.delta,
            direction: self.direction(),
            sin_theta: self.sin_theta(),
        }
    }
}

/// A photon mode with its direction already resolved to a unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonMode {
    pub delta: f64,
    pub direction: Vector3<f64>,
    pub sin_theta: f64,
}

impl PhotonMode {
    /// Mode with direction given by a unit vector; `sin θ` is taken from its
    /// z component.
    pub fn from_direction(delta: f64, direction: Vector3<f64>) -> Self {
        let z = direction.z;
        Self {
            delta,
            direction,
            sin_theta: libm::sqrt((1.0 - z * z).max(0.0)),
        }
    }
}

/// Final atomic momentum in units of `ħω₀/c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomCoord {
    pub q: Vector3<f64>,
}

impl AtomCoord {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self {
            q: Vector3::new(x, y, z),
        }
    }
}

impl From<Vector3<f64>> for AtomCoord {
    fn from(q: Vector3<f64>) -> Self {
        Self { q }
    }
}

/// Minimum-uncertainty wavepacket `(πΔp²)^(−3/4) exp(−|p|²/2Δp²)`, normalised
/// so that `∫|φ|² d³p = 1`.
pub fn wavepacket(p: &Vector3<f64>, delta_p: f64) -> f64 {
    debug_assert!(delta_p > 0.0);
    let var = delta_p * delta_p;
    libm::pow(PI * var, -0.75) * libm::exp(-p.norm_squared() / (2.0 * var))
}

/// Centre of the Lorentzian in `δ`: Doppler shift `Q·κ̂/(2d)` plus recoil
/// shift `1/(4d)`.
pub fn resonance_center(q: &Vector3<f64>, direction: &Vector3<f64>, params: &ModelParams) -> f64 {
    let d = params.d();
    q.dot(direction) / (2.0 * d) + 0.25 / d
}

// Photon wavenumber relative to k₀; 1 unless the Γ/ω₀ corrections are on.
#[inline]
fn wavenumber_scale(delta: f64, params: &ModelParams) -> f64 {
    1.0 + params.epsilon() * delta
}

#[inline]
fn denominator_at(q: &Vector3<f64>, mode: &PhotonMode, params: &ModelParams) -> Complex64 {
    let d = params.d();
    let s = wavenumber_scale(mode.delta, params);
    let re = mode.delta - s * q.dot(&mode.direction) / (2.0 * d) - s * s * 0.25 / d;
    Complex64::new(re, 0.5)
}

/// Dimensionless denominator `δ − Q·κ̂/(2d) − 1/(4d) + i/2`.
///
/// The imaginary part is exactly 1/2, so the modulus never drops below 1/2.
pub fn denominator(atom: &AtomCoord, photon: &PhotonCoord, params: &ModelParams) -> Complex64 {
    denominator_at(&atom.q, &photon.resolve(), params)
}

/// Amplitude for a pre-resolved photon mode; see [`amplitude`].
#[inline]
pub fn amplitude_at(q: &Vector3<f64>, mode: &PhotonMode, params: &ModelParams) -> Complex64 {
    let s = wavenumber_scale(mode.delta, params);
    if s <= 0.0 {
        // negative photon frequency
        return Complex64::new(0.0, 0.0);
    }
    let shifted = q + mode.direction * s;
    let envelope = mode.sin_theta * libm::exp(-shifted.norm_squared() / (4.0 * params.u()));
    // √(ω_k/ω₀) from the coupling, and the square root of the k² in the
    // mode density, which the amplitude pairs share.
    let slow = if params.epsilon() > 0.0 {
        libm::sqrt(s) * s
    } else {
        1.0
    };
    (envelope * slow) / denominator_at(q, mode, params)
}

/// Asymptotic emission amplitude with the constant prefactor dropped.
pub fn amplitude(atom: &AtomCoord, photon: &PhotonCoord, params: &ModelParams) -> Complex64 {
    amplitude_at(&atom.q, &photon.resolve(), params)
}
