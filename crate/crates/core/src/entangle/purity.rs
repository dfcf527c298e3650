//! Purity of the reduced atomic state by importance-sampled QMC.
//!
//! With `ρ_a(Q, Q′) = ∫ dk A(Q, k) A*(Q′, k)`, the purity is
//!
//! ```text
//! p = I₄ / I₂²
//! I₂ = ∫ dQ dk |A(Q, k)|²                                     (6 dims)
//! I₄ = ∫ dQ dQ′ dk dk′ A(Q,k) A*(Q,k′) A(Q′,k′) A*(Q′,k)      (12 dims)
//! ```
//!
//! where `dk = dδ dΩ`. The ratio cancels every constant dropped from the
//! amplitude. Sampling plan, identical for both integrals:
//!
//! 1. directions uniform on the sphere;
//! 2. atomic momenta from an isotropic Gaussian of per-axis width `√u`,
//!    centred on `−(κ̂ + κ̂′)/2`, the envelope of the two wavepacket factors
//!    each momentum carries;
//! 3. each detuning from a Cauchy of half-width 1/2 centred on the
//!    resonance of the amplitude it first appears in.

use core::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::kernel::{amplitude_at, resonance_center, PhotonMode};
use crate::qmc::{integrate, to_cauchy, to_gaussian, Estimate, QmcConfig};
use crate::spectra::ModelParams;

use super::{schmidt_rank, EntangleError};

pub const NORM_DIMENSION: usize = 6;
pub const QUAD_DIMENSION: usize = 12;

/// Relative error above which a [`PurityResult`] is flagged.
pub const LOW_PRECISION: f64 = 0.25;

// Decorrelates the norm integral's shifts from the quadruple integral's.
const NORM_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

const CAUCHY_HALF_WIDTH: f64 = 0.5;

/// Amplitude `A(Q, k)` of a bipartite atom-photon state. [`ModelParams`]
/// evaluates the emission amplitude; tests inject other states.
pub trait AmplitudeModel: Sync {
    fn amplitude(&self, q: &Vector3<f64>, photon: &PhotonMode) -> Complex64;
}

impl AmplitudeModel for ModelParams {
    #[inline]
    fn amplitude(&self, q: &Vector3<f64>, photon: &PhotonMode) -> Complex64 {
        amplitude_at(q, photon, self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurityResult {
    /// `I₄ / I₂²`; may exceed 1 by statistical overshoot.
    pub purity: f64,
    pub std_error: f64,
    /// `1 / min(purity, 1)`.
    pub schmidt_rank: f64,
    pub norm_estimate: Estimate,
    pub quad_estimate: Estimate,
    /// Set when `std_error / purity` exceeds [`LOW_PRECISION`].
    pub low_precision: bool,
    pub total_samples: u64,
}

struct Proposal {
    sigma: f64,
    params: ModelParams,
}

impl Proposal {
    fn new(params: &ModelParams) -> Self {
        Self {
            sigma: libm::sqrt(params.u()),
            params: params.without_epsilon(),
        }
    }

    /// Direction uniform on the sphere; returns the mode with `δ = 0`.
    #[inline]
    fn direction(x_cos: f64, x_phi: f64) -> PhotonMode {
        let cos_theta = 2.0 * x_cos - 1.0;
        let sin_theta = libm::sqrt((1.0 - cos_theta * cos_theta).max(0.0));
        let phi = 2.0 * PI * x_phi;
        PhotonMode {
            delta: 0.0,
            direction: Vector3::new(
                sin_theta * libm::cos(phi),
                sin_theta * libm::sin(phi),
                cos_theta,
            ),
            sin_theta,
        }
    }

    /// Gaussian momentum and `1 / density`.
    #[inline]
    fn momentum(&self, x: &[f64], center: &Vector3<f64>) -> (Vector3<f64>, f64) {
        let z = Vector3::new(
            to_gaussian(x[0], 0.0, 1.0),
            to_gaussian(x[1], 0.0, 1.0),
            to_gaussian(x[2], 0.0, 1.0),
        );
        let q = center + z * self.sigma;
        let s = self.sigma;
        let inv_density = libm::pow(2.0 * PI, 1.5) * s * s * s * libm::exp(0.5 * z.norm_squared());
        (q, inv_density)
    }

    /// Cauchy detuning around the resonance of `(q, mode)` and `1 / density`.
    #[inline]
    fn detuning(&self, x: f64, q: &Vector3<f64>, mode: &PhotonMode) -> (f64, f64) {
        let center = resonance_center(q, &mode.direction, &self.params);
        let delta = to_cauchy(x, center, CAUCHY_HALF_WIDTH);
        let t = (delta - center) / CAUCHY_HALF_WIDTH;
        (delta, PI * CAUCHY_HALF_WIDTH * (1.0 + t * t))
    }
}

const SPHERE: f64 = 4.0 * PI;

fn norm_integrand<M: AmplitudeModel>(model: &M, proposal: &Proposal, x: &[f64]) -> f64 {
    let mut k = Proposal::direction(x[0], x[1]);
    let (q, wq) = proposal.momentum(&x[2..5], &(-k.direction));
    let (delta, wd) = proposal.detuning(x[5], &q, &k);
    k.delta = delta;
    model.amplitude(&q, &k).norm_sqr() * SPHERE * wq * wd
}

fn quad_integrand<M: AmplitudeModel>(model: &M, proposal: &Proposal, x: &[f64]) -> f64 {
    let mut k = Proposal::direction(x[0], x[1]);
    let mut k2 = Proposal::direction(x[2], x[3]);
    let center = -(k.direction + k2.direction) * 0.5;
    let (q, wq) = proposal.momentum(&x[4..7], &center);
    let (q2, wq2) = proposal.momentum(&x[7..10], &center);
    let (delta, wd) = proposal.detuning(x[10], &q, &k);
    let (delta2, wd2) = proposal.detuning(x[11], &q2, &k2);
    k.delta = delta;
    k2.delta = delta2;
    let product = model.amplitude(&q, &k)
        * model.amplitude(&q, &k2).conj()
        * model.amplitude(&q2, &k2)
        * model.amplitude(&q2, &k).conj();
    product.re * (SPHERE * SPHERE) * wq * wq2 * wd * wd2
}

/// Purity of the reduced atomic state for the emission amplitude.
///
/// `config.dimension` is ignored; the two integrals set their own.
pub fn purity(params: &ModelParams, config: &QmcConfig) -> Result<PurityResult, EntangleError> {
    purity_with(params, params, config)
}

/// Purity of an arbitrary amplitude, sampled with the plan built for
/// `proposal`. The plan only affects variance.
pub fn purity_with<M: AmplitudeModel>(
    model: &M,
    proposal: &ModelParams,
    config: &QmcConfig,
) -> Result<PurityResult, EntangleError> {
    let plan = Proposal::new(proposal);
    let norm_config = config
        .with_dimension(NORM_DIMENSION)
        .with_seed(config.seed ^ NORM_SEED_SALT);
    let quad_config = config.with_dimension(QUAD_DIMENSION);
    norm_config.validate()?;

    #[cfg(feature = "std")]
    let (norm, quad) = rayon::join(
        || integrate(|x| norm_integrand(model, &plan, x), &norm_config),
        || integrate(|x| quad_integrand(model, &plan, x), &quad_config),
    );
    #[cfg(not(feature = "std"))]
    let (norm, quad) = (
        integrate(|x| norm_integrand(model, &plan, x), &norm_config),
        integrate(|x| quad_integrand(model, &plan, x), &quad_config),
    );
    let (norm, quad) = (norm?, quad?);

    if norm.value.is_nan() || norm.value <= 0.0 {
        return Err(EntangleError::Norm(norm.value));
    }
    let purity = quad.value / (norm.value * norm.value);
    let rel2 = {
        let rq = quad.std_error / quad.value;
        let rn = norm.std_error / norm.value;
        rq * rq + 4.0 * rn * rn
    };
    let std_error = libm::fabs(purity) * libm::sqrt(rel2);
    // a non-positive estimate is noise-dominated; report it rather than fail
    let low_precision =
        purity <= 0.0 || std_error.is_nan() || std_error > LOW_PRECISION * libm::fabs(purity);
    let rank = if purity > 0.0 {
        schmidt_rank(purity)?
    } else {
        f64::INFINITY
    };

    Ok(PurityResult {
        purity,
        std_error,
        schmidt_rank: rank,
        norm_estimate: norm,
        quad_estimate: quad,
        low_precision,
        total_samples: norm_config.total_samples() + quad_config.total_samples(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(samples: u64, replicates: usize) -> QmcConfig {
        QmcConfig::new(samples, replicates, 7, QUAD_DIMENSION).unwrap()
    }

    struct Separable {
        u: f64,
    }

    impl AmplitudeModel for Separable {
        fn amplitude(&self, q: &Vector3<f64>, k: &PhotonMode) -> Complex64 {
            let g = libm::exp(-(q + Vector3::new(0.2, 0.0, -0.1)).norm_squared() / (4.0 * self.u));
            k.sin_theta * (1.0 + 0.3 * k.direction.x) * g / Complex64::new(k.delta - 0.1, 0.5)
        }
    }

    #[test]
    fn separable_state_is_pure() {
        for (u, d) in [(0.3, 625.0), (625.0, 625.0), (5.0, 0.4)] {
            let p = ModelParams::new(u, d).unwrap();
            let r = purity_with(&Separable { u }, &p, &config(1 << 14, 8)).unwrap();
            assert!(
                (r.purity - 1.0).abs() <= 3.0 * r.std_error,
                "{u} {d}: {r:?}"
            );
        }
    }

    #[test]
    fn result_is_consistent() {
        let p = ModelParams::new(2.0, 10.0).unwrap();
        let r = purity(&p, &config(1 << 12, 4)).unwrap();
        assert_eq!(
            r.purity,
            r.quad_estimate.value / (r.norm_estimate.value * r.norm_estimate.value)
        );
        assert_eq!(r.schmidt_rank, 1.0 / r.purity.min(1.0));
        assert!(r.purity > 0.0 && r.purity <= 1.0 + 3.0 * r.std_error);
        assert_eq!(r.norm_estimate.replicate_values.len(), 4);
        assert_eq!(r.total_samples, 2 * 4 * 4096);
    }

    #[test]
    fn deterministic_under_seed() {
        let p = ModelParams::new(0.5, 3.0).unwrap();
        let a = purity(&p, &config(1 << 12, 4)).unwrap();
        let b = purity(&p, &config(1 << 12, 4)).unwrap();
        assert_eq!(a, b);
        let c = purity(&p, &config(1 << 12, 4).with_seed(8)).unwrap();
        assert_ne!(a.purity, c.purity);
    }

    #[test]
    fn low_precision_flagged() {
        // two replicates of the minimum size deep in the recoil regime
        let p = ModelParams::new(0.002, 625.0).unwrap();
        let r = purity(&p, &QmcConfig::new(1024, 2, 1, QUAD_DIMENSION).unwrap()).unwrap();
        assert_eq!(r.low_precision, r.std_error > LOW_PRECISION * r.purity);
    }
}
