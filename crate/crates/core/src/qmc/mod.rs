//! Randomized quasi-Monte Carlo integration over the unit cube.
//!
//! Each replicate integrates with the same Sobol point set under its own
//! digital shift; the estimate is the mean of the replicate means and its
//! error bar the standard error of that mean. Replicates run in parallel
//! with the `std` feature and are always reduced in replicate order, so
//! results are bit-identical whatever the thread count.

mod sobol;
mod transform;

use alloc::vec::Vec;

use thiserror::Error;

pub use sobol::{ld_point, DigitalShift, Sobol, MAX_DIMENSION, MAX_POINTS};
pub use transform::{
    cauchy_pdf, clamp_unit, normal_cdf, normal_pdf, to_cauchy, to_gaussian, UNIT_CEIL, UNIT_FLOOR,
};

pub const MIN_SAMPLES: u64 = 1024;
pub const MIN_REPLICATES: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmcError {
    #[error("dimension {0} outside 1..={MAX_DIMENSION}")]
    Dimension(usize),
    #[error("shift has {got} coordinates, expected {expected}")]
    ShiftDimension { expected: usize, got: usize },
    #[error("{0} samples per replicate; need at least {MIN_SAMPLES} and at most 2^32")]
    Samples(u64),
    #[error("{0} replicates; need at least {MIN_REPLICATES}")]
    Replicates(usize),
    #[error("integrand returned {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QmcConfig {
    pub samples_per_replicate: u64,
    pub replicates: usize,
    pub seed: u64,
    pub dimension: usize,
}

impl QmcConfig {
    pub fn new(
        samples_per_replicate: u64,
        replicates: usize,
        seed: u64,
        dimension: usize,
    ) -> Result<Self, QmcError> {
        let config = Self {
            samples_per_replicate,
            replicates,
            seed,
            dimension,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), QmcError> {
        if !(MIN_SAMPLES..=MAX_POINTS).contains(&self.samples_per_replicate) {
            return Err(QmcError::Samples(self.samples_per_replicate));
        }
        if self.replicates < MIN_REPLICATES {
            return Err(QmcError::Replicates(self.replicates));
        }
        if self.dimension == 0 || self.dimension > MAX_DIMENSION {
            return Err(QmcError::Dimension(self.dimension));
        }
        Ok(())
    }

    pub fn with_dimension(self, dimension: usize) -> Self {
        Self { dimension, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn total_samples(&self) -> u64 {
        self.samples_per_replicate * self.replicates as u64
    }
}

/// Replicated estimate of an integral.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub replicate_values: Vec<f64>,
}

impl Estimate {
    /// Mean and standard error of the mean of the replicate values.
    pub fn from_replicates(replicate_values: Vec<f64>) -> Self {
        let n = replicate_values.len() as f64;
        let value = replicate_values.iter().sum::<f64>() / n;
        let std_error = if replicate_values.len() > 1 {
            let ss: f64 = replicate_values
                .iter()
                .map(|v| (v - value) * (v - value))
                .sum();
            libm::sqrt(ss / (n - 1.0) / n)
        } else {
            0.0
        };
        Self {
            value,
            std_error,
            replicate_values,
        }
    }

    pub fn relative_error(&self) -> f64 {
        self.std_error / libm::fabs(self.value)
    }
}

fn replicate_mean<F>(
    f: &F,
    sobol: &Sobol,
    config: &QmcConfig,
    replicate: usize,
) -> Result<f64, QmcError>
where
    F: Fn(&[f64]) -> f64,
{
    let shift = DigitalShift::for_replicate(config.seed, replicate as u64, config.dimension);
    let mut sum = 0.0;
    sobol.for_each_point(config.samples_per_replicate, &shift, |x| {
        let v = f(x);
        if !v.is_finite() {
            return Err(QmcError::NonFinite {
                point: x.to_vec(),
                value: v,
            });
        }
        sum += v;
        Ok(())
    })?;
    Ok(sum / config.samples_per_replicate as f64)
}

/// Integrates `f` over `[0, 1)^dimension`.
///
/// `f` must be pure: it is called concurrently from several threads when the
/// `std` feature is enabled.
pub fn integrate<F>(f: F, config: &QmcConfig) -> Result<Estimate, QmcError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let sobol = Sobol::new(config.dimension)?;

    #[cfg(feature = "std")]
    let means: Result<Vec<f64>, QmcError> = {
        use rayon::prelude::*;
        (0..config.replicates)
            .into_par_iter()
            .map(|r| replicate_mean(&f, &sobol, config, r))
            .collect()
    };
    #[cfg(not(feature = "std"))]
    let means: Result<Vec<f64>, QmcError> = (0..config.replicates)
        .map(|r| replicate_mean(&f, &sobol, config, r))
        .collect();

    Ok(Estimate::from_replicates(means?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(samples: u64, replicates: usize, dimension: usize) -> QmcConfig {
        QmcConfig::new(samples, replicates, 42, dimension).unwrap()
    }

    #[test]
    fn constant_integrand() {
        let e = integrate(|_| 1.0, &config(1024, 4, 12)).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn separable_polynomial() {
        let e = integrate(|x| x.iter().product(), &config(1 << 14, 8, 12)).unwrap();
        let exact = 1.0 / 4096.0;
        assert!((e.value - exact).abs() <= 3.0 * e.std_error, "{e:?}");
        assert!(e.std_error > 0.0);
    }

    #[test]
    fn gaussian_change_of_variables() {
        // ∫ Π N(z; 0, 1.3²) dz = 1, sampled through the standard normal map
        let s = 1.3;
        let e = integrate(
            |x| {
                x.iter()
                    .map(|&xi| {
                        let z = to_gaussian(xi, 0.0, 1.0);
                        normal_pdf(z / s) / s / normal_pdf(z)
                    })
                    .product()
            },
            &config(1 << 14, 8, 12),
        )
        .unwrap();
        assert!((e.value - 1.0).abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn replicates_scatter_like_independent_draws() {
        let n = 1u64 << 12;
        let e = integrate(|x| x[0], &config(n, 16, 3)).unwrap();
        let sigma = (1.0 / 12.0 / n as f64).sqrt();
        for v in &e.replicate_values {
            assert!((v - 0.5).abs() < 5.0 * sigma);
        }
        // not all identical
        assert!(e
            .replicate_values
            .iter()
            .any(|&v| v != e.replicate_values[0]));
    }

    #[test]
    fn error_bar_shrinks_with_samples() {
        let mut last = f64::INFINITY;
        for n in [1u64 << 12, 1 << 14, 1 << 16, 1 << 18] {
            let e = integrate(|x| x.iter().product(), &config(n, 16, 12)).unwrap();
            assert!(e.std_error <= last, "{n}: {} > {last}", e.std_error);
            last = e.std_error;
        }
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| x[0] * x[1].sin() + x[2];
        let a = integrate(f, &config(4096, 5, 3)).unwrap();
        let b = integrate(f, &config(4096, 5, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_finite_reports_point() {
        let err = integrate(
            |x| if x[0] > 0.9 { f64::NAN } else { 0.0 },
            &config(1024, 2, 2),
        )
        .unwrap_err();
        match err {
            QmcError::NonFinite { point, value } => {
                assert!(value.is_nan());
                assert_eq!(point.len(), 2);
                assert!(point[0] > 0.9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            QmcConfig::new(1000, 4, 0, 3),
            Err(QmcError::Samples(1000))
        ));
        assert!(matches!(
            QmcConfig::new(1024, 1, 0, 3),
            Err(QmcError::Replicates(1))
        ));
        assert!(matches!(
            QmcConfig::new(1024, 2, 0, 22),
            Err(QmcError::Dimension(22))
        ));
    }
}
