//! Inverse-CDF maps from the unit interval.
//!
//! Inputs are clamped to `[2⁻⁶⁴, 1 − 2⁻⁵³]` first, so endpoints map to
//! large but finite values (about −9.3σ / +8.1σ for the Gaussian).

use core::f64::consts::{PI, SQRT_2};

pub const UNIT_FLOOR: f64 = 1.0 / 18_446_744_073_709_551_616.0; // 2^-64
pub const UNIT_CEIL: f64 = 1.0 - f64::EPSILON / 2.0; // 1 - 2^-53

#[inline]
pub fn clamp_unit(x: f64) -> f64 {
    x.clamp(UNIT_FLOOR, UNIT_CEIL)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    libm::exp(-0.5 * z * z) / libm::sqrt(2.0 * PI)
}

// Acklam's rational approximation (relative error ~1e-9), followed by one
// Halley step against erfc which brings it to full double precision.
fn standard_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < P_LOW {
        tail(libm::sqrt(-2.0 * libm::log(p)))
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(libm::sqrt(-2.0 * libm::log(1.0 - p)))
    };

    // Halley refinement; the residual is formed from whichever tail is
    // smaller to avoid cancellation.
    let e = if x < 0.0 {
        0.5 * libm::erfc(-x / SQRT_2) - p
    } else {
        (1.0 - p) - 0.5 * libm::erfc(x / SQRT_2)
    };
    let u = e * libm::sqrt(2.0 * PI) * libm::exp(0.5 * x * x);
    x - u / (1.0 + 0.5 * x * u)
}

/// Gaussian quantile: `mean + sigma · Φ⁻¹(x)`.
#[inline]
pub fn to_gaussian(x: f64, mean: f64, sigma: f64) -> f64 {
    debug_assert!(sigma > 0.0);
    mean + sigma * standard_normal_quantile(clamp_unit(x))
}

/// Cauchy quantile: `center + width · tan(π(x − 1/2))`.
#[inline]
pub fn to_cauchy(x: f64, center: f64, width: f64) -> f64 {
    debug_assert!(width > 0.0);
    center + width * libm::tan(PI * (clamp_unit(x) - 0.5))
}

/// Cauchy density with the given centre and half-width.
#[inline]
pub fn cauchy_pdf(x: f64, center: f64, width: f64) -> f64 {
    let t = (x - center) / width;
    1.0 / (PI * width * (1.0 + t * t))
}
