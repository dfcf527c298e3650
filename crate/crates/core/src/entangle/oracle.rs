//! Deterministic grid oracle for the purity.
//!
//! The amplitude is tabulated on a tensor-product quadrature grid and
//! folded with the square roots of the quadrature weights into a matrix
//! `M[atom, photon]`. The discrete purity is then computed two ways:
//! from the singular values, `Σσ⁴ / (Σσ²)²`, and as the quadruple sum
//! `Σ M[a,p] M*[a,p′] M[a′,p′] M*[a′,p] / (Σ|M|²)²` evaluated through the
//! Gram matrix of the smaller side. Both see the same discretisation, so
//! they must agree to rounding.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use crate::kernel::{amplitude_at, PhotonMode};
use crate::spectra::ModelParams;

use super::EntangleError;

/// Largest `rows × cols` the oracle will allocate (about 2000 × 2000).
pub const MAX_MATRIX_ENTRIES: usize = 4_000_000;

/// Gauss-Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if libm::fabs(dx) < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Node counts of the tensor grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGrid {
    /// Per Cartesian axis of the atomic momentum.
    pub atom_nodes: usize,
    pub detuning_nodes: usize,
    pub polar_nodes: usize,
    pub azimuth_nodes: usize,
}

impl OracleGrid {
    pub fn rows(&self) -> usize {
        self.atom_nodes.pow(3)
    }

    pub fn cols(&self) -> usize {
        self.detuning_nodes * self.polar_nodes * self.azimuth_nodes
    }
}

/// Half-width of the atomic momentum box, centred on 0: covers five widths
/// of the Gaussian beyond the recoil sphere.
pub fn atom_half_width(u: f64) -> f64 {
    let five_sigma = 5.0 * libm::sqrt(u);
    five_sigma.max(1.0 + five_sigma)
}

/// Half-width of the detuning window around the recoil-shifted line centre.
pub fn detuning_half_width(u: f64, d: f64) -> f64 {
    (10.0_f64).max(10.0 * libm::sqrt(u) / (2.0 * d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub svd_purity: f64,
    pub riemann_purity: f64,
    /// Descending.
    pub singular_values: Vec<f64>,
}

impl OracleResult {
    pub fn relative_gap(&self) -> f64 {
        libm::fabs(self.svd_purity - self.riemann_purity) / self.riemann_purity
    }
}

/// Weighted amplitude matrix `√w_atom · A · √w_photon`.
pub fn amplitude_matrix(
    params: &ModelParams,
    grid: &OracleGrid,
) -> Result<DMatrix<Complex64>, EntangleError> {
    let (rows, cols) = (grid.rows(), grid.cols());
    if rows == 0 || cols == 0 {
        return Err(EntangleError::EmptyGrid);
    }
    if rows.saturating_mul(cols) > MAX_MATRIX_ENTRIES {
        return Err(EntangleError::GridTooLarge {
            rows,
            cols,
            bytes: rows
                .saturating_mul(cols)
                .saturating_mul(core::mem::size_of::<Complex64>()),
        });
    }

    let half = atom_half_width(params.u());
    let (xa, wa) = gauss_legendre(grid.atom_nodes);
    let axis: Vec<(f64, f64)> = xa
        .iter()
        .zip(&wa)
        .map(|(x, w)| (x * half, w * half))
        .collect();
    let mut atoms = Vec::with_capacity(rows);
    for &(x, wx) in &axis {
        for &(y, wy) in &axis {
            for &(z, wz) in &axis {
                atoms.push((Vector3::new(x, y, z), libm::sqrt(wx * wy * wz)));
            }
        }
    }

    // Detuning nodes are Gauss-Legendre in the Cauchy-CDF angle, which packs
    // them into the Lorentzian core.
    let center = 0.25 / params.d();
    let angle = libm::atan(detuning_half_width(params.u(), params.d()) / 0.5);
    let (xd, wd) = gauss_legendre(grid.detuning_nodes);
    let detunings: Vec<(f64, f64)> = xd
        .iter()
        .zip(&wd)
        .map(|(&x, &w)| {
            let t = x * angle;
            let c = libm::cos(t);
            (center + 0.5 * libm::tan(t), w * angle * 0.5 / (c * c))
        })
        .collect();
    let (xc, wc) = gauss_legendre(grid.polar_nodes);
    let dphi = 2.0 * PI / grid.azimuth_nodes as f64;

    let mut photons = Vec::with_capacity(cols);
    for &(delta, w_delta) in &detunings {
        for (&cos_theta, &w_cos) in xc.iter().zip(&wc) {
            let sin_theta = libm::sqrt(1.0 - cos_theta * cos_theta);
            for j in 0..grid.azimuth_nodes {
                let phi = dphi * j as f64;
                let mode = PhotonMode {
                    delta,
                    direction: Vector3::new(
                        sin_theta * libm::cos(phi),
                        sin_theta * libm::sin(phi),
                        cos_theta,
                    ),
                    sin_theta,
                };
                photons.push((mode, libm::sqrt(w_delta * w_cos * dphi)));
            }
        }
    }

    Ok(DMatrix::from_fn(rows, cols, |r, c| {
        let (q, wq) = &atoms[r];
        let (mode, wp) = &photons[c];
        amplitude_at(q, mode, params) * (wq * wp)
    }))
}

/// `Σσ⁴ / (Σσ²)²` from the singular values of `m`.
pub fn matrix_purity_svd(m: &DMatrix<Complex64>) -> (f64, Vec<f64>) {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let s2: f64 = sv.iter().map(|s| s * s).sum();
    let s4: f64 = sv.iter().map(|s| s * s * s * s).sum();
    (s4 / (s2 * s2), sv)
}

/// Quadruple-sum purity of `m`, grouped as `Σ_{a,a′} |Σ_p M[a,p] M*[a′,p]|²`
/// over whichever side of `m` is smaller.
pub fn matrix_purity_riemann(m: &DMatrix<Complex64>) -> f64 {
    let (n, len) = if m.nrows() <= m.ncols() {
        (m.nrows(), m.ncols())
    } else {
        (m.ncols(), m.nrows())
    };
    // row-major copy of the smaller side's vectors
    let mut flat = Vec::with_capacity(n * len);
    if m.nrows() <= m.ncols() {
        for i in 0..n {
            flat.extend(m.row(i).iter().copied());
        }
    } else {
        for j in 0..n {
            flat.extend(m.column(j).iter().map(|z| z.conj()));
        }
    }
    let vector = |i: usize| &flat[i * len..(i + 1) * len];

    let mut trace = 0.0;
    let mut sum = 0.0;
    for i in 0..n {
        let vi = vector(i);
        let diag: f64 = vi.iter().map(|z| z.norm_sqr()).sum();
        trace += diag;
        sum += diag * diag;
        for j in (i + 1)..n {
            let vj = vector(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in vi.iter().zip(vj) {
                acc += a * b.conj();
            }
            sum += 2.0 * acc.norm_sqr();
        }
    }
    sum / (trace * trace)
}

/// Grid purity of the emission amplitude by both routes.
pub fn purity_oracle(
    params: &ModelParams,
    grid: &OracleGrid,
) -> Result<OracleResult, EntangleError> {
    let m = amplitude_matrix(params, grid)?;
    let (svd_purity, singular_values) = matrix_purity_svd(&m);
    let riemann_purity = matrix_purity_riemann(&m);
    Ok(OracleResult {
        svd_purity,
        riemann_purity,
        singular_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn literal_quadruple_sum(m: &DMatrix<Complex64>) -> f64 {
        let (na, np) = m.shape();
        let mut sum = c(0.0, 0.0);
        for a in 0..na {
            for a2 in 0..na {
                for p in 0..np {
                    for p2 in 0..np {
                        sum += m[(a, p)] * m[(a, p2)].conj() * m[(a2, p2)] * m[(a2, p)].conj();
                    }
                }
            }
        }
        let norm: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        sum.re / (norm * norm)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 12, 33] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-13);
            // exact for degree 2n - 1
            let deg = 2 * n - 2;
            let integral: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * libm::pow(*x, deg as f64))
                .sum();
            assert_relative_eq!(integral, 2.0 / (deg as f64 + 1.0), max_relative = 1e-12);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn rank_one_matrix_is_pure() {
        let a = nalgebra::DVector::from_vec(alloc::vec![c(1.0, 0.5), c(-0.3, 2.0), c(0.7, 0.0)]);
        let b = nalgebra::DVector::from_vec(alloc::vec![c(0.2, -1.0), c(1.5, 0.1)]);
        let m = &a * b.transpose();
        assert_relative_eq!(matrix_purity_svd(&m).0, 1.0, max_relative = 1e-14);
        assert_relative_eq!(matrix_purity_riemann(&m), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn two_equal_singular_values_give_half() {
        let mut m = DMatrix::from_element(4, 3, c(0.0, 0.0));
        m[(0, 1)] = c(0.6, 0.8);
        m[(2, 0)] = c(-1.0, 0.0);
        assert_relative_eq!(matrix_purity_svd(&m).0, 0.5, max_relative = 1e-15);
        assert_relative_eq!(matrix_purity_riemann(&m), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn grouped_sum_matches_literal_quadruple_sum() {
        let m = DMatrix::from_fn(5, 7, |i, j| {
            c(
                libm::sin(1.3 * i as f64 + 0.2 * j as f64),
                libm::cos(0.7 * (i * j) as f64),
            )
        });
        let lit = literal_quadruple_sum(&m);
        assert_relative_eq!(matrix_purity_riemann(&m), lit, max_relative = 1e-13);
        assert_relative_eq!(
            matrix_purity_riemann(&m.transpose()),
            lit,
            max_relative = 1e-13
        );
        assert_relative_eq!(matrix_purity_svd(&m).0, lit, max_relative = 1e-12);
    }

    #[test]
    fn routes_agree_on_emission_grid() {
        let grid = OracleGrid {
            atom_nodes: 5,
            detuning_nodes: 6,
            polar_nodes: 5,
            azimuth_nodes: 6,
        };
        for (u, d) in [(1.0, 625.0), (0.3, 2.0), (50.0, 1.5)] {
            let r = purity_oracle(&ModelParams::new(u, d).unwrap(), &grid).unwrap();
            assert!(r.relative_gap() < 1e-10, "{u} {d}: {r:?}");
            assert!(r.svd_purity > 0.0 && r.svd_purity <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn oversized_grid_rejected() {
        let grid = OracleGrid {
            atom_nodes: 20,
            detuning_nodes: 20,
            polar_nodes: 20,
            azimuth_nodes: 20,
        };
        match amplitude_matrix(&ModelParams::new(1.0, 1.0).unwrap(), &grid) {
            Err(EntangleError::GridTooLarge { rows, cols, bytes }) => {
                assert_eq!((rows, cols), (8000, 8000));
                assert_eq!(bytes, 8000 * 8000 * 16);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extents() {
        assert_relative_eq!(atom_half_width(4.0), 11.0);
        assert_eq!(detuning_half_width(1.0, 625.0), 10.0);
        assert_relative_eq!(detuning_half_width(4.0 * 1e4, 1.0), 1000.0);
    }
}
