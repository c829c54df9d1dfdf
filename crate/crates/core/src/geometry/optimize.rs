use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Serialize;

use super::nelder_mead::{self, NelderMeadOptions};
use super::sampling::{sample_two_group_with, BasePlane, RandomSeed, TwoGroupOptions};
use crate::distmat::{HalfSquareMatrix, PointSet};
use crate::error::{Error, Result};
use crate::estimators::{machine_tolerance, NoiseModel};
use crate::linalg::SymEigen;
use crate::uncertainty::{optimal_variance_bound, variance_inv_r2};

/// Returned by the objective for configurations with no valid estimate.
const PENALTY: f64 = 1e30;

/// Points on a sphere of radius `r` in polar/azimuthal angles.
///
/// As an optimisation variable the configuration is gauge-fixed: point 0
/// sits at the north pole and point 1 has zero azimuth, leaving `2n − 3`
/// free angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalConfig {
    pub r: f64,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SphericalConfig {
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn from_points(points: &PointSet) -> Result<Self> {
        let radii = points.radii();
        let r = radii.iter().sum::<f64>() / radii.len().max(1) as f64;
        if !(r > 0.0) {
            return Err(Error::degenerate("points sit at the origin"));
        }
        let mut theta = Vec::with_capacity(points.len());
        let mut phi = Vec::with_capacity(points.len());
        for (p, rad) in points.iter().zip(&radii) {
            theta.push((p.z / rad).clamp(-1.0, 1.0).acos());
            phi.push(p.y.atan2(p.x));
        }
        Ok(SphericalConfig { r, theta, phi })
    }

    /// `θ₁..θ_{n−1}` followed by `φ₂..φ_{n−1}`.
    pub fn free_angles(&self) -> Vec<f64> {
        let n = self.n();
        let mut v = self.theta[1..].to_vec();
        if n > 2 {
            v.extend_from_slice(&self.phi[2..]);
        }
        v
    }

    pub fn from_free_angles(n: usize, r: f64, angles: &[f64]) -> Result<Self> {
        if n < 2 || angles.len() != 2 * n - 3 {
            return Err(Error::validation(format!(
                "{n} points need {} free angles, got {}",
                (2 * n).saturating_sub(3),
                angles.len()
            )));
        }
        let mut theta = vec![0.0];
        theta.extend_from_slice(&angles[..n - 1]);
        let mut phi = vec![0.0, 0.0];
        phi.extend_from_slice(&angles[n - 1..]);
        Ok(SphericalConfig { r, theta, phi })
    }

    fn unit(&self, k: usize) -> Vector3<f64> {
        let (t, p) = (self.theta[k], self.phi[k]);
        Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos())
    }

    pub fn to_points(&self) -> PointSet {
        (0..self.n()).map(|k| self.unit(k) * self.r).collect()
    }

    /// Exact half-square matrix, `r²·(1 − uᵢ·uⱼ)`.
    fn half_squares_raw(&self) -> DMatrix<f64> {
        let n = self.n();
        let units: Vec<_> = (0..n).map(|k| self.unit(k)).collect();
        let r2 = self.r * self.r;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                r2 * (1.0 - units[i].dot(&units[j]))
            }
        })
    }
}

/// Row-sum spread of `h` relative to the mean row sum; zero exactly when
/// the all-ones vector is an eigenvector, which characterises optimal
/// configurations.
pub fn optimality_residual(h: &HalfSquareMatrix) -> f64 {
    let sums = h.row_sums();
    let mean = sums.mean();
    sums.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max) / mean.abs()
}

/// `x = h⁺·b̄` with the four leading eigenvalues kept above machine level.
fn exact_solution(h: &DMatrix<f64>) -> DVector<f64> {
    let eigen = SymEigen::new(h);
    let tol = machine_tolerance(h.nrows(), eigen.spectral_radius());
    let inverted: Vec<f64> = eigen
        .values
        .iter()
        .enumerate()
        .map(|(k, &l)| if k < 4 && l.abs() > tol { 1.0 / l } else { 0.0 })
        .collect();
    eigen.apply_inverse(&inverted, &DVector::from_element(h.nrows(), 1.0))
}

fn variance_of(h: &DMatrix<f64>, noise: &NoiseModel) -> Option<f64> {
    let x = exact_solution(h);
    let s = x.sum();
    if !(s > 0.0 && s.is_finite()) {
        return None;
    }
    let hs = HalfSquareMatrix::from_matrix(h.clone()).ok()?;
    variance_inv_r2(x.as_slice(), &hs, noise, 1.0 / s.sqrt()).ok()
}

/// Variance of `1/R²` at an exactly measured configuration,
/// evaluated at `x = h⁺·b̄`.
pub fn configuration_variance(points: &PointSet, noise: &NoiseModel) -> Result<f64> {
    let h = points.distances()?.half_squares()?;
    variance_of(h.as_matrix(), noise)
        .ok_or_else(|| Error::NonSpherical("configuration has no positive b'·x".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub iterations: usize,
    /// Converged once `D_N ≤ target_ratio · D_N0`.
    pub target_ratio: f64,
    pub f_tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            restarts: 20,
            iterations: 2000,
            target_ratio: 1.05,
            f_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizedConfig {
    pub points: PointSet,
    pub config: SphericalConfig,
    /// Achieved variance of `1/R²`.
    pub d_n: f64,
    /// Global minimum `D_N0` for this `n`, `r` and noise.
    pub bound: f64,
    /// `d_n / bound` (or the unit-noise ratio when the noise is zero).
    pub ratio: f64,
    pub optimality_residual: f64,
    pub converged: bool,
    pub restarts: usize,
    pub iterations: usize,
}

/// Searches for the `n`-point layout minimising the variance of `1/R²`.
///
/// Nelder–Mead runs over the gauge-fixed angles starting from a random
/// two-group configuration, then restarts from the best point found with a
/// fresh simplex until the objective stops improving or the restart budget
/// is spent. A run that never reaches `target_ratio` is still returned,
/// with `converged == false`.
pub fn optimize_configuration(
    n: usize,
    r: f64,
    noise: &NoiseModel,
    seed: &RandomSeed,
    opts: &OptimizeOptions,
) -> Result<OptimizedConfig> {
    noise.validate()?;
    if n < 4 {
        return Err(Error::validation(format!(
            "need at least 4 points, got {n}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::validation("radius must be positive"));
    }
    // The optimum does not depend on the overall noise scale, only on the
    // σ_s : σ_m mix; with no noise at all any mix is as good as another.
    let shaping = if noise.sigma_s == 0.0 && noise.sigma_m == 0.0 {
        NoiseModel::new(1.0, 1.0)?
    } else {
        *noise
    };
    let bound = optimal_variance_bound(n, r, &shaping)?;

    let start_opts = TwoGroupOptions {
        polar_max: PI,
        base_plane: BasePlane::RandomBand,
        pole_split: false,
    };
    let start = SphericalConfig::from_points(&sample_two_group_with(n, r, &start_opts, seed)?)?;

    let min_h = 1e-12 * r * r;
    let objective = |angles: &[f64]| -> f64 {
        let Ok(cfg) = SphericalConfig::from_free_angles(n, r, angles) else {
            return PENALTY;
        };
        let h = cfg.half_squares_raw();
        let too_close = (0..n).any(|i| (i + 1..n).any(|j| h[(i, j)] <= min_h));
        if too_close {
            return PENALTY;
        }
        match variance_of(&h, &shaping) {
            Some(d) if d.is_finite() => d / bound,
            _ => PENALTY,
        }
    };

    let steps = [0.2, 0.05, 0.5, 0.1];
    let mut best_x = start.free_angles();
    let mut best_f = objective(&best_x);
    let mut iterations = 0;
    let mut restarts = 0;
    for round in 0..=opts.restarts {
        let nm = NelderMeadOptions {
            max_iterations: opts.iterations,
            f_tol: opts.f_tol,
            step: steps[round % steps.len()],
        };
        let res = nelder_mead::minimize(objective, &best_x, &nm);
        iterations += res.iterations;
        restarts = round;
        let improved = best_f - res.f;
        if res.f < best_f {
            best_f = res.f;
            best_x = res.x;
        }
        let settled = improved <= opts.f_tol * (1.0 + best_f.abs());
        if round > 0 && settled && best_f <= opts.target_ratio {
            break;
        }
    }

    let config = SphericalConfig::from_free_angles(n, r, &best_x)?;
    let points = config.to_points();
    let h = HalfSquareMatrix::from_matrix(config.half_squares_raw())?;
    let d_n = variance_of(h.as_matrix(), noise).unwrap_or(f64::INFINITY);
    let ratio = if noise.sigma_s == 0.0 && noise.sigma_m == 0.0 {
        best_f
    } else {
        d_n / bound
    };
    Ok(OptimizedConfig {
        points,
        config,
        d_n,
        bound: optimal_variance_bound(n, r, noise)?,
        ratio,
        optimality_residual: optimality_residual(&h),
        converged: best_f <= opts.target_ratio,
        restarts,
        iterations,
    })
}
