//! First-order error propagation for the radius estimators.
//!
//! Two independent error sources are modelled: distance-measurement errors
//! `d` (std `σ_s`), which perturb the half-square matrix by `E = d ∘ C`, and
//! radial shape deviations `Δr` (std `σ_m`), which perturb it by
//! `Φᵢⱼ = (hᵢⱼ/R)(Δrᵢ + Δrⱼ)`. Both enter `1/R*²` through `−x*ᵀ(E+Φ)x*`.

use nalgebra::{DMatrix, DVector};

use crate::distmat::{DistanceMatrix, HalfSquareMatrix};
use crate::error::{Error, Result};
use crate::estimators::{Method, NoiseModel, RadiusEstimate};

/// Tolerance on `‖ψ‖ − 1` for eigenvector inputs.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// Explicit perturbation matrices, used to check the linearisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationModel {
    pub sigma_s: f64,
    pub sigma_m: f64,
}

impl PerturbationModel {
    pub fn new(noise: &NoiseModel) -> Self {
        PerturbationModel {
            sigma_s: noise.sigma_s,
            sigma_m: noise.sigma_m,
        }
    }

    /// `E = d ∘ C`: half-square error from distance errors `d` (symmetric,
    /// zero diagonal) at measured distances `C`.
    pub fn distance_error_matrix(
        distances: &DistanceMatrix,
        errors: &DMatrix<f64>,
    ) -> DMatrix<f64> {
        distances.as_matrix().component_mul(errors)
    }

    /// `Φᵢⱼ = (hᵢⱼ/R)(Δrᵢ + Δrⱼ)` for radial deviations `Δr`.
    pub fn shape_error_matrix(h: &HalfSquareMatrix, radius: f64, dr: &[f64]) -> DMatrix<f64> {
        let n = h.n();
        DMatrix::from_fn(n, n, |i, j| h.get(i, j) / radius * (dr[i] + dr[j]))
    }

    /// Linearised change of `1/R*²` for a given total perturbation.
    pub fn inv_r2_increment(x_star: &[f64], perturbation: &DMatrix<f64>) -> f64 {
        let x = DVector::from_column_slice(x_star);
        -(x.transpose() * perturbation * &x)[(0, 0)]
    }
}

fn squares(v: &[f64]) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(|x| x * x))
}

fn quadratic(h: &HalfSquareMatrix, y: &DVector<f64>) -> f64 {
    (y.transpose() * h.as_matrix() * y)[(0, 0)]
}

/// Variance of `1/R*²`:
/// `D = 2σ_s²·Y*ᵀ·h·Y* + (4σ_m²/R*²)·b̄ᵀY*` with `Y* = x* ∘ x*`.
///
/// The result can be negative for pathological noisy inputs because `h` is
/// indefinite; it is returned as-is.
pub fn variance_inv_r2(
    x_star: &[f64],
    h: &HalfSquareMatrix,
    noise: &NoiseModel,
    r_star: f64,
) -> Result<f64> {
    if x_star.len() != h.n() {
        return Err(Error::validation(format!(
            "x* has {} components, matrix is {}x{}",
            x_star.len(),
            h.n(),
            h.n()
        )));
    }
    if !(r_star > 0.0) {
        return Err(Error::Domain("r* must be positive".into()));
    }
    let y = squares(x_star);
    let distance_term = 2.0 * noise.sigma_s.powi(2) * quadratic(h, &y);
    let shape_term = 4.0 * noise.sigma_m.powi(2) / (r_star * r_star) * y.sum();
    Ok(distance_term + shape_term)
}

/// `σ_R = ½·R*³·√D`.
pub fn sigma_radius(r_star: f64, variance: f64) -> Result<f64> {
    if !(r_star > 0.0) {
        return Err(Error::Domain("r* must be positive".into()));
    }
    if variance < 0.0 || variance.is_nan() {
        return Err(Error::Domain(format!("variance {variance:e} is negative")));
    }
    Ok(0.5 * r_star.powi(3) * variance.sqrt())
}

/// Global minimum of the variance of `1/R²` over configurations of `n`
/// points: `(2σ_s²/n² + 4σ_m²/n)/r⁶`.
pub fn optimal_variance_bound(n: usize, r: f64, noise: &NoiseModel) -> Result<f64> {
    if n < 4 {
        return Err(Error::validation("need at least 4 points"));
    }
    if !(r > 0.0) {
        return Err(Error::Domain("radius must be positive".into()));
    }
    let n = n as f64;
    Ok((2.0 * noise.sigma_s.powi(2) / (n * n) + 4.0 * noise.sigma_m.powi(2) / n) / r.powi(6))
}

/// Radius standard deviation at an optimal configuration,
/// `√(σ_s²/(2n²) + σ_m²/n)`; independent of the radius.
pub fn sigma_radius_optimal(n: usize, noise: &NoiseModel) -> Result<f64> {
    if n < 4 {
        return Err(Error::validation("need at least 4 points"));
    }
    let n = n as f64;
    Ok((noise.sigma_s.powi(2) / (2.0 * n * n) + noise.sigma_m.powi(2) / n).sqrt())
}

/// Variance of the first-order perturbation of eigenvalue `λ`:
/// `2σ_s²·γᵀhγ + (4σ_m²λ²/R₀²)·b̄ᵀ(γ∘γ)`, `γ = ψ∘ψ`.
pub fn eigenvalue_perturbation_variance(
    psi: &DVector<f64>,
    lambda: f64,
    h: &HalfSquareMatrix,
    noise: &NoiseModel,
) -> Result<f64> {
    if psi.len() != h.n() {
        return Err(Error::validation(
            "eigenvector length does not match matrix",
        ));
    }
    if (psi.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::validation(format!(
            "eigenvector must have unit norm, got {}",
            psi.norm()
        )));
    }
    let gamma = squares(psi.as_slice());
    let distance_term = 2.0 * noise.sigma_s.powi(2) * quadratic(h, &gamma);
    let shape_term = if noise.sigma_m > 0.0 {
        let r0 = noise.prior_radius()?;
        4.0 * noise.sigma_m.powi(2) * lambda * lambda / (r0 * r0) * gamma.map(|g| g * g).sum()
    } else {
        0.0
    };
    Ok(distance_term + shape_term)
}

/// Fills `sigma_r` (and the underlying variance) of an estimate.
///
/// Methods carrying `x*` use the general variance formula. The sum formula
/// carries no `x*`; it is assigned the optimal-configuration value, which is
/// what the general formula gives with `x* = b̄/(N·R²)`.
pub fn attach_sigma(
    mut est: RadiusEstimate,
    h: &HalfSquareMatrix,
    noise: &NoiseModel,
) -> Result<RadiusEstimate> {
    let variance = match (&est.x_star, est.method) {
        (Some(x), _) => variance_inv_r2(x, h, noise, est.radius)?,
        (None, Method::SumFormula) => optimal_variance_bound(h.n(), est.radius, noise)?,
        (None, _) => return Ok(est),
    };
    est.inv_r2_variance = Some(variance);
    est.sigma_r = Some(sigma_radius(est.radius, variance.max(0.0))?);
    Ok(est)
}
