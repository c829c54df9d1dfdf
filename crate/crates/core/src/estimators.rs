//! Radius estimators working on half-square distance matrices.
//!
//! Exact points on a sphere of radius `R` satisfy `h = R²·11ᵀ − αᵀα`, so
//! `h` has rank at most 4 and `1/R² = b̄ᵀ·h⁺·b̄` with `b̄` the all-ones vector.
//! The general estimator builds `h⁺` from the eigendecomposition of the
//! measured matrix, keeping only eigenvalues that rise above their own noise
//! level; this is what lets it survive configurations whose exact matrix has
//! rank 2 or 3.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::distmat::{DistanceKind, DistanceMatrix, HalfSquareMatrix};
use crate::error::{Error, Result};
use crate::linalg::SymEigen;
use crate::uncertainty;

/// Default threshold multiplier (99.99% two-sided normal quantile, rounded).
pub const DEFAULT_K_P: f64 = 4.0;

/// Condition estimate above which the 4-point inverse refuses to answer.
pub const MAX_CONDITION: f64 = 1e12;

/// Error model for the measured distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    /// Standard deviation of a distance measurement.
    pub sigma_s: f64,
    /// Standard deviation of the radial deviation of a surface point.
    pub sigma_m: f64,
    /// Prior radius for the shape-deviation term of the rank rule. When
    /// absent it is seeded from the sum formula.
    pub r0: Option<f64>,
    pub k_p: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            sigma_s: 0.0,
            sigma_m: 0.0,
            r0: None,
            k_p: DEFAULT_K_P,
        }
    }
}

impl NoiseModel {
    pub fn new(sigma_s: f64, sigma_m: f64) -> Result<Self> {
        let noise = NoiseModel {
            sigma_s,
            sigma_m,
            ..Default::default()
        };
        noise.validate()?;
        Ok(noise)
    }

    pub fn exact() -> Self {
        Self::default()
    }

    pub fn with_r0(mut self, r0: f64) -> Self {
        self.r0 = Some(r0);
        self
    }

    pub fn with_k_p(mut self, k_p: f64) -> Self {
        self.k_p = k_p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.sigma_s) || !finite_nonneg(self.sigma_m) {
            return Err(Error::validation(
                "noise standard deviations must be finite and >= 0",
            ));
        }
        if !(self.k_p > 0.0 && self.k_p.is_finite()) {
            return Err(Error::validation("k_p must be positive"));
        }
        if let Some(r0) = self.r0 {
            if !(r0 > 0.0 && r0.is_finite()) {
                return Err(Error::validation("r0 must be positive"));
            }
        }
        Ok(())
    }

    /// Prior radius, required only when `sigma_m > 0`.
    pub(crate) fn prior_radius(&self) -> Result<f64> {
        match self.r0 {
            Some(r0) => Ok(r0),
            None if self.sigma_m == 0.0 => Ok(1.0),
            None => Err(Error::Domain(
                "shape deviation term needs a prior radius r0".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FourInverse,
    SumFormula,
    General,
    Arcs,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FourInverse => "four_inverse",
            Method::SumFormula => "sum_formula",
            Method::General => "general",
            Method::Arcs => "arcs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub sigma_r: Option<f64>,
    /// Variance of `1/R*²` behind `sigma_r`, before clamping.
    pub inv_r2_variance: Option<f64>,
    /// Number of retained eigenvalues; `None` for the sum formula.
    pub effective_rank: Option<usize>,
    /// Up to four eigenvalues of the half-square matrix, largest |λ| first.
    pub eigenvalues: Vec<f64>,
    pub x_star: Option<Vec<f64>>,
    pub method: Method,
}

impl RadiusEstimate {
    fn new(radius: f64, method: Method) -> Self {
        RadiusEstimate {
            radius,
            sigma_r: None,
            inv_r2_variance: None,
            effective_rank: None,
            eigenvalues: Vec::new(),
            x_star: None,
            method,
        }
    }

    /// True when the variance formula went negative and `sigma_r` was clamped.
    pub fn variance_clamped(&self) -> bool {
        self.inv_r2_variance.is_some_and(|d| d < 0.0)
    }
}

/// Outcome of the eigenvalue reliability test.
#[derive(Debug, Clone)]
pub struct RankDecision {
    pub rank: usize,
    pub eigen: SymEigen,
    /// `1/λ` for retained eigenvalues, 0 otherwise (length `n`).
    pub inverted: Vec<f64>,
    /// Perturbation variance of each of the leading (up to 4) eigenvalues.
    pub variances: Vec<f64>,
    /// Reliability threshold `K_p·√D + Tol` for the same eigenvalues.
    pub thresholds: Vec<f64>,
}

impl RankDecision {
    pub fn leading_eigenvalues(&self) -> Vec<f64> {
        self.eigen.values.iter().take(4).copied().collect()
    }

    pub fn retained(&self, k: usize) -> bool {
        self.inverted.get(k).is_some_and(|v| *v != 0.0)
    }

    /// `h⁺·b̄`.
    pub fn solve_ones(&self) -> DVector<f64> {
        let ones = DVector::from_element(self.eigen.len(), 1.0);
        self.eigen.apply_inverse(&self.inverted, &ones)
    }
}

/// Machine component of the reliability threshold.
pub fn machine_tolerance(n: usize, spectral_radius: f64) -> f64 {
    n as f64 * f64::EPSILON * spectral_radius
}

fn require_n(h: &HalfSquareMatrix, min: usize) -> Result<()> {
    if h.n() < min {
        return Err(Error::validation(format!(
            "need at least {min} points, got {}",
            h.n()
        )));
    }
    Ok(())
}

fn resolve_prior(h: &HalfSquareMatrix, noise: &NoiseModel) -> Result<NoiseModel> {
    noise.validate()?;
    let mut resolved = *noise;
    if resolved.sigma_m > 0.0 && resolved.r0.is_none() {
        resolved.r0 = Some(radius_sum_formula(h)?.radius);
    }
    Ok(resolved)
}

/// Decides which of the four largest-|λ| eigenvalues of `h` are reliable.
///
/// Eigenvalue `λᵢ` is kept iff `|λᵢ| > K_p·√D_Δλᵢ + Tol`; everything past the
/// fourth is always discarded.
pub fn effective_rank(h: &HalfSquareMatrix, noise: &NoiseModel) -> Result<RankDecision> {
    require_n(h, 4)?;
    let noise = resolve_prior(h, noise)?;
    let eigen = SymEigen::new(h.as_matrix());
    let tol = machine_tolerance(h.n(), eigen.spectral_radius());

    let mut inverted = vec![0.0; h.n()];
    let mut variances = Vec::with_capacity(4);
    let mut thresholds = Vec::with_capacity(4);
    for (k, &lambda) in eigen.values.iter().take(4).enumerate() {
        let var =
            uncertainty::eigenvalue_perturbation_variance(&eigen.vector(k), lambda, h, &noise)?;
        let threshold = noise.k_p * var.sqrt() + tol;
        if lambda.abs() > threshold {
            inverted[k] = 1.0 / lambda;
        }
        variances.push(var);
        thresholds.push(threshold);
    }

    let rank = inverted.iter().filter(|v| **v != 0.0).count();
    if rank < 2 {
        return Err(Error::InsufficientSignal { rank });
    }
    Ok(RankDecision {
        rank,
        eigen,
        inverted,
        variances,
        thresholds,
    })
}

fn radius_from_solution(x: &DVector<f64>) -> Result<f64> {
    let s = x.sum();
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::NonSpherical(format!(
            "b'·x = {s:.6e} is not positive"
        )));
    }
    Ok(1.0 / s.sqrt())
}

/// Four-point estimator with a plain inverse.
pub fn radius_four_inverse(h: &HalfSquareMatrix) -> Result<RadiusEstimate> {
    if h.n() != 4 {
        return Err(Error::validation(format!(
            "four-point estimator needs exactly 4 points, got {}",
            h.n()
        )));
    }
    let eigen = SymEigen::new(h.as_matrix());
    let condition = eigen.condition();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let ones = DVector::from_element(4, 1.0);
    let x = h
        .as_matrix()
        .clone()
        .lu()
        .solve(&ones)
        .ok_or(Error::IllConditioned { condition })?;
    let mut est = RadiusEstimate::new(radius_from_solution(&x)?, Method::FourInverse);
    est.effective_rank = Some(4);
    est.eigenvalues = eigen.values;
    est.x_star = Some(x.iter().copied().collect());
    Ok(est)
}

/// Inversion-free estimator `√(b̄ᵀ·h·b̄)/N`, exact when every row of `h`
/// has the same sum.
pub fn radius_sum_formula(h: &HalfSquareMatrix) -> Result<RadiusEstimate> {
    require_n(h, 4)?;
    let total = h.total();
    if !(total > 0.0) {
        return Err(Error::NonSpherical(
            "sum of half-squares is not positive".into(),
        ));
    }
    Ok(RadiusEstimate::new(
        total.sqrt() / h.n() as f64,
        Method::SumFormula,
    ))
}

/// Rank-aware pseudo-inverse estimator for any `N ≥ 4`.
pub fn radius_general(h: &HalfSquareMatrix, noise: &NoiseModel) -> Result<RadiusEstimate> {
    let decision = effective_rank(h, noise)?;
    let x = decision.solve_ones();
    let mut est = RadiusEstimate::new(radius_from_solution(&x)?, Method::General);
    est.effective_rank = Some(decision.rank);
    est.eigenvalues = decision.leading_eigenvalues();
    est.x_star = Some(x.iter().copied().collect());
    Ok(est)
}

/// Half-square chord matrix implied by arcs on a sphere of radius `r`:
/// `2r²·sin²(L/(2r))`.
pub fn chord_half_squares(arcs: &DistanceMatrix, r: f64) -> Result<HalfSquareMatrix> {
    if arcs.kind() != DistanceKind::Arc {
        return Err(Error::validation("expected an arc matrix"));
    }
    let m = arcs.as_matrix().map(|l| {
        let s = (l / (2.0 * r)).sin();
        2.0 * r * r * s * s
    });
    HalfSquareMatrix::from_matrix(m)
}

/// Relative tolerance of the arc root search.
pub const ARC_ROOT_RTOL: f64 = 1e-10;
const ARC_SCAN_POINTS: usize = 512;
const ARC_MAX_DOUBLINGS: u32 = 10;

#[derive(Debug, Clone, Copy)]
struct ArcSample {
    r: f64,
    g: f64,
    rank: usize,
}

fn arc_residual(arcs: &DistanceMatrix, noise: &NoiseModel, r: f64) -> Option<ArcSample> {
    let h = chord_half_squares(arcs, r).ok()?;
    let mut local = *noise;
    local.r0 = Some(noise.r0.unwrap_or(r));
    let decision = effective_rank(&h, &local).ok()?;
    let g = decision.solve_ones().sum() - 1.0 / (r * r);
    g.is_finite().then_some(ArcSample {
        r,
        g,
        rank: decision.rank,
    })
}

fn bisect_arc_root(
    arcs: &DistanceMatrix,
    noise: &NoiseModel,
    mut lo: ArcSample,
    mut hi: ArcSample,
) -> Option<f64> {
    while (hi.r - lo.r) > ARC_ROOT_RTOL * lo.r {
        let mid = arc_residual(arcs, noise, 0.5 * (lo.r + hi.r))?;
        if mid.g == 0.0 {
            return Some(mid.r);
        }
        if mid.g.signum() == lo.g.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // A sign change across a jump of the retained rank is not a root.
    let r = 0.5 * (lo.r + hi.r);
    let at = arc_residual(arcs, noise, r)?;
    let continuous = lo.rank == hi.rank && at.g.abs() * r * r <= 1e-6;
    continuous.then_some(r)
}

/// Radius from a matrix of great-circle arcs.
///
/// Solves `b̄ᵀ·(C²(R))⁺·b̄ = 1/R²` where `C²(R)` are the chord half-squares
/// implied by the arcs. All continuous roots above `max(L)/π` are located by
/// a geometric scan and bisection; when several exist the one nearest to
/// `noise.r0` is returned, or the largest when no prior is given.
pub fn radius_from_arcs(arcs: &DistanceMatrix, noise: &NoiseModel) -> Result<RadiusEstimate> {
    if arcs.kind() != DistanceKind::Arc {
        return Err(Error::validation("radius_from_arcs needs an arc matrix"));
    }
    if arcs.n() < 4 {
        return Err(Error::validation("need at least 4 points"));
    }
    noise.validate()?;

    let max_arc = arcs.max_entry();
    let lower = max_arc / std::f64::consts::PI * (1.0 + 1e-9);
    let mut upper = 10.0 * max_arc;
    let mut start = lower;
    let mut roots = Vec::new();

    // Antipodal pairs put the exact root on the lower edge of the domain.
    let edge = max_arc / std::f64::consts::PI;
    if let Some(at) = arc_residual(arcs, noise, edge) {
        if at.g.abs() * edge * edge <= 1e-9 {
            roots.push(edge);
        }
    }

    for _ in 0..=ARC_MAX_DOUBLINGS {
        let ratio = (upper / start).powf(1.0 / (ARC_SCAN_POINTS - 1) as f64);
        let mut prev: Option<ArcSample> = None;
        for k in 0..ARC_SCAN_POINTS {
            let r = if k + 1 == ARC_SCAN_POINTS {
                upper
            } else {
                start * ratio.powi(k as i32)
            };
            let Some(cur) = arc_residual(arcs, noise, r) else {
                prev = None;
                continue;
            };
            if let Some(p) = prev {
                if p.g.signum() != cur.g.signum() {
                    if let Some(root) = bisect_arc_root(arcs, noise, p, cur) {
                        roots.push(root);
                    }
                }
            }
            prev = Some(cur);
        }
        if !roots.is_empty() {
            break;
        }
        start = upper;
        upper *= 2.0;
    }

    let root = match noise.r0 {
        Some(r0) => roots
            .iter()
            .copied()
            .min_by(|a, b| (a - r0).abs().total_cmp(&(b - r0).abs())),
        None => roots.iter().copied().max_by(f64::total_cmp),
    }
    .ok_or_else(|| {
        Error::NoRoot(format!(
            "no sign change of the arc equation in [{lower:.6e}, {upper:.6e}]"
        ))
    })?;

    let h = chord_half_squares(arcs, root)?;
    let mut local = *noise;
    local.r0 = Some(noise.r0.unwrap_or(root));
    let decision = effective_rank(&h, &local)?;
    let x = decision.solve_ones();

    let mut est = RadiusEstimate::new(root, Method::Arcs);
    est.effective_rank = Some(decision.rank);
    est.eigenvalues = decision.leading_eigenvalues();
    est.x_star = Some(x.iter().copied().collect());
    uncertainty::attach_sigma(est, &h, noise)
}

/// Convenience dispatcher used by the CLI and the experiment harness.
pub fn estimate(
    h: &HalfSquareMatrix,
    method: Method,
    noise: &NoiseModel,
) -> Result<RadiusEstimate> {
    let est = match method {
        Method::FourInverse => radius_four_inverse(h)?,
        Method::SumFormula => radius_sum_formula(h)?,
        Method::General => radius_general(h, noise)?,
        Method::Arcs => {
            return Err(Error::validation(
                "arc estimator takes an arc matrix, not half-squares",
            ))
        }
    };
    uncertainty::attach_sigma(est, h, noise)
}

/// Half-square matrix with the optimal-configuration structure
/// (opposite edges `a`, `b`, `ℓ` pairwise equal).
pub fn equifacial_half_squares(a: f64, b: f64, l: f64) -> DMatrix<f64> {
    let (a2, b2, l2) = (0.5 * a * a, 0.5 * b * b, 0.5 * l * l);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, a2, b2, l2, //
            a2, 0.0, l2, b2, //
            b2, l2, 0.0, a2, //
            l2, b2, a2, 0.0,
        ],
    )
}
