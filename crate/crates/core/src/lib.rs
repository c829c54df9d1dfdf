//! Sphere radius estimation from pairwise distances.
//!
//! Given the matrix of measured distances between `N ≥ 4` points on a
//! sphere, the crate estimates the radius without ever locating the centre,
//! propagates distance-measurement error and radial shape deviation into a
//! standard deviation for the estimate, and searches for point layouts that
//! make that deviation as small as possible.
//!
//! ```
//! use spherad::{fixtures, radius_general, NoiseModel};
//!
//! let h = fixtures::octahedron().half_squares().unwrap();
//! let est = radius_general(&h, &NoiseModel::exact()).unwrap();
//! assert!((est.radius - 1.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod distmat;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod uncertainty;

pub use distmat::{
    validate_matrix, DistanceKind, DistanceMatrix, HalfSquareMatrix, MatrixDiagnostics, PointSet,
};
pub use error::{Error, Result};
pub use estimators::{
    effective_rank, estimate, radius_four_inverse, radius_from_arcs, radius_general,
    radius_sum_formula, Method, NoiseModel, RadiusEstimate, RankDecision,
};
pub use geometry::{
    coords_from_distances, noisy_distances, optimality_residual, optimize_configuration,
    perturb_radial, platonic_points, sample_two_group_config, BasePlane, OptimizeOptions,
    OptimizedConfig, PlatonicSolid, RandomSeed, SphericalConfig, TwoGroupOptions,
};
pub use uncertainty::{
    eigenvalue_perturbation_variance, optimal_variance_bound, sigma_radius, sigma_radius_optimal,
    variance_inv_r2,
};
