//! Point configurations on a sphere: sampling, noise, regular solids,
//! coordinate recovery and the search for optimal layouts.

mod embedding;
pub mod nelder_mead;
mod optimize;
mod platonic;
mod sampling;

pub use embedding::{coords_from_distances, embed, Embedding};
pub use optimize::{
    configuration_variance, optimality_residual, optimize_configuration, OptimizeOptions,
    OptimizedConfig, SphericalConfig,
};
pub use platonic::{platonic_points, PlatonicSolid};
pub use sampling::{
    noisy_distances, perturb_radial, sample_two_group_config, sample_two_group_with, BasePlane,
    RandomSeed, TwoGroupOptions,
};
