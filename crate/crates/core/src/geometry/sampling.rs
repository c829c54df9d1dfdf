use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::distmat::{DistanceKind, DistanceMatrix, PointSet};
use crate::error::{Error, Result};

/// Seed plus stream id. Identical pairs yield identical draws; distinct
/// stream ids under one seed are statistically independent.
///
/// Draws come from ChaCha8 (`rand_chacha`) seeded with `seed_from_u64(seed)`
/// and positioned with `set_stream(stream)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RandomSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSeed {
    pub fn new(seed: u64) -> Self {
        RandomSeed { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RandomSeed { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Where the base triangle of the fixed tetrahedron sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasePlane {
    /// On the boundary of the sampled cap, polar angle `polar_max`.
    CapBoundary,
    /// At a fixed height `z` (`|z| < r`).
    Height(f64),
    /// Uniform height in `[-r/2, r/2]`.
    RandomBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoGroupOptions {
    /// Upper end of the polar-angle range for the free points, radians.
    pub polar_max: f64,
    pub base_plane: BasePlane,
    /// Reflect the first base vertex to the northern side (`z → −z`).
    pub pole_split: bool,
}

impl TwoGroupOptions {
    pub fn cap(polar_max: f64) -> Self {
        TwoGroupOptions {
            polar_max,
            base_plane: BasePlane::CapBoundary,
            pole_split: false,
        }
    }
}

fn spherical(r: f64, theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(
        r * theta.sin() * phi.cos(),
        r * theta.sin() * phi.sin(),
        r * theta.cos(),
    )
}

/// Pole-plus-triangle tetrahedron with `n − 4` further points spread
/// uniformly over the cap `θ ≤ polar_max`; the base triangle sits on the cap
/// boundary.
pub fn sample_two_group_config(
    n: usize,
    polar_max: f64,
    r: f64,
    seed: &RandomSeed,
) -> Result<PointSet> {
    sample_two_group_with(n, r, &TwoGroupOptions::cap(polar_max), seed)
}

/// Two-group sampler with an explicit base-plane rule.
///
/// Group one is the north pole plus an equilateral triangle in a plane
/// perpendicular to the polar axis, its first vertex in the OXZ plane.
/// Group two is uniform in azimuth and uniform in area over the cap.
pub fn sample_two_group_with(
    n: usize,
    r: f64,
    opts: &TwoGroupOptions,
    seed: &RandomSeed,
) -> Result<PointSet> {
    if n < 4 {
        return Err(Error::validation(format!(
            "need at least 4 points, got {n}"
        )));
    }
    if !(opts.polar_max > 0.0 && opts.polar_max <= PI) {
        return Err(Error::validation("polar_max must lie in (0, π]"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::validation("radius must be positive"));
    }
    let mut rng = seed.rng();

    let base_theta = match opts.base_plane {
        BasePlane::CapBoundary => opts.polar_max,
        BasePlane::Height(z) => {
            if z.abs() >= r {
                return Err(Error::validation("base plane must cut the sphere"));
            }
            (z / r).acos()
        }
        BasePlane::RandomBand => (rng.random_range(-0.5..=0.5_f64)).acos(),
    };

    let mut points = Vec::with_capacity(n);
    points.push(Vector3::new(0.0, 0.0, r));
    for k in 0..3 {
        let phi = TAU * k as f64 / 3.0;
        let theta = if k == 0 && opts.pole_split {
            PI - base_theta
        } else {
            base_theta
        };
        points.push(spherical(r, theta, phi));
    }

    let cos_min = opts.polar_max.cos();
    for _ in 4..n {
        let phi = rng.random_range(0.0..TAU);
        let cos_theta = rng.random_range(cos_min..=1.0);
        points.push(spherical(r, cos_theta.clamp(-1.0, 1.0).acos(), phi));
    }
    Ok(PointSet::new(points))
}

/// Moves each point along its radius vector by an independent
/// `N(0, σ_m²)` amount.
pub fn perturb_radial(points: &PointSet, sigma_m: f64, seed: &RandomSeed) -> Result<PointSet> {
    if !(sigma_m >= 0.0 && sigma_m.is_finite()) {
        return Err(Error::validation("sigma_m must be finite and >= 0"));
    }
    if points.iter().any(|p| p.norm() == 0.0) {
        return Err(Error::degenerate(
            "cannot move a point at the origin radially",
        ));
    }
    if sigma_m == 0.0 {
        return Ok(points.clone());
    }
    let normal = Normal::new(0.0, sigma_m).expect("sigma checked");
    let mut rng = seed.rng();
    points
        .iter()
        .map(|p| {
            let r = p.norm();
            let moved = r + normal.sample(&mut rng);
            if moved <= 0.0 {
                return Err(Error::validation(
                    "radial deviation exceeds the radius; sigma_m must be much smaller than R",
                ));
            }
            Ok(p * (moved / r))
        })
        .collect()
}

/// Exact distances plus symmetric i.i.d. `N(0, σ_s²)` errors on each pair.
pub fn noisy_distances(
    points: &PointSet,
    sigma_s: f64,
    seed: &RandomSeed,
) -> Result<DistanceMatrix> {
    if !(sigma_s >= 0.0 && sigma_s.is_finite()) {
        return Err(Error::validation("sigma_s must be finite and >= 0"));
    }
    let exact = DistanceMatrix::from_points(points)?;
    if sigma_s == 0.0 {
        return Ok(exact);
    }
    let n = exact.n();
    let normal = Normal::new(0.0, sigma_s).expect("sigma checked");
    let mut rng = seed.rng();
    let mut data = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = exact.get(i, j) + normal.sample(&mut rng);
            if d <= 0.0 {
                return Err(Error::degenerate(format!(
                    "noisy distance between points {i} and {j} is not positive"
                )));
            }
            data[(i, j)] = d;
            data[(j, i)] = d;
        }
    }
    DistanceMatrix::new(data, DistanceKind::Chord)
}
