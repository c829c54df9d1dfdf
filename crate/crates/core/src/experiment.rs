//! Monte Carlo harness: generate a configuration, perturb it, measure noisy
//! distances and score every estimator against the true radius.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{algebraic_sphere_fit, cayley_menger_circumradius, iterative_sphere_fit};
use crate::distmat::PointSet;
use crate::error::{Error, Result};
use crate::estimators::{radius_general, radius_sum_formula, NoiseModel};
use crate::geometry::{
    coords_from_distances, noisy_distances, optimize_configuration, perturb_radial,
    platonic_points, sample_two_group_with, OptimizeOptions, PlatonicSolid, RandomSeed,
    TwoGroupOptions,
};

pub const DEFAULT_TRIALS: usize = 1000;

/// What the estimated radius is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorReference {
    /// The radius the points were generated on.
    Nominal,
    /// Nominal radius plus the mean radial deviation of the trial's points.
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConfigSource {
    /// Fresh random two-group layout every trial.
    TwoGroup(TwoGroupOptions),
    /// One optimised layout, reused by every trial.
    Optimal(OptimizeOptions),
    Platonic(PlatonicSolid),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonteCarloConfig {
    pub n: usize,
    pub source: ConfigSource,
    pub trials: usize,
    pub sigma_s: f64,
    pub sigma_m: f64,
    pub radius: f64,
    pub seed: u64,
    pub reference: ErrorReference,
}

impl MonteCarloConfig {
    pub fn two_group(n: usize, polar_max: f64) -> Self {
        MonteCarloConfig {
            n,
            source: ConfigSource::TwoGroup(TwoGroupOptions::cap(polar_max)),
            trials: DEFAULT_TRIALS,
            sigma_s: 1.0,
            sigma_m: 1.0,
            radius: 1000.0,
            seed: 0,
            reference: ErrorReference::Nominal,
        }
    }

    pub fn optimal(n: usize) -> Self {
        MonteCarloConfig {
            source: ConfigSource::Optimal(OptimizeOptions::default()),
            ..Self::two_group(n, PI)
        }
    }

    pub fn platonic(solid: PlatonicSolid) -> Self {
        MonteCarloConfig {
            source: ConfigSource::Platonic(solid),
            ..Self::two_group(solid.vertex_count(), PI)
        }
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.sigma_s, self.sigma_m)
    }

    /// The table of the original study this run corresponds to, if any.
    pub fn table(&self) -> Option<&'static str> {
        match self.source {
            ConfigSource::Optimal(_) => Some("Table II"),
            ConfigSource::Platonic(_) => None,
            ConfigSource::TwoGroup(opts) => {
                let deg = opts.polar_max.to_degrees().round() as i64;
                match deg {
                    45 => Some("Table III"),
                    90 => Some("Table IV"),
                    120 => Some("Table V"),
                    180 => Some("Table VI"),
                    _ => None,
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::validation("trials must be at least 1"));
        }
        if self.n < 4 {
            return Err(Error::validation("need at least 4 points"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::validation("radius must be positive"));
        }
        if let ConfigSource::Platonic(solid) = self.source {
            if solid.vertex_count() != self.n {
                return Err(Error::validation(format!(
                    "{solid} has {} vertices, not {}",
                    solid.vertex_count(),
                    self.n
                )));
            }
        }
        self.noise().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    General,
    Sum,
    CayleyMenger,
    IterativeFit,
    AlgebraicFit,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::General => "general",
            Estimator::Sum => "sum",
            Estimator::CayleyMenger => "cayley-menger",
            Estimator::IterativeFit => "iterative-fit",
            Estimator::AlgebraicFit => "algebraic-fit",
        }
    }

    fn for_n(n: usize) -> Vec<Estimator> {
        let mut v = vec![Estimator::General, Estimator::Sum];
        if n == 4 {
            v.push(Estimator::CayleyMenger);
        }
        v.extend([Estimator::IterativeFit, Estimator::AlgebraicFit]);
        v
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: Estimator,
    /// Mean absolute error over successful trials.
    pub mae: f64,
    /// Mean of the estimates.
    pub mean: f64,
    /// Sample standard deviation of the estimates.
    pub std: f64,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub table: Option<String>,
    pub config: MonteCarloConfig,
    pub methods: Vec<MethodSummary>,
    /// Trials where the configuration or the measurements could not be
    /// produced at all (counted as failures of every method).
    pub setup_failures: usize,
    /// `D_N / D_N0` of the layout used, when it is fixed across trials.
    pub configuration_ratio: Option<f64>,
}

impl ExperimentReport {
    pub fn method(&self, m: Estimator) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == m)
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        match &self.table {
            Some(t) => writeln!(f, "# {t}: mean absolute error of the radius estimate")?,
            None => writeln!(f, "# mean absolute error of the radius estimate")?,
        }
        let layout = match c.source {
            ConfigSource::TwoGroup(o) => format!(
                "two-group, polar [0, {}°]{}",
                (o.polar_max.to_degrees() * 1e6).round() / 1e6,
                if o.pole_split { ", pole split" } else { "" }
            ),
            ConfigSource::Optimal(_) => "optimal".to_string(),
            ConfigSource::Platonic(s) => s.to_string(),
        };
        writeln!(
            f,
            "# N={} layout={layout} R={} sigma_s={} sigma_m={} trials={} seed={}",
            c.n, c.radius, c.sigma_s, c.sigma_m, c.trials, c.seed
        )?;
        if let Some(r) = self.configuration_ratio {
            writeln!(f, "# D_N/D_N0 = {r:.6}")?;
        }
        writeln!(
            f,
            "{:<14} {:>12} {:>14} {:>12} {:>8}",
            "method", "mae", "mean", "std", "failed"
        )?;
        for m in &self.methods {
            writeln!(
                f,
                "{:<14} {:>12.6} {:>14.6} {:>12.6} {:>8}",
                m.method.name(),
                m.mae,
                m.mean,
                m.std,
                m.failures
            )?;
        }
        Ok(())
    }
}

struct Trial {
    reference: f64,
    estimates: Vec<Option<f64>>,
}

fn run_estimators(
    points: &PointSet,
    cfg: &MonteCarloConfig,
    noise: &NoiseModel,
    estimators: &[Estimator],
    seed: RandomSeed,
) -> Option<Trial> {
    let moved = perturb_radial(points, cfg.sigma_m, &seed.with_stream(seed.stream + 1)).ok()?;
    let d = noisy_distances(&moved, cfg.sigma_s, &seed.with_stream(seed.stream + 2)).ok()?;
    let h = d.half_squares().ok()?;
    let reference = match cfg.reference {
        ErrorReference::Nominal => cfg.radius,
        ErrorReference::Surface => moved.radii().iter().sum::<f64>() / moved.len() as f64,
    };

    let coords = coords_from_distances(&h).ok();
    let algebraic = coords.as_ref().and_then(|p| algebraic_sphere_fit(p).ok());
    let estimates = estimators
        .iter()
        .map(|e| match e {
            Estimator::General => radius_general(&h, noise).ok().map(|r| r.radius),
            Estimator::Sum => radius_sum_formula(&h).ok().map(|r| r.radius),
            Estimator::CayleyMenger => cayley_menger_circumradius(&d).ok(),
            Estimator::AlgebraicFit => algebraic.map(|f| f.radius),
            Estimator::IterativeFit => match (&coords, &algebraic) {
                (Some(p), Some(a)) => iterative_sphere_fit(p, a).ok().map(|f| f.radius),
                _ => None,
            },
        })
        .collect();
    Some(Trial {
        reference,
        estimates,
    })
}

/// Runs the experiment. Trials are independent (trial `t` draws from its
/// own streams) and are combined in trial order, so the report depends only
/// on the configuration and the seed.
pub fn run_montecarlo(cfg: &MonteCarloConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let noise = cfg.noise()?;
    let estimators = Estimator::for_n(cfg.n);
    let base = RandomSeed::new(cfg.seed);

    let (fixed, configuration_ratio) = match cfg.source {
        ConfigSource::TwoGroup(_) => (None, None),
        ConfigSource::Optimal(opts) => {
            let out = optimize_configuration(cfg.n, cfg.radius, &noise, &base, &opts)?;
            (Some(out.points), Some(out.ratio))
        }
        ConfigSource::Platonic(solid) => (Some(platonic_points(solid, cfg.radius)?), Some(1.0)),
    };

    let trials: Vec<Option<Trial>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = base.with_stream(1 + 3 * t);
            let points = match (&fixed, cfg.source) {
                (Some(p), _) => p.clone(),
                (None, ConfigSource::TwoGroup(opts)) => {
                    sample_two_group_with(cfg.n, cfg.radius, &opts, &seed).ok()?
                }
                (None, _) => unreachable!("fixed layouts are generated up front"),
            };
            run_estimators(&points, cfg, &noise, &estimators, seed)
        })
        .collect();

    let setup_failures = trials.iter().filter(|t| t.is_none()).count();
    let methods = estimators
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let mut errs = Vec::new();
            let mut values = Vec::new();
            for t in trials.iter().flatten() {
                if let Some(r) = t.estimates[k].filter(|r| r.is_finite()) {
                    errs.push((r - t.reference).abs());
                    values.push(r);
                }
            }
            summarize(method, &errs, &values, cfg.trials)
        })
        .collect();

    Ok(ExperimentReport {
        table: cfg.table().map(str::to_string),
        config: *cfg,
        methods,
        setup_failures,
        configuration_ratio,
    })
}

fn summarize(method: Estimator, errs: &[f64], values: &[f64], trials: usize) -> MethodSummary {
    let k = values.len();
    let mean_of = |v: &[f64]| {
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let mean = mean_of(values);
    let std = if k > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
    } else {
        0.0
    };
    MethodSummary {
        method,
        mae: mean_of(errs),
        mean,
        std,
        successes: k,
        failures: trials - k,
    }
}
