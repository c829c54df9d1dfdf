use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use spherad::experiment::{run_montecarlo, ConfigSource, ErrorReference, MonteCarloConfig};
use spherad::io::{read_distance_matrix, write_points};
use spherad::{
    estimate, optimize_configuration, radius_from_arcs, BasePlane, DistanceKind, Error, Method,
    NoiseModel, OptimizeOptions, PlatonicSolid, RadiusEstimate, RandomSeed, TwoGroupOptions,
};

#[derive(Parser)]
#[command(
    name = "spherad",
    version,
    about = "Sphere radius from pairwise distances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Four,
    Sum,
    General,
    Arcs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Nominal,
    Surface,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the radius from a CSV distance (or arc) matrix.
    Estimate {
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        sigma_s: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma_m: f64,
        /// Prior radius for the rank rule (defaults to the sum-formula value).
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long, default_value_t = spherad::estimators::DEFAULT_K_P)]
        k_p: f64,
        #[arg(long, value_enum, default_value = "general")]
        method: MethodArg,
        /// The matrix holds great-circle arcs (implies --method arcs).
        #[arg(long)]
        arcs: bool,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo comparison of all estimators on random layouts.
    Montecarlo {
        #[arg(long, default_value_t = 10)]
        n_points: usize,
        /// Upper polar angle of the sampled cap, degrees.
        #[arg(long, default_value_t = 90.0)]
        polar_max: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma_s: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_m: f64,
        #[arg(long, default_value_t = 1000.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use one optimised layout instead of random ones.
        #[arg(long)]
        optimal: bool,
        /// Move the first base vertex to the mirrored polar angle.
        #[arg(long)]
        pole_split: bool,
        /// Height of the base-triangle plane (default: the cap boundary).
        #[arg(long, allow_hyphen_values = true)]
        base_height: Option<f64>,
        /// Score against the nominal radius or the mean perturbed radius.
        #[arg(long, value_enum)]
        reference: Option<ReferenceArg>,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo on the vertices of a regular solid.
    Platonic {
        #[arg(long)]
        kind: PlatonicSolid,
        #[arg(long, default_value_t = 1000.0)]
        radius: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_s: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_m: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Search for a layout minimising the variance of the estimate.
    OptimalSearch {
        #[arg(long)]
        n_points: usize,
        #[arg(long, default_value_t = 1000.0)]
        radius: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_s: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_m: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        /// Where to write the points as x,y,z rows.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Parse { .. } | Error::Io(_) | Error::Domain(_) => 2,
        Error::Degenerate(_)
        | Error::IllConditioned { .. }
        | Error::NonSpherical(_)
        | Error::InsufficientSignal { .. }
        | Error::NoRoot(_) => 3,
        Error::NotConverged { .. } => 4,
    }
}

fn print_estimate(est: &RadiusEstimate, as_json: bool) {
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(est).expect("serializable")
        );
        return;
    }
    println!("method          {}", est.method.name());
    println!("radius          {}", est.radius);
    match est.sigma_r {
        Some(s) => println!("sigma_r         {s}"),
        None => println!("sigma_r         -"),
    }
    if est.variance_clamped() {
        println!("warning         variance of 1/R^2 came out negative; sigma_r clamped to 0");
    }
    match est.effective_rank {
        Some(r) => println!("effective_rank  {r}"),
        None => println!("effective_rank  -"),
    }
    let eig: Vec<String> = est.eigenvalues.iter().map(|v| format!("{v:.6e}")).collect();
    println!("eigenvalues     {}", eig.join(" "));
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Estimate {
            matrix,
            sigma_s,
            sigma_m,
            r0,
            k_p,
            method,
            arcs,
            json,
        } => {
            let mut noise = NoiseModel::new(sigma_s, sigma_m)?.with_k_p(k_p);
            if let Some(r0) = r0 {
                noise = noise.with_r0(r0);
            }
            noise.validate()?;
            let est = if arcs || matches!(method, MethodArg::Arcs) {
                let d = read_distance_matrix(&matrix, DistanceKind::Arc)?;
                radius_from_arcs(&d, &noise)?
            } else {
                let h = read_distance_matrix(&matrix, DistanceKind::Chord)?.half_squares()?;
                let method = match method {
                    MethodArg::Four => Method::FourInverse,
                    MethodArg::Sum => Method::SumFormula,
                    _ => Method::General,
                };
                estimate(&h, method, &noise)?
            };
            print_estimate(&est, json);
        }
        Command::Montecarlo {
            n_points,
            polar_max,
            trials,
            sigma_s,
            sigma_m,
            radius,
            seed,
            optimal,
            pole_split,
            base_height,
            reference,
            json,
        } => {
            let base_plane = match base_height {
                Some(z) => BasePlane::Height(z),
                None => BasePlane::CapBoundary,
            };
            let source = if optimal {
                ConfigSource::Optimal(OptimizeOptions::default())
            } else {
                ConfigSource::TwoGroup(TwoGroupOptions {
                    polar_max: polar_max.to_radians(),
                    base_plane,
                    pole_split,
                })
            };
            // Optimal layouts are scored against the perturbed surface, random
            // layouts against the nominal sphere, unless asked otherwise.
            let reference = match reference {
                Some(ReferenceArg::Nominal) => ErrorReference::Nominal,
                Some(ReferenceArg::Surface) => ErrorReference::Surface,
                None if optimal => ErrorReference::Surface,
                None => ErrorReference::Nominal,
            };
            let cfg = MonteCarloConfig {
                n: n_points,
                source,
                trials,
                sigma_s,
                sigma_m,
                radius,
                seed,
                reference,
            };
            report(&run_montecarlo(&cfg)?, json);
        }
        Command::Platonic {
            kind,
            radius,
            sigma_s,
            sigma_m,
            trials,
            seed,
            json,
        } => {
            let cfg = MonteCarloConfig {
                trials,
                sigma_s,
                sigma_m,
                radius,
                seed,
                ..MonteCarloConfig::platonic(kind)
            };
            report(&run_montecarlo(&cfg)?, json);
        }
        Command::OptimalSearch {
            n_points,
            radius,
            sigma_s,
            sigma_m,
            seed,
            restarts,
            iterations,
            out,
            json,
        } => {
            let noise = NoiseModel::new(sigma_s, sigma_m)?;
            let opts = OptimizeOptions {
                restarts,
                iterations,
                ..Default::default()
            };
            let res =
                optimize_configuration(n_points, radius, &noise, &RandomSeed::new(seed), &opts)?;
            if let Some(path) = &out {
                write_points(path, &res.points)?;
            }
            if json {
                let points: Vec<[f64; 3]> = res.points.iter().map(|p| [p.x, p.y, p.z]).collect();
                let v = json!({
                    "n": n_points,
                    "radius": radius,
                    "d_n": res.d_n,
                    "bound": res.bound,
                    "ratio": res.ratio,
                    "optimality_residual": res.optimality_residual,
                    "converged": res.converged,
                    "restarts": res.restarts,
                    "iterations": res.iterations,
                    "points": points,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).expect("serializable")
                );
            } else {
                println!("n               {n_points}");
                println!("d_n             {:e}", res.d_n);
                println!("d_n0            {:e}", res.bound);
                println!("ratio           {:.9}", res.ratio);
                println!("residual        {:.3e}", res.optimality_residual);
                println!("converged       {}", res.converged);
                if out.is_none() {
                    print!("{}", spherad::io::format_points(&res.points));
                }
            }
            if !res.converged {
                return Err(Error::NotConverged {
                    iterations: res.iterations,
                });
            }
        }
    }
    Ok(())
}

fn report(rep: &spherad::experiment::ExperimentReport, as_json: bool) {
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(rep).expect("serializable")
        );
    } else {
        print!("{rep}");
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
