//! Command-line flags. Every numeric flag is checked against the precondition
//! of the library routine it feeds, so out-of-range values are usage errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lorentz_core::mc::default_workers;
use lorentz_core::ray_tracer::ObstacleConfig;
use lorentz_core::slit_geometry::Direction;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "lorentz",
    version,
    about = "Free path length experiments for the periodic Lorentz gas"
)]
pub struct Cli {
    /// Directory for CSV and manifest files.
    #[arg(long, global = true, env = "LORENTZ_OUT_DIR", default_value = "out")]
    pub out: PathBuf,

    /// Worker threads for Monte Carlo runs. Results do not depend on it.
    #[arg(long, global = true, default_value_t = default_workers(), value_parser = at_least_one)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Continued fraction table with identity residuals.
    Cf(CfArgs),
    /// Three-length partition of the slitted torus.
    Partition(PartitionArgs),
    /// Exact slit survival curve.
    PsiCurve(PsiCurveArgs),
    /// Free path length of one ray among the disks.
    Tau(TauArgs),
    /// Monte Carlo disk survival curve.
    PhiCurve(PhiCurveArgs),
    /// Logarithmic average of the survival probability over obstacle sizes.
    Cesaro(CesaroArgs),
    /// Limit function of the logarithmic average.
    LambdaCurve(LambdaCurveArgs),
    /// Growth of the continued fraction index N(alpha, eps).
    Nstat(NstatArgs),
    /// Averaged transport moments against their small-obstacle limit.
    Kinetic(KineticArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cf(_) => "cf",
            Command::Partition(_) => "partition",
            Command::PsiCurve(_) => "psi-curve",
            Command::Tau(_) => "tau",
            Command::PhiCurve(_) => "phi-curve",
            Command::Cesaro(_) => "cesaro",
            Command::LambdaCurve(_) => "lambda-curve",
            Command::Nstat(_) => "nstat",
            Command::Kinetic(_) => "kinetic",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::PhiCurve(a) => Some(a.seed),
            Command::Cesaro(a) => Some(a.seed),
            Command::Nstat(a) => a.alpha.is_none().then_some(a.seed),
            Command::Kinetic(a) => Some(a.seed),
            Command::PsiCurve(a) => a.samples.map(|_| a.seed),
            _ => None,
        }
    }
}

/// A direction in the first octant, given by slope or by angle.
#[derive(Debug, Clone, Copy, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct DirectionArgs {
    /// Slope tan(theta), in (0, 1).
    #[arg(long, value_parser = slope)]
    pub alpha: Option<f64>,
    /// Angle in radians, in [0, pi/4]; clamped 1e-9 away from the endpoints.
    #[arg(long, value_parser = octant_angle)]
    pub theta: Option<f64>,
}

impl DirectionArgs {
    pub fn direction(&self) -> lorentz_core::Result<Direction> {
        match (self.alpha, self.theta) {
            (Some(a), _) => Direction::from_slope(a),
            (None, Some(t)) => Direction::from_angle(t),
            (None, None) => unreachable!("clap requires one of --alpha, --theta"),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CfArgs {
    /// Number in (0, 1) to expand.
    #[arg(long, value_parser = slope)]
    pub alpha: f64,
    /// Maximum number of partial quotients.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..=128))]
    pub depth: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct PartitionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub dir: DirectionArgs,
    /// Obstacle diameter, in (0, 1/2).
    #[arg(long, value_parser = diameter)]
    pub r: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PsiCurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub dir: DirectionArgs,
    /// Obstacle diameter, in (0, 1/2).
    #[arg(long, value_parser = diameter)]
    pub r: f64,
    /// Last time of the grid; defaults to the longest orbit length.
    #[arg(long, value_parser = positive)]
    pub tmax: Option<f64>,
    /// Number of grid times, starting at 0.
    #[arg(long, default_value_t = 200, value_parser = at_least_two)]
    pub points: usize,
    /// Also estimate the slit survival by sampling this many starts.
    #[arg(long, value_parser = samples)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct TauArgs {
    /// Obstacle diameter, in (0, 1/2).
    #[arg(long, value_parser = diameter)]
    pub r: f64,
    /// Starting point, "x,y", outside every disk.
    #[arg(long, value_parser = point)]
    pub x: [f64; 2],
    /// Direction angle in radians (any real).
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    pub angle: f64,
    /// Trace horizon.
    #[arg(long, default_value_t = 1e4, value_parser = positive)]
    pub tmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    /// Uniform angle on [0, 2 pi).
    Circle,
    /// Uniform angle on (0, pi/4).
    Octant,
}

impl Weight {
    pub fn angular(self) -> lorentz_core::distributions::AngularWeight {
        use lorentz_core::distributions::AngularWeight;
        match self {
            Weight::Circle => AngularWeight::UniformCircle,
            Weight::Octant => AngularWeight::UniformOctant,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PhiCurveArgs {
    /// Obstacle diameter, in (0, 1/2).
    #[arg(long, value_parser = diameter)]
    pub r: f64,
    /// Fix the direction by slope instead of sampling it.
    #[arg(long, value_parser = slope, conflicts_with_all = ["theta", "weight"])]
    pub alpha: Option<f64>,
    /// Fix the direction by angle in [0, pi/4] instead of sampling it.
    #[arg(long, value_parser = octant_angle, conflicts_with = "weight")]
    pub theta: Option<f64>,
    /// Angular distribution of sampled directions.
    #[arg(long, value_enum, default_value_t = Weight::Circle)]
    pub weight: Weight,
    #[arg(long, value_parser = positive)]
    pub tmax: f64,
    #[arg(long, default_value_t = 50, value_parser = at_least_two)]
    pub points: usize,
    #[arg(long, default_value_t = 100_000, value_parser = samples)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CesaroArgs {
    /// Rescaled time t*, greater than sqrt 2.
    #[arg(long, value_parser = rescaled_time)]
    pub tstar: f64,
    /// Smallest obstacle size, in (0, 1/4).
    #[arg(long, value_parser = small_eps)]
    pub eps: f64,
    /// Number of obstacle sizes on the logarithmic grid.
    #[arg(long, default_value_t = 30, value_parser = at_least_two)]
    pub grid_points: usize,
    #[arg(long, value_enum, default_value_t = Weight::Octant)]
    pub weight: Weight,
    /// Divide by |ln eps| instead of the window length ln(1/(4 eps)).
    #[arg(long)]
    pub log_eps_normalization: bool,
    /// Samples per obstacle size.
    #[arg(long, default_value_t = 100_000, value_parser = samples)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct LambdaCurveArgs {
    #[arg(long, value_parser = above_one)]
    pub tmin: f64,
    #[arg(long, value_parser = above_one)]
    pub tmax: f64,
    #[arg(long, default_value_t = 16, value_parser = at_least_two)]
    pub points: usize,
    /// Supremum of the angular density relative to dtheta/(2 pi), for the bound column.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub m_sup: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct NstatArgs {
    /// Single slope to evaluate; otherwise slopes are drawn uniformly.
    #[arg(long, value_parser = slope)]
    pub alpha: Option<f64>,
    /// Scale eps in (0, 1).
    #[arg(long, default_value_t = 1e-10, value_parser = unit_open)]
    pub eps: f64,
    /// Number of random slopes.
    #[arg(long, default_value_t = 1000, value_parser = samples)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivalMode {
    /// Trace each ray among the obstacles.
    Traced,
    /// Treat every ray as surviving (pure transport).
    Forced,
}

#[derive(Debug, Args, Serialize)]
pub struct KineticArgs {
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive)]
    pub t: Vec<f64>,
    /// Smallest obstacle size, in (0, 1/4).
    #[arg(long, default_value_t = 1e-2, value_parser = small_eps)]
    pub eps: f64,
    #[arg(long, default_value_t = 30, value_parser = at_least_two)]
    pub grid_points: usize,
    /// Center "x,y" of the initial cosine bump.
    #[arg(long, default_value = "0,0", value_parser = point)]
    pub fin_center: [f64; 2],
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    pub fin_half_width: f64,
    #[arg(long, default_value_t = 1.0, value_parser = nonnegative)]
    pub fin_amplitude: f64,
    /// Center "x,y" of the test bump.
    #[arg(long, default_value = "0,0", value_parser = point)]
    pub chi_center: [f64; 2],
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    pub chi_half_width: f64,
    #[arg(long, default_value_t = 1.0, value_parser = nonnegative)]
    pub chi_amplitude: f64,
    #[arg(long, value_enum, default_value_t = SurvivalMode::Traced)]
    pub survival: SurvivalMode,
    #[arg(long, default_value_t = 100_000, value_parser = samples)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn number(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("{e}"))
}

fn finite(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err("must be finite".into())
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be positive and finite".into())
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be nonnegative and finite".into())
    }
}

fn above_one(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x > 1.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be greater than 1".into())
    }
}

fn unit_open(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err("must lie in (0, 1)".into())
    }
}

fn small_eps(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x > 0.0 && x < 0.25 {
        Ok(x)
    } else {
        Err("must lie in (0, 1/4)".into())
    }
}

fn rescaled_time(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x > std::f64::consts::SQRT_2 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be greater than sqrt 2".into())
    }
}

fn slope(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    Direction::from_slope(x).map_err(|e| e.to_string())?;
    Ok(x)
}

fn octant_angle(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    Direction::from_angle(x).map_err(|e| e.to_string())?;
    Ok(x)
}

fn diameter(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    ObstacleConfig::new(x).map_err(|e| e.to_string())?;
    Ok(x)
}

fn point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated numbers \"x,y\"".into());
    }
    Ok([finite(parts[0])?, finite(parts[1])?])
}

fn samples(s: &str) -> Result<u64, String> {
    match s.trim().parse::<u64>() {
        Ok(n) if n >= 1 => Ok(n),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn at_least_one(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn at_least_two(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        Ok(_) => Err("must be at least 2".into()),
        Err(e) => Err(e.to_string()),
    }
}
