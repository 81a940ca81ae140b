//! Monte Carlo estimators of free path survival probabilities and their
//! logarithmic average over the obstacle size.
//!
//! Starting points are drawn uniformly on the obstacle-free part `Y_r` of the
//! unit cell by rejection, directions from an [`AngularWeight`]. For a fixed
//! direction the disk survival `P(tau >= t)` is compared with the slit survival
//! `P(lambda >= t)` of the same direction.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mc::{derive_seed, run_batches, McConfig, Tally};
use crate::ray_tracer::{tau, Exit, ObstacleConfig};
use crate::slit_geometry::{Direction, SlitTorus};

/// Distribution of the direction angle.
#[derive(Debug, Clone, PartialEq)]
pub enum AngularWeight {
    /// Uniform on `[0, 2π)`.
    UniformCircle,
    /// Uniform on `(0, π/4)`.
    UniformOctant,
    /// Piecewise-constant density on `(0, π/4)` with respect to `dθ`.
    Table { edges: Vec<f64>, density: Vec<f64> },
}

impl AngularWeight {
    /// Validates a piecewise-constant density: `edges` run from 0 to `π/4`,
    /// `density[i]` applies on `[edges[i], edges[i+1])`, all values are
    /// nonnegative and the total mass is 1 within `1e-9`.
    pub fn table(edges: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || density.len() + 1 != edges.len() {
            return Err(Error::Config(
                "angular table needs n + 1 edges for n density values".into(),
            ));
        }
        if edges[0] != 0.0 || (edges[edges.len() - 1] - FRAC_PI_4).abs() > 1e-12 {
            return Err(Error::Config("angular table must span [0, pi/4]".into()));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("angular table edges must increase".into()));
        }
        if density.iter().any(|&d| !(d >= 0.0 && d.is_finite())) {
            return Err(Error::Config(
                "angular density must be finite and nonnegative".into(),
            ));
        }
        let mass: f64 = edges
            .windows(2)
            .zip(&density)
            .map(|(w, d)| (w[1] - w[0]) * d)
            .sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "angular density has mass {mass}, expected 1"
            )));
        }
        Ok(AngularWeight::Table { edges, density })
    }

    /// Density with respect to `dθ`.
    pub fn density(&self, theta: f64) -> f64 {
        match self {
            AngularWeight::UniformCircle => {
                if (0.0..TAU).contains(&theta) {
                    1.0 / TAU
                } else {
                    0.0
                }
            }
            AngularWeight::UniformOctant => {
                if theta > 0.0 && theta < FRAC_PI_4 {
                    1.0 / FRAC_PI_4
                } else {
                    0.0
                }
            }
            AngularWeight::Table { edges, density } => {
                if !(theta >= 0.0 && theta < edges[edges.len() - 1]) {
                    return 0.0;
                }
                let i = edges.partition_point(|&e| e <= theta) - 1;
                density[i]
            }
        }
    }

    /// Supremum of the density with respect to `dθ`.
    pub fn sup_density(&self) -> f64 {
        match self {
            AngularWeight::UniformCircle => 1.0 / TAU,
            AngularWeight::UniformOctant => 1.0 / FRAC_PI_4,
            AngularWeight::Table { density, .. } => density.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Supremum of the weight relative to the uniform angle measure
    /// `dθ / 2π` (1 for the uniform circle, 8 for the octant).
    pub fn sup_relative(&self) -> f64 {
        TAU * self.sup_density()
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            AngularWeight::UniformCircle => rng.random_range(0.0..TAU),
            AngularWeight::UniformOctant => loop {
                let theta = rng.random_range(0.0..FRAC_PI_4);
                if theta > 0.0 {
                    return theta;
                }
            },
            AngularWeight::Table { edges, density } => {
                let masses: Vec<f64> = edges
                    .windows(2)
                    .zip(density)
                    .map(|(w, d)| (w[1] - w[0]) * d)
                    .collect();
                let total: f64 = masses.iter().sum();
                let mut u = rng.random_range(0.0..total);
                for (i, &m) in masses.iter().enumerate() {
                    if u < m || i == masses.len() - 1 {
                        let frac = (u / m).clamp(0.0, 1.0);
                        return edges[i] + frac * (edges[i + 1] - edges[i]);
                    }
                    u -= m;
                }
                unreachable!("masses are nonempty")
            }
        }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl From<Tally> for Estimate {
    fn from(t: Tally) -> Self {
        Self {
            value: t.estimate(),
            stderr: t.stderr(),
        }
    }
}

/// Uniform point of the obstacle-free part of the unit cell, together with the
/// number of draws it took.
pub fn sample_free_point(rng: &mut ChaCha8Rng, cfg: &ObstacleConfig) -> ([f64; 2], u32) {
    let mut attempts = 0;
    loop {
        attempts += 1;
        let x = [rng.random::<f64>(), rng.random::<f64>()];
        if cfg.is_free(x) {
            return (x, attempts);
        }
    }
}

/// Accepted draws over total draws of the rejection sampler, to compare with
/// `1 - π r² / 4`.
pub fn acceptance_tally(cfg: &ObstacleConfig, mc: &McConfig) -> Result<Tally> {
    let parts = run_batches(mc, |rng, n| {
        let mut draws = 0u64;
        for _ in 0..n {
            draws += sample_free_point(rng, cfg).1 as u64;
        }
        Ok(Tally {
            successes: n,
            trials: draws,
        })
    })?;
    Ok(parts.into_iter().sum())
}

fn check_time(t: f64, mc: &McConfig) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(crate::error::domain("t", t, "[0, inf)"));
    }
    mc.check_horizon(t)
}

/// Probability under `m dμ_r` that the free path exceeds `t` (strictly).
pub fn phi_m(cfg: &ObstacleConfig, t: f64, m: &AngularWeight, mc: &McConfig) -> Result<Estimate> {
    check_time(t, mc)?;
    mc.validate()?;
    if t == 0.0 {
        return Ok(Estimate {
            value: 1.0,
            stderr: 0.0,
        });
    }
    let parts = run_batches(mc, |rng, n| {
        let mut tally = Tally::default();
        for _ in 0..n {
            let (x, _) = sample_free_point(rng, cfg);
            let theta = m.sample(rng);
            let v = [theta.cos(), theta.sin()];
            tally.trials += 1;
            if tau(cfg, x, v, t)? == Exit::Survived {
                tally.successes += 1;
            }
        }
        Ok(tally)
    })?;
    Ok(parts.into_iter().sum::<Tally>().into())
}

/// Probability over uniform starting points that the free path in direction
/// `dir` is at least `t`, evaluated on a grid of times with common samples.
pub fn phi_dir_curve(
    cfg: &ObstacleConfig,
    times: &[f64],
    dir: &Direction,
    mc: &McConfig,
) -> Result<Vec<Estimate>> {
    for &t in times {
        check_time(t, mc)?;
    }
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let v = dir.v();
    let parts = run_batches(mc, |rng, n| {
        let mut counts = vec![0u64; times.len()];
        for _ in 0..n {
            let (x, _) = sample_free_point(rng, cfg);
            let exit = if horizon > 0.0 {
                tau(cfg, x, v, horizon)?
            } else {
                Exit::Survived
            };
            for (c, &t) in counts.iter_mut().zip(times) {
                let alive = match exit {
                    Exit::Hit(h) => h >= t,
                    Exit::Survived => true,
                };
                *c += alive as u64;
            }
        }
        Ok(counts)
    })?;
    Ok(reduce_counts(&parts, times.len(), mc.samples))
}

pub fn phi_dir(cfg: &ObstacleConfig, t: f64, dir: &Direction, mc: &McConfig) -> Result<Estimate> {
    Ok(phi_dir_curve(cfg, &[t], dir, mc)?[0])
}

/// Probability over uniform starting points on the torus that the slit flow
/// reaches the slit no earlier than `t`, on a grid of times.
pub fn slit_survival_curve(
    torus: &SlitTorus,
    times: &[f64],
    mc: &McConfig,
) -> Result<Vec<Estimate>> {
    let parts = run_batches(mc, |rng, n| {
        let mut counts = vec![0u64; times.len()];
        let mut done = 0;
        while done < n {
            let z = [rng.random::<f64>(), rng.random::<f64>()];
            let lambda = match torus.lambda_exit(z) {
                Ok(l) => l,
                Err(Error::OnSlit(..)) => continue,
                Err(e) => return Err(e),
            };
            for (c, &t) in counts.iter_mut().zip(times) {
                *c += (lambda >= t) as u64;
            }
            done += 1;
        }
        Ok(counts)
    })?;
    Ok(reduce_counts(&parts, times.len(), mc.samples))
}

fn reduce_counts(parts: &[Vec<u64>], len: usize, samples: u64) -> Vec<Estimate> {
    (0..len)
        .map(|i| {
            Tally {
                successes: parts.iter().map(|p| p[i]).sum(),
                trials: samples,
            }
            .into()
        })
        .collect()
}

/// How the logarithmic integral over `r` is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CesaroNormalization {
    /// Divide by the length `ln(eps_star / eps)` of the integration window, so
    /// that a constant integrand averages to itself.
    Window,
    /// Divide by `|ln eps|`. Converges to the same limit as `eps -> 0`, with a
    /// relative bias `ln(1/eps_star) / |ln eps|` at finite `eps`.
    LogEps,
}

/// Logarithmic grid of obstacle sizes `eps = r_0 < ... < r_{N-1} = eps_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesaroSpec {
    pub eps: f64,
    pub eps_star: f64,
    pub grid_points: usize,
    pub normalization: CesaroNormalization,
}

impl CesaroSpec {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            eps_star: 0.25,
            grid_points: 30,
            normalization: CesaroNormalization::Window,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < self.eps_star && self.eps_star <= 0.25) {
            return Err(Error::Config(format!(
                "need 0 < eps < eps_star <= 1/4, got eps = {}, eps_star = {}",
                self.eps, self.eps_star
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        Ok(())
    }

    /// Nodes `r_i` and trapezoid weights in `ln r`.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let (a, b) = (self.eps.ln(), self.eps_star.ln());
        let n = self.grid_points;
        let h = (b - a) / (n - 1) as f64;
        (0..n)
            .map(|i| {
                let r = if i == n - 1 {
                    self.eps_star
                } else {
                    (a + i as f64 * h).exp()
                };
                let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
                (r, w)
            })
            .collect()
    }

    pub fn normalizer(&self, normalization: CesaroNormalization) -> f64 {
        match normalization {
            CesaroNormalization::Window => (self.eps_star / self.eps).ln(),
            CesaroNormalization::LogEps => self.eps.ln().abs(),
        }
    }

    /// Applies the trapezoid rule to per-node values, returning the average
    /// under both normalizations (selected one first).
    pub fn average(&self, values: &[Estimate]) -> (Estimate, Estimate) {
        let nodes = self.nodes();
        let sum: f64 = nodes
            .iter()
            .zip(values)
            .map(|((_, w), e)| w * e.value)
            .sum();
        let var: f64 = nodes
            .iter()
            .zip(values)
            .map(|((_, w), e)| (w * e.stderr).powi(2))
            .sum();
        let scaled = |norm: f64| Estimate {
            value: sum / norm,
            stderr: var.sqrt() / norm,
        };
        let other = match self.normalization {
            CesaroNormalization::Window => CesaroNormalization::LogEps,
            CesaroNormalization::LogEps => CesaroNormalization::Window,
        };
        (
            scaled(self.normalizer(self.normalization)),
            scaled(self.normalizer(other)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesaroNode {
    pub r: f64,
    pub weight: f64,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CesaroEstimate {
    /// Average under the selected normalization.
    pub value: Estimate,
    /// Average under the other normalization.
    pub alternate: Estimate,
    pub nodes: Vec<CesaroNode>,
}

/// Logarithmic average over `r` of `Φ^m_r(t*/r)`.
///
/// Node `i` is estimated with seed `derive_seed(mc.seed, i)`.
pub fn cesaro_phi(
    t_star: f64,
    m: &AngularWeight,
    spec: &CesaroSpec,
    mc: &McConfig,
) -> Result<CesaroEstimate> {
    if !(t_star > SQRT_2 && t_star.is_finite()) {
        return Err(crate::error::domain("t_star", t_star, "(sqrt 2, inf)"));
    }
    spec.validate()?;
    let mut nodes = Vec::with_capacity(spec.grid_points);
    for (i, (r, weight)) in spec.nodes().into_iter().enumerate() {
        let cfg = ObstacleConfig::new(r)?;
        let node_mc = mc.with_seed(derive_seed(mc.seed, i as u64));
        let estimate = phi_m(&cfg, t_star / r, m, &node_mc)?;
        nodes.push(CesaroNode {
            r,
            weight,
            estimate,
        });
    }
    let values: Vec<Estimate> = nodes.iter().map(|n| n.estimate).collect();
    let (value, alternate) = spec.average(&values);
    Ok(CesaroEstimate {
        value,
        alternate,
        nodes,
    })
}

/// `r t Φ^m_r(t)`, which stays between two positive constants for `t > 1/r`.
pub fn bound_band(
    cfg: &ObstacleConfig,
    t: f64,
    m: &AngularWeight,
    mc: &McConfig,
) -> Result<Estimate> {
    if !(t > 1.0 / cfg.r()) {
        return Err(crate::error::domain("t", t, "t > 1/r"));
    }
    let est = phi_m(cfg, t, m, mc)?;
    let scale = cfg.r() * t;
    Ok(Estimate {
        value: scale * est.value,
        stderr: scale * est.stderr,
    })
}

/// Area of the obstacle-free part of the unit cell.
pub fn free_area(r: f64) -> f64 {
    1.0 - PI * r * r / 4.0
}
