//! Free transport with absorbing obstacles in the Boltzmann–Grad scaling.
//!
//! With obstacles of diameter `eps^2` at spacing `eps`, a density transported
//! with speed 1 and removed on contact is
//!
//! ```text
//! f_eps(t, x, v) = f_in(x - t v, v) 1{tau_eps(x/eps, -v) >= t/eps}
//! ```
//!
//! Averaged logarithmically over `eps`, it approaches `2 f_in(x - t v, v) / (π² t)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use crate::distributions::{CesaroNormalization, CesaroSpec, Estimate};
use crate::error::{check_open, domain, Result};
use crate::mc::{run_batches, McConfig};
use crate::ray_tracer::{survives_inclusive, ObstacleConfig};

/// A bounded nonnegative function of position and direction whose support in
/// `x` lies in a known square.
pub trait PhaseFunction: Sync {
    fn value(&self, x: [f64; 2], v: [f64; 2]) -> f64;

    /// Center and half-width of a square containing the support in `x`.
    fn support(&self) -> ([f64; 2], f64);

    /// Upper bound of the function.
    fn sup(&self) -> f64;
}

/// `A cos²(π (x1 - c1) / 2L) cos²(π (x2 - c2) / 2L)` on `|x - c|_∞ <= L`, zero
/// outside, independent of the direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineBump {
    pub center: [f64; 2],
    pub half_width: f64,
    pub amplitude: f64,
}

impl CosineBump {
    pub fn new(center: [f64; 2], half_width: f64, amplitude: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(domain("half_width", half_width, "(0, inf)"));
        }
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(domain("amplitude", amplitude, "[0, inf)"));
        }
        Ok(Self {
            center,
            half_width,
            amplitude,
        })
    }

    /// Bound on the Euclidean norm of the gradient in `x`.
    pub fn gradient_bound(&self) -> f64 {
        self.amplitude * FRAC_PI_2 / self.half_width * 2f64.sqrt()
    }

    /// `∫ f dx`, equal to `A L²`.
    pub fn mass(&self) -> f64 {
        self.amplitude * self.half_width * self.half_width
    }
}

impl PhaseFunction for CosineBump {
    fn value(&self, x: [f64; 2], _v: [f64; 2]) -> f64 {
        let mut out = self.amplitude;
        for (xi, ci) in x.iter().zip(self.center) {
            let u = xi - ci;
            if u.abs() > self.half_width {
                return 0.0;
            }
            out *= (FRAC_PI_2 * u / self.half_width).cos().powi(2);
        }
        out
    }

    fn support(&self) -> ([f64; 2], f64) {
        (self.center, self.half_width)
    }

    fn sup(&self) -> f64 {
        self.amplitude
    }
}

/// `level` on the square `|x - c|_∞ <= L`, zero outside. Useful as a test
/// function that is constant wherever the transported data can reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub center: [f64; 2],
    pub half_width: f64,
    pub level: f64,
}

impl Plateau {
    pub fn new(center: [f64; 2], half_width: f64, level: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(domain("half_width", half_width, "(0, inf)"));
        }
        if !(level >= 0.0 && level.is_finite()) {
            return Err(domain("level", level, "[0, inf)"));
        }
        Ok(Self {
            center,
            half_width,
            level,
        })
    }
}

impl PhaseFunction for Plateau {
    fn value(&self, x: [f64; 2], _v: [f64; 2]) -> f64 {
        let inside = (0..2).all(|i| (x[i] - self.center[i]).abs() <= self.half_width);
        if inside {
            self.level
        } else {
            0.0
        }
    }

    fn support(&self) -> ([f64; 2], f64) {
        (self.center, self.half_width)
    }

    fn sup(&self) -> f64 {
        self.level
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain("t", t, "[0, inf)"))
    }
}

/// `f_in(x - t v, v)`, the solution without obstacles.
pub fn f_free(fin: &dyn PhaseFunction, t: f64, x: [f64; 2], v: [f64; 2]) -> f64 {
    fin.value([x[0] - t * v[0], x[1] - t * v[1]], v)
}

/// Solution of the transport problem with obstacles of diameter `eps` in the
/// rescaled lattice. Zero at points whose rescaled position lies in an obstacle.
pub fn f_eps(fin: &dyn PhaseFunction, eps: f64, t: f64, x: [f64; 2], v: [f64; 2]) -> Result<f64> {
    check_open("eps", eps, 0.0, 0.25, "(0, 1/4)")?;
    check_time(t)?;
    let value = f_free(fin, t, x, v);
    if value == 0.0 {
        return Ok(0.0);
    }
    let cfg = ObstacleConfig::new(eps)?;
    let y = [x[0] / eps, x[1] / eps];
    if !cfg.is_free(y) {
        return Ok(0.0);
    }
    let back = [-v[0], -v[1]];
    Ok(if survives_inclusive(&cfg, y, back, t / eps)? {
        value
    } else {
        0.0
    })
}

/// Small-obstacle limit `2 f_in(x - t v, v) / (π² t)`.
pub fn f_limit(fin: &dyn PhaseFunction, t: f64, x: [f64; 2], v: [f64; 2]) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("t", t, "(0, inf)"));
    }
    Ok(2.0 * f_free(fin, t, x, v) / (PI * PI * t))
}

/// Whether `f_eps` uses the traced survival indicator or replaces it by 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Survival {
    Traced,
    Forced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentComparison {
    /// Logarithmic average over `eps` of `∬ f_eps χ dx dv`, spec normalization.
    pub averaged: Estimate,
    /// Same average under the other normalization.
    pub averaged_alternate: Estimate,
    /// `∬ f χ dx dv` for the limit profile, on the same samples.
    pub limit: Estimate,
}

impl MomentComparison {
    pub fn abs_error(&self) -> f64 {
        (self.averaged.value - self.limit.value).abs()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    avg: f64,
    avg2: f64,
    alt: f64,
    alt2: f64,
    lim: f64,
    lim2: f64,
}

/// Compares the averaged moment of `f_eps` against `χ` with the limit moment.
///
/// Samples follow characteristics: `y` is uniform on the support square of
/// `f_in`, `v` uniform on the circle, and the moment integrand is evaluated at
/// `x = y + t v`. The map `(y, v) -> (x, v)` has unit Jacobian, and the same
/// seed gives the same `(y, v)` at every `t`. Each sample carries the whole
/// trapezoid combination over the `eps` grid, so the standard errors account
/// for the correlation between nodes.
pub fn moment_compare(
    fin: &dyn PhaseFunction,
    chi: &dyn PhaseFunction,
    t: f64,
    spec: &CesaroSpec,
    mc: &McConfig,
    survival: Survival,
) -> Result<MomentComparison> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("t", t, "(0, inf)"));
    }
    spec.validate()?;
    mc.validate()?;
    let nodes = spec.nodes();
    let norm = spec.normalizer(spec.normalization);
    let alt_norm = spec.normalizer(match spec.normalization {
        CesaroNormalization::Window => CesaroNormalization::LogEps,
        CesaroNormalization::LogEps => CesaroNormalization::Window,
    });
    let (center, half) = fin.support();
    let volume = (2.0 * half).powi(2) * TAU;
    // f_eps needs eps < 1/4; a node at exactly 1/4 uses the next double below.
    let top = 0.25f64.next_down();

    let parts = run_batches(mc, |rng, n| {
        let mut s = Sums::default();
        for _ in 0..n {
            let y = [
                center[0] + half * rng.random_range(-1.0..1.0),
                center[1] + half * rng.random_range(-1.0..1.0),
            ];
            let theta = rng.random_range(0.0..TAU);
            let v = [theta.cos(), theta.sin()];
            let x = [y[0] + t * v[0], y[1] + t * v[1]];
            let weight = chi.value(x, v);
            let free = f_free(fin, t, x, v);
            let (mut combined, limit) = (0.0, f_limit(fin, t, x, v)? * weight);
            if weight > 0.0 && free > 0.0 {
                for &(r, w) in &nodes {
                    let r = r.min(top);
                    let value = match survival {
                        Survival::Traced => f_eps(fin, r, t, x, v)?,
                        Survival::Forced => free,
                    };
                    combined += w * value;
                }
            }
            let avg = volume * weight * combined / norm;
            let alt = volume * weight * combined / alt_norm;
            let lim = volume * limit;
            s.avg += avg;
            s.avg2 += avg * avg;
            s.alt += alt;
            s.alt2 += alt * alt;
            s.lim += lim;
            s.lim2 += lim * lim;
        }
        Ok(s)
    })?;

    let mut total = Sums::default();
    for p in &parts {
        total.avg += p.avg;
        total.avg2 += p.avg2;
        total.alt += p.alt;
        total.alt2 += p.alt2;
        total.lim += p.lim;
        total.lim2 += p.lim2;
    }
    let n = mc.samples as f64;
    let estimate = |sum: f64, sum2: f64| {
        let mean = sum / n;
        let var = if n > 1.0 {
            ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            stderr: (var / n).sqrt(),
        }
    };
    Ok(MomentComparison {
        averaged: estimate(total.avg, total.avg2),
        averaged_alternate: estimate(total.alt, total.alt2),
        limit: estimate(total.lim, total.lim2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> CosineBump {
        CosineBump::new([0.0, 0.0], 1.0, 1.0).unwrap()
    }

    #[test]
    fn bump_shape() {
        let b = bump();
        assert_eq!(b.value([0.0, 0.0], [1.0, 0.0]), 1.0);
        assert_eq!(b.value([1.5, 0.0], [1.0, 0.0]), 0.0);
        assert!((b.value([0.5, 0.0], [1.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!(CosineBump::new([0.0, 0.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_time_keeps_initial_data() {
        let b = bump();
        let x = [0.31, -0.17];
        let v = [0.6, 0.8];
        // x / eps = (31, -17): a lattice point, inside an obstacle
        assert_eq!(f_eps(&b, 0.01, 0.0, x, v).unwrap(), 0.0);
        let x = [0.305, -0.175];
        assert_eq!(f_eps(&b, 0.01, 0.0, x, v).unwrap(), b.value(x, v));
    }

    #[test]
    fn outside_support_is_zero() {
        let b = bump();
        let v = [1.0, 0.0];
        assert_eq!(f_eps(&b, 0.05, 5.0, [0.0, 0.0], v).unwrap(), 0.0);
        assert_eq!(f_limit(&b, 5.0, [0.0, 0.0], v).unwrap(), 0.0);
    }

    #[test]
    fn limit_profile_value() {
        let flat = CosineBump::new([0.0, 0.0], 100.0, 1.0).unwrap();
        let v = [1.0, 0.0];
        let x = [10.0, 0.0];
        let expected = 2.0 * flat.value([0.0, 0.0], v) / (PI * PI * 10.0);
        assert!((f_limit(&flat, 10.0, x, v).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.020264).abs() < 1e-6);
        assert!(f_limit(&flat, 0.0, x, v).is_err());
    }

    #[test]
    fn trapping_only_removes_mass() {
        let b = CosineBump::new([0.0, 0.0], 2.0, 3.0).unwrap();
        let mut rng = crate::mc::batch_rng(11, 0);
        for _ in 0..500 {
            let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let th = rng.random_range(0.0..TAU);
            let v = [th.cos(), th.sin()];
            let t = rng.random_range(0.0..4.0);
            let f = f_eps(&b, 0.05, t, x, v).unwrap();
            assert!(f >= 0.0 && f <= b.sup());
            assert!(f <= f_free(&b, t, x, v));
        }
    }
}
