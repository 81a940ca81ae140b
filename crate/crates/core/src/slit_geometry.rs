//! Linear flow on the unit torus with a vertical slit, and its three-length
//! orbit structure.
//!
//! For a direction `v = (cos θ, sin θ)` with slope `alpha = tan θ` and a slit of
//! length `R = r / cos θ` centered at the lattice points, every orbit from slit
//! to slit crosses `lA`, `lB` or `lC = lA + lB` vertical lattice lines. The
//! lengths and the slit shares `sA, sB, sC` follow from the continued fraction
//! of `alpha` and the cell `(n, k)` containing `R`:
//!
//! ```text
//! lA = q_n             sA = R - d_n
//! lB = q_{n-1} + k q_n sB = R - (d_{n-1} - k d_n)
//! lC = lA + lB         sC = d_{n-1} - (k - 1) d_n - R
//! ```
//!
//! Lengths are measured in crossings, so time `t` corresponds to
//! `s = t cos θ` crossings.

use std::f64::consts::FRAC_PI_4;

use crate::cf_core::{expand, locate, ContinuedFraction, PartitionIndex, MAX_DEPTH};
use crate::error::{check_open, domain, Error, Result};

/// Distance kept from the endpoints `0` and `π/4` of the angular domain.
pub const THETA_MARGIN: f64 = 1e-9;

/// A direction in the open octant `0 < θ < π/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    cos: f64,
    sin: f64,
    alpha: f64,
}

impl Direction {
    /// Builds the direction of angle `theta`.
    ///
    /// Angles in `[0, π/4]` are accepted; values closer than [`THETA_MARGIN`] to
    /// either endpoint are moved to `THETA_MARGIN` (resp. `π/4 - THETA_MARGIN`).
    pub fn from_angle(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_4).contains(&theta) {
            return Err(domain("theta", theta, "[0, pi/4]"));
        }
        let theta = theta.clamp(THETA_MARGIN, FRAC_PI_4 - THETA_MARGIN);
        let (sin, cos) = theta.sin_cos();
        Ok(Self {
            theta,
            cos,
            sin,
            alpha: theta.tan(),
        })
    }

    /// Builds the direction of slope `alpha`. The slope is kept exactly unless
    /// the angle had to be clamped.
    pub fn from_slope(alpha: f64) -> Result<Self> {
        check_open("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
        let theta = alpha.atan();
        let mut dir = Self::from_angle(theta.min(FRAC_PI_4))?;
        if dir.theta == theta {
            dir.alpha = alpha;
        }
        Ok(dir)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cos(&self) -> f64 {
        self.cos
    }

    pub fn sin(&self) -> f64 {
        self.sin
    }

    /// Unit vector `(cos θ, sin θ)`.
    pub fn v(&self) -> [f64; 2] {
        [self.cos, self.sin]
    }

    /// Slit length `R = r / cos θ`.
    pub fn slit_length(&self, r: f64) -> f64 {
        r / self.cos
    }
}

/// Orbit lengths (in lattice crossings) and slit shares of the slitted torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitPartition {
    pub cell: PartitionIndex,
    pub big_r: f64,
    pub la: u64,
    pub lb: u64,
    pub lc: u64,
    pub sa: f64,
    pub sb: f64,
    pub sc: f64,
    /// `d_{n-1}` and `d_n` of the cell.
    pub d_prev: f64,
    pub d_n: f64,
}

impl SlitPartition {
    pub fn from_cf(big_r: f64, cf: &ContinuedFraction) -> Result<Self> {
        let cell = locate(big_r, cf)?;
        let PartitionIndex { n, k } = cell;
        let (q_prev, q_n) = (cf.q(n - 1), cf.q(n));
        let (d_prev, d_n) = (cf.d(n - 1), cf.d(n));
        let lb = q_prev + k * q_n;
        Ok(Self {
            cell,
            big_r,
            la: q_n,
            lb,
            lc: lb + q_n,
            sa: big_r - d_n,
            sb: big_r - (d_prev - k as f64 * d_n),
            sc: d_prev - (k - 1) as f64 * d_n - big_r,
            d_prev,
            d_n,
        })
    }

    /// `lA sA + lB sB + lC sC`, equal to 1 (the area of the torus).
    pub fn area(&self) -> f64 {
        self.la as f64 * self.sa + self.lb as f64 * self.sb + self.lc as f64 * self.sc
    }

    /// Survival probability of the slit flow after `s` lattice crossings.
    pub fn survival_at_crossings(&self, s: f64) -> f64 {
        let (la, lb, lc) = (self.la as f64, self.lb as f64, self.lc as f64);
        let value = if s < la {
            1.0 - s * self.big_r
        } else if s < lb {
            1.0 - self.big_r * la - self.d_n * (s - la)
        } else if s < lc {
            self.sc * (lc - s)
        } else {
            0.0
        };
        value.clamp(0.0, 1.0)
    }

    /// `(1 - R/d_{n-1} - t* d_n / R)_+`, the approximation of the survival
    /// probability at time `t*/r` that depends on `R` only through `d_{n-1}/R`
    /// and `d_n/R`.
    pub fn chi(&self, t_star: f64) -> Result<f64> {
        check_t_star(t_star)?;
        Ok((1.0 - self.big_r / self.d_prev - t_star * self.d_n / self.big_r).max(0.0))
    }

    /// `4/k` if `k >= t* - 2`, else 0: bound on the distance between the
    /// survival probability at time `t*/r` and [`SlitPartition::chi`].
    pub fn chi_error_bound(&self, t_star: f64) -> Result<f64> {
        check_t_star(t_star)?;
        let k = self.cell.k as f64;
        Ok(if k >= t_star - 2.0 { 4.0 / k } else { 0.0 })
    }

    /// Values of the two branches meeting at `lA` and at `lB`.
    pub fn knot_values(&self) -> [(f64, f64); 2] {
        let (la, lb, lc) = (self.la as f64, self.lb as f64, self.lc as f64);
        let second = |s: f64| 1.0 - self.big_r * la - self.d_n * (s - la);
        [
            (1.0 - la * self.big_r, second(la)),
            (second(lb), self.sc * (lc - lb)),
        ]
    }
}

/// Slit model for fixed `r` and direction, with the continued fraction of the
/// slope expanded once.
#[derive(Debug, Clone)]
pub struct SlitTorus {
    r: f64,
    dir: Direction,
    cf: ContinuedFraction,
    partition: SlitPartition,
}

impl SlitTorus {
    pub fn new(r: f64, dir: Direction) -> Result<Self> {
        check_open("r", r, 0.0, 0.5, "(0, 1/2)")?;
        let big_r = dir.slit_length(r);
        check_open("R", big_r, 0.0, 1.0, "(0, 1)")?;
        let cf = expand(dir.alpha(), MAX_DEPTH)?;
        let partition = SlitPartition::from_cf(big_r, &cf)?;
        Ok(Self {
            r,
            dir,
            cf,
            partition,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn direction(&self) -> &Direction {
        &self.dir
    }

    pub fn big_r(&self) -> f64 {
        self.partition.big_r
    }

    pub fn continued_fraction(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn partition(&self) -> &SlitPartition {
        &self.partition
    }

    /// Probability that the slit flow started uniformly on the torus survives
    /// to time `t`.
    pub fn psi(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain("t", t, "t >= 0"));
        }
        if t * self.dir.cos < self.partition.la as f64 {
            return Ok((1.0 - t * self.r).clamp(0.0, 1.0));
        }
        Ok(self.partition.survival_at_crossings(t * self.dir.cos))
    }

    /// First time `t > 0` at which `z + t v` meets the slit.
    pub fn lambda_exit(&self, z: [f64; 2]) -> Result<f64> {
        let half = 0.5 * self.big_r();
        let x = z[0].rem_euclid(1.0);
        let y = z[1].rem_euclid(1.0);
        if x == 0.0 && (y - y.round()).abs() <= half {
            return Err(Error::OnSlit(z[0], z[1]));
        }
        let alpha = self.dir.alpha;
        let bound = self.partition.lc + 2;
        for j in 1..=bound {
            let dx = j as f64 - x;
            let height = y + dx * alpha;
            if (height - height.round()).abs() <= half {
                return Ok(dx / self.dir.cos);
            }
        }
        Err(Error::Horizon { crossings: bound })
    }

    /// `(1 - R/d_{n-1} - t* d_n / R)_+` on the cell containing `R`.
    pub fn chi(&self, t_star: f64) -> Result<f64> {
        self.partition.chi(t_star)
    }

    /// `4/k` if `k >= t* - 2`, else 0.
    pub fn chi_error_bound(&self, t_star: f64) -> Result<f64> {
        self.partition.chi_error_bound(t_star)
    }
}

fn check_t_star(t_star: f64) -> Result<()> {
    if t_star > 2.0 && t_star.is_finite() {
        Ok(())
    } else {
        Err(domain("t_star", t_star, "(2, inf)"))
    }
}

pub fn partition(r: f64, dir: &Direction) -> Result<SlitPartition> {
    Ok(*SlitTorus::new(r, *dir)?.partition())
}

pub fn psi(r: f64, dir: &Direction, t: f64) -> Result<f64> {
    SlitTorus::new(r, *dir)?.psi(t)
}

pub fn lambda_exit(r: f64, dir: &Direction, z: [f64; 2]) -> Result<f64> {
    SlitTorus::new(r, *dir)?.lambda_exit(z)
}

pub fn chi(r: f64, dir: &Direction, t_star: f64) -> Result<f64> {
    SlitTorus::new(r, *dir)?.chi(t_star)
}

pub fn chi_error_bound(r: f64, dir: &Direction, t_star: f64) -> Result<f64> {
    SlitTorus::new(r, *dir)?.chi_error_bound(t_star)
}
