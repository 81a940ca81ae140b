//! Exact free path length among disks of diameter `r` centered at `Z^2`.
//!
//! The ray is walked cell by cell through the unit grid. A disk of radius
//! `r/2 < 1/4` only meets the four cells around its center, so testing the
//! four corner disks of every visited cell finds every obstacle the ray can
//! touch, and the first hit found in a cell that is no later than the cell's
//! exit time is the global first hit.

use crate::error::{check_open, domain, Error, Result};
use crate::slit_geometry::{Direction, SlitTorus};

/// Smallest accepted intersection parameter; guards against re-hitting the
/// boundary point a ray starts from.
pub const MIN_HIT: f64 = 1e-12;

/// Tolerance on `|v| = 1`.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleConfig {
    r: f64,
}

impl ObstacleConfig {
    pub fn new(r: f64) -> Result<Self> {
        check_open("r", r, 0.0, 0.5, "(0, 1/2)")?;
        Ok(Self { r })
    }

    /// Disk diameter.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.r
    }

    /// True when `x` lies strictly outside every disk.
    pub fn is_free(&self, x: [f64; 2]) -> bool {
        let dx = x[0] - x[0].round();
        let dy = x[1] - x[1].round();
        dx * dx + dy * dy > self.radius() * self.radius()
    }
}

/// A validated starting point and direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    pub x: [f64; 2],
    pub v: [f64; 2],
    pub traveled: f64,
}

impl RayState {
    pub fn new(cfg: &ObstacleConfig, x: [f64; 2], v: [f64; 2]) -> Result<Self> {
        if !x[0].is_finite() || !x[1].is_finite() {
            return Err(Error::InsideObstacle(x[0], x[1]));
        }
        let norm = v[0].hypot(v[1]);
        if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
            return Err(domain("|v|", norm, "1"));
        }
        if !cfg.is_free(x) {
            return Err(Error::InsideObstacle(x[0], x[1]));
        }
        Ok(Self {
            x,
            v,
            traveled: 0.0,
        })
    }
}

/// Outcome of a bounded trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exit {
    /// First obstacle contact at this time.
    Hit(f64),
    /// No contact up to and including the horizon.
    Survived,
}

impl Exit {
    pub fn time(&self) -> Option<f64> {
        match *self {
            Exit::Hit(t) => Some(t),
            Exit::Survived => None,
        }
    }
}

/// First contact of a ray with an obstacle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collision {
    pub t: f64,
    /// Lattice point at the center of the disk that was hit.
    pub center: [i64; 2],
}

/// Nearest forward intersection of `p + t v` with the circle of radius `rho`
/// around `c`, for `p` outside the circle.
fn circle_hit(p: [f64; 2], v: [f64; 2], c: [f64; 2], rho: f64) -> Option<f64> {
    let w = [p[0] - c[0], p[1] - c[1]];
    let b = w[0] * v[0] + w[1] * v[1];
    if b >= 0.0 {
        return None;
    }
    let cc = w[0] * w[0] + w[1] * w[1] - rho * rho;
    let disc = b * b - cc;
    if disc <= 0.0 {
        return None;
    }
    // Smaller root -b - sqrt(disc), written without cancellation.
    let t = cc / (-b + disc.sqrt());
    (t > MIN_HIT).then_some(t)
}

/// Traces the ray until the first obstacle contact or until `t_max`.
pub fn trace(
    cfg: &ObstacleConfig,
    x: [f64; 2],
    v: [f64; 2],
    t_max: f64,
) -> Result<Option<Collision>> {
    let state = RayState::new(cfg, x, v)?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(domain("t_max", t_max, "(0, inf)"));
    }
    let rho = cfg.radius();
    let origin = [state.x[0].floor(), state.x[1].floor()];
    let p = [state.x[0] - origin[0], state.x[1] - origin[1]];
    let v = state.v;

    let step = [v[0].signum() as i64, v[1].signum() as i64];
    let next_boundary = |cell: i64, axis: usize| -> f64 {
        if v[axis] > 0.0 {
            ((cell + 1) as f64 - p[axis]) / v[axis]
        } else if v[axis] < 0.0 {
            (cell as f64 - p[axis]) / v[axis]
        } else {
            f64::INFINITY
        }
    };

    let mut cell = [0i64, 0i64];
    let mut t_enter = 0.0;
    let mut best: Option<(f64, [i64; 2])> = None;
    let mut t_next = [next_boundary(0, 0), next_boundary(0, 1)];

    while t_enter <= best.map_or(t_max, |(t, _)| t.min(t_max)) {
        for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let corner = [cell[0] + di, cell[1] + dj];
            let c = [corner[0] as f64, corner[1] as f64];
            if let Some(t) = circle_hit(p, v, c, rho) {
                if best.is_none_or(|(b, _)| t < b) {
                    best = Some((t, corner));
                }
            }
        }
        let axis = if t_next[0] <= t_next[1] { 0 } else { 1 };
        t_enter = t_next[axis];
        cell[axis] += step[axis];
        t_next[axis] = next_boundary(cell[axis], axis);
    }

    Ok(best.filter(|&(t, _)| t <= t_max).map(|(t, c)| Collision {
        t,
        center: [c[0] + origin[0] as i64, c[1] + origin[1] as i64],
    }))
}

/// Free path length `tau_r(x, v)`, or [`Exit::Survived`] if it exceeds `t_max`.
pub fn tau(cfg: &ObstacleConfig, x: [f64; 2], v: [f64; 2], t_max: f64) -> Result<Exit> {
    Ok(match trace(cfg, x, v, t_max)? {
        Some(c) => Exit::Hit(c.t),
        None => Exit::Survived,
    })
}

/// `tau_r(x, v) > t`, tracing no further than `t`.
pub fn survives(cfg: &ObstacleConfig, x: [f64; 2], v: [f64; 2], t: f64) -> Result<bool> {
    if t == 0.0 {
        RayState::new(cfg, x, v)?;
        return Ok(true);
    }
    Ok(tau(cfg, x, v, t)? == Exit::Survived)
}

/// `tau_r(x, v) >= t`, tracing no further than `t`.
pub fn survives_inclusive(cfg: &ObstacleConfig, x: [f64; 2], v: [f64; 2], t: f64) -> Result<bool> {
    if t == 0.0 {
        RayState::new(cfg, x, v)?;
        return Ok(true);
    }
    Ok(match tau(cfg, x, v, t)? {
        Exit::Hit(h) => h >= t,
        Exit::Survived => true,
    })
}

/// Free path length among the disks and first slit hitting time from the same
/// starting point, for comparing the two models.
pub fn sandwich_check(cfg: &ObstacleConfig, dir: &Direction, x: [f64; 2]) -> Result<(f64, f64)> {
    let torus = SlitTorus::new(cfg.r(), *dir)?;
    let lambda = torus.lambda_exit(x)?;
    let horizon = (torus.partition().lc + 2) as f64 / dir.cos() + 1.0;
    match tau(cfg, x, dir.v(), horizon)? {
        Exit::Hit(t) => Ok((t, lambda)),
        Exit::Survived => Err(Error::Horizon {
            crossings: torus.partition().lc + 2,
        }),
    }
}
