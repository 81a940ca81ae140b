//! Free path lengths in the two-dimensional periodic Lorentz gas.
//!
//! Disk obstacles of diameter `r` sit at the points of `Z^2`. The crate computes
//! the distribution of the free path length exactly (through the slit model
//! and the continued fraction of the direction's slope) and by Monte Carlo
//! (through exact ray tracing), and evaluates the closed-form small-`r` limit
//! of its logarithmic average.
//!
//! Modules, from the bottom up:
//!
//! - [`cf_core`]: continued fractions, convergents, Gauss map.
//! - [`slit_geometry`]: three-length partition of the slitted torus, the slit
//!   survival function and its approximant.
//! - [`ray_tracer`]: exact free path length among the disks.
//! - [`distributions`]: Monte Carlo survival estimators and logarithmic
//!   averaging over `r`.
//! - [`ergodic_limits`]: Gauss map averages and the limit function.
//! - [`kinetic`]: transport with trapping and its small-obstacle limit.

// `!(x > 0.0)` style guards are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cf_core;
pub mod curve;
pub mod distributions;
pub mod ergodic_limits;
pub mod error;
pub mod kinetic;
pub mod mc;
pub mod quadrature;
pub mod ray_tracer;
pub mod slit_geometry;

pub use error::{Error, Result};
