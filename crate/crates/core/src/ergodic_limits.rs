//! Renormalization statistics along the Gauss map and the closed-form limit
//! of the logarithmically averaged survival probability.
//!
//! For `x > 0` let `N = N(alpha, e^-x)` be the least `n` with `d_{n+1} < e^-x`.
//! The window `x ∈ [|ln d_l|, |ln d_{l+1}|)` is exactly where `N = l`, and on
//! it the offsets
//!
//! ```text
//! Δ0 = -x - ln d_{N+1} >= 0,    Δ1 = -x - ln d_N <= 0
//! ```
//!
//! reduce, after the shift `y = x - |ln d_l|`, to `(L - y, -y)` with
//! `L = |ln T^l alpha|`. Integrals over a window are therefore values of
//! `F(θ) = ∫_0^{|ln θ|} f(|ln θ| - y, -y) dy` along the Gauss map orbit.

use std::f64::consts::{LN_2, PI};

use rand::Rng;

use crate::cf_core::{expand, gauss_map, locate, ContinuedFraction, MAX_DEPTH};
use crate::curve::format_float;
use crate::error::{check_open, domain, Error, Result};
use crate::mc::batch_rng;
use crate::quadrature::{integrate, integrate_split, Tolerance};

/// `12 ln 2 / π²`, the almost-everywhere growth rate of `N(alpha, eps) / |ln eps|`.
pub const LEVY_RATE: f64 = 12.0 * LN_2 / (PI * PI);

/// Initial subintervals for integrals over a window; integrands such as
/// [`survival_kernel`] have kinks inside it.
const WINDOW_PIECES: usize = 16;

/// Half-width of the interval next to `s = 1` whose logarithmic contribution to
/// the limit integral is evaluated analytically.
const LOG_SPLIT: f64 = 1e-6;

fn inner_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-13,
        rel: 1e-11,
        max_intervals: 4000,
    }
}

fn deep_expansion(alpha: f64) -> Result<ContinuedFraction> {
    expand(alpha, MAX_DEPTH)
}

fn big_n_from(cf: &ContinuedFraction, eps: f64) -> Result<usize> {
    let d = cf.errors();
    (0..d.len() - 1)
        .find(|&n| d[n + 1] < eps)
        .ok_or_else(|| Error::DepthExhausted {
            depth: cf.depth(),
            needed: format!("an error below eps = {eps}"),
        })
}

/// `N(alpha, eps)`: the least `n` with `d_{n+1}(alpha) < eps`.
pub fn big_n(alpha: f64, eps: f64) -> Result<usize> {
    check_open("eps", eps, 0.0, 1.0, "(0, 1)")?;
    big_n_from(&deep_expansion(alpha)?, eps)
}

/// `N(alpha, eps) / |ln eps|`.
pub fn n_growth(alpha: f64, eps: f64) -> Result<f64> {
    Ok(big_n(alpha, eps)? as f64 / eps.ln().abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPair {
    /// `N(alpha, e^-x)`.
    pub n: usize,
    pub delta0: f64,
    pub delta1: f64,
}

fn deltas_from(cf: &ContinuedFraction, x: f64) -> Result<DeltaPair> {
    let n = big_n_from(cf, (-x).exp())?;
    Ok(DeltaPair {
        n,
        delta0: -x - cf.d(n + 1).ln(),
        delta1: -x - cf.d(n).ln(),
    })
}

/// Offsets of `x` from the ends of its renormalization window.
pub fn deltas(alpha: f64, x: f64) -> Result<DeltaPair> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain("x", x, "(0, inf)"));
    }
    deltas_from(&deep_expansion(alpha)?, x)
}

/// Mean of `f` along the first `terms` points of the Gauss map orbit of
/// `alpha`, and its almost-everywhere limit `(1/ln 2) ∫_0^1 f(θ) dθ / (1 + θ)`.
pub fn birkhoff_vs_gauss<F>(f: F, alpha: f64, terms: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    check_open("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
    if terms == 0 {
        return Err(domain("terms", 0.0, "terms >= 1"));
    }
    let expected = gauss_average(&f)?;
    let mut x = alpha;
    let mut sum = 0.0;
    for l in 0..terms {
        if x == 0.0 {
            return Err(Error::RationalOrbit(l));
        }
        sum += f(x);
        if l + 1 < terms {
            x = gauss_map(x)?;
        }
    }
    Ok((sum / terms as f64, expected))
}

/// `(1/ln 2) ∫_0^1 f(θ) dθ / (1 + θ)`.
pub fn gauss_average<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let r = integrate(|t| f(t) / (1.0 + t), 0.0, 1.0, inner_tolerance())?;
    Ok(r.value / LN_2)
}

/// `F(θ) = ∫_0^{|ln θ|} f(|ln θ| - y, -y) dy`.
pub fn window_integral<F>(f: &F, theta: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    check_open("theta", theta, 0.0, 1.0, "(0, 1)")?;
    let len = -theta.ln();
    let r = integrate_split(
        |y| f(len - y, -y),
        0.0,
        len,
        WINDOW_PIECES,
        inner_tolerance(),
    )?;
    Ok(r.value)
}

/// Finite-`eps` average and its limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgAverage {
    /// `(1/|ln eps|) ∫_{x*}^{|ln eps|} f(Δ0(alpha, x), Δ1(alpha, x)) dx`.
    pub value: f64,
    /// `(12/π²) ∫_0^1 F(θ) dθ / (1 + θ)`.
    pub limit: f64,
}

/// Averages `f(Δ0, Δ1)` over `x ∈ [x*, |ln eps|]`, integrating window by window.
pub fn erg_average_f<F>(f: F, alpha: f64, eps: f64, x_star: f64) -> Result<ErgAverage>
where
    F: Fn(f64, f64) -> f64,
{
    check_open("eps", eps, 0.0, 1.0, "(0, 1)")?;
    let top = eps.ln().abs();
    if !(x_star >= 0.0 && x_star < top) {
        return Err(domain("x_star", x_star, "[0, |ln eps|)"));
    }
    let cf = deep_expansion(alpha)?;
    let last = big_n_from(&cf, eps)?;
    let mut total = 0.0;
    for l in 0..=last {
        let lo = -cf.d(l).ln();
        let hi = -cf.d(l + 1).ln();
        let a = lo.max(x_star);
        let b = hi.min(top);
        if b <= a {
            continue;
        }
        let len = hi - lo;
        let piece = integrate_split(
            |y| f(len - y, -y),
            a - lo,
            b - lo,
            WINDOW_PIECES,
            inner_tolerance(),
        )?;
        total += piece.value;
    }
    Ok(ErgAverage {
        value: total / top,
        limit: erg_limit(&f)?,
    })
}

/// `(12/π²) ∫_0^1 F(θ) dθ / (1 + θ)` for `F` built from `f` as in
/// [`window_integral`].
pub fn erg_limit<F>(f: &F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let tol = Tolerance {
        abs: 1e-11,
        rel: 1e-9,
        max_intervals: 2000,
    };
    let failure = std::cell::RefCell::new(None);
    let r = integrate(
        |theta| match window_integral(f, theta) {
            Ok(v) => v / (1.0 + theta),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0,
        tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(12.0 / (PI * PI) * r?.value)
}

/// The integrand whose average gives the limit function: `(1 - e^{z2} - t* e^{-z1})_+`.
pub fn survival_kernel(t_star: f64) -> impl Fn(f64, f64) -> f64 {
    move |z1: f64, z2: f64| (1.0 - z2.exp() - t_star * (-z1).exp()).max(0.0)
}

/// The two integrals assembling the limit function, with `dz` weighted by
/// `weight(z)`:
///
/// ```text
/// I1 = ∫_0^1 [ln((1+s)/(1-s)) - s] weight(z) dz
/// I2 = ∫_0^1 [z/(1+s) - z/(1-s)] weight(z) dz,     s = sqrt(1 - z)
/// ```
///
/// Both are computed in the variable `s`, where `dz = 2 s ds`. The bracket of
/// `I2` equals `-2 s`. The logarithmic singularity of `I1` at `s = 1` is
/// integrated analytically over `[1 - 1e-6, 1]`.
pub fn limit_integrals<W: Fn(f64) -> f64>(weight: W) -> Result<(f64, f64)> {
    let tol = Tolerance::new(1e-14, 1e-13);
    let w = |s: f64| weight(1.0 - s * s);
    let cut = 1.0 - LOG_SPLIT;
    let body = integrate(
        |s| 2.0 * s * (((1.0 + s) / (1.0 - s)).ln() - s) * w(s),
        0.0,
        cut,
        tol,
    )?;
    // On [cut, 1]: ln(1+s) - s ≈ ln 2 - 1 and ∫ -ln(1-s) ds = δ(1 - ln δ).
    let mid = 1.0 - 0.5 * LOG_SPLIT;
    let h = 2.0 * mid * w(mid);
    let tail = h * ((LN_2 - 1.0) * LOG_SPLIT + LOG_SPLIT * (1.0 - LOG_SPLIT.ln()));
    let second = integrate(|s| -4.0 * s * s * w(s), 0.0, 1.0, tol)?;
    Ok((body.value + tail, second.value))
}

/// `(I1, I2)` with unit weight; both equal `±4/3`.
pub fn step_constants() -> Result<(f64, f64)> {
    limit_integrals(|_| 1.0)
}

/// Closed-form limit `Λ(t*) = (12/π²) I1 + (6/π²) I2` with weight `1/(4t* + z)`.
pub fn lambda_exact(t_star: f64) -> Result<f64> {
    if !(t_star > 1.0 && t_star.is_finite()) {
        return Err(domain("t_star", t_star, "(1, inf)"));
    }
    let (i1, i2) = limit_integrals(|z| 1.0 / (4.0 * t_star + z))?;
    Ok((12.0 * i1 + 6.0 * i2) / (PI * PI))
}

/// Leading-order behaviour `2 / (π² t*)`.
pub fn lambda_asymptote(t_star: f64) -> Result<f64> {
    if !(t_star > 0.0 && t_star.is_finite()) {
        return Err(domain("t_star", t_star, "(0, inf)"));
    }
    Ok(2.0 / (PI * PI * t_star))
}

/// `8 m_sup / (t* - 3)`, the bound on the averaged survival probability.
pub fn lambda_bound(t_star: f64, m_sup: f64) -> Result<f64> {
    if !(t_star > 3.0) {
        return Err(domain("t_star", t_star, "(3, inf)"));
    }
    Ok(8.0 * m_sup / (t_star - 3.0))
}

/// `k(alpha, R)`: the second index of the partition cell containing `R`.
pub fn k_index(alpha: f64, big_r: f64) -> Result<u64> {
    let cf = deep_expansion(alpha)?;
    Ok(locate(big_r, &cf)?.k)
}

/// `2 m_sup / (lam - 1)`, the classical estimate for the `m dθ` measure of
/// directions with `k(tan θ, R) >= lam`.
///
/// The estimate treats `T^N alpha` as Gauss distributed, but `N = N(alpha, R)`
/// favours long renormalization windows, that is large partial quotients. For
/// small `R` the measure approaches `‖m‖_1 k_tail_limit(lam)`, which decays like
/// `ln(lam) / lam` and exceeds this value once `lam >= 10`.
pub fn k_tail_bound(big_r: f64, lam: f64, m_sup: f64) -> Result<f64> {
    check_open("R", big_r, 0.0, 1.0, "(0, 1)")?;
    if !(lam > 1.0) {
        return Err(domain("lambda", lam, "(1, inf)"));
    }
    Ok(2.0 * m_sup / (lam - 1.0))
}

/// Limit as `R -> 0` of the Gauss-measure fraction of `alpha` with
/// `k(alpha, R) >= lam`:
///
/// ```text
/// (12/π²) ∫_0^{1/K} ln((1 - (K - 1) u) / u) du / (1 + u),     K = ceil(lam)
/// ```
///
/// Given `T^N alpha = u`, the offset `ln(d_N / R)` is uniform on `[0, |ln u|)`,
/// and `k >= K` on the part of that window where `R <= d_N - (K - 1) d_{N+1}`.
/// By mixing the same limit holds for any absolutely continuous law of `alpha`.
pub fn k_tail_limit(lam: f64) -> Result<f64> {
    if !(lam > 1.0 && lam.is_finite()) {
        return Err(domain("lambda", lam, "(1, inf)"));
    }
    let k = lam.ceil();
    let r = integrate(
        |u| ((1.0 - (k - 1.0) * u) / u).ln() / (1.0 + u),
        0.0,
        1.0 / k,
        inner_tolerance(),
    )?;
    Ok(12.0 / (PI * PI) * r.value)
}

/// Monte Carlo estimate of `∫_0^{π/4} 1{k(tan θ, R) >= lam} dθ`.
pub fn k_tail_measure(big_r: f64, lam: f64, samples: u64, seed: u64) -> Result<f64> {
    check_open("R", big_r, 0.0, 1.0, "(0, 1)")?;
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let mut rng = batch_rng(seed, 0);
    let mut hits = 0u64;
    let mut drawn = 0u64;
    while drawn < samples {
        let theta = rng.random_range(0.0..PI / 4.0);
        let alpha = theta.tan();
        if !(alpha > 0.0) {
            continue;
        }
        drawn += 1;
        if k_index(alpha, big_r)? as f64 >= lam {
            hits += 1;
        }
    }
    Ok(PI / 4.0 * hits as f64 / samples as f64)
}

/// Samples of the limit function.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LimitCurve {
    entries: Vec<(f64, f64)>,
}

impl LimitCurve {
    /// `points` values of `t*` spaced logarithmically over `[t_min, t_max]`.
    pub fn log_spaced(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min > 1.0 && t_max > t_min && t_max.is_finite()) {
            return Err(Error::Config(format!(
                "need 1 < tmin < tmax, got tmin = {t_min}, tmax = {t_max}"
            )));
        }
        if points < 2 {
            return Err(Error::Config("points must be at least 2".into()));
        }
        let mut curve = Self::default();
        let (a, b) = (t_min.ln(), t_max.ln());
        for i in 0..points {
            let t = if i == points - 1 {
                t_max
            } else if i == 0 {
                t_min
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            };
            curve.push(t, lambda_exact(t)?)?;
        }
        Ok(curve)
    }

    pub fn push(&mut self, t_star: f64, lambda: f64) -> Result<()> {
        if !(lambda > 0.0) {
            return Err(Error::Config(format!(
                "limit value {lambda} must be positive"
            )));
        }
        if let Some(&(last, _)) = self.entries.last() {
            if !(t_star > last) {
                return Err(Error::Config(format!(
                    "t_star {t_star} does not follow {last}"
                )));
            }
        }
        self.entries.push((t_star, lambda));
        Ok(())
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Writes `t_star,lambda,asymptote,bound`; the bound cell is empty for
    /// `t* <= 3`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W, m_sup: f64) -> std::io::Result<()> {
        writeln!(out, "t_star,lambda,asymptote,bound")?;
        for &(t, l) in &self.entries {
            let asym = 2.0 / (PI * PI * t);
            let bound = lambda_bound(t, m_sup).map(format_float).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{}",
                format_float(t),
                format_float(l),
                format_float(asym),
                bound
            )?;
        }
        Ok(())
    }
}
