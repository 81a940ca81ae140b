//! Continued fractions, convergents and the Gauss map.
//!
//! Indices follow the convention in which the convergent denominators start
//! `q_0 = 0, q_1 = 1`, the numerators `p_0 = 1, p_1 = 0`, the errors
//! `d_0 = 1, d_1 = alpha`, and the partial quotient `a_n` produces the terms of
//! index `n + 1`:
//!
//! ```text
//! q_{n+1} = a_n q_n + q_{n-1}        d_{n+1} = d_{n-1} - a_n d_n
//! ```
//!
//! so that `d_n = |q_n alpha - p_n|` and `q_n d_{n+1} + q_{n+1} d_n = 1`.
//!
//! The input `alpha` is converted to the exact rational `m / 2^64` (exact for
//! every double in `[2^-11, 1)`), and the Euclidean algorithm runs on integer
//! remainders. Partial quotients and errors are therefore those of the double
//! itself, with no loss of precision along the Gauss map orbit.

use crate::error::{check_open, domain, Error, Result};

/// Expansion stops once an error `d_n` drops below this value, or once a Gauss
/// map iterate comes within this distance of 0 or 1.
pub const PRECISION_FLOOR: f64 = 1e-13;

/// Depth used when the caller only needs "as deep as the precision floor allows".
pub const MAX_DEPTH: usize = 128;

const SCALE_BITS: u32 = 64;

/// A positive rational `num / den` with `num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ratio {
    num: u128,
    den: u128,
}

impl Ratio {
    fn from_f64(alpha: f64) -> Result<Self> {
        check_open("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
        let den = 1u128 << SCALE_BITS;
        let num = (alpha * den as f64).round() as u128;
        if num == 0 || num >= den {
            return Err(domain("alpha", alpha, "(2^-64, 1 - 2^-64)"));
        }
        Ok(Self { num, den })
    }

    fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact Gauss map; the caller guarantees `num > 0`.
    fn gauss(self) -> Self {
        Self {
            num: self.den % self.num,
            den: self.num,
        }
    }
}

/// The Gauss map `T alpha = 1/alpha - [1/alpha]`.
pub fn gauss_map(alpha: f64) -> Result<f64> {
    check_open("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
    let inv = alpha.recip();
    Ok(inv - inv.floor())
}

/// Partial quotients, convergents and approximation errors of one `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction {
    alpha: f64,
    a: Vec<u64>,
    p: Vec<u64>,
    q: Vec<u64>,
    d: Vec<f64>,
    terminated: bool,
}

impl ContinuedFraction {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of partial quotients computed. `p`, `q` and `d` hold `depth + 2`
    /// entries (indices `0..=depth + 1`).
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// Largest index available for `p`, `q` and `d`.
    pub fn last_index(&self) -> usize {
        self.d.len() - 1
    }

    /// True when the Euclidean remainder reached zero (the input was rational
    /// at the resolution of the expansion).
    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// `a_1, a_2, ...`; element `i` is `a_{i+1}`.
    pub fn partial_quotients(&self) -> &[u64] {
        &self.a
    }

    pub fn numerators(&self) -> &[u64] {
        &self.p
    }

    pub fn denominators(&self) -> &[u64] {
        &self.q
    }

    pub fn errors(&self) -> &[f64] {
        &self.d
    }

    /// Partial quotient `a_n`, 1-based. Panics if `n == 0` or `n > depth`.
    pub fn a(&self, n: usize) -> u64 {
        self.a[n - 1]
    }

    pub fn p(&self, n: usize) -> u64 {
        self.p[n]
    }

    pub fn q(&self, n: usize) -> u64 {
        self.q[n]
    }

    pub fn d(&self, n: usize) -> f64 {
        self.d[n]
    }

    /// `|q_n d_{n+1} + q_{n+1} d_n - 1|`, defined for `n < last_index()`.
    pub fn qd_residual(&self, n: usize) -> f64 {
        (self.q[n] as f64 * self.d[n + 1] + self.q[n + 1] as f64 * self.d[n] - 1.0).abs()
    }
}

/// Expands `alpha` to at most `depth` partial quotients.
///
/// The expansion is truncated early, with the actual depth recorded, when the
/// input is rational, when an error `d_n` falls below [`PRECISION_FLOOR`], or
/// when a Gauss map iterate comes within the floor of 0 or 1.
pub fn expand(alpha: f64, depth: usize) -> Result<ContinuedFraction> {
    let ratio = Ratio::from_f64(alpha)?;
    if depth == 0 {
        return Err(domain("depth", 0.0, "depth >= 1"));
    }
    Ok(expand_ratio(alpha, ratio, depth))
}

fn expand_ratio(alpha: f64, ratio: Ratio, depth: usize) -> ContinuedFraction {
    let scale = ratio.den as f64;
    let mut cf = ContinuedFraction {
        alpha,
        a: Vec::new(),
        p: vec![1, 0],
        q: vec![0, 1],
        d: vec![1.0, ratio.num as f64 / scale],
        terminated: false,
    };
    let first = ratio.value();
    if cf.d[1] < PRECISION_FLOOR || first < PRECISION_FLOOR || 1.0 - first < PRECISION_FLOOR {
        return cf;
    }
    // (D_{n-1}, D_n) with d_n = D_n / den.
    let mut rem = (ratio.den, ratio.num);
    for n in 1..=depth {
        let (prev, cur) = rem;
        let a_n = prev / cur;
        let next = prev % cur;
        let step = |x: u64, y: u64| u64::try_from(a_n * x as u128 + y as u128).ok();
        let (Ok(a_small), Some(q_next), Some(p_next)) = (
            u64::try_from(a_n),
            step(cf.q[n], cf.q[n - 1]),
            step(cf.p[n], cf.p[n - 1]),
        ) else {
            break;
        };
        cf.a.push(a_small);
        cf.q.push(q_next);
        cf.p.push(p_next);
        cf.d.push(next as f64 / scale);
        rem = (cur, next);

        if next == 0 {
            cf.terminated = true;
            break;
        }
        let iterate = next as f64 / cur as f64;
        if cf.d[n + 1] < PRECISION_FLOOR
            || iterate < PRECISION_FLOOR
            || 1.0 - iterate < PRECISION_FLOOR
        {
            break;
        }
    }
    cf
}

/// `d_n(alpha)` as the product of the first `n` Gauss map iterates,
/// `alpha * T alpha * ... * T^{n-1} alpha`.
///
/// The orbit is computed exactly on the rational value of `alpha`; only the
/// factors are rounded to double precision.
pub fn error_product(alpha: f64, n: usize) -> Result<f64> {
    let mut ratio = Ratio::from_f64(alpha)?;
    let mut product = 1.0;
    for _ in 0..n {
        if ratio.num == 0 {
            return Ok(0.0);
        }
        product *= ratio.value();
        ratio = ratio.gauss();
    }
    Ok(product)
}

/// Residuals of the renormalization identities
/// `q_n(T alpha) = p_{n+1}(alpha)` and `d_{n+1}(alpha) = alpha d_n(T alpha)`.
pub fn renorm_check(alpha: f64, n: usize) -> Result<(f64, f64)> {
    let ratio = Ratio::from_f64(alpha)?;
    let cf = expand_ratio(alpha, ratio, n.max(1));
    if cf.last_index() < n + 1 {
        return Err(Error::DepthExhausted {
            depth: cf.depth(),
            needed: format!("index {} of alpha = {alpha}", n + 1),
        });
    }
    let shifted = ratio.gauss();
    if shifted.num == 0 {
        return Err(domain("alpha", alpha, "an alpha with T(alpha) > 0"));
    }
    let cf_t = expand_ratio(shifted.value(), shifted, n.max(1));
    if cf_t.last_index() < n {
        return Err(Error::DepthExhausted {
            depth: cf_t.depth(),
            needed: format!("index {n} of T(alpha)"),
        });
    }
    let q_residual = cf_t.q(n).abs_diff(cf.p(n + 1)) as f64;
    let d_residual = (cf.d(n + 1) - alpha * cf_t.d(n)).abs();
    Ok((q_residual, d_residual))
}

/// Cell `(n, k)` of the nested partition `(0, 1) = U_n U_{1<=k<=a_n} I_{n,k}`
/// with `I_{n,k} = [max(d_n, d_{n-1} - k d_n), d_{n-1} - (k-1) d_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartitionIndex {
    pub n: usize,
    pub k: u64,
}

impl PartitionIndex {
    /// Half-open bounds `[left, right)` of `I_{n,k}`.
    pub fn bounds(&self, cf: &ContinuedFraction) -> (f64, f64) {
        interval(cf.d(self.n - 1), cf.d(self.n), self.k)
    }
}

fn interval(d_prev: f64, d_n: f64, k: u64) -> (f64, f64) {
    let left = d_n.max(d_prev - k as f64 * d_n);
    let right = d_prev - (k - 1) as f64 * d_n;
    (left, right)
}

/// Finds the unique `(n, k)` with `R` in `I_{n,k}`.
///
/// `k` comes from `[(d_{n-1} - R) / d_n] + 1` and is then reconciled with the
/// floating-point interval bounds so that `left <= R < right` holds exactly.
pub fn locate(big_r: f64, cf: &ContinuedFraction) -> Result<PartitionIndex> {
    check_open("R", big_r, 0.0, 1.0, "(0, 1)")?;
    let d = cf.errors();
    let n = (1..d.len())
        .find(|&n| d[n] <= big_r)
        .ok_or_else(|| Error::DepthExhausted {
            depth: cf.depth(),
            needed: format!("R = {big_r} below the last error d = {}", d[d.len() - 1]),
        })?;
    let (d_prev, d_n) = (d[n - 1], d[n]);
    if d_n <= 0.0 {
        return Err(Error::DepthExhausted {
            depth: cf.depth(),
            needed: format!("R = {big_r} lies in the terminal interval of a rational alpha"),
        });
    }
    let mut k = ((d_prev - big_r) / d_n).floor() as u64 + 1;
    while k > 1 && big_r >= interval(d_prev, d_n, k).1 {
        k -= 1;
    }
    while big_r < interval(d_prev, d_n, k).0 {
        k += 1;
    }
    Ok(PartitionIndex { n, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn gauss_map_fixed_points() {
        let g = golden();
        // 1/g - 1 = g algebraically
        assert!((1.0 / g - 1.0 - g).abs() < 1e-15);
        assert!((gauss_map(g).unwrap() - g).abs() < 1e-15);

        let s = 2f64.sqrt() - 1.0;
        assert!((1.0 / s - 2.0 - s).abs() < 1e-15);
        assert!((gauss_map(s).unwrap() - s).abs() < 1e-15);

        assert_eq!(gauss_map(0.5).unwrap(), 0.0);
    }

    #[test]
    fn gauss_map_rejects_endpoints() {
        for bad in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(gauss_map(bad), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn golden_expansion() {
        let g = golden();
        let cf = expand(g, 6).unwrap();
        assert_eq!(cf.partial_quotients(), &[1, 1, 1, 1, 1, 1]);
        assert_eq!(&cf.denominators()[..7], &[0, 1, 1, 2, 3, 5, 8]);
        for n in 0..=cf.last_index() {
            assert!((cf.d(n) - g.powi(n as i32)).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn pell_expansion() {
        let s = 2f64.sqrt() - 1.0;
        let cf = expand(s, 5).unwrap();
        assert_eq!(cf.partial_quotients(), &[2, 2, 2, 2, 2]);
        assert_eq!(&cf.denominators()[..6], &[0, 1, 2, 5, 12, 29]);
        // The double nearest to sqrt 2 - 1 is not the quadratic irrational; its
        // errors drift from s^n by about q_{n+1} * 1e-17.
        for n in 0..=cf.last_index() {
            assert!((cf.d(n) - s.powi(n as i32)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn rational_terminates() {
        let cf = expand(0.5, 5).unwrap();
        assert_eq!(cf.depth(), 1);
        assert_eq!(cf.partial_quotients(), &[2]);
        assert_eq!(cf.errors(), &[1.0, 0.5, 0.0]);
        assert!(cf.is_terminated());
    }

    #[test]
    fn expansion_respects_floor() {
        let cf = expand(0.123456789, MAX_DEPTH).unwrap();
        let last = cf.last_index();
        assert!(cf.d(last - 1) >= PRECISION_FLOOR);
        assert!(cf.depth() < MAX_DEPTH);
    }

    #[test]
    fn error_product_matches_recursion() {
        assert_eq!(error_product(0.37, 0).unwrap(), 1.0);

        let g = golden();
        let cf = expand(g, 8).unwrap();
        let prod = error_product(g, 3).unwrap();
        assert!((prod - cf.d(3)).abs() < 1e-12);
        assert!((prod - 0.2360679775).abs() < 1e-10);

        let x = std::f64::consts::PI - 3.0;
        let cf = expand(x, 4).unwrap();
        assert_eq!(cf.a(1), 7);
        let two_step = x * gauss_map(x).unwrap();
        assert!((cf.d(2) - two_step).abs() < 1e-12);
        assert!((error_product(x, 2).unwrap() - cf.d(2)).abs() < 1e-15);
    }

    #[test]
    fn renormalization_examples() {
        let (dq, dd) = renorm_check(golden(), 4).unwrap();
        assert_eq!(dq, 0.0);
        assert!(dd <= 1e-12);

        let (dq, dd) = renorm_check(2f64.sqrt() - 1.0, 3).unwrap();
        assert_eq!(dq, 0.0);
        assert!(dd <= 1e-12);

        let (dq, dd) = renorm_check(0.3, 1).unwrap();
        assert_eq!(dq, 0.0);
        assert!(dd <= 1e-12);
    }

    fn brute_force_cell(big_r: f64, cf: &ContinuedFraction) -> Vec<PartitionIndex> {
        let mut hits = Vec::new();
        for n in 1..=cf.depth() {
            for k in 1..=cf.a(n) {
                let (lo, hi) = interval(cf.d(n - 1), cf.d(n), k);
                if lo <= big_r && big_r < hi {
                    hits.push(PartitionIndex { n, k });
                }
            }
        }
        hits
    }

    #[test]
    fn locate_examples() {
        let cf = expand(golden(), 20).unwrap();
        assert_eq!(locate(0.5, &cf).unwrap(), PartitionIndex { n: 2, k: 1 });

        let cf = expand(2f64.sqrt() - 1.0, 20).unwrap();
        let cell = locate(0.3, &cf).unwrap();
        assert_eq!(brute_force_cell(0.3, &cf), vec![cell]);
        assert_eq!(cell, PartitionIndex { n: 2, k: 1 });
    }

    #[test]
    fn locate_on_left_boundary() {
        let cf = expand(0.2718281828459045, 20).unwrap();
        for n in 1..6 {
            let cell = locate(cf.d(n), &cf).unwrap();
            assert_eq!(cell, PartitionIndex { n, k: cf.a(n) });
            assert_eq!(cell.bounds(&cf).0, cf.d(n));
            assert_eq!(brute_force_cell(cf.d(n), &cf), vec![cell]);
        }
    }

    #[test]
    fn locate_below_depth_fails() {
        let cf = expand(std::f64::consts::FRAC_1_PI, 3).unwrap();
        let floor = cf.d(cf.last_index());
        assert!(matches!(
            locate(floor * 0.5, &cf),
            Err(Error::DepthExhausted { .. })
        ));
    }
}
