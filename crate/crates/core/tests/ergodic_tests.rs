use lorentz_core::cf_core::{expand, MAX_DEPTH};
use lorentz_core::ergodic_limits::{
    big_n, birkhoff_vs_gauss, deltas, erg_average_f, erg_limit, k_tail_bound, k_tail_limit,
    k_tail_measure, lambda_asymptote, lambda_exact, n_growth, survival_kernel, window_integral,
    LimitCurve, LEVY_RATE,
};
use lorentz_core::quadrature::{integrate, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn smooth(z1: f64, z2: f64) -> f64 {
    (-z1).exp() * (1.0 + z2 * z2).sqrt()
}

/// Integrating `f(Δ0, Δ1)` over a renormalization window gives the window
/// integral at the corresponding Gauss-map iterate.
#[test]
fn window_integral_matches_direct_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 100 {
        let alpha: f64 = rng.random_range(0.01..0.99);
        let cf = expand(alpha, MAX_DEPTH).unwrap();
        let l = rng.random_range(0..6usize);
        if cf.d(l + 1) < 1e-9 {
            continue;
        }
        let (lo, hi) = (-cf.d(l).ln(), -cf.d(l + 1).ln());
        let direct = integrate(
            |x| {
                let p = deltas(alpha, x).unwrap();
                assert_eq!(p.n, l);
                smooth(p.delta0, p.delta1)
            },
            lo.max(1e-12),
            hi,
            Tolerance::new(1e-12, 1e-10),
        )
        .unwrap();
        let theta = cf.d(l + 1) / cf.d(l);
        let closed = window_integral(&smooth, theta).unwrap();
        assert!(
            (direct.value - closed).abs() <= 1e-8 * closed.abs().max(1.0),
            "alpha = {alpha}, l = {l}: {} vs {closed}",
            direct.value
        );
        checked += 1;
    }
}

#[test]
fn offsets_have_fixed_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..2_000 {
        let alpha: f64 = rng.random_range(1e-3..0.999);
        let x = rng.random_range(0.01..25.0);
        let p = deltas(alpha, x).unwrap();
        assert!(p.delta0 >= 0.0, "{p:?}");
        assert!(p.delta1 <= 0.0, "{p:?}");
        assert_eq!(p.n, big_n(alpha, (-x).exp()).unwrap());
    }
}

#[test]
fn survival_kernel_average_is_the_limit_function() {
    for t_star in [3.0, 10.0, 40.0] {
        let via_windows = erg_limit(&survival_kernel(t_star)).unwrap();
        let closed = lambda_exact(t_star).unwrap();
        assert!(
            (via_windows - closed).abs() <= 1e-6 * closed,
            "t* = {t_star}: {via_windows} vs {closed}"
        );
    }
}

#[test]
fn finite_eps_average_approaches_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let kernel = survival_kernel(3.0);
    let mut values = Vec::new();
    let mut limit = 0.0;
    for _ in 0..40 {
        let alpha: f64 = rng.random_range(0.01..0.99);
        let avg = erg_average_f(&kernel, alpha, 1e-12, 0.0).unwrap();
        values.push(avg.value);
        limit = avg.limit;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    assert!((mean - limit).abs() <= 0.15 * limit, "{mean} vs {limit}");
}

#[test]
fn denominator_growth_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut rates: Vec<f64> = (0..200)
        .map(|_| n_growth(rng.random_range(1e-3..0.999), 1e-10).unwrap())
        .collect();
    rates.sort_by(f64::total_cmp);
    let median = rates[rates.len() / 2];
    assert!((median / LEVY_RATE - 1.0).abs() <= 0.1, "{median}");
}

#[test]
fn gauss_orbit_log_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let expected = PI * PI / (12.0 * 2f64.ln());
    let mut close = 0;
    for _ in 0..10 {
        let alpha = rng.random_range(0.01..0.99);
        let (mean, limit) = birkhoff_vs_gauss(|x: f64| -x.ln(), alpha, 20_000).unwrap();
        assert!((limit - expected).abs() < 1e-9);
        close += ((mean - limit).abs() <= 0.03 * limit) as u32;
    }
    assert!(close >= 9);
}

#[test]
fn limit_function_shape() {
    let mut prev = f64::INFINITY;
    for i in 0..40 {
        let t_star = 5.0 * 1.08f64.powi(i);
        let lam = lambda_exact(t_star).unwrap();
        let lead = lambda_asymptote(t_star).unwrap();
        assert!(lam < prev);
        assert!(lam > 0.0);
        assert!(
            (lam - lead).abs() <= 0.011 / (t_star * t_star),
            "t* = {t_star}"
        );
        prev = lam;
    }
}

/// Frozen from an independent quadrature of the small-`R` limit.
const TAIL_LIMIT: [(f64, f64); 5] = [
    (3.0, 0.6111236481),
    (6.0, 0.4141964494),
    (12.0, 0.2671151662),
    (21.0, 0.1819856282),
    (101.0, 0.05589402396),
];

#[test]
fn tail_limit_reference_values() {
    for (lam, expected) in TAIL_LIMIT {
        let got = k_tail_limit(lam).unwrap();
        assert!((got - expected).abs() <= 1e-9, "lam = {lam}: {got}");
    }
    assert_eq!(k_tail_limit(20.5).unwrap(), k_tail_limit(21.0).unwrap());
}

#[test]
fn large_k_directions_follow_tail_limit() {
    let samples = 40_000;
    for lam in [3.0, 6.0, 12.0, 21.0, 101.0] {
        let limit = PI / 4.0 * k_tail_limit(lam).unwrap();
        let measure = k_tail_measure(0.01, lam, samples, 4).unwrap();
        let p = measure / (PI / 4.0);
        let sigma = PI / 4.0 * (p * (1.0 - p) / samples as f64).sqrt();
        assert!(
            (measure - limit).abs() <= 4.0 * sigma + 0.01 * limit,
            "lam = {lam}: {measure} vs {limit}"
        );
    }
}

#[test]
fn classical_tail_estimate_only_holds_for_small_lambda() {
    for big_r in [0.2, 0.05, 0.01] {
        for lam in [2.0, 3.0, 6.0] {
            let measure = k_tail_measure(big_r, lam, 20_000, 5).unwrap();
            assert!(measure <= k_tail_bound(big_r, lam, 1.0).unwrap());
        }
    }
    let measure = k_tail_measure(0.01, 101.0, 40_000, 6).unwrap();
    assert!(measure > 2.0 * k_tail_bound(0.01, 101.0, 1.0).unwrap());
}

#[test]
fn limit_curve_csv() {
    let mut curve = LimitCurve::log_spaced(5.0, 100.0, 4).unwrap();
    assert_eq!(curve.entries().len(), 4);
    assert!(curve.push(50.0, 0.1).is_err());
    assert!(curve.push(200.0, -1.0).is_err());
    curve.push(200.0, lambda_exact(200.0).unwrap()).unwrap();
    let mut buf = Vec::new();
    curve.write_csv(&mut buf, 1.0).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t_star,lambda,asymptote,bound");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("5.0000000000000000e0,"));
}
