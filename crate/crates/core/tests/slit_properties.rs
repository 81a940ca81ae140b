use lorentz_core::cf_core::{expand, MAX_DEPTH};
use lorentz_core::distributions::slit_survival_curve;
use lorentz_core::mc::McConfig;
use lorentz_core::slit_geometry::{Direction, SlitPartition, SlitTorus};
use proptest::prelude::*;

fn partition_for(alpha: f64, big_r: f64) -> Option<SlitPartition> {
    let cf = expand(alpha, MAX_DEPTH).ok()?;
    SlitPartition::from_cf(big_r, &cf).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn three_length_structure(alpha in 1e-4f64..0.9999, big_r in 1e-4f64..0.9999) {
        let Some(p) = partition_for(alpha, big_r) else { return Ok(()) };
        prop_assert_eq!(p.lc, p.la + p.lb);
        prop_assert!((p.area() - 1.0).abs() <= 1e-9, "area {}", p.area());
        prop_assert!(p.sa >= 0.0 && p.sb >= 0.0 && p.sc > 0.0);
        // lA = lB only in the first cell, where q_0 + q_1 = q_1
        if (p.cell.n, p.cell.k) == (1, 1) {
            prop_assert!(p.la == p.lb);
        } else {
            prop_assert!(p.la < p.lb);
        }
    }

    #[test]
    fn survival_is_continuous_and_monotone(alpha in 1e-3f64..0.999, big_r in 1e-3f64..0.999) {
        let Some(p) = partition_for(alpha, big_r) else { return Ok(()) };
        for (left, right) in p.knot_values() {
            prop_assert!((left - right).abs() <= 1e-9, "{} vs {}", left, right);
        }
        let end = 1.05 * p.lc as f64;
        let mut prev = 1.0;
        for i in 0..1000 {
            let s = end * i as f64 / 999.0;
            let v = p.survival_at_crossings(s);
            prop_assert!(v <= prev + 1e-15, "increase at s = {}", s);
            prop_assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
        prop_assert_eq!(p.survival_at_crossings(0.0), 1.0);
        prop_assert_eq!(p.survival_at_crossings(p.lc as f64), 0.0);
    }

    #[test]
    fn denominator_estimates(alpha in 1e-3f64..0.999, big_r in 1e-4f64..0.999) {
        let Some(p) = partition_for(alpha, big_r) else { return Ok(()) };
        let k = p.cell.k as f64;
        let q = p.la as f64;
        prop_assert!(1.0 / (big_r + (k + 1.0) * p.d_n) < q);
        prop_assert!(q < 1.0 / (big_r + (k - 1.0) * p.d_n));
        prop_assert!(q * p.d_n < 1.0 / k);
        let gap = 1.0 - q * p.d_prev;
        prop_assert!(gap < 2.0 / (k + 1.0));
        // q_1 d_0 = 1, so the gap closes exactly in the first cells
        if p.cell.n == 1 {
            prop_assert!(gap == 0.0);
        } else {
            prop_assert!(gap > 0.0);
        }
    }
}

/// The exact survival at time `t*/r` stays within `4/k 1{k >= t* - 2}` of its
/// approximation, on a 10^4 point grid of slopes, slit lengths and times.
#[test]
fn approximation_error_bound() {
    let mut checked = 0;
    let mut nonzero_bound = 0;
    for i in 0..100 {
        let alpha = (i as f64 + 0.5) / 100.0 * 0.999 + 1e-4 * (i as f64).sin().abs();
        let cf = expand(alpha, MAX_DEPTH).unwrap();
        for j in 0..20 {
            let big_r = 10f64.powf(-3.0 + 3.0 * (j as f64 + 0.37) / 20.0).min(0.99);
            let Ok(p) = SlitPartition::from_cf(big_r, &cf) else {
                continue;
            };
            for &t_star in &[2.5, 3.0, 5.0, 10.0, 40.0] {
                let s = t_star / big_r;
                assert!(s >= p.la as f64);
                let psi = p.survival_at_crossings(s);
                let chi = p.chi(t_star).unwrap();
                let bound = p.chi_error_bound(t_star).unwrap();
                assert!(
                    (psi - chi).abs() <= bound + 1e-12,
                    "alpha = {alpha}, R = {big_r}, t* = {t_star}: |{psi} - {chi}| > {bound}"
                );
                nonzero_bound += (bound > 0.0) as u32;
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 10_000);
    assert!(nonzero_bound > 0);
}

fn orbit_length(torus: &SlitTorus, z: [f64; 2]) -> f64 {
    let forward = torus.lambda_exit(z).unwrap();
    // The slit is symmetric under z -> -z, so the backward hitting time from z
    // is the forward hitting time from -z.
    let backward = torus.lambda_exit([-z[0], -z[1]]).unwrap();
    (forward + backward) * torus.direction().cos()
}

#[test]
fn orbits_have_three_lengths() {
    let mut state = 99u64;
    let mut uniform = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..200 {
        let dir = Direction::from_angle(uniform() * std::f64::consts::FRAC_PI_4).unwrap();
        let r = 0.01 + 0.3 * uniform();
        let torus = SlitTorus::new(r, dir).unwrap();
        let p = *torus.partition();
        let lengths = [p.la as f64, p.lb as f64, p.lc as f64];
        let mut seen = [0usize; 3];
        for _ in 0..200 {
            let z = [uniform(), uniform()];
            let len = orbit_length(&torus, z);
            let which = lengths
                .iter()
                .position(|&l| (len - l).abs() < 1e-6 * l.max(1.0));
            let which = which.unwrap_or_else(|| panic!("orbit length {len} not in {lengths:?}"));
            seen[which] += 1;
            let lam = torus.lambda_exit(z).unwrap();
            assert!(lam * dir.cos() <= lengths[which] + 1e-9);
            assert!(lam <= p.lc as f64 / dir.cos() + 1e-9);
        }
    }
}

#[test]
fn slit_survival_matches_closed_form() {
    let dir = Direction::from_slope(0.6180339887498949).unwrap();
    let torus = SlitTorus::new(0.1, dir).unwrap();
    let lc = torus.partition().lc as f64 / dir.cos();
    let times: Vec<f64> = (0..20).map(|i| (i as f64 + 0.5) / 20.0 * lc).collect();
    let mc = McConfig::new(20_000, 17);
    let est = slit_survival_curve(&torus, &times, &mc).unwrap();
    for (t, e) in times.iter().zip(&est) {
        let psi = torus.psi(*t).unwrap();
        let sigma = (psi * (1.0 - psi) / mc.samples as f64).sqrt();
        assert!(
            (e.value - psi).abs() <= 4.0 * sigma + 1e-3,
            "t = {t}: {} vs {psi}",
            e.value
        );
    }
}
