use lorentz_core::distributions::{
    acceptance_tally, bound_band, cesaro_phi, free_area, phi_dir_curve, phi_m, AngularWeight,
    CesaroNormalization, CesaroSpec, Estimate,
};
use lorentz_core::mc::McConfig;
use lorentz_core::ray_tracer::ObstacleConfig;
use lorentz_core::slit_geometry::{Direction, SlitTorus};
use lorentz_core::Error;

#[test]
fn rejection_sampler_acceptance_rate() {
    for r in [0.05, 0.2, 0.45] {
        let cfg = ObstacleConfig::new(r).unwrap();
        let tally = acceptance_tally(&cfg, &McConfig::new(100_000, 3)).unwrap();
        let p = free_area(r);
        let sigma = (p * (1.0 - p) / tally.trials as f64).sqrt();
        assert!(
            (tally.estimate() - p).abs() <= 3.0 * sigma,
            "r = {r}: {} vs {p}",
            tally.estimate()
        );
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let cfg = ObstacleConfig::new(0.1).unwrap();
    let m = AngularWeight::UniformCircle;
    let base = phi_m(&cfg, 5.0, &m, &McConfig::new(30_000, 11).with_workers(1)).unwrap();
    for workers in [2, 3, 8] {
        let other = phi_m(
            &cfg,
            5.0,
            &m,
            &McConfig::new(30_000, 11).with_workers(workers),
        )
        .unwrap();
        assert_eq!(base, other);
    }
    let other_seed = phi_m(&cfg, 5.0, &m, &McConfig::new(30_000, 12).with_workers(1)).unwrap();
    assert_ne!(base, other_seed);
}

#[test]
fn directional_survival_is_monotone() {
    let cfg = ObstacleConfig::new(0.1).unwrap();
    let dir = Direction::from_angle(0.3).unwrap();
    let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
    let est = phi_dir_curve(&cfg, &times, &dir, &McConfig::new(20_000, 5)).unwrap();
    assert_eq!(est[0].value, 1.0);
    for pair in est.windows(2) {
        assert!(pair[1].value <= pair[0].value);
    }
}

/// Disk survival in a fixed direction lies between slit survivals shifted by
/// half an obstacle.
#[test]
fn directional_survival_within_slit_envelope() {
    let r = 0.1;
    let dir = Direction::from_slope(0.6180339887498949).unwrap();
    let torus = SlitTorus::new(r, dir).unwrap();
    let cfg = ObstacleConfig::new(r).unwrap();
    let lc = torus.partition().lc as f64 / dir.cos();
    let times: Vec<f64> = (0..20).map(|i| (i as f64 + 0.5) / 20.0 * lc).collect();
    let mc = McConfig::new(50_000, 21);
    let est = phi_dir_curve(&cfg, &times, &dir, &mc).unwrap();
    for (&t, e) in times.iter().zip(&est) {
        let lo = torus.psi(t + 0.5 * r).unwrap();
        let hi = torus.psi((t - 0.5 * r).max(0.0)).unwrap();
        let sigma = (e.value * (1.0 - e.value) / mc.samples as f64)
            .sqrt()
            .max(1e-4);
        assert!(
            lo - 4.0 * sigma <= e.value && e.value <= hi + 4.0 * sigma,
            "t = {t}: {} outside [{lo}, {hi}]",
            e.value
        );
    }
}

#[test]
fn survival_decreases_in_time() {
    let cfg = ObstacleConfig::new(0.2).unwrap();
    let m = AngularWeight::UniformOctant;
    let mc = McConfig::new(20_000, 8);
    let early = phi_m(&cfg, 1.0, &m, &mc).unwrap();
    let late = phi_m(&cfg, 8.0, &m, &mc).unwrap();
    assert!(late.value < early.value);
    assert_eq!(phi_m(&cfg, 0.0, &m, &mc).unwrap().value, 1.0);
}

#[test]
fn cesaro_average_of_constant() {
    for normalization in [CesaroNormalization::Window, CesaroNormalization::LogEps] {
        let spec = CesaroSpec {
            normalization,
            ..CesaroSpec::new(1e-3)
        };
        let ones = vec![
            Estimate {
                value: 1.0,
                stderr: 0.0
            };
            spec.grid_points
        ];
        let (avg, alt) = spec.average(&ones);
        let window = (spec.eps_star / spec.eps).ln();
        let log_eps = spec.eps.ln().abs();
        let (expect, expect_alt) = match normalization {
            CesaroNormalization::Window => (1.0, window / log_eps),
            CesaroNormalization::LogEps => (window / log_eps, 1.0),
        };
        assert!((avg.value - expect).abs() < 1e-12);
        assert!((alt.value - expect_alt).abs() < 1e-12);
    }
}

#[test]
fn cesaro_nodes_cover_window() {
    let spec = CesaroSpec::new(1e-3);
    let nodes = spec.nodes();
    assert_eq!(nodes.len(), 30);
    assert!((nodes[0].0 - 1e-3).abs() < 1e-15);
    assert_eq!(nodes[29].0, 0.25);
    let total: f64 = nodes.iter().map(|n| n.1).sum();
    assert!((total - (0.25f64 / 1e-3).ln()).abs() < 1e-12);
}

#[test]
fn cesaro_rejects_bad_inputs() {
    let m = AngularWeight::UniformOctant;
    let mc = McConfig::new(100, 1);
    assert!(matches!(
        cesaro_phi(1.0, &m, &CesaroSpec::new(1e-2), &mc),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        cesaro_phi(10.0, &m, &CesaroSpec::new(0.5), &mc),
        Err(Error::Config(_))
    ));
}

#[test]
fn bound_band_requires_long_times() {
    let cfg = ObstacleConfig::new(0.1).unwrap();
    let m = AngularWeight::UniformCircle;
    assert!(bound_band(&cfg, 5.0, &m, &McConfig::new(100, 1)).is_err());
    let est = bound_band(&cfg, 40.0, &m, &McConfig::new(20_000, 1)).unwrap();
    assert!(est.value > 0.0 && est.value < 1.0);
}
