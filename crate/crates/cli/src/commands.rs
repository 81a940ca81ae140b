//! One function per subcommand. Each returns the CSV files it produced, as
//! `(file name, contents)`, and a one-line summary for the terminal.

use std::f64::consts::PI;
use std::fmt::Write as _;

use lorentz_core::cf_core::{error_product, expand};
use lorentz_core::curve::{format_float as fmt, SurvivalCurve};
use lorentz_core::distributions::{
    cesaro_phi, phi_dir_curve, phi_m, slit_survival_curve, CesaroNormalization, CesaroSpec,
};
use lorentz_core::ergodic_limits::{
    lambda_asymptote, lambda_exact, n_growth, LimitCurve, LEVY_RATE,
};
use lorentz_core::kinetic::{moment_compare, CosineBump, Survival};
use lorentz_core::mc::{batch_rng, derive_seed, McConfig};
use lorentz_core::ray_tracer::{trace, ObstacleConfig};
use lorentz_core::slit_geometry::{Direction, SlitTorus};
use rand::Rng;

use crate::args::*;
use crate::CliError;

pub struct Output {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV writers emit UTF-8"))
}

fn grid(t_max: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| {
            if i == points - 1 {
                t_max
            } else {
                t_max * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

pub fn cf(a: &CfArgs) -> Result<Output, CliError> {
    let cf = expand(a.alpha, a.depth as usize)?;
    let last = cf.last_index();
    let mut out = String::from("n,a,p,q,d,qd_residual,product_residual\n");
    for n in 0..=last {
        let a_n = if (1..=cf.depth()).contains(&n) {
            cf.a(n).to_string()
        } else {
            String::new()
        };
        let qd = if n < last {
            fmt(cf.qd_residual(n))
        } else {
            String::new()
        };
        let product = error_product(a.alpha, n)?;
        let rel = if cf.d(n) > 0.0 {
            fmt((product - cf.d(n)).abs() / cf.d(n))
        } else {
            String::new()
        };
        writeln!(
            out,
            "{n},{a_n},{},{},{},{qd},{rel}",
            cf.p(n),
            cf.q(n),
            fmt(cf.d(n))
        )
        .unwrap();
    }
    let summary = format!(
        "{} partial quotients{}",
        cf.depth(),
        if cf.is_terminated() {
            ", expansion terminated"
        } else {
            ""
        }
    );
    Ok(Output {
        files: vec![("cf.csv".into(), out)],
        summary,
    })
}

pub fn partition(a: &PartitionArgs) -> Result<Output, CliError> {
    let dir = a.dir.direction()?;
    let torus = SlitTorus::new(a.r, dir)?;
    let p = torus.partition();
    let mut out = String::from("alpha,theta,r,big_r,n,k,la,lb,lc,sa,sb,sc,area\n");
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt(dir.alpha()),
        fmt(dir.theta()),
        fmt(a.r),
        fmt(p.big_r),
        p.cell.n,
        p.cell.k,
        p.la,
        p.lb,
        p.lc,
        fmt(p.sa),
        fmt(p.sb),
        fmt(p.sc),
        fmt(p.area())
    )
    .unwrap();
    let summary = format!(
        "cell (n, k) = ({}, {}), lengths {} {} {}, area {:.3e} off 1",
        p.cell.n,
        p.cell.k,
        p.la,
        p.lb,
        p.lc,
        p.area() - 1.0
    );
    Ok(Output {
        files: vec![("partition.csv".into(), out)],
        summary,
    })
}

pub fn psi_curve(a: &PsiCurveArgs, workers: usize) -> Result<Output, CliError> {
    let dir = a.dir.direction()?;
    let torus = SlitTorus::new(a.r, dir)?;
    let t_max = a.tmax.unwrap_or(torus.partition().lc as f64 / dir.cos());
    let times = grid(t_max, a.points);
    let mut curve = SurvivalCurve::new();
    for &t in &times {
        curve.push(t, torus.psi(t)?, None)?;
    }
    let mut files = vec![("psi-curve.csv".into(), csv_bytes(|b| curve.write_csv(b))?)];
    if let Some(samples) = a.samples {
        let mc = McConfig::new(samples, a.seed).with_workers(workers);
        let est = slit_survival_curve(&torus, &times, &mc)?;
        let mut sampled = SurvivalCurve::new();
        for (&t, e) in times.iter().zip(&est) {
            sampled.push(t, e.value, Some(e.stderr))?;
        }
        files.push((
            "psi-curve-mc.csv".into(),
            csv_bytes(|b| sampled.write_csv(b))?,
        ));
    }
    Ok(Output {
        files,
        summary: format!("{} times up to {t_max:.6}", times.len()),
    })
}

pub fn tau(a: &TauArgs) -> Result<Output, CliError> {
    let cfg = ObstacleConfig::new(a.r)?;
    let v = [a.angle.cos(), a.angle.sin()];
    let hit = trace(&cfg, a.x, v, a.tmax)?;
    let mut out = String::from("x,y,angle,tau,hit_i,hit_j\n");
    let (t, i, j, summary) = match hit {
        Some(h) => (
            fmt(h.t),
            h.center[0].to_string(),
            h.center[1].to_string(),
            format!(
                "hits the disk at ({}, {}) after {:.12}",
                h.center[0], h.center[1], h.t
            ),
        ),
        None => (
            String::new(),
            String::new(),
            String::new(),
            format!("no obstacle within t = {}", a.tmax),
        ),
    };
    writeln!(
        out,
        "{},{},{},{t},{i},{j}",
        fmt(a.x[0]),
        fmt(a.x[1]),
        fmt(a.angle)
    )
    .unwrap();
    Ok(Output {
        files: vec![("tau.csv".into(), out)],
        summary,
    })
}

pub fn phi_curve(a: &PhiCurveArgs, workers: usize) -> Result<Output, CliError> {
    let cfg = ObstacleConfig::new(a.r)?;
    let mc = McConfig::new(a.samples, a.seed).with_workers(workers);
    let times = grid(a.tmax, a.points);
    let fixed = match (a.alpha, a.theta) {
        (Some(alpha), _) => Some(Direction::from_slope(alpha)?),
        (None, Some(theta)) => Some(Direction::from_angle(theta)?),
        (None, None) => None,
    };
    let est = match fixed {
        Some(dir) => phi_dir_curve(&cfg, &times, &dir, &mc)?,
        None => {
            let m = a.weight.angular();
            times
                .iter()
                .enumerate()
                .map(|(i, &t)| phi_m(&cfg, t, &m, &mc.with_seed(derive_seed(a.seed, i as u64))))
                .collect::<lorentz_core::Result<Vec<_>>>()?
        }
    };
    let mut curve = SurvivalCurve::new();
    for (&t, e) in times.iter().zip(&est) {
        curve.push(t, e.value, Some(e.stderr))?;
    }
    let last = est.last().expect("at least two grid times");
    Ok(Output {
        files: vec![("phi-curve.csv".into(), csv_bytes(|b| curve.write_csv(b))?)],
        summary: format!(
            "survival {:.6} +- {:.1e} at t = {}",
            last.value, last.stderr, a.tmax
        ),
    })
}

pub fn cesaro(a: &CesaroArgs, workers: usize) -> Result<Output, CliError> {
    let spec = CesaroSpec {
        grid_points: a.grid_points,
        normalization: if a.log_eps_normalization {
            CesaroNormalization::LogEps
        } else {
            CesaroNormalization::Window
        },
        ..CesaroSpec::new(a.eps)
    };
    let mc = McConfig::new(a.samples, a.seed).with_workers(workers);
    let est = cesaro_phi(a.tstar, &a.weight.angular(), &spec, &mc)?;
    let mut nodes = String::from("r,weight,value,stderr\n");
    for n in &est.nodes {
        writeln!(
            nodes,
            "{},{},{},{}",
            fmt(n.r),
            fmt(n.weight),
            fmt(n.estimate.value),
            fmt(n.estimate.stderr)
        )
        .unwrap();
    }
    let lambda = lambda_exact(a.tstar)?;
    let mut summary =
        String::from("t_star,eps,average,stderr,alternate,alternate_stderr,lambda,asymptote\n");
    writeln!(
        summary,
        "{},{},{},{},{},{},{},{}",
        fmt(a.tstar),
        fmt(a.eps),
        fmt(est.value.value),
        fmt(est.value.stderr),
        fmt(est.alternate.value),
        fmt(est.alternate.stderr),
        fmt(lambda),
        fmt(lambda_asymptote(a.tstar)?)
    )
    .unwrap();
    Ok(Output {
        files: vec![
            ("cesaro.csv".into(), nodes),
            ("cesaro-summary.csv".into(), summary),
        ],
        summary: format!(
            "average {:.6e} +- {:.1e}, limit {lambda:.6e} ({:+.2}%)",
            est.value.value,
            est.value.stderr,
            100.0 * (est.value.value / lambda - 1.0)
        ),
    })
}

pub fn lambda_curve(a: &LambdaCurveArgs) -> Result<Output, CliError> {
    if a.tmax <= a.tmin {
        return Err(CliError::Usage(format!(
            "--tmax ({}) must exceed --tmin ({})",
            a.tmax, a.tmin
        )));
    }
    let curve = LimitCurve::log_spaced(a.tmin, a.tmax, a.points)?;
    let (t, l) = *curve.entries().last().expect("at least two points");
    Ok(Output {
        files: vec![(
            "lambda-curve.csv".into(),
            csv_bytes(|b| curve.write_csv(b, a.m_sup))?,
        )],
        summary: format!(
            "t* lambda = {:.6} at t* = {t}, leading term {:.6}",
            t * l,
            2.0 / (PI * PI)
        ),
    })
}

pub fn nstat(a: &NstatArgs) -> Result<Output, CliError> {
    let alphas: Vec<f64> = match a.alpha {
        Some(alpha) => vec![alpha],
        None => {
            let mut rng = batch_rng(a.seed, 0);
            let mut v = Vec::with_capacity(a.samples as usize);
            while v.len() < a.samples as usize {
                let x: f64 = rng.random();
                if x > 0.0 {
                    v.push(x);
                }
            }
            v
        }
    };
    let mut out = String::from("alpha,n,rate\n");
    let mut rates = Vec::with_capacity(alphas.len());
    for &alpha in &alphas {
        let rate = n_growth(alpha, a.eps)?;
        let n = (rate * a.eps.ln().abs()).round() as u64;
        writeln!(out, "{},{n},{}", fmt(alpha), fmt(rate)).unwrap();
        rates.push(rate);
    }
    rates.sort_by(f64::total_cmp);
    let mid = rates.len() / 2;
    let median = if rates.len() % 2 == 0 {
        0.5 * (rates[mid - 1] + rates[mid])
    } else {
        rates[mid]
    };
    Ok(Output {
        files: vec![("nstat.csv".into(), out)],
        summary: format!("median rate {median:.5}, almost-sure rate {LEVY_RATE:.5}"),
    })
}

pub fn kinetic(a: &KineticArgs, workers: usize) -> Result<Output, CliError> {
    let fin = CosineBump::new(a.fin_center, a.fin_half_width, a.fin_amplitude)?;
    let chi = CosineBump::new(a.chi_center, a.chi_half_width, a.chi_amplitude)?;
    let spec = CesaroSpec {
        grid_points: a.grid_points,
        ..CesaroSpec::new(a.eps)
    };
    let mc = McConfig::new(a.samples, a.seed).with_workers(workers);
    let survival = match a.survival {
        SurvivalMode::Traced => Survival::Traced,
        SurvivalMode::Forced => Survival::Forced,
    };
    let mut out = String::from(
        "t,averaged,limit,abs_error,averaged_stderr,limit_stderr,averaged_alternate\n",
    );
    let mut last = None;
    for &t in &a.t {
        let m = moment_compare(&fin, &chi, t, &spec, &mc, survival)?;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(t),
            fmt(m.averaged.value),
            fmt(m.limit.value),
            fmt(m.abs_error()),
            fmt(m.averaged.stderr),
            fmt(m.limit.stderr),
            fmt(m.averaged_alternate.value)
        )
        .unwrap();
        last = Some((t, m));
    }
    let (t, m) = last.expect("clap requires at least one time");
    Ok(Output {
        files: vec![("kinetic.csv".into(), out)],
        summary: format!(
            "t = {t}: averaged {:.5e}, limit {:.5e}",
            m.averaged.value, m.limit.value
        ),
    })
}
