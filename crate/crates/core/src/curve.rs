//! Sampled survival curves and their CSV form.

use std::io::{self, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub value: f64,
    pub stderr: Option<f64>,
}

/// `(t, value[, stderr])` samples of a survival probability.
///
/// Times are strictly increasing and values lie in `[0, 1]`. Exact values
/// (no standard error) must be nonincreasing; Monte Carlo values may fluctuate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SurvivalCurve {
    points: Vec<CurvePoint>,
}

impl SurvivalCurve {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, value: f64, stderr: Option<f64>) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Config(format!(
                "survival value {value} outside [0, 1]"
            )));
        }
        if let Some(se) = stderr {
            if !(se >= 0.0) {
                return Err(Error::Config(format!("negative standard error {se}")));
            }
        }
        if let Some(last) = self.points.last() {
            if !(t > last.t) {
                return Err(Error::Config(format!(
                    "time {t} does not follow {}",
                    last.t
                )));
            }
            if stderr.is_none() && last.stderr.is_none() && value > last.value {
                return Err(Error::Config(format!(
                    "exact survival increases from {} to {value} at t = {t}",
                    last.value
                )));
            }
        }
        self.points.push(CurvePoint { t, value, stderr });
        Ok(())
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes `t,value,stderr` rows; a missing standard error is an empty cell.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,value,stderr")?;
        for p in &self.points {
            let se = p.stderr.map(format_float).unwrap_or_default();
            writeln!(
                out,
                "{},{},{}",
                format_float(p.t),
                format_float(p.value),
                se
            )?;
        }
        Ok(())
    }
}

/// Scientific notation with 17 significant digits, enough to round-trip any
/// double.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_order_times() {
        let mut c = SurvivalCurve::new();
        c.push(0.0, 1.0, None).unwrap();
        assert!(c.push(0.0, 0.9, None).is_err());
        assert!(c.push(1.0, 1.2, None).is_err());
        c.push(1.0, 0.5, None).unwrap();
        assert!(c.push(2.0, 0.6, None).is_err());
        c.push(2.0, 0.6, Some(0.1)).unwrap();
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn csv_round_trips() {
        let mut c = SurvivalCurve::new();
        c.push(0.1, 1.0 / 3.0, None).unwrap();
        c.push(0.2, 0.25, Some(0.01)).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,value,stderr");
        assert!(lines[1].ends_with(','));
        let v: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
    }
}
