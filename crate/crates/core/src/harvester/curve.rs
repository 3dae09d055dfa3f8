use crate::channel::{dbm_to_mw, mw_to_dbm};
use crate::error::{Error, Result};
use std::path::Path;

/// Measured (input, output) datapoints in mW, from sensitivity to saturation.
#[derive(Debug, Clone, PartialEq)]
pub struct HarvesterCurve {
    points: Vec<(f64, f64)>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidCurve(msg.into()))
}

impl HarvesterCurve {
    /// Validates and wraps the datapoints. The first point is the sensitivity
    /// (with zero output) and the last is the saturation point.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return invalid("a curve needs at least two points");
        }
        for (i, &(x, y)) in points.iter().enumerate() {
            if !(x.is_finite() && y.is_finite()) {
                return invalid(format!("point {i} is not finite"));
            }
            if y < 0.0 {
                return invalid(format!("point {i} has negative output {y}"));
            }
            if y > x {
                return invalid(format!("point {i}: output {y} exceeds input {x}"));
            }
        }
        if !(points[0].0 > 0.0) {
            return invalid("sensitivity must be positive");
        }
        if points[0].1 != 0.0 {
            return invalid(format!("output at sensitivity must be 0, got {}", points[0].1));
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return invalid(format!("inputs not strictly increasing at point {}", i + 1));
            }
            if w[1].1 < w[0].1 {
                return invalid(format!("outputs decrease at point {}", i + 1));
            }
        }
        Ok(Self { points })
    }

    /// Builds a curve from (input dBm, output dBm) pairs. An output of
    /// `-inf` dBm denotes zero output.
    pub fn from_dbm(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(points.iter().map(|&(a, b)| (dbm_to_mw(a), dbm_to_mw(b))).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sensitivity_mw(&self) -> f64 {
        self.points[0].0
    }

    pub fn saturation_mw(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Efficiency samples as (input dBm, output / input).
    pub fn efficiency_samples(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|&(x, y)| (mw_to_dbm(x), y / x)).collect()
    }

    /// Parses the CSV format: a header `input_dbm,output_dbm` or
    /// `input_mw,output_mw`, one datapoint per line, `#` comments. In dBm
    /// files an output of `-inf` stands for exactly zero.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut unit_dbm = None;
        let mut pts = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::Csv { line: line_no, message: format!("expected 2 fields, got {}", fields.len()) });
            }
            if unit_dbm.is_none() {
                unit_dbm = Some(match (fields[0], fields[1]) {
                    ("input_dbm", "output_dbm") => true,
                    ("input_mw", "output_mw") => false,
                    _ => {
                        return Err(Error::Csv {
                            line: line_no,
                            message: "header must be `input_dbm,output_dbm` or `input_mw,output_mw`".into(),
                        })
                    }
                });
                continue;
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Csv { line: line_no, message: format!("bad number `{s}`: {e}") })
            };
            pts.push((parse(fields[0])?, parse(fields[1])?));
        }
        match unit_dbm {
            None => Err(Error::Csv { line: 0, message: "missing header".into() }),
            Some(true) => Self::from_dbm(&pts),
            Some(false) => Self::new(pts),
        }
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    /// Serializes in the mW form of the CSV format.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("input_mw,output_mw\n");
        for &(x, y) in &self.points {
            s.push_str(&format!("{x:e},{y:e}\n"));
        }
        s
    }
}
