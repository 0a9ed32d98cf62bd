//! Log–log fits and uniform-grid parsing shared by the checks and the CLI.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Result of fitting `remainder ≈ C x^p` or of bounding a remainder by an
/// envelope on a sample grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    /// `(x, remainder)` pairs.
    pub samples: Vec<(f64, f64)>,
    pub exponent: Option<f64>,
    pub constant: Option<f64>,
    /// Largest `remainder / envelope` when an envelope was supplied.
    pub max_ratio: Option<f64>,
    /// Fewer than two distinct abscissae: no slope can be fitted.
    pub degenerate: bool,
}

impl ExpansionReport {
    pub fn from_samples(samples: Vec<(f64, f64)>) -> Self {
        let fit = loglog_fit(&samples);
        Self {
            degenerate: fit.is_none(),
            exponent: fit.map(|f| f.0),
            constant: fit.map(|f| f.1),
            samples,
            max_ratio: None,
        }
    }

    pub fn with_envelope(mut self, envelope: impl Fn(f64) -> f64) -> Self {
        self.max_ratio = self.samples.iter().map(|(x, r)| r / envelope(*x)).reduce(f64::max);
        self
    }
}

/// Least-squares slope and constant of `log y = p log x + log C`. `None` when
/// fewer than two distinct positive abscissae carry positive values.
pub fn loglog_fit(samples: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_fit(&pts).map(|(slope, intercept)| (slope, intercept.exp()))
}

/// Ordinary least squares `y = a x + b`; `None` for a degenerate abscissa set.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-300 * n {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// `a:b:n`, meaning `n` uniformly spaced points from `a` to `b` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            1 => vec![self.start],
            n => (0..n)
                .map(|k| self.start + (self.end - self.start) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("grid {s:?} is not of the form a:b:n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(start.is_finite() && end.is_finite()) || start > end {
            return Err(Error::InvalidArgument(format!("grid {s:?} needs finite a <= b")));
        }
        Ok(Self { start, end, count })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_power_law() {
        let s: Vec<(f64, f64)> = [0.1, 0.2, 0.4].iter().map(|x| (*x, 3.0 * x * x * x)).collect();
        let (p, c) = loglog_fit(&s).unwrap();
        assert!((p - 3.0).abs() < 1e-12 && (c - 3.0).abs() < 1e-12);
        assert!(loglog_fit(&[(0.5, 1.0), (0.5, 2.0)]).is_none());
        assert!(ExpansionReport::from_samples(vec![(0.5, 1.0)]).degenerate);
    }

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0.01:0.3:30".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 30);
        assert_eq!(p[0], 0.01);
        assert!((p[29] - 0.3).abs() < 1e-15);
        assert_eq!("2:2:1".parse::<GridSpec>().unwrap().points(), vec![2.0]);
        assert!("1:0:3".parse::<GridSpec>().is_err());
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!(matches!("0:1:0".parse::<GridSpec>(), Err(Error::EmptyGrid)));
    }
}
