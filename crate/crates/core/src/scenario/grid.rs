//! One-dimensional parameter grids with a compact text form.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A list of values, written either explicitly (`0.1, 0.2`) or as
/// `linspace(lo, hi, n)` / `logspace(lo, hi, n)` with endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    List(Vec<f64>),
    Lin { lo: f64, hi: f64, n: usize },
    Log { lo: f64, hi: f64, n: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            GridSpec::List(ref v) => v.clone(),
            GridSpec::Lin { lo, hi, n } => spaced(n, |f| lo + (hi - lo) * f),
            GridSpec::Log { lo, hi, n } => {
                let (a, b) = (lo.ln(), hi.ln());
                let mut v = spaced(n, |f| (a + (b - a) * f).exp());
                // Pin the endpoints so the stated bounds appear verbatim.
                if n >= 2 {
                    v[0] = lo;
                    v[n - 1] = hi;
                }
                v
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GridSpec::List(v) => v.len(),
            GridSpec::Lin { n, .. } | GridSpec::Log { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn spaced(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![f(0.0)],
        _ => (0..n).map(|k| f(k as f64 / (n - 1) as f64)).collect(),
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(", "))
            }
            GridSpec::Lin { lo, hi, n } => write!(f, "linspace({lo}, {hi}, {n})"),
            GridSpec::Log { lo, hi, n } => write!(f, "logspace({lo}, {hi}, {n})"),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::InvalidArgument(format!("'{}' is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(Error::InvalidArgument(format!("'{}' is not finite", s.trim())));
    }
    Ok(v)
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        for (name, log) in [("linspace", false), ("logspace", true)] {
            if let Some(rest) = s.strip_prefix(name) {
                let inner = rest
                    .trim()
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::InvalidArgument(format!("expected {name}(lo, hi, n), got '{s}'")))?;
                let parts: Vec<&str> = inner.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::InvalidArgument(format!("expected {name}(lo, hi, n), got '{s}'")));
                }
                let lo = parse_f64(parts[0])?;
                let hi = parse_f64(parts[1])?;
                let n: usize = parts[2].trim().parse().map_err(|_| {
                    Error::InvalidArgument(format!("grid size '{}' is not an integer", parts[2].trim()))
                })?;
                if n == 0 {
                    return Err(Error::InvalidArgument("grid must have at least one point".into()));
                }
                if log && !(lo > 0.0 && hi > 0.0) {
                    return Err(Error::InvalidArgument(format!("logspace bounds must be positive, got {lo}, {hi}")));
                }
                return Ok(if log { GridSpec::Log { lo, hi, n } } else { GridSpec::Lin { lo, hi, n } });
            }
        }
        let values = s.split(',').map(parse_f64).collect::<Result<Vec<f64>>>()?;
        if values.is_empty() {
            return Err(Error::InvalidArgument("grid must have at least one point".into()));
        }
        Ok(GridSpec::List(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_round_trip() {
        let g: GridSpec = "0.2, 0.316,0.5".parse().unwrap();
        assert_eq!(g.values(), vec![0.2, 0.316, 0.5]);
        assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
    }

    #[test]
    fn log_grid_pins_endpoints() {
        let g: GridSpec = "logspace(0.03, 1, 21)".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 21);
        assert_eq!((v[0], v[20]), (0.03, 1.0));
        let ratio = v[1] / v[0];
        assert!(v.windows(2).all(|w| (w[1] / w[0] - ratio).abs() < 1e-12));
        assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
    }

    #[test]
    fn lin_grid_hits_zero() {
        let v = "linspace(-0.3, 0.3, 61)".parse::<GridSpec>().unwrap().values();
        assert_eq!(v[30], 0.0);
        assert!((v[50] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn malformed_grids() {
        for bad in ["", "a, b", "linspace(1, 2)", "logspace(0, 1, 3)", "linspace(0, 1, 0)", "1, inf"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
    }
}
