//! One-dimensional sampling grids, written `start:stop:count,log|lin`.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridParseError(pub String);

impl fmt::Display for GridParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridParseError {}

impl GridSpec {
    /// Spacing is meaningless for a single point and is stored as linear.
    pub fn new(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Self, GridParseError> {
        let g = Self {
            start,
            stop,
            count,
            spacing: if count == 1 { Spacing::Linear } else { spacing },
        };
        g.validate()?;
        Ok(g)
    }

    /// A grid holding one value.
    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            stop: value,
            count: 1,
            spacing: Spacing::Linear,
        }
    }

    fn validate(&self) -> Result<(), GridParseError> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(GridParseError("grid bounds must be finite".into()));
        }
        if self.count == 0 {
            return Err(GridParseError("grid count must be at least 1".into()));
        }
        if self.count > 1_000_000 {
            return Err(GridParseError("grid count above 1000000".into()));
        }
        if self.count == 1 && self.start != self.stop {
            return Err(GridParseError("a one-point grid needs start == stop".into()));
        }
        if self.spacing == Spacing::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(GridParseError("log grid bounds must be positive".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    return self.stop;
                }
                let t = i as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = GridParseError;

    /// Accepts `start:stop:count[,log|,lin]` (default linear) or a bare number.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if !s.contains(':') {
            let v: f64 = s
                .parse()
                .map_err(|_| GridParseError(format!("cannot parse '{s}' as a number or grid")))?;
            let g = Self::single(v);
            g.validate()?;
            return Ok(g);
        }
        let (range, spacing) = match s.split_once(',') {
            None => (s, Spacing::Linear),
            Some((r, sp)) => match sp.trim() {
                "log" => (r, Spacing::Log),
                "lin" => (r, Spacing::Linear),
                other => {
                    return Err(GridParseError(format!(
                        "unknown grid spacing '{other}' (expected log or lin)"
                    )))
                }
            },
        };
        let parts: Vec<&str> = range.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(GridParseError(format!(
                "grid '{s}' must have the form start:stop:count"
            )));
        }
        let num = |p: &str, what: &str| -> Result<f64, GridParseError> {
            p.parse::<f64>()
                .map_err(|_| GridParseError(format!("cannot parse grid {what} '{p}'")))
        };
        let count: usize = parts[2]
            .parse()
            .map_err(|_| GridParseError(format!("cannot parse grid count '{}'", parts[2])))?;
        Self::new(num(parts[0], "start")?, num(parts[1], "stop")?, count, spacing)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count == 1 {
            return write!(f, "{:e}", self.start);
        }
        let sp = match self.spacing {
            Spacing::Linear => "lin",
            Spacing::Log => "log",
        };
        write!(f, "{:e}:{:e}:{},{}", self.start, self.stop, self.count, sp)
    }
}
