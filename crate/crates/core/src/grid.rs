use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable that overrides [`DyadicGrid::default`].
pub const GRID_ENV: &str = "KDIV_GRID";

/// Log-spaced sample points `t_j = 2^(j / per_octave)` for
/// `j = min_exp * per_octave ..= max_exp * per_octave`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicGrid {
    pub min_exp: i32,
    pub max_exp: i32,
    pub per_octave: u32,
}

impl Default for DyadicGrid {
    fn default() -> Self {
        DyadicGrid { min_exp: -20, max_exp: 20, per_octave: 4 }
    }
}

impl DyadicGrid {
    pub fn new(min_exp: i32, max_exp: i32, per_octave: u32) -> Result<Self> {
        let g = DyadicGrid { min_exp, max_exp, per_octave };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_octave == 0 {
            return Err(Error::invalid("grid needs at least one sample per octave"));
        }
        if self.min_exp > self.max_exp {
            return Err(Error::invalid(format!(
                "empty grid: min_exp {} > max_exp {}",
                self.min_exp, self.max_exp
            )));
        }
        if self.min_exp < -500 || self.max_exp > 500 {
            return Err(Error::invalid("grid exponents must lie in [-500, 500]"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max_exp - self.min_exp) as usize) * self.per_octave as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Width of one cell in `ln t`.
    pub fn log_step(&self) -> f64 {
        std::f64::consts::LN_2 / self.per_octave as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let s = self.per_octave as i64;
        (self.min_exp as i64 * s..=self.max_exp as i64 * s)
            .map(|j| node(j, s))
            .collect()
    }

    /// Cell boundaries in `t`: node `j` owns `[edges[j], edges[j + 1]]`.
    pub fn cell_edges(&self) -> Vec<f64> {
        let s = self.per_octave as i64;
        let lo = self.min_exp as i64 * s;
        let hi = self.max_exp as i64 * s;
        (lo..=hi + 1)
            .map(|j| 2f64.powf((j as f64 - 0.5) / s as f64))
            .collect()
    }

    /// Parses either the JSON form `{"min_exp":..,"max_exp":..,"per_octave":..}`
    /// or the compact form `min:max:per_octave`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let g: DyadicGrid = if text.starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("grid: {e}")))?
        } else {
            let parts: Vec<&str> = text.split([':', ',']).map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::invalid(format!(
                    "grid `{text}`: expected min:max:per_octave"
                )));
            }
            let bad = |_| Error::invalid(format!("grid `{text}`: not an integer"));
            DyadicGrid {
                min_exp: parts[0].parse().map_err(bad)?,
                max_exp: parts[1].parse().map_err(bad)?,
                per_octave: parts[2].parse().map_err(bad)?,
            }
        };
        g.validate()?;
        Ok(g)
    }

    /// The default grid unless `KDIV_GRID` is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(GRID_ENV) {
            Ok(s) if !s.trim().is_empty() => DyadicGrid::parse(&s),
            _ => Ok(DyadicGrid::default()),
        }
    }
}

// Exact powers of two at octave boundaries keep knots like t = 1 exact.
fn node(j: i64, s: i64) -> f64 {
    if j % s == 0 {
        2f64.powi((j / s) as i32)
    } else {
        2f64.powf(j as f64 / s as f64)
    }
}
