use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::DriveParams;

/// Points on the default spectrum grid.
pub const DEFAULT_POINTS: usize = 2001;

/// Uniform grid of frequency offsets from the laser frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    min: f64,
    max: f64,
    points: usize,
}

impl FrequencyGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::GridTooSmall { points, min: 2 });
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidGrid(format!(
                "need finite omega_min < omega_max (got {min}, {max})"
            )));
        }
        Ok(Self { min, max, points })
    }

    pub fn symmetric(half_width: f64, points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, points)
    }

    /// `DEFAULT_POINTS` points over +-4 max(Gamma, sqrt(Omega^2 + Delta^2)).
    pub fn default_for(params: &DriveParams) -> Self {
        let half = default_half_width(params);
        Self::symmetric(half, DEFAULT_POINTS).expect("half width is positive")
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    /// Same span, `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            points: (self.points - 1) * factor.max(1) + 1,
            ..self.clone()
        }
    }

    /// Grid values. Symmetric grids are built as `half * (2k - (n - 1)) / (n - 1)`
    /// so that omega_k = -omega_{n-1-k} holds bit for bit.
    pub fn omegas(&self) -> Vec<f64> {
        let n = self.points;
        let denom = (n - 1) as f64;
        if self.min == -self.max {
            let half = self.max;
            (0..n)
                .map(|k| half * (2.0 * k as f64 - denom) / denom)
                .collect()
        } else {
            let span = self.max - self.min;
            (0..n)
                .map(|k| {
                    if k == n - 1 {
                        self.max
                    } else {
                        self.min + span * (k as f64 / denom)
                    }
                })
                .collect()
        }
    }
}

pub fn default_half_width(params: &DriveParams) -> f64 {
    4.0 * params
        .big_gamma()
        .max(params.rabi().hypot(params.detuning()))
}

/// Step of a uniform grid, or an error if the samples are not uniform to
/// within 1e-9 relative.
pub fn uniform_step(omegas: &[f64]) -> Result<f64> {
    if omegas.len() < 2 {
        return Err(Error::GridTooSmall {
            points: omegas.len(),
            min: 2,
        });
    }
    let h = (omegas[omegas.len() - 1] - omegas[0]) / (omegas.len() - 1) as f64;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidGrid("grid must be ascending".into()));
    }
    let scale = omegas[0].abs().max(omegas[omegas.len() - 1].abs()).max(h);
    for w in omegas.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * scale {
            return Err(Error::InvalidGrid("grid must be uniform".into()));
        }
    }
    Ok(h)
}

pub fn is_symmetric(omegas: &[f64]) -> bool {
    let n = omegas.len();
    let scale = omegas
        .iter()
        .fold(0.0f64, |m, w| m.max(w.abs()))
        .max(f64::MIN_POSITIVE);
    (0..n).all(|k| (omegas[k] + omegas[n - 1 - k]).abs() <= 1e-9 * scale)
}
