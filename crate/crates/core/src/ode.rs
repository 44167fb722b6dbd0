//! Fixed-step classical Runge-Kutta integration.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest allowed `dt * max_rate` for the fixed-step integrators.
pub(crate) const STEP_GUARD: f64 = 0.1;

pub(crate) fn check_step(dt: f64, max_rate: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParams {
            name: "dt",
            reason: format!("must be finite and > 0 (got {dt})"),
        });
    }
    let product = dt * max_rate;
    if product > STEP_GUARD {
        return Err(Error::StepTooCoarse {
            product,
            limit: STEP_GUARD,
        });
    }
    Ok(())
}

/// Step count for covering `span` with steps no longer than `dt`.
pub(crate) fn step_count(span: f64, dt: f64) -> usize {
    ((span / dt) - 1e-9).ceil().max(1.0) as usize
}

pub(crate) fn rk4_step<S, F>(y: S, h: f64, f: &F) -> S
where
    S: Copy + Add<Output = S> + Mul<f64, Output = S>,
    F: Fn(S) -> S,
{
    let k1 = f(y);
    let k2 = f(y + k1 * (0.5 * h));
    let k3 = f(y + k2 * (0.5 * h));
    let k4 = f(y + k3 * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Three complex components, used for the regression vector
/// (X_minus, X_plus, X_z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct C3(pub [Complex64; 3]);

impl Add for C3 {
    type Output = C3;
    fn add(self, rhs: C3) -> C3 {
        C3([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl Mul<f64> for C3 {
    type Output = C3;
    fn mul(self, rhs: f64) -> C3 {
        C3([self.0[0] * rhs, self.0[1] * rhs, self.0[2] * rhs])
    }
}
