use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four physical rates of the driven atom.
///
/// All rates share one unit; the spontaneous decay rate `gamma` is the
/// natural scale. `detuning` is the atomic transition frequency minus the
/// laser frequency; every other frequency in the crate is an offset from
/// the laser frequency as well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    gamma: f64,
    rabi: f64,
    detuning: f64,
    linewidth: f64,
}

impl DriveParams {
    pub fn new(gamma: f64, rabi: f64, detuning: f64, linewidth: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid("gamma", "must be finite and > 0", gamma));
        }
        if !(rabi.is_finite() && rabi >= 0.0) {
            return Err(invalid("rabi", "must be finite and >= 0", rabi));
        }
        if !detuning.is_finite() {
            return Err(invalid("detuning", "must be finite", detuning));
        }
        if !(linewidth.is_finite() && linewidth >= 0.0) {
            return Err(invalid("linewidth", "must be finite and >= 0", linewidth));
        }
        Ok(Self {
            gamma,
            rabi,
            detuning,
            linewidth,
        })
    }

    /// Parameters in units of `gamma` (rabi, detuning and linewidth given as
    /// multiples of gamma = 1).
    pub fn in_gamma_units(rabi: f64, detuning: f64, linewidth: f64) -> Result<Self> {
        Self::new(1.0, rabi, detuning, linewidth)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn linewidth(&self) -> f64 {
        self.linewidth
    }

    /// Transverse relaxation rate, gamma + L.
    pub fn big_gamma(&self) -> f64 {
        self.gamma + self.linewidth
    }

    /// Longitudinal relaxation rate, 2 gamma.
    pub fn gamma_z(&self) -> f64 {
        2.0 * self.gamma
    }

    pub fn gamma_plus(&self) -> f64 {
        0.5 * (self.big_gamma() + self.gamma_z())
    }

    pub fn gamma_minus(&self) -> f64 {
        0.5 * (self.big_gamma() - self.gamma_z())
    }

    /// Largest rate in the Bloch generator; sets the fixed-step guard.
    pub fn max_rate(&self) -> f64 {
        self.big_gamma()
            .max(self.gamma_z())
            .max(self.rabi)
            .max(self.detuning.abs())
    }

    /// Lower bound on the decay rate of every transient of the averaged
    /// Bloch equations. In the real Bloch-vector basis the dissipative part
    /// is diag(-Gamma, -Gamma, -gamma_z) and the coherent part is
    /// antisymmetric, so no transient decays slower than min(Gamma, gamma_z).
    pub fn min_relaxation_rate(&self) -> f64 {
        self.big_gamma().min(self.gamma_z())
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(gamma, self.rabi, self.detuning, self.linewidth)
    }

    pub fn with_rabi(self, rabi: f64) -> Result<Self> {
        Self::new(self.gamma, rabi, self.detuning, self.linewidth)
    }

    pub fn with_detuning(self, detuning: f64) -> Result<Self> {
        Self::new(self.gamma, self.rabi, detuning, self.linewidth)
    }

    pub fn with_linewidth(self, linewidth: f64) -> Result<Self> {
        Self::new(self.gamma, self.rabi, self.detuning, linewidth)
    }

    /// Every rate multiplied by `factor` (> 0).
    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::new(
            self.gamma * factor,
            self.rabi * factor,
            self.detuning * factor,
            self.linewidth * factor,
        )
    }
}

fn invalid(name: &'static str, rule: &str, value: f64) -> Error {
    Error::InvalidParams {
        name,
        reason: format!("{rule} (got {value})"),
    }
}
