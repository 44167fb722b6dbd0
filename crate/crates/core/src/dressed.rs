//! Dressed-state picture at resonance, |+-> = (|0> +- |1>)/sqrt(2).
//!
//! Populations relax to 1/2 at rate Gamma; the two coherences rotate at
//! -+Omega, decay at Gamma_+ and are coupled through Gamma_-. Transitions
//! between like dressed states give a Lorentzian at line centre
//! (`lambda0`); the coupled cross transitions give `lambda1`, whose
//! interference produces the central hole once L >~ Omega.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{check_step, rk4_step, step_count};
use crate::params::DriveParams;
use crate::spectrum::{Method, Spectrum};

/// The strong-drive picture is flagged as out of regime below this
/// Omega / gamma.
pub const REGIME_MIN_RABI_OVER_GAMMA: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedState {
    pub r_pp: f64,
    pub r_mm: f64,
    pub r_pm: Complex64,
    pub r_mp: Complex64,
}

impl DressedState {
    pub fn new(r_pp: f64, r_mm: f64, r_pm: Complex64) -> Self {
        Self {
            r_pp,
            r_mm,
            r_pm,
            r_mp: r_pm.conj(),
        }
    }

    /// Fixed point: equal populations, no coherence.
    pub fn stationary() -> Self {
        Self::new(0.5, 0.5, Complex64::new(0.0, 0.0))
    }
}

impl Add for DressedState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            r_pp: self.r_pp + o.r_pp,
            r_mm: self.r_mm + o.r_mm,
            r_pm: self.r_pm + o.r_pm,
            r_mp: self.r_mp + o.r_mp,
        }
    }
}

impl Mul<f64> for DressedState {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Self {
            r_pp: self.r_pp * c,
            r_mm: self.r_mm * c,
            r_pm: self.r_pm * c,
            r_mp: self.r_mp * c,
        }
    }
}

fn require_resonance(params: &DriveParams) -> Result<()> {
    if params.detuning() != 0.0 {
        return Err(Error::NonzeroDetuning(params.detuning()));
    }
    Ok(())
}

pub fn in_dressed_regime(params: &DriveParams) -> bool {
    params.rabi() >= REGIME_MIN_RABI_OVER_GAMMA * params.gamma()
}

/// Time derivative of the dressed-state expectations.
pub fn dressed_rhs(state: &DressedState, params: &DriveParams) -> Result<DressedState> {
    require_resonance(params)?;
    Ok(rhs_unchecked(state, params))
}

fn rhs_unchecked(s: &DressedState, p: &DriveParams) -> DressedState {
    let g = p.big_gamma();
    let gp = p.gamma_plus();
    let gm = p.gamma_minus();
    let o = p.rabi();
    DressedState {
        r_pp: -g * s.r_pp + 0.5 * g,
        r_mm: -g * s.r_mm + 0.5 * g,
        r_pm: -Complex64::new(gp, -o) * s.r_pm + gm * s.r_mp,
        r_mp: -Complex64::new(gp, o) * s.r_mp + gm * s.r_pm,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DressedState>,
}

/// RK4 evolution of the dressed equations, sampled every step.
pub fn evolve_dressed(
    initial: &DressedState,
    params: &DriveParams,
    t_end: f64,
    dt: f64,
) -> Result<DressedTrajectory> {
    require_resonance(params)?;
    check_step(dt, params.max_rate())?;
    if !(t_end.is_finite() && t_end >= dt) {
        return Err(Error::InvalidParams {
            name: "t_end",
            reason: format!("must be finite and >= dt (got {t_end})"),
        });
    }
    let steps = step_count(t_end, dt);
    let f = |s: DressedState| rhs_unchecked(&s, params);
    let mut times = vec![0.0];
    let mut states = vec![*initial];
    let mut y = *initial;
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * dt;
        let t = if k == steps { t_end } else { k as f64 * dt };
        y = rk4_step(y, t - t_prev, &f);
        times.push(t);
        states.push(y);
    }
    Ok(DressedTrajectory { times, states })
}

/// Matrix acting on (R_{+-}, R_{-+}).
pub fn coherence_generator(params: &DriveParams) -> [[Complex64; 2]; 2] {
    let gp = params.gamma_plus();
    let gm = Complex64::new(params.gamma_minus(), 0.0);
    let o = params.rabi();
    [[-Complex64::new(gp, -o), gm], [gm, -Complex64::new(gp, o)]]
}

/// -Gamma_+ +- sqrt(Gamma_-^2 - Omega^2).
pub fn coherence_eigenvalues(params: &DriveParams) -> [Complex64; 2] {
    let gm = params.gamma_minus();
    let o = params.rabi();
    let root = Complex64::new(gm * gm - o * o, 0.0).sqrt();
    let centre = Complex64::new(-params.gamma_plus(), 0.0);
    [centre + root, centre - root]
}

fn tagged(params: &DriveParams, omegas: &[f64], values: Vec<f64>) -> Spectrum {
    let mut s = Spectrum::new(omegas.to_vec(), values, 0.0, Method::Dressed);
    s.out_of_regime = !in_dressed_regime(params);
    s
}

/// Lorentzian Gamma / (4 (Gamma^2 + omega^2)) from the population channels.
pub fn lambda0(params: &DriveParams, omegas: &[f64]) -> Result<Spectrum> {
    require_resonance(params)?;
    let g = params.big_gamma();
    let values = omegas.iter().map(|w| g / (4.0 * (g * g + w * w))).collect();
    Ok(tagged(params, omegas, values))
}

/// (1/4) Re[(gamma_z + i omega) / ((Gamma_+ + i omega)^2 + Omega^2 - Gamma_-^2)]
/// from the coupled coherence channels.
pub fn lambda1(params: &DriveParams, omegas: &[f64]) -> Result<Spectrum> {
    require_resonance(params)?;
    let gz = params.gamma_z();
    let gp = params.gamma_plus();
    let gm = params.gamma_minus();
    let o2 = params.rabi() * params.rabi();
    let values = omegas
        .iter()
        .map(|&w| {
            let s = Complex64::new(gp, w);
            (0.25 * Complex64::new(gz, w) / (s * s + o2 - gm * gm)).re
        })
        .collect();
    Ok(tagged(params, omegas, values))
}

/// Lambda0 + Lambda1.
pub fn dressed_total(params: &DriveParams, omegas: &[f64]) -> Result<Spectrum> {
    let l0 = lambda0(params, omegas)?;
    let l1 = lambda1(params, omegas)?;
    let values = l0
        .values
        .iter()
        .zip(&l1.values)
        .map(|(a, b)| a + b)
        .collect();
    Ok(tagged(params, omegas, values))
}
