//! Averaged optical Bloch equations: right-hand side, closed-form steady
//! state, fixed-step evolution and the two-time regression correlation.
//!
//! In the frame rotating with the (phase-averaged) laser,
//!
//! ```text
//! d<s->/dt = -(Gamma + i Delta) <s-> + (i/2) Omega <sz>
//! d<sz>/dt = -gamma_z <sz> + i Omega (<s-> - <s+>) - gamma_z
//! ```
//!
//! with Gamma = gamma + L and gamma_z = 2 gamma.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{check_step, rk4_step, step_count, C3};
use crate::params::DriveParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Slack on the Bloch-ball bound 4|<s->|^2 + <sz>^2 <= 1.
pub const BLOCH_BALL_SLACK: f64 = 1e-9;

/// Threshold on |rhs| below which an evolving state counts as stationary.
pub const STATIONARY_THRESHOLD: f64 = 1e-10;

/// Expectation values (<s->, <sz>); <s+> is always conj(<s->).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub sigma_minus: Complex64,
    pub sigma_z: f64,
}

impl BlochState {
    pub fn new(sigma_minus: Complex64, sigma_z: f64) -> Self {
        Self {
            sigma_minus,
            sigma_z,
        }
    }

    pub fn ground() -> Self {
        Self::new(Complex64::new(0.0, 0.0), -1.0)
    }

    pub fn excited() -> Self {
        Self::new(Complex64::new(0.0, 0.0), 1.0)
    }

    pub fn sigma_plus(&self) -> Complex64 {
        self.sigma_minus.conj()
    }

    /// 4|<s->|^2 + <sz>^2, the squared length of the real Bloch vector.
    pub fn bloch_norm_sq(&self) -> f64 {
        4.0 * self.sigma_minus.norm_sqr() + self.sigma_z * self.sigma_z
    }

    pub fn is_physical(&self) -> bool {
        self.sigma_z.abs() <= 1.0 + BLOCH_BALL_SLACK
            && self.bloch_norm_sq() <= 1.0 + BLOCH_BALL_SLACK
    }

    pub fn conj(&self) -> Self {
        Self::new(self.sigma_minus.conj(), self.sigma_z)
    }

    /// Image under Delta -> -Delta: <s-> -> -conj(<s->), <sz> kept. The
    /// sign is needed because conjugation also flips the drive term.
    pub fn reflected(&self) -> Self {
        Self::new(-self.sigma_minus.conj(), self.sigma_z)
    }

    /// Excited-state population (1 + <sz>)/2.
    pub fn excited_population(&self) -> f64 {
        0.5 * (1.0 + self.sigma_z)
    }

    fn as_vector(self) -> BlochDerivative {
        BlochDerivative {
            sigma_minus: self.sigma_minus,
            sigma_z: self.sigma_z,
        }
    }

    fn from_vector(v: BlochDerivative) -> Self {
        Self::new(v.sigma_minus, v.sigma_z)
    }
}

/// Time derivative of a [`BlochState`]. Also serves as the vector-space
/// element the integrator works with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDerivative {
    pub sigma_minus: Complex64,
    pub sigma_z: f64,
}

impl BlochDerivative {
    pub fn norm(&self) -> f64 {
        (self.sigma_minus.norm_sqr() + self.sigma_z * self.sigma_z).sqrt()
    }
}

impl Add for BlochDerivative {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            sigma_minus: self.sigma_minus + rhs.sigma_minus,
            sigma_z: self.sigma_z + rhs.sigma_z,
        }
    }
}

impl Mul<f64> for BlochDerivative {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self {
            sigma_minus: self.sigma_minus * rhs,
            sigma_z: self.sigma_z * rhs,
        }
    }
}

pub fn bloch_rhs(state: &BlochState, params: &DriveParams) -> BlochDerivative {
    rhs_raw(state.sigma_minus, state.sigma_z, params)
}

fn rhs_raw(sm: Complex64, sz: f64, p: &DriveParams) -> BlochDerivative {
    let damping = Complex64::new(p.big_gamma(), p.detuning());
    let d_sm = -damping * sm + I * (0.5 * p.rabi() * sz);
    // i Omega (s- - conj(s-)) = i Omega (2 i Im s-) = -2 Omega Im s-
    let d_sz = -p.gamma_z() * sz - 2.0 * p.rabi() * sm.im - p.gamma_z();
    BlochDerivative {
        sigma_minus: d_sm,
        sigma_z: d_sz,
    }
}

/// Closed-form fixed point of the averaged Bloch equations.
pub fn steady_state(params: &DriveParams) -> BlochState {
    let g = params.big_gamma();
    let d = params.detuning();
    let gz = params.gamma_z();
    let o2 = params.rabi() * params.rabi();
    let lorentz = g * g + d * d;
    let sigma_z = -gz * lorentz / (gz * lorentz + o2 * g);
    let sigma_minus = I * (0.5 * params.rabi() * sigma_z) / Complex64::new(g, d);
    BlochState::new(sigma_minus, sigma_z)
}

/// Sampled time evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
}

impl Trajectory {
    pub fn last(&self) -> &BlochState {
        self.states
            .last()
            .expect("trajectory holds the initial sample")
    }
}

/// Classical RK4 integration of the averaged Bloch equations from
/// `initial`, sampled at every step (the initial state included). The last
/// step is shortened so the final sample sits exactly at `t_end`.
pub fn evolve(
    initial: &BlochState,
    params: &DriveParams,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    check_step(dt, params.max_rate())?;
    if !(t_end.is_finite() && t_end >= dt) {
        return Err(Error::InvalidParams {
            name: "t_end",
            reason: format!("must be finite and >= dt (got {t_end})"),
        });
    }
    let steps = step_count(t_end, dt);
    let f = |v: BlochDerivative| rhs_raw(v.sigma_minus, v.sigma_z, params);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = initial.as_vector();
    times.push(0.0);
    states.push(*initial);
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * dt;
        let t = if k == steps { t_end } else { k as f64 * dt };
        y = rk4_step(y, t - t_prev, &f);
        times.push(t);
        states.push(BlochState::from_vector(y));
    }
    Ok(Trajectory { times, states })
}

/// Integrates until |rhs| drops below [`STATIONARY_THRESHOLD`]; returns the
/// state reached and the elapsed time. Fails if `t_max` is hit first.
pub fn relax(
    initial: &BlochState,
    params: &DriveParams,
    dt: f64,
    t_max: f64,
) -> Result<(BlochState, f64)> {
    check_step(dt, params.max_rate())?;
    let f = |v: BlochDerivative| rhs_raw(v.sigma_minus, v.sigma_z, params);
    let mut y = initial.as_vector();
    let mut t = 0.0;
    let max_steps = step_count(t_max, dt);
    for k in 0..=max_steps {
        if f(y).norm() < STATIONARY_THRESHOLD {
            return Ok((BlochState::from_vector(y), t));
        }
        if k == max_steps {
            break;
        }
        y = rk4_step(y, dt, &f);
        t += dt;
    }
    Err(Error::NotStationary { t_max })
}

/// Generator of (<s->, <s+>, <sz>) without the constant drive term.
pub fn generator(params: &DriveParams) -> [[Complex64; 3]; 3] {
    let g = params.big_gamma();
    let d = params.detuning();
    let o = params.rabi();
    let zero = Complex64::new(0.0, 0.0);
    [
        [-Complex64::new(g, d), zero, I * (0.5 * o)],
        [zero, -Complex64::new(g, -d), -I * (0.5 * o)],
        [I * o, -I * o, Complex64::new(-params.gamma_z(), 0.0)],
    ]
}

/// Steady-state regression vector at zero delay for B = s-:
/// (<s- s->, <s+ s->, <sz s->) = (0, (1 + <sz>)/2, -<s->).
pub fn regression_initial(ss: &BlochState) -> [Complex64; 3] {
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(ss.excited_population(), 0.0),
        -ss.sigma_minus,
    ]
}

/// Constant term of the regression equations: the -gamma_z of the inversion
/// equation times the steady <s->.
pub fn regression_source(params: &DriveParams, ss: &BlochState) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    [zero, zero, -params.gamma_z() * ss.sigma_minus]
}

/// Steady-state correlation g(tau) = <s+(t + tau) s-(t)> sampled on a
/// uniform delay grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub taus: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Long-delay limit |<s->_s|^2.
    pub elastic_limit: f64,
}

impl CorrelationTrace {
    pub fn g0(&self) -> Complex64 {
        self.values.first().copied().unwrap_or_default()
    }

    /// |g(tau_max) - g_inf|.
    pub fn tail_residual(&self) -> f64 {
        self.values
            .last()
            .map(|v| (v - self.elastic_limit).norm())
            .unwrap_or(0.0)
    }
}

/// Quantum-regression correlation, integrated with RK4 from the steady
/// state. Samples are taken every `dtau` up to `tau_max` (rounded up to a
/// whole number of steps).
pub fn correlation(params: &DriveParams, tau_max: f64, dtau: f64) -> Result<CorrelationTrace> {
    check_step(dtau, params.max_rate())?;
    if !(tau_max.is_finite() && tau_max >= dtau) {
        return Err(Error::InvalidParams {
            name: "tau_max",
            reason: format!("must be finite and >= dtau (got {tau_max})"),
        });
    }
    let ss = steady_state(params);
    let m = generator(params);
    let b = regression_source(params, &ss);
    let f = |u: C3| {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (row, o) in m.iter().zip(out.iter_mut()) {
            *o = row[0] * u.0[0] + row[1] * u.0[1] + row[2] * u.0[2];
        }
        C3([out[0] + b[0], out[1] + b[1], out[2] + b[2]])
    };
    let steps = step_count(tau_max, dtau);
    let mut taus = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut u = C3(regression_initial(&ss));
    taus.push(0.0);
    values.push(u.0[1]);
    for k in 1..=steps {
        u = rk4_step(u, dtau, &f);
        taus.push(k as f64 * dtau);
        values.push(u.0[1]);
    }
    Ok(CorrelationTrace {
        taus,
        values,
        elastic_limit: ss.sigma_minus.norm_sqr(),
    })
}

/// Delay window and step used when no explicit values are given:
/// tau_max = 20 / min(Gamma, gamma_z), dtau = min(1e-3, 0.05 / max_rate).
pub fn default_correlation_steps(params: &DriveParams) -> (f64, f64) {
    let tau_max = 20.0 / params.min_relaxation_rate();
    let dtau = (0.05 / params.max_rate()).min(1e-3);
    (tau_max, dtau)
}
