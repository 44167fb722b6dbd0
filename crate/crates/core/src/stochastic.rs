//! Monte Carlo over laser phase paths.
//!
//! The laser phase performs a Wiener walk with increments drawn from
//! Normal(0, 2 L dt). For each path the Bloch equations are integrated with
//! the phase held at its midpoint value over every step; only the atomic
//! dephasing gamma appears, the extra L of the averaged equations must come
//! out of the ensemble average. Coherences are rotated by e^{i phi(t)} before
//! averaging so results live in the same frame as the averaged equations.
//!
//! Paths are keyed by (seed, realization index) through ChaCha streams and
//! all reductions run in realization order, so results do not depend on the
//! number of worker threads.

use std::ops::Add;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{check_step, rk4_step, step_count, C3};
use crate::params::DriveParams;
use crate::spectrum::{fourier_re, Method, Spectrum};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub const MIN_REALIZATIONS: usize = 100;
/// Largest allowed dt * L.
pub const NOISE_RESOLUTION: f64 = 0.01;
/// Required t_relax times the slowest decay rate of the averaged equations.
pub const RELAXATION_PRODUCT: f64 = 10.0;
pub const DEFAULT_SAMPLES: usize = 20;
/// Batches used for the spectrum's standard error.
pub const SPECTRUM_BATCHES: usize = 20;
/// Trailing fraction of the delay window averaged for the long-delay limit.
const TAIL_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePath {
    pub dt: f64,
    pub increments: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl PhasePath {
    /// Cumulative phase, starting from 0, one entry longer than the
    /// increments.
    pub fn phases(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.increments.len() + 1);
        let mut phi = 0.0;
        out.push(phi);
        for d in &self.increments {
            phi += d;
            out.push(phi);
        }
        out
    }
}

/// Phase path on stream 0 of `seed`.
pub fn simulate_phase_path(linewidth: f64, dt: f64, steps: usize, seed: u64) -> PhasePath {
    simulate_phase_path_stream(linewidth, dt, steps, seed, 0)
}

/// Panics unless `dt > 0`, `steps >= 1` and `linewidth >= 0`.
pub fn simulate_phase_path_stream(
    linewidth: f64,
    dt: f64,
    steps: usize,
    seed: u64,
    stream: u64,
) -> PhasePath {
    assert!(dt > 0.0 && dt.is_finite(), "dt must be finite and > 0");
    assert!(steps >= 1, "steps must be >= 1");
    assert!(
        linewidth >= 0.0 && linewidth.is_finite(),
        "linewidth must be finite and >= 0"
    );
    let increments = if linewidth == 0.0 {
        vec![0.0; steps]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let normal = Normal::new(0.0, (2.0 * linewidth * dt).sqrt()).expect("finite sd");
        (0..steps).map(|_| normal.sample(&mut rng)).collect()
    };
    PhasePath {
        dt,
        increments,
        seed,
        stream,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEstimate<T> {
    pub mean: T,
    pub stderr: f64,
    pub n: usize,
}

/// Sum in a fixed binary tree over the slice order.
pub fn pairwise_sum<T: Copy + Default + Add<Output = T>>(xs: &[T]) -> T {
    if xs.len() <= 8 {
        return xs.iter().fold(T::default(), |a, &b| a + b);
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn estimate_real(xs: &[f64]) -> EnsembleEstimate<f64> {
    let n = xs.len();
    let mean = pairwise_sum(xs) / n as f64;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    EnsembleEstimate {
        mean,
        stderr: standard_error(pairwise_sum(&dev), n),
        n,
    }
}

fn estimate_complex(xs: &[Complex64]) -> EnsembleEstimate<Complex64> {
    let n = xs.len();
    let mean = pairwise_sum(xs) / n as f64;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).norm_sqr()).collect();
    EnsembleEstimate {
        mean,
        stderr: standard_error(pairwise_sum(&dev), n),
        n,
    }
}

fn standard_error(sum_sq_dev: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    (sum_sq_dev / ((n - 1) * n) as f64).sqrt()
}

/// Slowest decay rate of the averaged Bloch equations, from the real
/// 3x3 matrix acting on (Re s-, Im s-, sz).
pub fn slowest_decay_rate(params: &DriveParams) -> f64 {
    let g = params.big_gamma();
    let d = params.detuning();
    let o = params.rabi();
    let m = Matrix3::new(
        -g,
        d,
        0.0,
        -d,
        -g,
        0.5 * o,
        0.0,
        -2.0 * o,
        -params.gamma_z(),
    );
    m.complex_eigenvalues()
        .iter()
        .map(|l| -l.re)
        .fold(f64::INFINITY, f64::min)
}

fn check_mc(params: &DriveParams, dt: f64, n: usize) -> Result<()> {
    check_step(dt, params.max_rate())?;
    let product = dt * params.linewidth();
    if product > NOISE_RESOLUTION {
        return Err(Error::NoiseUnderResolved {
            product,
            limit: NOISE_RESOLUTION,
        });
    }
    if n < MIN_REALIZATIONS {
        return Err(Error::TooFewRealizations {
            n,
            min: MIN_REALIZATIONS,
        });
    }
    Ok(())
}

/// Conditional equations for a frozen phase. The vector is
/// (s-, s+, sz) for one-time averages or the matching regression
/// components; `source` scales the constant -gamma_z term.
struct Conditional {
    a_minus: Complex64,
    a_plus: Complex64,
    half_rabi: f64,
    rabi: f64,
    gamma_z: f64,
}

impl Conditional {
    fn new(params: &DriveParams) -> Self {
        Self {
            a_minus: -Complex64::new(params.gamma(), params.detuning()),
            a_plus: -Complex64::new(params.gamma(), -params.detuning()),
            half_rabi: 0.5 * params.rabi(),
            rabi: params.rabi(),
            gamma_z: params.gamma_z(),
        }
    }

    fn step(&self, y: C3, h: f64, phase: f64, source: Complex64) -> C3 {
        // e = e^{-i phi}
        let e = Complex64::from_polar(1.0, -phase);
        let ec = e.conj();
        let f = |u: C3| {
            let [m, p, z] = u.0;
            C3([
                self.a_minus * m + I * self.half_rabi * e * z,
                self.a_plus * p - I * self.half_rabi * ec * z,
                -self.gamma_z * (z + source) + I * self.rabi * (ec * m - e * p),
            ])
        };
        rk4_step(y, h, &f)
    }
}

fn ground() -> C3 {
    C3([
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McTrajectoryConfig {
    pub dt: f64,
    pub t_end: f64,
    pub n_realizations: usize,
    pub seed: u64,
    pub samples: usize,
}

impl McTrajectoryConfig {
    pub fn new(dt: f64, t_end: f64, n_realizations: usize, seed: u64) -> Self {
        Self {
            dt,
            t_end,
            n_realizations,
            seed,
            samples: DEFAULT_SAMPLES,
        }
    }
}

/// Ensemble means at the sampled times; `sigma_minus` is the rotated
/// coherence e^{i phi(t)} <s->.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McTrajectory {
    pub times: Vec<f64>,
    pub sigma_minus: Vec<EnsembleEstimate<Complex64>>,
    pub sigma_z: Vec<EnsembleEstimate<f64>>,
}

/// Ensemble average of the phase-conditioned Bloch dynamics from the ground
/// state. The span is covered by equal steps no longer than `dt`; samples
/// are spread evenly over (0, t_end].
pub fn mc_average_trajectory(
    params: &DriveParams,
    config: &McTrajectoryConfig,
) -> Result<McTrajectory> {
    check_mc(params, config.dt, config.n_realizations)?;
    if !(config.t_end.is_finite() && config.t_end >= config.dt) {
        return Err(Error::InvalidParams {
            name: "t_end",
            reason: format!("must be finite and >= dt (got {})", config.t_end),
        });
    }
    if config.samples == 0 {
        return Err(Error::InvalidParams {
            name: "samples",
            reason: "must be >= 1".into(),
        });
    }
    let steps = step_count(config.t_end, config.dt);
    let h = config.t_end / steps as f64;
    let samples = config.samples.min(steps);
    let marks: Vec<usize> = (1..=samples).map(|j| j * steps / samples).collect();
    let cond = Conditional::new(params);
    let one = Complex64::new(1.0, 0.0);

    let runs: Vec<Vec<(Complex64, f64)>> = (0..config.n_realizations)
        .into_par_iter()
        .map(|r| {
            let path =
                simulate_phase_path_stream(params.linewidth(), h, steps, config.seed, r as u64);
            let mut y = ground();
            let mut phi = 0.0;
            let mut out = Vec::with_capacity(samples);
            let mut next = 0;
            for (k, inc) in path.increments.iter().enumerate() {
                y = cond.step(y, h, phi + 0.5 * inc, one);
                phi += inc;
                if next < marks.len() && k + 1 == marks[next] {
                    out.push((Complex64::from_polar(1.0, phi) * y.0[0], y.0[2].re));
                    next += 1;
                }
            }
            out
        })
        .collect();

    let mut sigma_minus = Vec::with_capacity(samples);
    let mut sigma_z = Vec::with_capacity(samples);
    for j in 0..samples {
        let m: Vec<Complex64> = runs.iter().map(|r| r[j].0).collect();
        let z: Vec<f64> = runs.iter().map(|r| r[j].1).collect();
        sigma_minus.push(estimate_complex(&m));
        sigma_z.push(estimate_real(&z));
    }
    Ok(McTrajectory {
        times: marks.iter().map(|&k| k as f64 * h).collect(),
        sigma_minus,
        sigma_z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSpectrumConfig {
    pub dt: f64,
    pub t_relax: f64,
    pub tau_max: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

impl McSpectrumConfig {
    /// dt at the noise and step limits (capped at 1e-3), t_relax at twice the
    /// relaxation requirement, tau_max = 20 / slowest decay rate.
    pub fn default_for(params: &DriveParams, n_realizations: usize, seed: u64) -> Self {
        let mut dt = (0.1 / params.max_rate()).min(1e-3);
        if params.linewidth() > 0.0 {
            dt = dt.min(NOISE_RESOLUTION / params.linewidth());
        }
        let r = slowest_decay_rate(params);
        Self {
            dt,
            t_relax: 2.0 * RELAXATION_PRODUCT / r,
            tau_max: 20.0 / r,
            n_realizations,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSpectrum {
    pub spectrum: Spectrum,
    /// Batch-means standard error per grid point.
    pub stderr: Vec<f64>,
}

/// Monte Carlo spectrum. Each realization relaxes from the ground state for
/// `t_relax`, then the regression components are integrated along the same
/// phase path; the rotated correlation e^{-i(phi(t+tau) - phi(t))} <s+ s->
/// is averaged and transformed as in the time-domain route. The long-delay
/// limit is the mean over the last fifth of the delay window.
pub fn mc_steady_spectrum(
    params: &DriveParams,
    omegas: &[f64],
    config: &McSpectrumConfig,
) -> Result<McSpectrum> {
    check_mc(params, config.dt, config.n_realizations)?;
    let product = config.t_relax * slowest_decay_rate(params);
    if product.is_nan() || product < RELAXATION_PRODUCT {
        return Err(Error::InsufficientRelaxation {
            product,
            required: RELAXATION_PRODUCT,
        });
    }
    if !(config.tau_max.is_finite() && config.tau_max >= config.dt) {
        return Err(Error::InvalidParams {
            name: "tau_max",
            reason: format!("must be finite and >= dt (got {})", config.tau_max),
        });
    }
    let dt = config.dt;
    let relax_steps = step_count(config.t_relax, dt);
    let tau_steps = step_count(config.tau_max, dt);
    let cond = Conditional::new(params);
    let one = Complex64::new(1.0, 0.0);
    let n = config.n_realizations;

    let realization = |r: usize, acc: &mut [Complex64]| {
        let path = simulate_phase_path_stream(
            params.linewidth(),
            dt,
            relax_steps + tau_steps,
            config.seed,
            r as u64,
        );
        let (relax, delay) = path.increments.split_at(relax_steps);
        let mut y = ground();
        let mut phi = 0.0;
        for inc in relax {
            y = cond.step(y, dt, phi + 0.5 * inc, one);
            phi += inc;
        }
        let s_minus = y.0[0];
        let mut x = C3([
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5 * (1.0 + y.0[2].re), 0.0),
            -s_minus,
        ]);
        let mut drift = 0.0;
        acc[0] += x.0[1];
        for (k, inc) in delay.iter().enumerate() {
            x = cond.step(x, dt, phi + drift + 0.5 * inc, s_minus);
            drift += inc;
            acc[k + 1] += Complex64::from_polar(1.0, -drift) * x.0[1];
        }
    };

    let batches = SPECTRUM_BATCHES;
    let batch_sums: Vec<Vec<Complex64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![Complex64::new(0.0, 0.0); tau_steps + 1];
            for r in (b * n / batches)..((b + 1) * n / batches) {
                realization(r, &mut acc);
            }
            acc
        })
        .collect();

    let taus: Vec<f64> = (0..=tau_steps).map(|k| k as f64 * dt).collect();
    let mean: Vec<Complex64> = (0..=tau_steps)
        .map(|k| {
            let col: Vec<Complex64> = batch_sums.iter().map(|s| s[k]).collect();
            pairwise_sum(&col) / n as f64
        })
        .collect();
    let tail_start = ((1.0 - TAIL_FRACTION) * tau_steps as f64).floor() as usize;
    let g_inf = pairwise_sum(&mean[tail_start..]) / (mean.len() - tail_start) as f64;

    let fluct: Vec<Complex64> = mean.iter().map(|g| g - g_inf).collect();
    let values = fourier_re(&taus, &fluct, omegas);

    let batch_spectra: Vec<Vec<f64>> = batch_sums
        .iter()
        .enumerate()
        .map(|(b, s)| {
            let size = ((b + 1) * n / batches - b * n / batches) as f64;
            let f: Vec<Complex64> = s.iter().map(|g| g / size - g_inf).collect();
            fourier_re(&taus, &f, omegas)
        })
        .collect();
    let stderr = (0..omegas.len())
        .map(|i| {
            let col: Vec<f64> = batch_spectra.iter().map(|s| s[i]).collect();
            estimate_real(&col).stderr
        })
        .collect();

    Ok(McSpectrum {
        spectrum: Spectrum::new(omegas.to_vec(), values, g_inf.re, Method::MonteCarlo),
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{evolve, steady_state, BlochState};

    fn p(g: f64, o: f64, d: f64, l: f64) -> DriveParams {
        DriveParams::new(g, o, d, l).unwrap()
    }

    #[test]
    fn zero_linewidth_path_is_exactly_zero() {
        let path = simulate_phase_path(0.0, 1e-3, 1000, 7);
        assert!(path.increments.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn same_seed_same_path() {
        let a = simulate_phase_path_stream(10.0, 1e-3, 500, 42, 3);
        let b = simulate_phase_path_stream(10.0, 1e-3, 500, 42, 3);
        let c = simulate_phase_path_stream(10.0, 1e-3, 500, 42, 4);
        assert_eq!(a, b);
        assert_ne!(a.increments, c.increments);
    }

    #[test]
    fn increment_statistics() {
        let (l, dt, n) = (100.0, 1e-4, 1_000_000);
        let path = simulate_phase_path(l, dt, n, 11);
        let x = &path.increments;
        let var = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
        // Var of the sample second moment of a centred normal is 2 sigma^4 / n.
        let sigma2 = 2.0 * l * dt;
        let se = (2.0 / n as f64).sqrt() * sigma2 / (2.0 * dt);
        assert!(
            (var / (2.0 * dt) - l).abs() < 4.0 * se,
            "{}",
            var / (2.0 * dt)
        );
        let lag1 = x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1) as f64 / var;
        assert!(lag1.abs() < 4.0 / (n as f64).sqrt(), "{lag1}");
        assert_eq!(path.phases().len(), n + 1);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
    }

    #[test]
    fn guards() {
        let q = p(1.0, 50.0, 0.0, 50.0);
        assert!(matches!(
            mc_average_trajectory(&q, &McTrajectoryConfig::new(1e-4, 1.0, 99, 1)),
            Err(Error::TooFewRealizations { n: 99, min: 100 })
        ));
        assert!(matches!(
            mc_average_trajectory(&q, &McTrajectoryConfig::new(1e-3, 1.0, 100, 1)),
            Err(Error::NoiseUnderResolved { .. })
        ));
        assert!(matches!(
            mc_average_trajectory(&q, &McTrajectoryConfig::new(0.01, 1.0, 100, 1)),
            Err(Error::StepTooCoarse { .. })
        ));
        let cfg = McSpectrumConfig {
            dt: 1e-4,
            t_relax: 0.01,
            tau_max: 1.0,
            n_realizations: 100,
            seed: 1,
        };
        assert!(matches!(
            mc_steady_spectrum(&q, &[0.0], &cfg),
            Err(Error::InsufficientRelaxation { .. })
        ));
    }

    #[test]
    fn slowest_rate_without_drive() {
        // Omega = 0: rates Gamma (twice) and gamma_z.
        assert!((slowest_decay_rate(&p(1.0, 0.0, 3.0, 5.0)) - 2.0).abs() < 1e-12);
        assert!((slowest_decay_rate(&p(1.0, 0.0, 3.0, 0.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_ensemble_is_deterministic_evolution() {
        let q = p(1.0, 5.0, 2.0, 0.0);
        let mc = mc_average_trajectory(&q, &McTrajectoryConfig::new(1e-3, 2.0, 100, 5)).unwrap();
        let det = evolve(&BlochState::ground(), &q, 2.0, 1e-3).unwrap();
        for (t, (m, z)) in mc.times.iter().zip(mc.sigma_minus.iter().zip(&mc.sigma_z)) {
            let k = (t / 1e-3).round() as usize;
            assert!((m.mean - det.states[k].sigma_minus).norm() < 1e-10);
            assert!((z.mean - det.states[k].sigma_z).abs() < 1e-10);
            assert!(m.stderr < 1e-12 && z.stderr < 1e-12);
        }
    }

    #[test]
    fn ensemble_matches_averaged_equations() {
        let q = p(1.0, 5.0, 0.0, 2.0);
        let cfg = McTrajectoryConfig::new(2e-3, 3.0, 2000, 9);
        let mc = mc_average_trajectory(&q, &cfg).unwrap();
        let det = evolve(&BlochState::ground(), &q, 3.0, 2e-3).unwrap();
        for (t, z) in mc.times.iter().zip(&mc.sigma_z) {
            let k = (t / 2e-3).round() as usize;
            let dev = (z.mean - det.states[k].sigma_z).abs();
            assert!(dev < 4.0 * z.stderr, "t={t} dev={dev} se={}", z.stderr);
        }
        let last = mc.sigma_z.last().unwrap();
        assert!((last.mean - steady_state(&q).sigma_z).abs() < 4.0 * last.stderr + 1e-3);
    }

    #[test]
    fn zero_drive_spectrum_vanishes() {
        let q = p(1.0, 0.0, 0.0, 10.0);
        let cfg = McSpectrumConfig::default_for(&q, 100, 3);
        let mc = mc_steady_spectrum(&q, &[-5.0, 0.0, 5.0], &cfg).unwrap();
        assert!(mc.spectrum.values.iter().all(|v| *v == 0.0));
        assert!(mc.stderr.iter().all(|v| *v == 0.0));
    }
}
