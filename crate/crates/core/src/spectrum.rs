//! Steady-state fluorescence spectrum Lambda(omega) = Re D(i omega), where D
//! is the Laplace transform of g(tau) = <s+(t + tau) s-(t)>.
//!
//! D has a simple pole at z = 0 with real residue |<s->_s|^2 (the elastic
//! line). Its real part is finite on the imaginary axis away from zero, so
//! spectra carry the continuous part in `values` and the elastic weight as
//! a separate number.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bloch::{
    generator, regression_initial, regression_source, steady_state, CorrelationTrace,
};
use crate::error::{Error, Result};
use crate::params::DriveParams;

/// Offset (times gamma) at which the verbatim transform approximates the
/// omega -> 0 limit; used as a cross-check of the analytic limit.
pub const ZERO_OFFSET: f64 = 1e-8;

/// Decay required of a correlation trace before it is transformed, relative
/// to g(0).
pub const DECAY_TOLERANCE: f64 = 1e-6;

/// Which evaluator produced a [`Spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Resolvent,
    Approx,
    Dressed,
    Fourier,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Resolvent => "resolvent",
            Method::Approx => "approx",
            Method::Dressed => "dressed",
            Method::Fourier => "fourier",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    /// Weight of the delta line at omega = 0; never folded into `values`.
    pub elastic_weight: f64,
    pub method: Method,
    /// Set when an approximate evaluator runs outside its stated regime.
    #[serde(default)]
    pub out_of_regime: bool,
}

impl Spectrum {
    pub fn new(omegas: Vec<f64>, values: Vec<f64>, elastic_weight: f64, method: Method) -> Self {
        debug_assert_eq!(omegas.len(), values.len());
        Self {
            omegas,
            values,
            elastic_weight,
            method,
            out_of_regime: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_flat_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Values multiplied by `c`; elastic weight scaled alike.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            elastic_weight: self.elastic_weight * c,
            ..self.clone()
        }
    }

    /// Pointwise values restricted to |omega| <= half_width.
    pub fn window(&self, half_width: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omegas
            .iter()
            .zip(&self.values)
            .filter(move |(w, _)| w.abs() <= half_width)
            .map(|(w, v)| (*w, *v))
    }
}

/// sup |a - b| / sup |b| over |omega| <= half_width (both spectra on the
/// same grid).
pub fn relative_sup_deviation(a: &Spectrum, b: &Spectrum, half_width: f64) -> f64 {
    assert_eq!(a.omegas, b.omegas, "spectra must share a grid");
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for ((w, x), y) in a.omegas.iter().zip(&a.values).zip(&b.values) {
        if w.abs() <= half_width {
            num = num.max((x - y).abs());
            den = den.max(y.abs());
        }
    }
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// Closed-form Laplace transform of the steady-state correlation.
pub fn laplace_d(params: &DriveParams, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::PoleAtOrigin);
    }
    let ss = steady_state(params);
    laplace_d_with(params, ss.sigma_minus, ss.sigma_z, z)
}

fn laplace_d_with(
    params: &DriveParams,
    sigma_minus: Complex64,
    sigma_z: f64,
    z: Complex64,
) -> Result<Complex64> {
    let g = params.big_gamma();
    let d = params.detuning();
    let gz = params.gamma_z();
    let o = params.rabi();
    let i = Complex64::i();
    let gdz = Complex64::new(g, d) + z;

    let numerator = (gdz * (gz + z) + 0.5 * o * o) * (1.0 + sigma_z)
        + i * o * gdz * (1.0 + gz / z) * sigma_minus;
    let denominator = 2.0 * (gz + z) * ((g + z) * (g + z) + d * d) + 2.0 * o * o * (g + z);
    if denominator.norm() < 1e-300 {
        return Err(Error::ResonanceDenominator(z));
    }
    Ok(numerator / denominator)
}

/// Pole-free part of D at z = 0. Splitting the (1 + gamma_z/z) factor,
/// D = [A(z) + c (a + z)] / Q(z) + c gamma_z (a + z) / (z Q(z)) with
/// a = Gamma + i Delta, c = i Omega <s->_s, Q the denominator; the regular
/// part of the second term at 0 is c gamma_z [Q(0) - a Q'(0)] / Q(0)^2.
pub fn laplace_d_regular_at_origin(params: &DriveParams) -> Result<Complex64> {
    let ss = steady_state(params);
    let g = params.big_gamma();
    let d = params.detuning();
    let gz = params.gamma_z();
    let o2 = params.rabi() * params.rabi();
    let a = Complex64::new(g, d);
    let c = Complex64::i() * params.rabi() * ss.sigma_minus;
    let q0 = 2.0 * gz * (g * g + d * d) + 2.0 * o2 * g;
    let dq0 = 2.0 * (g * g + d * d) + 4.0 * gz * g + 2.0 * o2;
    if q0.abs() < 1e-300 {
        return Err(Error::ResonanceDenominator(Complex64::new(0.0, 0.0)));
    }
    let a0 = (a * gz + 0.5 * o2) * (1.0 + ss.sigma_z);
    Ok((a0 + c * a) / q0 + c * gz * (q0 - a * dq0) / (q0 * q0))
}

/// Re D(i omega) on the given grid. A grid point at exactly omega = 0 gets
/// the continuous limit Re D_reg(0): the pole term R/(i omega) has real R
/// and contributes nothing to the real part.
pub fn spectrum_exact(params: &DriveParams, omegas: &[f64]) -> Result<Spectrum> {
    let ss = steady_state(params);
    let at_zero = if omegas.contains(&0.0) {
        Some(laplace_d_regular_at_origin(params)?.re)
    } else {
        None
    };
    let values = omegas
        .par_iter()
        .with_min_len(256)
        .map(|&w| match (w == 0.0, at_zero) {
            (true, Some(v)) => Ok(v),
            _ => laplace_d_with(params, ss.sigma_minus, ss.sigma_z, Complex64::new(0.0, w))
                .map(|d| d.re),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::new(
        omegas.to_vec(),
        values,
        ss.sigma_minus.norm_sqr(),
        Method::Exact,
    ))
}

/// Same contract as [`spectrum_exact`], obtained by solving
/// (zI - M) U = u(0) + b/z for the regression vector's transform instead of
/// using the closed rational form.
pub fn spectrum_resolvent(params: &DriveParams, omegas: &[f64]) -> Result<Spectrum> {
    let ss = steady_state(params);
    let m = generator(params);
    let m = Matrix3::from_fn(|r, c| m[r][c]);
    let u0 = Vector3::from(regression_initial(&ss));
    let b = Vector3::from(regression_source(params, &ss));
    let values = omegas
        .par_iter()
        .with_min_len(256)
        .map(|&w| {
            if w == 0.0 {
                resolvent_regular_at_origin(&m, &u0, &b).map(|u| u[1].re)
            } else {
                resolvent_transform(&m, &u0, &b, Complex64::new(0.0, w)).map(|u| u[1].re)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::new(
        omegas.to_vec(),
        values,
        ss.sigma_minus.norm_sqr(),
        Method::Resolvent,
    ))
}

fn resolvent_transform(
    m: &Matrix3<Complex64>,
    u0: &Vector3<Complex64>,
    b: &Vector3<Complex64>,
    z: Complex64,
) -> Result<Vector3<Complex64>> {
    let a = Matrix3::from_diagonal_element(z) - m;
    let rhs = u0 + b / z;
    a.lu().solve(&rhs).ok_or(Error::SingularResolvent(z))
}

/// (zI - M)^-1 = -M^-1 - z M^-2 + O(z^2), so the z -> 0 regular part of
/// (zI - M)^-1 (u0 + b/z) is -M^-1 (u0 + M^-1 b); the pole part is -M^-1 b / z.
fn resolvent_regular_at_origin(
    m: &Matrix3<Complex64>,
    u0: &Vector3<Complex64>,
    b: &Vector3<Complex64>,
) -> Result<Vector3<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let lu = m.lu();
    let mb = lu.solve(b).ok_or(Error::SingularResolvent(zero))?;
    let x = lu.solve(&(u0 + mb)).ok_or(Error::SingularResolvent(zero))?;
    Ok(-x)
}

/// Broadband-laser approximation, valid for Gamma >> Omega, |Delta|, gamma_z.
/// Evaluated as written everywhere; `out_of_regime` flags use outside that
/// regime. The elastic line is not resolved by this form (weight 0).
pub fn spectrum_approx_broadband(params: &DriveParams, omegas: &[f64]) -> Spectrum {
    let g = params.big_gamma();
    let gz = params.gamma_z();
    let o2 = params.rabi() * params.rabi();
    let d = params.detuning();
    let prefactor = g / (4.0 * (gz * g + o2));
    let broad = g - o2 / g;
    let narrow = gz + o2 / g;
    let narrow_weight = (params.rabi() / g).powi(4);
    let values = omegas
        .iter()
        .map(|&w| {
            let w2 = w * w;
            prefactor
                * ((o2 - 2.0 * d * w) / (g * g + w2) + (o2 + 2.0 * d * w) / (broad * broad + w2)
                    - narrow_weight * (o2 + 2.0 * d * w) / (narrow * narrow + w2))
        })
        .collect();
    let mut s = Spectrum::new(omegas.to_vec(), values, 0.0, Method::Approx);
    s.out_of_regime = !in_broadband_regime(params);
    s
}

/// Gamma at least ten times each of Omega, |Delta| and gamma_z.
pub fn in_broadband_regime(params: &DriveParams) -> bool {
    let g = params.big_gamma();
    g >= 10.0
        * params
            .rabi()
            .max(params.detuning().abs())
            .max(params.gamma_z())
}

/// Coherent (elastic) scattering weight |<s->_s|^2.
pub fn elastic_weight(params: &DriveParams) -> f64 {
    steady_state(params).sigma_minus.norm_sqr()
}

/// Residue of D at the origin estimated from z D(z) at z = epsilon gamma.
/// z D(z) = R + z D_reg(0) + O(z^2); the two-point combination
/// 2 f(z) - f(2z) removes the linear term.
pub fn residue_at_origin(params: &DriveParams, epsilon: f64) -> Result<Complex64> {
    let z = Complex64::new(epsilon * params.gamma(), 0.0);
    let f1 = z * laplace_d(params, z)?;
    let f2 = 2.0 * z * laplace_d(params, 2.0 * z)?;
    Ok(2.0 * f1 - f2)
}

/// Time-domain route: trapezoidal Re int_0^tau_max (g - g_inf) e^{-i omega tau}.
pub fn spectrum_from_correlation(trace: &CorrelationTrace, omegas: &[f64]) -> Result<Spectrum> {
    let g0 = trace.g0().norm();
    let residual = trace.tail_residual();
    let threshold = DECAY_TOLERANCE * g0;
    if residual > threshold {
        return Err(Error::UndecayedTrace {
            residual,
            threshold,
        });
    }
    let fluct: Vec<Complex64> = trace
        .values
        .iter()
        .map(|v| v - trace.elastic_limit)
        .collect();
    let values = fourier_re(&trace.taus, &fluct, omegas);
    Ok(Spectrum::new(
        omegas.to_vec(),
        values,
        trace.elastic_limit,
        Method::Fourier,
    ))
}

/// Re of the trapezoidal one-sided transform of `f` sampled at `taus`.
pub(crate) fn fourier_re(taus: &[f64], f: &[Complex64], omegas: &[f64]) -> Vec<f64> {
    assert_eq!(taus.len(), f.len());
    if taus.len() < 2 {
        return vec![0.0; omegas.len()];
    }
    let n = taus.len() - 1;
    let h = (taus[n] - taus[0]) / n as f64;
    let uniform = taus
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
    omegas
        .par_iter()
        .with_min_len(8)
        .map(|&w| {
            if uniform {
                // Horner in the phasor z = e^{-i w h}.
                let zstep = Complex64::from_polar(1.0, -w * h);
                let mut acc = Complex64::new(0.0, 0.0);
                for v in f.iter().rev() {
                    acc = acc * zstep + v;
                }
                let first = f[0] * Complex64::from_polar(1.0, -w * taus[0]);
                let last = f[n] * Complex64::from_polar(1.0, -w * taus[n]);
                let total = acc * Complex64::from_polar(1.0, -w * taus[0]) - 0.5 * (first + last);
                (total * h).re
            } else {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let a = f[k] * Complex64::from_polar(1.0, -w * taus[k]);
                    let b = f[k + 1] * Complex64::from_polar(1.0, -w * taus[k + 1]);
                    acc += 0.5 * (taus[k + 1] - taus[k]) * (a + b);
                }
                acc.re
            }
        })
        .collect()
}

/// Outcome of the total-intensity check
/// (1/pi) int Lambda d omega + elastic weight = (1 + <sz>_s)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRule {
    /// (1/pi) times the integral of the continuous spectrum, tail included.
    pub inelastic: f64,
    /// Part of `inelastic` contributed by the analytic 1/omega^2 tail.
    pub tail: f64,
    pub elastic: f64,
    pub excited_population: f64,
    pub half_width: f64,
    pub points: usize,
}

impl SumRule {
    pub fn total(&self) -> f64 {
        self.inelastic + self.elastic
    }

    pub fn relative_error(&self) -> f64 {
        if self.excited_population == 0.0 {
            self.total().abs()
        } else {
            (self.total() / self.excited_population - 1.0).abs()
        }
    }
}

/// Integrates the exact spectrum over +-40 max(Gamma, Omega, |Delta|) with
/// the trapezoid rule at step min(Gamma, gamma_z)/8, and adds the
/// contribution beyond the window from Lambda ~ -Re g'(0) / omega^2.
pub fn sum_rule(params: &DriveParams) -> Result<SumRule> {
    let half_width = 40.0
        * params
            .big_gamma()
            .max(params.rabi())
            .max(params.detuning().abs());
    let target = params.min_relaxation_rate() / 8.0;
    // Odd count so omega = 0 is a node.
    let points = (((2.0 * half_width / target).ceil() as usize) + 1) | 1;
    let grid = crate::grid::FrequencyGrid::symmetric(half_width, points)?;
    let h = grid.step();
    let spectrum = spectrum_exact(params, &grid.omegas())?;
    let v = &spectrum.values;
    let interior: f64 = v[1..v.len() - 1].iter().sum();
    let integral = h * (interior + 0.5 * (v[0] + v[v.len() - 1]));

    let ss = steady_state(params);
    let m = generator(params);
    let u0 = regression_initial(&ss);
    let b = regression_source(params, &ss);
    let slope = m[1][0] * u0[0] + m[1][1] * u0[1] + m[1][2] * u0[2] + b[1];
    let tail = -2.0 * slope.re / half_width;

    Ok(SumRule {
        inelastic: (integral + tail) / PI,
        tail: tail / PI,
        elastic: ss.sigma_minus.norm_sqr(),
        excited_population: ss.excited_population(),
        half_width,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::correlation;
    use crate::grid::FrequencyGrid;

    fn p(g: f64, o: f64, d: f64, l: f64) -> DriveParams {
        DriveParams::new(g, o, d, l).unwrap()
    }

    #[test]
    fn pole_at_origin_is_rejected() {
        assert_eq!(
            laplace_d(&p(1.0, 1.0, 0.0, 0.0), Complex64::new(0.0, 0.0)),
            Err(Error::PoleAtOrigin)
        );
    }

    #[test]
    fn undriven_transform_vanishes() {
        let params = p(1.0, 0.0, 3.0, 7.0);
        for z in [Complex64::new(0.3, 1.0), Complex64::new(0.0, -20.0)] {
            assert_eq!(laplace_d(&params, z).unwrap(), Complex64::new(0.0, 0.0));
        }
        let s = spectrum_exact(&params, &[-1.0, 0.0, 1.0]).unwrap();
        assert!(s.values.iter().all(|v| *v == 0.0));
        assert_eq!(s.elastic_weight, 0.0);
    }

    #[test]
    fn large_z_asymptotics() {
        // z D(z) -> g(0) = (1 + <sz>)/2: numerator ~ z^2 (1 + sz), denominator ~ 2 z^3.
        let params = p(1.0, 50.0, 30.0, 100.0);
        let ss = steady_state(&params);
        for z in [Complex64::new(1e8, 0.0), Complex64::new(0.0, 1e8)] {
            let lead = z * laplace_d(&params, z).unwrap();
            assert!((lead - ss.excited_population()).norm() < 1e-6);
        }
    }

    #[test]
    fn residue_equals_elastic_weight() {
        for params in [
            p(1.0, 50.0, 0.0, 100.0),
            p(1.0, 2f64.sqrt(), 0.0, 0.0),
            p(0.5, 7.0, -12.0, 3.0),
        ] {
            let r = residue_at_origin(&params, 1e-6).unwrap();
            assert!((r.re - elastic_weight(&params)).abs() < 1e-8, "{r}");
            assert!(r.im.abs() < 1e-8);
        }
    }

    #[test]
    fn single_point_residue_is_first_order() {
        // z D(z) at z = 1e-6 alone is off by z D_reg(0).
        let params = p(1.0, 2f64.sqrt(), 0.0, 0.0);
        let z = Complex64::new(1e-6, 0.0);
        let raw = z * laplace_d(&params, z).unwrap();
        let reg = laplace_d_regular_at_origin(&params).unwrap();
        assert!((raw - 0.125 - z * reg).norm() < 1e-12);
    }

    #[test]
    fn zero_frequency_limit_is_continuous() {
        for params in [p(1.0, 50.0, 0.0, 100.0), p(0.7, 13.0, 40.0, 9.0)] {
            let s = spectrum_exact(&params, &[-1e-6, 0.0, 1e-6]).unwrap();
            let near = laplace_d(&params, Complex64::new(0.0, ZERO_OFFSET * params.gamma()))
                .unwrap()
                .re;
            let scale = s.values[1].abs();
            assert!((s.values[1] - near).abs() < 1e-6 * scale);
            assert!((s.values[1] - 0.5 * (s.values[0] + s.values[2])).abs() < 1e-9 * scale);
            let r = spectrum_resolvent(&params, &[0.0]).unwrap();
            assert!((r.values[0] - s.values[1]).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn elastic_weight_examples() {
        assert_eq!(elastic_weight(&p(1.0, 0.0, 0.0, 5.0)), 0.0);
        assert!((elastic_weight(&p(1.0, 2f64.sqrt(), 0.0, 0.0)) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn elastic_weight_falls_as_inverse_square_linewidth() {
        // Closed form Omega^2 gz^2 (G^2 + D^2) / (4 (gz (G^2 + D^2) + Omega^2 G)^2)
        // goes as Omega^2 / (4 L^2) once L >> Omega^2 / gz.
        let ls = [1e3, 1e4, 1e5];
        let ws: Vec<f64> = ls
            .iter()
            .map(|&l| elastic_weight(&p(1.0, 5.0, 0.0, l)))
            .collect();
        let slope1 = (ws[1] / ws[0]).log10() / (ls[1] / ls[0]).log10();
        let slope2 = (ws[2] / ws[1]).log10() / (ls[2] / ls[1]).log10();
        assert!((slope1 + 2.0).abs() < 0.05, "{slope1}");
        assert!((slope2 + 2.0).abs() < 0.01, "{slope2}");
    }

    #[test]
    fn exact_and_resolvent_agree() {
        let params = p(1.3, 77.0, -150.0, 42.0);
        let w = FrequencyGrid::default_for(&params).omegas();
        let a = spectrum_exact(&params, &w).unwrap();
        let b = spectrum_resolvent(&params, &w).unwrap();
        assert!(relative_sup_deviation(&b, &a, f64::INFINITY) < 1e-10);
        assert_eq!(a.elastic_weight, b.elastic_weight);
    }

    #[test]
    fn approx_is_detuning_independent_at_line_centre() {
        let a = spectrum_approx_broadband(&p(1.0, 5.0, 0.0, 200.0), &[0.0, 3.0]);
        let b = spectrum_approx_broadband(&p(1.0, 5.0, 80.0, 200.0), &[0.0, 3.0]);
        assert_eq!(a.values[0], b.values[0]);
        assert_ne!(a.values[1], b.values[1]);
        assert_eq!(a.elastic_weight, 0.0);
        assert_eq!(a.method, Method::Approx);
        assert!(!a.out_of_regime);
        assert!(spectrum_approx_broadband(&p(1.0, 50.0, 0.0, 10.0), &[0.0]).out_of_regime);
    }

    #[test]
    fn approx_at_resonance_is_three_lorentzians() {
        let params = p(1.0, 5.0, 0.0, 200.0);
        let (g, gz, o2) = (201.0f64, 2.0f64, 25.0f64);
        let pre = g / (4.0 * (gz * g + o2));
        let s = spectrum_approx_broadband(&params, &[-7.0, 7.0, 0.0]);
        assert_eq!(s.values[0], s.values[1]);
        let lor = |w: f64, width: f64| 1.0 / (width * width + w * w);
        let w = 0.0;
        let expect =
            pre * o2 * (lor(w, g) + lor(w, g - o2 / g) - (5.0 / g).powi(4) * lor(w, gz + o2 / g));
        assert!((s.values[2] - expect).abs() < 1e-18);
    }

    #[test]
    fn fourier_route_matches_exact() {
        let params = p(1.0, 50.0, 0.0, 100.0);
        // 1e-3 would exceed the step guard (0.101) for Gamma = 101.
        let trace = correlation(&params, 30.0, 5e-4).unwrap();
        let w = FrequencyGrid::symmetric(300.0, 601).unwrap().omegas();
        let f = spectrum_from_correlation(&trace, &w).unwrap();
        let e = spectrum_exact(&params, &w).unwrap();
        let dev = f
            .values
            .iter()
            .zip(&e.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-4, "{dev}");
        assert_eq!(f.elastic_weight, trace.elastic_limit);
    }

    #[test]
    fn zero_trace_gives_zero_spectrum() {
        let trace = CorrelationTrace {
            taus: (0..100).map(|k| k as f64 * 0.01).collect(),
            values: vec![Complex64::new(0.0, 0.0); 100],
            elastic_limit: 0.0,
        };
        let s = spectrum_from_correlation(&trace, &[-1.0, 0.0, 2.0]).unwrap();
        assert!(s.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn undecayed_trace_is_rejected() {
        let params = p(1.0, 50.0, 0.0, 100.0);
        let trace = correlation(&params, 0.05, 5e-4).unwrap();
        assert!(matches!(
            spectrum_from_correlation(&trace, &[0.0]),
            Err(Error::UndecayedTrace { .. })
        ));
    }

    #[test]
    fn sum_rule_normalisation_on_saturated_atom() {
        let r = sum_rule(&p(1.0, 2f64.sqrt(), 0.0, 0.0)).unwrap();
        assert!((r.excited_population - 0.25).abs() < 1e-15);
        assert!((r.elastic - 0.125).abs() < 1e-15);
        assert!(r.relative_error() < 1e-4, "{}", r.relative_error());
    }

    #[test]
    fn nonuniform_quadrature_matches_uniform() {
        let taus: Vec<f64> = (0..=400).map(|k| k as f64 * 0.01).collect();
        let f: Vec<Complex64> = taus
            .iter()
            .map(|t| Complex64::new((-t).exp(), 0.0))
            .collect();
        let a = fourier_re(&taus, &f, &[0.0, 2.0]);
        let mut t2 = taus.clone();
        t2[1] += 1e-4; // breaks uniformity, slightly perturbs the result
        let mut f2 = f.clone();
        f2[1] = Complex64::new((-t2[1]).exp(), 0.0);
        let b = fourier_re(&t2, &f2, &[0.0, 2.0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-5);
        }
        // Re 1/(1 + i w) for the analytic transform of e^{-t}, truncated at t = 4.
        assert!((a[0] - (1.0 - (-4.0f64).exp())).abs() < 1e-4);
    }
}
