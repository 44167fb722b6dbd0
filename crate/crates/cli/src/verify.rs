//! Verification suites: each check reports a measured deviation against a
//! threshold. Thresholds can be overridden by name.

use std::collections::BTreeMap;

use fluorospec::bloch::{bloch_rhs, correlation, default_correlation_steps, evolve, steady_state};
use fluorospec::features::SpectralFeatures;
use fluorospec::spectrum::{
    elastic_weight, relative_sup_deviation, residue_at_origin, spectrum_exact,
    spectrum_from_correlation, spectrum_resolvent, sum_rule,
};
use fluorospec::stochastic::{
    mc_average_trajectory, mc_steady_spectrum, McSpectrumConfig, McTrajectoryConfig,
    MIN_REALIZATIONS,
};
use fluorospec::{BlochState, Complex64, DriveParams, FrequencyGrid, Result as CoreResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::args::Suite;
use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_MC_N: usize = 2000;
pub const ORACLE_SETS: usize = 100;
pub const RANDOM_SETS: usize = 20;
pub const FOURIER_POINTS: usize = 201;

pub const MC_PARAMS: (f64, f64, f64, f64) = (1.0, 50.0, 0.0, 50.0);
pub const MC_DT: f64 = 1e-4;
pub const MC_T_END: f64 = 2.0;

const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("steady_state", 1e-12),
    ("exact_vs_resolvent", 1e-10),
    ("fourier_vs_exact", 1e-4),
    ("sum_rule_normalization", 1e-3),
    ("sum_rule", 1e-3),
    ("mc_trajectory", 3.0),
    ("mc_steady_state", 3.0),
    ("bloch_ball", 1e-6),
    ("parity", 1e-9),
    ("reflection", 1e-9),
    ("residue", 1e-8),
    ("seed_determinism", 0.0),
    ("scale_invariance", 0.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(DEFAULT_TOLERANCES.iter().copied().collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    /// Applies a `name=value` override.
    pub fn apply(&mut self, spec: &str) -> Result<(), CliError> {
        let (k, v) = spec.split_once('=').ok_or_else(|| {
            CliError::config(format!("tolerance override `{spec}`: expected name=value"))
        })?;
        let key = DEFAULT_TOLERANCES
            .iter()
            .map(|(n, _)| *n)
            .find(|n| *n == k.trim())
            .ok_or_else(|| CliError::config(format!("unknown tolerance `{}`", k.trim())))?;
        let value: f64 = v
            .trim()
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite() && *x >= 0.0)
            .ok_or_else(|| CliError::config(format!("invalid tolerance value `{}`", v.trim())))?;
        self.0.insert(key, value);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub n: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n: DEFAULT_MC_N,
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
        }
    }
}

impl VerifyOptions {
    pub fn new(
        n: Option<usize>,
        seed: Option<u64>,
        overrides: &[String],
    ) -> Result<Self, CliError> {
        let n = n.unwrap_or(DEFAULT_MC_N);
        if n < MIN_REALIZATIONS {
            return Err(CliError::config(format!(
                "n below statistical minimum ({MIN_REALIZATIONS}): got {n}"
            )));
        }
        let mut tolerances = Tolerances::default();
        for o in overrides {
            tolerances.apply(o)?;
        }
        Ok(Self {
            n,
            seed: seed.unwrap_or(DEFAULT_SEED),
            tolerances,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub note: String,
}

impl Check {
    fn new(name: &'static str, measured: f64, tol: &Tolerances, note: impl Into<String>) -> Self {
        let threshold = tol.get(name);
        Self {
            name,
            passed: measured <= threshold,
            measured,
            threshold,
            note: note.into(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} measured={:.3e} threshold={:.3e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold,
            self.note
        )
    }
}

/// gamma in [0.1, 10], Omega in [0, 200], |Delta| <= 400, L in [0, 400].
pub fn random_params(rng: &mut ChaCha8Rng) -> DriveParams {
    let g = rng.gen_range(0.1..=10.0);
    let o = rng.gen_range(0.0..=200.0);
    let d = rng.gen_range(-400.0..=400.0);
    let l = rng.gen_range(0.0..=400.0);
    DriveParams::new(g, o, d, l).expect("sampled inside the valid box")
}

fn random_sets(seed: u64, stream: u64, count: usize) -> Vec<DriveParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count).map(|_| random_params(&mut rng)).collect()
}

/// Largest value of `f` over `sets`, or infinity with the first error.
fn worst<F>(sets: &[DriveParams], f: F) -> (f64, Option<String>)
where
    F: Fn(&DriveParams) -> CoreResult<f64> + Sync,
{
    let results: Vec<CoreResult<f64>> = sets.par_iter().map(&f).collect();
    let mut max = 0.0f64;
    for r in results {
        match r {
            Ok(v) if v.is_nan() => return (f64::INFINITY, Some("NaN".into())),
            Ok(v) => max = max.max(v),
            Err(e) => return (f64::INFINITY, Some(e.to_string())),
        }
    }
    (max, None)
}

fn note(base: String, err: Option<String>) -> String {
    match err {
        Some(e) => format!("({base}; error: {e})"),
        None => format!("({base})"),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn oracle_checks(opts: &VerifyOptions) -> Vec<Check> {
    let tol = &opts.tolerances;
    let sets = random_sets(opts.seed, 0, ORACLE_SETS);

    let (m, e) = worst(&sets, |p| {
        let w = FrequencyGrid::default_for(p).omegas();
        let a = spectrum_exact(p, &w)?;
        let b = spectrum_resolvent(p, &w)?;
        Ok(relative_sup_deviation(&a, &b, f64::INFINITY))
    });
    let c1 = Check::new(
        "exact_vs_resolvent",
        m,
        tol,
        note(
            format!("relative sup, {ORACLE_SETS} random sets, default grid"),
            e,
        ),
    );

    let (m, e) = worst(&sets, |p| {
        let w = FrequencyGrid::symmetric(fluorospec::grid::default_half_width(p), FOURIER_POINTS)?
            .omegas();
        let (tau_max, dtau) = default_correlation_steps(p);
        let f = spectrum_from_correlation(&correlation(p, tau_max, dtau)?, &w)?;
        let a = spectrum_exact(p, &w)?;
        Ok(max_abs_diff(&f.values, &a.values))
    });
    let c2 = Check::new(
        "fourier_vs_exact",
        m,
        tol,
        note(
            format!(
                "absolute sup, {ORACLE_SETS} random sets, default steps, {FOURIER_POINTS} points"
            ),
            e,
        ),
    );
    vec![c1, c2]
}

pub fn sumrule_checks(opts: &VerifyOptions) -> Vec<Check> {
    let tol = &opts.tolerances;
    let base = DriveParams::new(1.0, 2f64.sqrt(), 0.0, 0.0).expect("valid");
    let (m, e) = worst(&[base], |p| Ok(sum_rule(p)?.relative_error()));
    let c1 = Check::new(
        "sum_rule_normalization",
        m,
        tol,
        note("Omega = sqrt(2), L = 0".into(), e),
    );
    let sets = random_sets(opts.seed, 1, RANDOM_SETS);
    let (m, e) = worst(&sets, |p| Ok(sum_rule(p)?.relative_error()));
    let c2 = Check::new(
        "sum_rule",
        m,
        tol,
        note(format!("relative, {RANDOM_SETS} random sets"), e),
    );
    vec![c1, c2]
}

/// Ensemble trajectory at the preset parameters against the averaged
/// equations and the closed-form steady state, in units of the stderr.
pub fn mc_checks(opts: &VerifyOptions) -> Vec<Check> {
    let tol = &opts.tolerances;
    let (g, o, d, l) = MC_PARAMS;
    let p = DriveParams::new(g, o, d, l).expect("valid");
    let cfg = McTrajectoryConfig::new(MC_DT, MC_T_END, opts.n, opts.seed);
    let result = mc_average_trajectory(&p, &cfg)
        .and_then(|mc| Ok((mc, evolve(&BlochState::ground(), &p, MC_T_END, MC_DT)?)));
    let (mc, det) = match result {
        Ok(v) => v,
        Err(e) => {
            let msg = format!("(error: {e})");
            return vec![
                Check::new("mc_trajectory", f64::INFINITY, tol, msg.clone()),
                Check::new("mc_steady_state", f64::INFINITY, tol, msg),
            ];
        }
    };
    let z = mc
        .times
        .iter()
        .zip(&mc.sigma_z)
        .map(|(t, est)| {
            let k = (t / MC_DT).round() as usize;
            (est.mean - det.states[k].sigma_z).abs() / est.stderr
        })
        .fold(0.0, f64::max);
    let c1 = Check::new(
        "mc_trajectory",
        z,
        tol,
        format!(
            "(max |z| of <sz>(t) over {} samples, n = {}, dt = {MC_DT:e})",
            mc.times.len(),
            opts.n
        ),
    );
    let last = mc.sigma_z.last().expect("at least one sample");
    let zs = (last.mean - steady_state(&p).sigma_z).abs() / last.stderr;
    let c2 = Check::new(
        "mc_steady_state",
        zs,
        tol,
        format!("(|z| of <sz>(t = {MC_T_END}) against the closed form)"),
    );
    vec![c1, c2]
}

fn presets() -> Vec<DriveParams> {
    let mut v: Vec<DriveParams> = [10.0, 50.0, 100.0, 200.0]
        .iter()
        .map(|&l| DriveParams::new(1.0, 50.0, 0.0, l).expect("valid"))
        .collect();
    v.extend(
        [50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&d| DriveParams::new(1.0, 50.0, d, 200.0).expect("valid")),
    );
    v
}

pub fn invariant_checks(opts: &VerifyOptions) -> Vec<Check> {
    let tol = &opts.tolerances;
    let mut out = Vec::new();
    let sets = random_sets(opts.seed, 2, ORACLE_SETS);

    let (m, e) = worst(&sets, |p| Ok(bloch_rhs(&steady_state(p), p).norm()));
    out.push(Check::new(
        "steady_state",
        m,
        tol,
        note(
            format!("|rhs| at the closed form, {ORACLE_SETS} random sets"),
            e,
        ),
    ));

    let small = &sets[..RANDOM_SETS];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(3);
    let starts: Vec<BlochState> = (0..RANDOM_SETS)
        .map(|_| {
            let r: f64 = rng.gen_range(0.0..=1.0);
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let c: f64 = rng.gen_range(-1.0..=1.0);
            BlochState::new(
                Complex64::from_polar(0.5 * r * (1.0 - c * c).sqrt(), th),
                r * c,
            )
        })
        .collect();
    let pairs: Vec<(DriveParams, BlochState)> =
        small.iter().copied().zip(starts.iter().copied()).collect();
    let results: Vec<CoreResult<f64>> = pairs
        .par_iter()
        .map(|(p, s0)| {
            let dt = 0.05 / p.max_rate();
            let tr = evolve(s0, p, 2000.0 * dt, dt)?;
            Ok(tr
                .states
                .iter()
                .map(|s| s.bloch_norm_sq() - 1.0)
                .fold(0.0, f64::max))
        })
        .collect();
    let (m, e) = fold_results(results);
    out.push(Check::new(
        "bloch_ball",
        m,
        tol,
        note(
            format!("excess of 4|s-|^2 + sz^2 over 1, {RANDOM_SETS} trajectories"),
            e,
        ),
    ));

    let (m, e) = worst(small, |p| {
        let p = p.with_detuning(0.0)?;
        let w = FrequencyGrid::default_for(&p).omegas();
        let s = spectrum_exact(&p, &w)?;
        let rev: Vec<f64> = s.values.iter().rev().copied().collect();
        Ok(max_abs_diff(&s.values, &rev))
    });
    out.push(Check::new(
        "parity",
        m,
        tol,
        note(
            format!("|L(w) - L(-w)| at Delta = 0, {RANDOM_SETS} sets"),
            e,
        ),
    ));

    let (m, e) = worst(small, |p| {
        let q = p.with_detuning(-p.detuning())?;
        let w = FrequencyGrid::default_for(p).omegas();
        let a = spectrum_exact(p, &w)?;
        let b = spectrum_exact(&q, &w)?;
        let rev: Vec<f64> = b.values.iter().rev().copied().collect();
        Ok(max_abs_diff(&a.values, &rev))
    });
    out.push(Check::new(
        "reflection",
        m,
        tol,
        note(format!("|L(w; D) - L(-w; -D)|, {RANDOM_SETS} sets"), e),
    ));

    let (m, e) = worst(small, |p| {
        let r = residue_at_origin(p, 1e-6 * p.gamma())?;
        Ok((r - elastic_weight(p)).norm())
    });
    out.push(Check::new(
        "residue",
        m,
        tol,
        note(
            format!("|lim z D(z) - elastic weight|, {RANDOM_SETS} sets"),
            e,
        ),
    ));

    out.push(seed_determinism(opts, tol));
    out.push(scale_invariance(tol));
    out
}

fn fold_results(results: Vec<CoreResult<f64>>) -> (f64, Option<String>) {
    let mut max = 0.0f64;
    for r in results {
        match r {
            Ok(v) => max = max.max(v),
            Err(e) => return (f64::INFINITY, Some(e.to_string())),
        }
    }
    (max, None)
}

/// Same seed under one and three worker threads; counts differing outputs.
fn seed_determinism(opts: &VerifyOptions, tol: &Tolerances) -> Check {
    let p = DriveParams::new(1.0, 5.0, 1.0, 2.0).expect("valid");
    let tc = McTrajectoryConfig::new(2e-3, 1.0, MIN_REALIZATIONS, opts.seed);
    let sc = McSpectrumConfig::default_for(&p, MIN_REALIZATIONS, opts.seed);
    let w = [-4.0, -1.0, 0.0, 2.0];
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            Ok::<_, fluorospec::Error>((
                mc_average_trajectory(&p, &tc)?,
                mc_steady_spectrum(&p, &w, &sc)?,
            ))
        })
    };
    match (run(1), run(3)) {
        (Ok(a), Ok(b)) => {
            let mismatches = (a.0 != b.0) as u32 + (a.1 != b.1) as u32;
            Check::new(
                "seed_determinism",
                mismatches as f64,
                tol,
                "(differing Monte Carlo outputs between 1 and 3 threads)",
            )
        }
        (Err(e), _) | (_, Err(e)) => Check::new(
            "seed_determinism",
            f64::INFINITY,
            tol,
            format!("(error: {e})"),
        ),
    }
}

/// Classification, extrema and asymmetry of the figure presets under
/// value scaling; counts mismatches.
fn scale_invariance(tol: &Tolerances) -> Check {
    let mut mismatches = 0u32;
    for p in presets() {
        let s = match spectrum_exact(&p, &FrequencyGrid::default_for(&p).omegas()) {
            Ok(s) => s,
            Err(e) => {
                return Check::new(
                    "scale_invariance",
                    f64::INFINITY,
                    tol,
                    format!("(error: {e})"),
                )
            }
        };
        let Ok(base) = SpectralFeatures::compute(&s, &p) else {
            mismatches += 1;
            continue;
        };
        for c in [1e-3, 0.37, 7.0, 1e4] {
            let Ok(f) = SpectralFeatures::compute(&s.scaled(c), &p) else {
                mismatches += 1;
                continue;
            };
            let same_extrema = f.extrema.len() == base.extrema.len()
                && f.extrema
                    .iter()
                    .zip(&base.extrema)
                    .all(|(x, y)| x.index == y.index && x.kind == y.kind);
            if f.classification != base.classification
                || !same_extrema
                || (f.asymmetry - base.asymmetry).abs() > 1e-12
            {
                mismatches += 1;
            }
        }
    }
    Check::new(
        "scale_invariance",
        mismatches as f64,
        tol,
        "(feature mismatches, 8 presets x 4 scale factors)",
    )
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<Check> {
    match suite {
        Suite::Oracles => oracle_checks(opts),
        Suite::Sumrule => sumrule_checks(opts),
        Suite::Mc => mc_checks(opts),
        Suite::Invariants => invariant_checks(opts),
        Suite::All => {
            let mut v = oracle_checks(opts);
            v.extend(sumrule_checks(opts));
            v.extend(mc_checks(opts));
            v.extend(invariant_checks(opts));
            v
        }
    }
}
