//! Lineshape features: extrema, central-hole metrics, left/right weight
//! balance and a rule-based classification.
//!
//! Classification rules, checked in order (h = grid step):
//!
//! 1. `Triplet`: exactly three maxima, the middle one within 2h of 0.
//! 2. `HoleBurning`: a minimum within h of 0 flanked by maxima on both
//!    sides, |asymmetry| < 0.05.
//! 3. `SplitDoublet`: one maximum within 5h of 0 and another within 5h of
//!    omega = Delta, separated by at least max(Gamma, |Delta|)/2.
//! 4. `DispersiveCenter`: adjacent max/min pair straddling 0 with
//!    |asymmetry| >= 0.05.
//! 5. `SinglePeak` otherwise (including a flat spectrum).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{is_symmetric, uniform_step};
use crate::params::DriveParams;
use crate::spectrum::Spectrum;

pub const DEFAULT_RELATIVE_PROMINENCE: f64 = 1e-3;
pub const ASYMMETRY_THRESHOLD: f64 = 0.05;
pub const MIN_GRID_POINTS: usize = 5;
const TRIPLET_CENTRE_STEPS: f64 = 2.0;
const HOLE_CENTRE_STEPS: f64 = 1.0;
const SPLIT_NEAR_STEPS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub index: usize,
    pub omega: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    SinglePeak,
    Triplet,
    HoleBurning,
    DispersiveCenter,
    SplitDoublet,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::SinglePeak => "SINGLE_PEAK",
            Classification::Triplet => "TRIPLET",
            Classification::HoleBurning => "HOLE_BURNING",
            Classification::DispersiveCenter => "DISPERSIVE_CENTER",
            Classification::SplitDoublet => "SPLIT_DOUBLET",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFeatures {
    pub extrema: Vec<Extremum>,
    pub classification: Classification,
    pub hole_depth: f64,
    pub hole_fwhm: f64,
    pub asymmetry: f64,
}

impl SpectralFeatures {
    /// All features at the default prominence.
    pub fn compute(spectrum: &Spectrum, params: &DriveParams) -> Result<Self> {
        let prominence = default_prominence(spectrum);
        let extrema = find_extrema(spectrum, prominence)?;
        let asymmetry = asymmetry(spectrum)?;
        let step = uniform_step(&spectrum.omegas)?;
        let classification = classify_from(&extrema, asymmetry, step, params);
        let (hole_depth, hole_fwhm) = hole_from(spectrum, &extrema, asymmetry, step);
        Ok(Self {
            extrema,
            classification,
            hole_depth,
            hole_fwhm,
            asymmetry,
        })
    }

    pub fn maxima(&self) -> impl Iterator<Item = &Extremum> {
        self.extrema.iter().filter(|e| e.kind == ExtremumKind::Max)
    }

    pub fn minima(&self) -> impl Iterator<Item = &Extremum> {
        self.extrema.iter().filter(|e| e.kind == ExtremumKind::Min)
    }
}

/// 1e-3 times the largest spectrum value (0 for non-positive spectra).
pub fn default_prominence(spectrum: &Spectrum) -> f64 {
    DEFAULT_RELATIVE_PROMINENCE * spectrum.max_value().max(0.0)
}

/// Interior extrema from sign changes of the first difference, simplified
/// until every adjacent max/min pair differs by at least `prominence`.
/// Simplification removes the adjacent pair with the smallest height
/// difference first, so the result always alternates in kind.
pub fn find_extrema(spectrum: &Spectrum, prominence: f64) -> Result<Vec<Extremum>> {
    let v = &spectrum.values;
    if v.len() < MIN_GRID_POINTS {
        return Err(Error::GridTooSmall {
            points: v.len(),
            min: MIN_GRID_POINTS,
        });
    }
    uniform_step(&spectrum.omegas)?;

    // Runs of equal values; a plateau extremum sits at the run's middle.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=v.len() {
        if k == v.len() || v[k] != v[start] {
            runs.push((start, k - 1));
            start = k;
        }
    }
    let mut extrema = Vec::new();
    for r in 1..runs.len().saturating_sub(1) {
        let here = v[runs[r].0];
        let before = v[runs[r - 1].0];
        let after = v[runs[r + 1].0];
        let kind = if here > before && here > after {
            ExtremumKind::Max
        } else if here < before && here < after {
            ExtremumKind::Min
        } else {
            continue;
        };
        let index = (runs[r].0 + runs[r].1) / 2;
        extrema.push(Extremum {
            index,
            omega: spectrum.omegas[index],
            value: v[index],
            kind,
        });
    }

    loop {
        let weakest = extrema
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, (w[0].value - w[1].value).abs()))
            .filter(|(_, d)| *d < prominence)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match weakest {
            Some((i, _)) => {
                extrema.drain(i..i + 2);
            }
            None => break,
        }
    }
    Ok(extrema)
}

/// Classification at the default prominence. Never fails: spectra that
/// cannot be analysed (too few or non-uniform points) are `SinglePeak`.
pub fn classify(spectrum: &Spectrum, params: &DriveParams) -> Classification {
    let Ok(step) = uniform_step(&spectrum.omegas) else {
        return Classification::SinglePeak;
    };
    let Ok(extrema) = find_extrema(spectrum, default_prominence(spectrum)) else {
        return Classification::SinglePeak;
    };
    classify_from(&extrema, balance(spectrum), step, params)
}

fn classify_from(
    extrema: &[Extremum],
    asymmetry: f64,
    step: f64,
    params: &DriveParams,
) -> Classification {
    let maxima: Vec<&Extremum> = extrema
        .iter()
        .filter(|e| e.kind == ExtremumKind::Max)
        .collect();

    if maxima.len() == 3 && maxima[1].omega.abs() <= TRIPLET_CENTRE_STEPS * step * (1.0 + 1e-9) {
        return Classification::Triplet;
    }
    if central_hole(extrema, step).is_some() && asymmetry.abs() < ASYMMETRY_THRESHOLD {
        return Classification::HoleBurning;
    }

    let delta = params.detuning();
    let near = SPLIT_NEAR_STEPS * step * (1.0 + 1e-9);
    let separation = 0.5 * params.big_gamma().max(delta.abs());
    let split = maxima.iter().any(|a| {
        a.omega.abs() <= near
            && maxima
                .iter()
                .any(|b| (b.omega - delta).abs() <= near && (b.omega - a.omega).abs() >= separation)
    });
    if split {
        return Classification::SplitDoublet;
    }

    let straddle = extrema
        .windows(2)
        .any(|w| w[0].kind != w[1].kind && w[0].omega <= 0.0 && w[1].omega >= 0.0);
    if straddle && asymmetry.abs() >= ASYMMETRY_THRESHOLD {
        return Classification::DispersiveCenter;
    }
    Classification::SinglePeak
}

/// Position in `extrema` of a minimum within one grid step of omega = 0
/// that has maxima on both sides.
fn central_hole(extrema: &[Extremum], step: f64) -> Option<usize> {
    (1..extrema.len().saturating_sub(1)).find(|&i| {
        let e = &extrema[i];
        e.kind == ExtremumKind::Min
            && e.omega.abs() <= HOLE_CENTRE_STEPS * step * (1.0 + 1e-9)
            && extrema[i - 1].kind == ExtremumKind::Max
            && extrema[i + 1].kind == ExtremumKind::Max
            && extrema[i - 1].omega < 0.0
            && extrema[i + 1].omega > 0.0
    })
}

/// (depth, fwhm) of the central hole at the default prominence, or (0, 0)
/// when the spectrum does not show a hole-burning profile.
pub fn hole_metrics(spectrum: &Spectrum) -> (f64, f64) {
    hole_metrics_with_prominence(spectrum, default_prominence(spectrum))
}

pub fn hole_metrics_with_prominence(spectrum: &Spectrum, prominence: f64) -> (f64, f64) {
    let Ok(step) = uniform_step(&spectrum.omegas) else {
        return (0.0, 0.0);
    };
    let Ok(extrema) = find_extrema(spectrum, prominence) else {
        return (0.0, 0.0);
    };
    hole_from(spectrum, &extrema, balance(spectrum), step)
}

fn hole_from(spectrum: &Spectrum, extrema: &[Extremum], asymmetry: f64, step: f64) -> (f64, f64) {
    if asymmetry.abs() >= ASYMMETRY_THRESHOLD {
        return (0.0, 0.0);
    }
    let Some(i) = central_hole(extrema, step) else {
        return (0.0, 0.0);
    };
    let centre = extrema[i];
    let depth = extrema[i - 1].value.min(extrema[i + 1].value) - centre.value;
    let level = centre.value + 0.5 * depth;
    let w = &spectrum.omegas;
    let v = &spectrum.values;

    let mut r = centre.index;
    while v[r] < level {
        r += 1;
    }
    let right = w[r - 1] + (level - v[r - 1]) / (v[r] - v[r - 1]) * (w[r] - w[r - 1]);
    let mut l = centre.index;
    while v[l] < level {
        l -= 1;
    }
    let left = w[l] + (level - v[l]) / (v[l + 1] - v[l]) * (w[l + 1] - w[l]);
    (depth, right - left)
}

/// (int_{omega>0} Lambda - int_{omega<0} Lambda) / int Lambda, trapezoidal,
/// on a grid symmetric about zero.
pub fn asymmetry(spectrum: &Spectrum) -> Result<f64> {
    if !is_symmetric(&spectrum.omegas) {
        return Err(Error::InvalidGrid(
            "grid not symmetric about omega = 0".into(),
        ));
    }
    Ok(balance(spectrum))
}

fn balance(spectrum: &Spectrum) -> f64 {
    let w = &spectrum.omegas;
    let v = &spectrum.values;
    let mut pos = 0.0;
    let mut neg = 0.0;
    for k in 0..w.len().saturating_sub(1) {
        let (a, b) = (w[k], w[k + 1]);
        let (fa, fb) = (v[k], v[k + 1]);
        if a >= 0.0 {
            pos += 0.5 * (fa + fb) * (b - a);
        } else if b <= 0.0 {
            neg += 0.5 * (fa + fb) * (b - a);
        } else {
            let f0 = fa + (fb - fa) * (-a) / (b - a);
            neg += 0.5 * (fa + f0) * (-a);
            pos += 0.5 * (f0 + fb) * b;
        }
    }
    let total = pos + neg;
    if total <= 0.0 {
        return 0.0;
    }
    ((pos - neg) / total).clamp(-1.0, 1.0)
}
