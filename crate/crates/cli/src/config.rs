use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use fluorospec::grid::DEFAULT_POINTS;
use fluorospec::stochastic::McSpectrumConfig;
use fluorospec::{DriveParams, FrequencyGrid};

use crate::args::{Format, GridArgs, MethodArg, ParamArgs, SpectrumArgs};
use crate::error::CliError;

const KEYS: &[&str] = &[
    "gamma",
    "rabi",
    "detuning",
    "linewidth",
    "omega-min",
    "omega-max",
    "points",
    "method",
    "mc-n",
    "mc-dt",
    "seed",
    "format",
    "output",
];

/// `key = value` lines; `#` starts a comment. Keys use the flag spelling
/// without dashes in front (underscores are accepted too).
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::config(format!("config line {}: expected key = value", no + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::config(format!(
                "config line {}: unknown key `{key}`",
                no + 1
            )));
        }
        let value = v.trim().trim_matches('"').to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(CliError::config(format!(
                "config line {}: duplicate key `{key}`",
                no + 1
            )));
        }
    }
    Ok(map)
}

pub fn load_config(path: Option<&Path>) -> Result<BTreeMap<String, String>, CliError> {
    match path {
        None => Ok(BTreeMap::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

/// Flag value if given, else the file value parsed, else `None`.
fn pick<T: FromStr>(
    flag: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| CliError::config(format!("invalid value for `{key}`: {s}"))),
    }
}

fn pick_enum<T: ValueEnum>(
    flag: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None => Ok(None),
        Some(s) => T::from_str(s, false)
            .map(Some)
            .map_err(|_| CliError::config(format!("invalid value for `{key}`: {s}"))),
    }
}

/// Parameters with defaults gamma = 1, detuning = 0, linewidth = 0; the
/// Rabi frequency has no default.
pub fn resolve_params(
    args: &ParamArgs,
    file: &BTreeMap<String, String>,
) -> Result<DriveParams, CliError> {
    let gamma = pick(args.gamma, file, "gamma")?.unwrap_or(1.0);
    let rabi = pick(args.rabi, file, "rabi")?.ok_or_else(|| CliError::config("missing --rabi"))?;
    let detuning = pick(args.detuning, file, "detuning")?.unwrap_or(0.0);
    let linewidth = pick(args.linewidth, file, "linewidth")?.unwrap_or(0.0);
    Ok(DriveParams::new(gamma, rabi, detuning, linewidth)?)
}

/// Explicit grid if both ends are given, `None` for the per-parameter
/// default. At least 5 points are required.
pub fn resolve_grid(
    args: &GridArgs,
    file: &BTreeMap<String, String>,
) -> Result<(Option<(f64, f64)>, usize), CliError> {
    let lo = pick(args.omega_min, file, "omega-min")?;
    let hi = pick(args.omega_max, file, "omega-max")?;
    let points = pick(args.points, file, "points")?.unwrap_or(DEFAULT_POINTS);
    if points < 5 {
        return Err(CliError::config(format!(
            "points must be >= 5 (got {points})"
        )));
    }
    let range = match (lo, hi) {
        (None, None) => None,
        (Some(a), Some(b)) => {
            FrequencyGrid::new(a, b, points)?;
            Some((a, b))
        }
        _ => {
            return Err(CliError::config(
                "--omega-min and --omega-max must be given together",
            ))
        }
    };
    Ok((range, points))
}

pub fn grid_for(
    range: Option<(f64, f64)>,
    points: usize,
    params: &DriveParams,
) -> Result<FrequencyGrid, CliError> {
    Ok(match range {
        Some((a, b)) => FrequencyGrid::new(a, b, points)?,
        None => {
            let half = fluorospec::grid::default_half_width(params);
            FrequencyGrid::symmetric(half, points)?
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
}

pub const DEFAULT_MC_N: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: DriveParams,
    pub grid: FrequencyGrid,
    pub method: MethodArg,
    pub mc: Option<McOptions>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(args: &SpectrumArgs) -> Result<Self, CliError> {
        let file = load_config(args.config.as_deref())?;
        let params = resolve_params(&args.params, &file)?;
        let (range, points) = resolve_grid(&args.grid, &file)?;
        let grid = grid_for(range, points, &params)?;
        let method = pick_enum(args.method, &file, "method")?.unwrap_or(MethodArg::Exact);
        let format = pick_enum(args.format, &file, "format")?.unwrap_or(Format::Csv);
        let output = pick(args.output.clone(), &file, "output")?;

        let n = pick(args.mc_n, &file, "mc-n")?;
        let dt = pick(args.mc_dt, &file, "mc-dt")?;
        let seed = pick(args.seed, &file, "seed")?;
        let mc = if method == MethodArg::Mc {
            let n = n.unwrap_or(DEFAULT_MC_N);
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let dt = dt.unwrap_or_else(|| McSpectrumConfig::default_for(&params, n, seed).dt);
            Some(McOptions { n, dt, seed })
        } else {
            if n.is_some() || dt.is_some() || seed.is_some() {
                return Err(CliError::config(
                    "--mc-n, --mc-dt and --seed apply only to --method mc",
                ));
            }
            None
        };
        Ok(Self {
            params,
            grid,
            method,
            mc,
            format,
            output,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let m =
            parse_config("# comment\nrabi = 50\n linewidth=100 # trailing\n\nmethod = \"exact\"\n")
                .unwrap();
        assert_eq!(m["rabi"], "50");
        assert_eq!(m["linewidth"], "100");
        assert_eq!(m["method"], "exact");
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(parse_config("colour = blue").is_err());
        assert!(parse_config("rabi 50").is_err());
        assert!(parse_config("rabi = 1\nrabi = 2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config("rabi = 50\nlinewidth = 10").unwrap();
        let args = ParamArgs {
            linewidth: Some(200.0),
            ..Default::default()
        };
        let p = resolve_params(&args, &file).unwrap();
        assert_eq!(p.rabi(), 50.0);
        assert_eq!(p.linewidth(), 200.0);
        assert_eq!(p.gamma(), 1.0);
    }

    #[test]
    fn mc_options_only_with_mc() {
        let mut args = SpectrumArgs {
            params: ParamArgs {
                rabi: Some(5.0),
                ..Default::default()
            },
            mc_n: Some(200),
            ..Default::default()
        };
        assert!(RunConfig::from_args(&args).is_err());
        args.method = Some(MethodArg::Mc);
        let cfg = RunConfig::from_args(&args).unwrap();
        assert_eq!(cfg.mc.unwrap().n, 200);
    }

    #[test]
    fn grid_checks() {
        let file = BTreeMap::new();
        let g = GridArgs {
            omega_min: Some(1.0),
            ..Default::default()
        };
        assert!(resolve_grid(&g, &file).is_err());
        let g = GridArgs {
            points: Some(4),
            ..Default::default()
        };
        assert!(resolve_grid(&g, &file).is_err());
        let g = GridArgs {
            omega_min: Some(2.0),
            omega_max: Some(1.0),
            points: None,
        };
        assert!(resolve_grid(&g, &file).is_err());
    }
}
