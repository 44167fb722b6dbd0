use std::fs::File;
use std::io::{BufWriter, Write};

use fluorospec::bloch::{correlation, default_correlation_steps};
use fluorospec::dressed::dressed_total;
use fluorospec::features::{classify, default_prominence, find_extrema};
use fluorospec::spectrum::{
    spectrum_approx_broadband, spectrum_exact, spectrum_from_correlation, spectrum_resolvent,
};
use fluorospec::stochastic::{mc_steady_spectrum, McSpectrumConfig};
use fluorospec::{SpectralFeatures, Spectrum};

use crate::args::{FigureArgs, Format, MethodArg, SweepArgs, SweepParam, VerifyArgs};
use crate::config::{grid_for, load_config, resolve_grid, resolve_params, RunConfig};
use crate::error::{CliError, ErrorKind};
use crate::figures::write_figure;
use crate::output::{num, write_spectrum_csv, write_spectrum_json, write_table, SpectrumDocument};
use crate::verify::{run_suite, VerifyOptions};

/// Spectrum plus per-point standard error for Monte Carlo runs.
pub fn compute(cfg: &RunConfig) -> Result<(Spectrum, Option<Vec<f64>>), CliError> {
    let p = &cfg.params;
    let w = cfg.grid.omegas();
    let s = match cfg.method {
        MethodArg::Exact => spectrum_exact(p, &w)?,
        MethodArg::Resolvent => spectrum_resolvent(p, &w)?,
        MethodArg::Approx => spectrum_approx_broadband(p, &w),
        MethodArg::Dressed => dressed_total(p, &w)?,
        MethodArg::Fourier => {
            let (tau_max, dtau) = default_correlation_steps(p);
            spectrum_from_correlation(&correlation(p, tau_max, dtau)?, &w)?
        }
        MethodArg::Mc => {
            let o = cfg.mc.expect("mc options present for the mc method");
            let mut mc_cfg = McSpectrumConfig::default_for(p, o.n, o.seed);
            mc_cfg.dt = o.dt;
            let mc = mc_steady_spectrum(p, &w, &mc_cfg)?;
            return Ok((mc.spectrum, Some(mc.stderr)));
        }
    };
    Ok((s, None))
}

pub fn summary_line(spectrum: &Spectrum, cfg: &RunConfig) -> String {
    let extrema = find_extrema(spectrum, default_prominence(spectrum))
        .map(|e| e.len())
        .unwrap_or(0);
    format!(
        "classification={} flat={} elastic_weight={} extrema={} method={} points={} out_of_regime={}",
        classify(spectrum, &cfg.params),
        spectrum.is_flat_zero(),
        num(spectrum.elastic_weight),
        extrema,
        spectrum.method,
        spectrum.len(),
        spectrum.out_of_regime
    )
}

fn open_output(path: Option<&std::path::Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::new(ErrorKind::Io, format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

/// Writes the spectrum to the configured destination and returns the
/// summary line. With no output file the data goes to standard output and
/// the caller should send the summary to standard error.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    let (spectrum, stderr) = compute(cfg)?;
    let mut w = open_output(cfg.output.as_deref())?;
    match cfg.format {
        Format::Csv => write_spectrum_csv(&mut w, &spectrum)?,
        Format::Json => write_spectrum_json(
            &mut w,
            &SpectrumDocument {
                params: cfg.params,
                spectrum: spectrum.clone(),
                stderr,
            },
        )?,
    }
    w.flush()?;
    Ok(summary_line(&spectrum, cfg))
}

pub fn cmd_figure(args: &FigureArgs) -> Result<Vec<String>, CliError> {
    let written = write_figure(args.id, &args.out_dir, args.points)?;
    Ok(written
        .iter()
        .map(|p| match p.classification {
            Some(c) => format!("{} {}", p.path.display(), c),
            None => p.path.display().to_string(),
        })
        .collect())
}

/// Report lines and overall pass flag.
pub fn cmd_verify(args: &VerifyArgs) -> Result<(Vec<String>, bool), CliError> {
    let opts = VerifyOptions::new(args.n, args.seed, &args.tolerances)?;
    let checks = run_suite(args.suite, &opts);
    let ok = checks.iter().all(|c| c.passed);
    let mut lines: Vec<String> = checks.iter().map(|c| c.line()).collect();
    let failed = checks.iter().filter(|c| !c.passed).count();
    lines.push(format!(
        "{}: {} checks, {} failed",
        if ok { "PASS" } else { "FAIL" },
        checks.len(),
        failed
    ));
    Ok((lines, ok))
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::config(format!("invalid sweep value `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError::config("sweep needs at least one value"));
    }
    Ok(values)
}

pub const SWEEP_HEADER: &str = "value,classification,hole_depth,hole_fwhm,asymmetry,elastic_weight";

/// One feature row per value, in the given order.
pub fn sweep_rows(args: &SweepArgs) -> Result<Vec<Vec<String>>, CliError> {
    let file = load_config(args.config.as_deref())?;
    let values = parse_values(&args.values)?;
    let (range, points) = resolve_grid(&args.grid, &file)?;
    let mut rows = Vec::with_capacity(values.len());
    for v in values {
        let mut pa = args.params.clone();
        match args.param {
            SweepParam::Linewidth => pa.linewidth = Some(v),
            SweepParam::Rabi => pa.rabi = Some(v),
            SweepParam::Detuning => pa.detuning = Some(v),
            SweepParam::Gamma => pa.gamma = Some(v),
        }
        let p = resolve_params(&pa, &file)?;
        let grid = grid_for(range, points, &p)?;
        let s = spectrum_exact(&p, &grid.omegas())?;
        let f = SpectralFeatures::compute(&s, &p)?;
        rows.push(vec![
            num(v),
            f.classification.to_string(),
            num(f.hole_depth),
            num(f.hole_fwhm),
            num(f.asymmetry),
            num(s.elastic_weight),
        ]);
    }
    Ok(rows)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let rows = sweep_rows(args)?;
    let mut w = open_output(args.output.as_deref())?;
    write_table(&mut w, SWEEP_HEADER, &rows)?;
    w.flush()?;
    Ok(())
}
