//! Preset parameter sets and data files for the four figures.
//!
//! Figures 1 and 4 use gamma = 1, Omega = 50, Delta = 0 with
//! L = 10, 50, 100, 200; figure 3 uses L = 200 with Delta = 50, 100, 200,
//! 400. Figure 2 is a table over L = 0, 4, ..., 200 (50 steps) on a fixed
//! 401-point grid over |omega| <= 200.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fluorospec::dressed::{lambda0, lambda1};
use fluorospec::features::classify;
use fluorospec::spectrum::spectrum_exact;
use fluorospec::{Classification, DriveParams, FrequencyGrid};

use crate::config::grid_for;
use crate::error::CliError;
use crate::output::{num, write_spectrum_csv};

pub const FIG2_LINEWIDTH_STEPS: usize = 50;
pub const FIG2_LINEWIDTH_MAX: f64 = 200.0;
pub const FIG2_HALF_WIDTH: f64 = 200.0;
pub const FIG2_POINTS: usize = 401;

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub label: char,
    pub params: DriveParams,
}

fn p(d: f64, l: f64) -> DriveParams {
    DriveParams::new(1.0, 50.0, d, l).expect("preset parameters are valid")
}

pub fn panels(id: u32) -> Result<Vec<Panel>, CliError> {
    let sets: Vec<DriveParams> = match id {
        1 | 4 => [10.0, 50.0, 100.0, 200.0]
            .iter()
            .map(|&l| p(0.0, l))
            .collect(),
        3 => [50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&d| p(d, 200.0))
            .collect(),
        2 => vec![],
        _ => {
            return Err(CliError::config(format!(
                "unknown figure id {id} (expected 1-4)"
            )))
        }
    };
    Ok(sets
        .into_iter()
        .zip('a'..)
        .map(|(params, label)| Panel { label, params })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrittenPanel {
    pub path: PathBuf,
    pub classification: Option<Classification>,
}

/// Writes the figure's files into `dir` and reports what was written.
pub fn write_figure(
    id: u32,
    dir: &Path,
    points: Option<usize>,
) -> Result<Vec<WrittenPanel>, CliError> {
    let panels = panels(id)?;
    std::fs::create_dir_all(dir)?;
    if id == 2 {
        let path = dir.join("fig2.csv");
        write_fig2(&path, points.unwrap_or(FIG2_POINTS))?;
        return Ok(vec![WrittenPanel {
            path,
            classification: None,
        }]);
    }
    let points = points.unwrap_or(fluorospec::grid::DEFAULT_POINTS);
    let mut out = Vec::new();
    for panel in panels {
        let grid = grid_for(None, points, &panel.params)?;
        let path = dir.join(format!("fig{id}_{}.csv", panel.label));
        let mut w = BufWriter::new(File::create(&path)?);
        let exact = spectrum_exact(&panel.params, &grid.omegas())?;
        let classification = if id == 4 {
            let omegas = grid.omegas();
            let l0 = lambda0(&panel.params, &omegas)?;
            let l1 = lambda1(&panel.params, &omegas)?;
            writeln!(w, "omega,lambda0,lambda1,total")?;
            for (k, o) in omegas.iter().enumerate() {
                let (a, b) = (l0.values[k], l1.values[k]);
                writeln!(w, "{},{},{},{}", num(*o), num(a), num(b), num(a + b))?;
            }
            None
        } else {
            write_spectrum_csv(&mut w, &exact)?;
            Some(classify(&exact, &panel.params))
        };
        w.flush()?;
        out.push(WrittenPanel {
            path,
            classification,
        });
    }
    Ok(out)
}

pub fn fig2_linewidths() -> Vec<f64> {
    (0..=FIG2_LINEWIDTH_STEPS)
        .map(|k| FIG2_LINEWIDTH_MAX * k as f64 / FIG2_LINEWIDTH_STEPS as f64)
        .collect()
}

fn write_fig2(path: &Path, points: usize) -> Result<(), CliError> {
    let omegas = FrequencyGrid::symmetric(FIG2_HALF_WIDTH, points)?.omegas();
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "linewidth,omega,lambda")?;
    for l in fig2_linewidths() {
        let s = spectrum_exact(&p(0.0, l), &omegas)?;
        for (o, v) in s.omegas.iter().zip(&s.values) {
            writeln!(w, "{},{},{}", num(l), num(*o), num(*v))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_tables() {
        assert_eq!(panels(1).unwrap().len(), 4);
        assert_eq!(panels(3).unwrap()[3].params.detuning(), 400.0);
        assert_eq!(panels(4).unwrap()[0].params.linewidth(), 10.0);
        assert!(panels(5).is_err());
        let l = fig2_linewidths();
        assert_eq!(l.len(), 51);
        assert_eq!((l[0], l[1], l[50]), (0.0, 4.0, 200.0));
    }
}
