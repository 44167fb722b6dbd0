use std::io::{self, Write};

use fluorospec::{DriveParams, Spectrum};
use serde::{Deserialize, Serialize};

/// 17 significant digits, enough to recover every f64 exactly.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_spectrum_csv(w: &mut dyn Write, s: &Spectrum) -> io::Result<()> {
    writeln!(w, "omega,lambda")?;
    for (o, v) in s.omegas.iter().zip(&s.values) {
        writeln!(w, "{},{}", num(*o), num(*v))?;
    }
    Ok(())
}

/// JSON form of a computed spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub params: DriveParams,
    pub spectrum: Spectrum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<f64>>,
}

pub fn write_spectrum_json(w: &mut dyn Write, doc: &SpectrumDocument) -> io::Result<()> {
    serde_json::to_writer(&mut *w, doc)?;
    writeln!(w)
}

pub fn write_table(w: &mut dyn Write, header: &str, rows: &[Vec<String>]) -> io::Result<()> {
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fluorospec::Method;

    #[test]
    fn number_format_round_trips() {
        for x in [
            0.1,
            -1.0 / 3.0,
            1e-300,
            6.02214076e23,
            0.0,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let s = Spectrum::new(vec![-1.0, 1.0], vec![0.5, 0.25], 0.0, Method::Exact);
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "omega,lambda\n-1.0000000000000000e0,5.0000000000000000e-1\n1.0000000000000000e0,2.5000000000000000e-1\n"
        );
    }
}
