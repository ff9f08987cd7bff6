//! File export: binary PGM images, CSV tables, and JSON metadata sidecars.
//!
//! Float formatting uses Rust's shortest round-trip representation, so a
//! fixed configuration and seed reproduce byte-identical files.

use ndarray::Array2;
use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// How to map real values onto the 0..=255 gray scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrayScale {
    /// Phase values in [0, 2pi) mapped linearly onto [0, 255].
    Phase,
    /// Non-negative values scaled by the map maximum.
    MaxNormalized,
    /// Signed values mapped linearly from [min, max] onto [0, 255].
    MinMax,
}

/// Write an 8-bit binary PGM ("P5") image, row-major.
pub fn write_pgm(path: &Path, values: &Array2<f64>, scale: GrayScale) -> Result<()> {
    let (ny, nx) = values.dim();
    let (lo, hi) = match scale {
        GrayScale::Phase => (0.0, TAU),
        GrayScale::MaxNormalized => {
            let max = values.iter().copied().fold(0.0f64, f64::max);
            (0.0, if max > 0.0 { max } else { 1.0 })
        }
        GrayScale::MinMax => {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max > min {
                (min, max)
            } else {
                (min, min + 1.0)
            }
        }
    };
    let span = hi - lo;
    let mut bytes = Vec::with_capacity(nx * ny + 32);
    bytes.extend_from_slice(format!("P5\n{nx} {ny}\n255\n").as_bytes());
    for v in values.iter() {
        let t = ((v - lo) / span * 255.0).round().clamp(0.0, 255.0);
        bytes.push(t as u8);
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// Write a CSV file: a header line, then one comma-joined row per record.
/// Decimal point is '.', rows are newline-delimited.
pub fn write_csv<I, R>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.into_iter().collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Format a float with the shortest round-trip representation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Write a full 2-D map as CSV: header `# rows=.. cols=..`, one grid row per
/// line. Lossless float export for quantitative checks.
pub fn write_matrix_csv(path: &Path, values: &Array2<f64>) -> Result<()> {
    let (ny, nx) = values.dim();
    let mut out = String::new();
    out.push_str(&format!("# rows={ny} cols={nx}\n"));
    for j in 0..ny {
        let row: Vec<String> = (0..nx).map(|i| fmt_f64(values[[j, i]])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write the metadata sidecar: pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut file = fs::File::create(path)?;
    let text = serde_json::to_string_pretty(value).expect("serializable metadata");
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}
