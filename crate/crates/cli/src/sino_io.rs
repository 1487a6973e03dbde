//! Sinogram files.
//!
//! CSV: header `theta,t_0,...,t_{D-1}`, then one row per view with the
//! angle followed by the detector values, all with 12 significant digits.
//!
//! Binary: the 8 bytes `OQFSINO1`, the view count and detector count as
//! little-endian `u64`, then the values as little-endian `f64`, view-major.

use std::fs;
use std::path::Path;

use oqf_core::ct::Sinogram;

use crate::report::fmt_sig12;
use crate::{CliError, CliResult};

pub const MAGIC: &[u8; 8] = b"OQFSINO1";

pub fn encode_csv(s: &Sinogram) -> String {
    let mut out = String::from("theta");
    for j in 0..s.n_detectors {
        out.push_str(&format!(",t_{j}"));
    }
    out.push('\n');
    for k in 0..s.n_angles {
        out.push_str(&fmt_sig12(s.angle(k)));
        for v in s.row(k) {
            out.push(',');
            out.push_str(&fmt_sig12(*v));
        }
        out.push('\n');
    }
    out
}

pub fn decode_csv(text: &str) -> CliResult<Sinogram> {
    let bad = |line: usize, msg: String| CliError::Validation(format!("CSV line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    let n_det = header.split(',').count().saturating_sub(1);
    let mut values = Vec::new();
    let mut n_angles = 0;
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n_det + 1 {
            return Err(bad(
                i + 1,
                format!("expected {} fields, found {}", n_det + 1, cells.len()),
            ));
        }
        for c in &cells[1..] {
            values.push(
                c.trim()
                    .parse::<f64>()
                    .map_err(|e| bad(i + 1, format!("{c:?}: {e}")))?,
            );
        }
        n_angles += 1;
    }
    Ok(Sinogram::new(n_angles, n_det, values)?)
}

pub fn encode_bin(s: &Sinogram) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 8 * s.values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(s.n_angles as u64).to_le_bytes());
    out.extend_from_slice(&(s.n_detectors as u64).to_le_bytes());
    for v in &s.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_bin(bytes: &[u8]) -> CliResult<Sinogram> {
    let bad = |msg: &str| CliError::Validation(format!("sinogram file: {msg}"));
    if bytes.len() < 24 || &bytes[..8] != MAGIC {
        return Err(bad("missing OQFSINO1 header"));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let (k, d) = (word(8) as usize, word(16) as usize);
    let expected = k
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| bad("dimensions overflow"))?;
    if bytes.len() - 24 != expected {
        return Err(bad("data length does not match the header"));
    }
    let values = bytes[24..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Sinogram::new(k, d, values)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinoFormat {
    Csv,
    Bin,
}

impl SinoFormat {
    /// `.csv` is CSV, anything else binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => SinoFormat::Csv,
            _ => SinoFormat::Bin,
        }
    }
}

pub fn write(path: &Path, s: &Sinogram, format: SinoFormat) -> CliResult<()> {
    let bytes = match format {
        SinoFormat::Csv => encode_csv(s).into_bytes(),
        SinoFormat::Bin => encode_bin(s),
    };
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> CliResult<Sinogram> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        decode_bin(&bytes)
    } else {
        decode_csv(&String::from_utf8_lossy(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Sinogram {
        Sinogram::new(2, 3, vec![0.1, -2.5e-7, 3.0, 1.0 / 3.0, 0.0, 12345.678]).unwrap()
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let s = sample();
        assert_eq!(decode_bin(&encode_bin(&s)).unwrap(), s);
    }

    #[test]
    fn csv_round_trip_to_twelve_digits() {
        let s = sample();
        let text = encode_csv(&s);
        assert!(text.starts_with("theta,t_0,t_1,t_2\n"));
        let back = decode_csv(&text).unwrap();
        for (a, b) in back.values.iter().zip(&s.values) {
            assert!((a - b).abs() <= 1e-11 * b.abs());
        }
    }

    #[test]
    fn truncated_binary_rejected() {
        let bytes = encode_bin(&sample());
        assert!(decode_bin(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_bin(b"NOTASINOGRAM").is_err());
    }
}
