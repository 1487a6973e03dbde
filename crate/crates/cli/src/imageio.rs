//! 16-bit grayscale image output.
//!
//! Pixel values map linearly from a window `[lo, hi]` onto `0..=65535`:
//! `round(65535 · clamp((v - lo)/(hi - lo), 0, 1))`. The default window is
//! the image's own `[min, max]`. A degenerate window maps everything to 0.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use oqf_core::ct::ImageGrid;

use crate::{CliError, CliResult};

/// Display window for 16-bit quantisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn of(image: &ImageGrid) -> Self {
        Window {
            lo: image.min(),
            hi: image.max(),
        }
    }

    pub fn quantize(&self, v: f64) -> u16 {
        let span = self.hi - self.lo;
        if !(span > 0.0) || !v.is_finite() {
            return 0;
        }
        let u = ((v - self.lo) / span).clamp(0.0, 1.0);
        (u * 65535.0).round() as u16
    }
}

/// Row-major big-endian samples, top row first.
pub fn quantize_be(image: &ImageGrid, window: Window) -> Vec<u8> {
    image
        .data
        .iter()
        .flat_map(|&v| window.quantize(v).to_be_bytes())
        .collect()
}

/// Binary PGM (`P5`, maxval 65535).
pub fn encode_pgm(image: &ImageGrid, window: Window) -> Vec<u8> {
    let mut out = format!("P5\n{0} {0}\n65535\n", image.n).into_bytes();
    out.extend(quantize_be(image, window));
    out
}

pub fn write_pgm(path: &Path, image: &ImageGrid, window: Window) -> CliResult<()> {
    fs::write(path, encode_pgm(image, window)).map_err(|e| CliError::io(path, e))
}

/// Parses a 16-bit `P5` file written by [`encode_pgm`] into raw samples.
pub fn decode_pgm(bytes: &[u8]) -> CliResult<(usize, usize, Vec<u16>)> {
    let bad = |msg: &str| CliError::Validation(format!("PGM: {msg}"));
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "65535" {
        return Err(bad("expected a 16-bit P5 file"));
    }
    let w: usize = fields[1].parse().map_err(|_| bad("width"))?;
    let h: usize = fields[2].parse().map_err(|_| bad("height"))?;
    let body = bytes.get(pos..).ok_or_else(|| bad("missing data"))?;
    if body.len() != 2 * w * h {
        return Err(bad("data length does not match the header"));
    }
    let samples = body
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    Ok((w, h, samples))
}

/// 16-bit grayscale PNG with the same quantisation as the PGM.
pub fn write_png(path: &Path, image: &ImageGrid, window: Window) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let n = image.n as u32;
    let mut enc = png::Encoder::new(BufWriter::new(file), n, n);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Sixteen);
    let to_io = |e: png::EncodingError| CliError::io(path, std::io::Error::other(e));
    let mut writer = enc.write_header().map_err(to_io)?;
    writer
        .write_image_data(&quantize_be(image, window))
        .map_err(to_io)?;
    writer.finish().map_err(to_io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> ImageGrid {
        ImageGrid {
            n: 2,
            data: vec![-1.0, 0.0, 0.5, 1.0],
        }
    }

    #[test]
    fn default_window_spans_full_range() {
        let img = ramp();
        let w = Window::of(&img);
        let q: Vec<u16> = img.data.iter().map(|&v| w.quantize(v)).collect();
        assert_eq!(q, vec![0, 32768, 49151, 65535]);
    }

    #[test]
    fn pgm_round_trip() {
        let img = ramp();
        let w = Window { lo: 0.0, hi: 1.0 };
        let (wd, ht, s) = decode_pgm(&encode_pgm(&img, w)).unwrap();
        assert_eq!((wd, ht), (2, 2));
        assert_eq!(s, vec![0, 0, 32768, 65535]);
    }

    #[test]
    fn flat_image_is_black() {
        let img = ImageGrid {
            n: 1,
            data: vec![3.0],
        };
        assert_eq!(Window::of(&img).quantize(3.0), 0);
    }
}
