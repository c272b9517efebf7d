//! Refraction from an 8-bit binary PGM (P5) image.

use crate::error::{arg_err, OftError, Result};
use crate::grid::{Grid, RefractionField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major, row 0 at the top.
    pub pixels: Vec<u8>,
}

fn parse_err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(OftError::Parse {
        offset,
        message: message.into(),
    })
}

/// Parses a binary PGM. Header comments (`#` to end of line) are allowed.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return parse_err(0, "missing P5 magic number");
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    let mut starts = [0usize; 3];
    for (k, name) in ["width", "height", "maxval"].iter().enumerate() {
        let start_ws = pos;
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        if pos == start_ws {
            return parse_err(pos, format!("expected whitespace before {name}"));
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == start {
            return parse_err(pos, format!("expected {name}"));
        }
        starts[k] = start;
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        fields[k] = text.parse().map_err(|_| OftError::Parse {
            offset: start,
            message: format!("{name} out of range"),
        })?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return parse_err(starts[0], "image has zero size");
    }
    if !(1..=255).contains(&maxval) {
        return parse_err(starts[2], format!("maxval {maxval} is not an 8-bit depth"));
    }
    match bytes.get(pos) {
        Some(c) if c.is_ascii_whitespace() => pos += 1,
        _ => return parse_err(pos, "expected a single whitespace before pixel data"),
    }
    let need = width.checked_mul(height).ok_or_else(|| OftError::Parse {
        offset: pos,
        message: "image dimensions overflow".into(),
    })?;
    let data = &bytes[pos..];
    if data.len() < need {
        return parse_err(
            bytes.len(),
            format!("pixel data truncated: {} of {need} bytes", data.len()),
        );
    }
    Ok(GrayImage {
        width,
        height,
        maxval: maxval as u16,
        pixels: data[..need].to_vec(),
    })
}

impl GrayImage {
    /// Intensity in `[0, 1]` at fractional pixel coordinates, bilinear.
    pub fn sample(&self, col: f64, row: f64) -> f64 {
        let c = col.clamp(0.0, (self.width - 1) as f64);
        let r = row.clamp(0.0, (self.height - 1) as f64);
        let (c0, r0) = (c.floor() as usize, r.floor() as usize);
        let (c1, r1) = ((c0 + 1).min(self.width - 1), (r0 + 1).min(self.height - 1));
        let (fc, fr) = (c - c0 as f64, r - r0 as f64);
        let p = |r: usize, c: usize| self.pixels[r * self.width + c] as f64 / self.maxval as f64;
        let top = p(r0, c0) * (1.0 - fc) + p(r0, c1) * fc;
        let bottom = p(r1, c0) * (1.0 - fc) + p(r1, c1) * fc;
        top * (1.0 - fr) + bottom * fr
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// `β = 1 + amplitude · intensity`, the image stretched corner to corner over
/// a 2D grid (image columns along axis 1, image top at the upper edge of
/// axis 2), clamped to `[1, 1 + amplitude]`.
pub fn refraction_from_image(image: &GrayImage, amplitude: f64, grid: &Grid) -> Result<RefractionField> {
    if grid.dim() != 2 {
        return arg_err("raster refraction needs a 2D grid");
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return arg_err("raster amplitude must be finite and non-negative");
    }
    let (nx, ny) = (grid.n(0), grid.n(1));
    let sx = (image.width - 1) as f64 / (nx - 1) as f64;
    let sy = (image.height - 1) as f64 / (ny - 1) as f64;
    let beta = (0..grid.len())
        .map(|idx| {
            let m = grid.multi_index(idx);
            let col = m[0] as f64 * sx;
            let row = (ny - 1 - m[1]) as f64 * sy;
            (1.0 + amplitude * image.sample(col, row)).clamp(1.0, 1.0 + amplitude)
        })
        .collect();
    RefractionField::from_values(grid, beta)
}

/// Reads a PGM file and resamples it onto `grid`.
pub fn load_raster_refraction(path: &std::path::Path, amplitude: f64, grid: &Grid) -> Result<RefractionField> {
    let bytes = std::fs::read(path)?;
    refraction_from_image(&parse_pgm(&bytes)?, amplitude, grid)
}
