//! Grayscale images: loading, PGM export and synthetic fixtures.

use std::fs;
use std::path::Path;

use crate::{Error, Result};

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("empty image {width}x{height}")));
        }
        match width.checked_mul(height) {
            Some(n) if n == pixels.len() => Ok(GrayImage { width, height, pixels }),
            _ => Err(Error::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            ))),
        }
    }

    /// Builds an image from interleaved RGB triples using BT.601 luma.
    pub fn from_rgb(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != width.saturating_mul(height).saturating_mul(3) {
            return Err(Error::InvalidImage(format!(
                "{} RGB bytes for a {width}x{height} image",
                rgb.len()
            )));
        }
        let pixels = rgb.chunks_exact(3).map(|p| luma_bt601(p[0], p[1], p[2])).collect();
        GrayImage::new(width, height, pixels)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(col, row));
            }
        }
        GrayImage::new(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Intensity at column `col`, row `row`. Panics when out of range.
    #[inline]
    pub fn get(&self, col: usize, row: usize) -> u8 {
        assert!(col < self.width && row < self.height, "pixel ({col}, {row}) out of range");
        self.pixels[row * self.width + col]
    }

    /// Binary PGM (P5, maxval 255) encoding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn save_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_pgm()).map_err(|e| Error::io(path, e))
    }
}

/// BT.601 luma, rounded half-up: `(299 r + 587 g + 114 b + 500) / 1000`.
#[inline]
pub fn luma_bt601(r: u8, g: u8, b: u8) -> u8 {
    let y = (299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000;
    y.min(255) as u8
}

/// Reads a raster file and converts it to grayscale.
///
/// Binary PGM (P5) and PPM (P6) are decoded natively. PNG and JPEG are
/// accepted when the `formats` feature is enabled. Color inputs go through
/// [`luma_bt601`].
pub fn load_grayscale(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_grayscale(&bytes).map_err(|e| e.at(path))
}

#[derive(Debug)]
enum DecodeError {
    Unsupported(String),
    Corrupt(String),
}

impl DecodeError {
    fn at(self, path: &Path) -> Error {
        match self {
            DecodeError::Unsupported(reason) => Error::UnsupportedFormat { path: path.to_path_buf(), reason },
            DecodeError::Corrupt(reason) => Error::CorruptImage { path: path.to_path_buf(), reason },
        }
    }
}

fn decode_grayscale(bytes: &[u8]) -> Result<GrayImage, DecodeError> {
    match bytes {
        [b'P', b'5', ..] => decode_pnm(bytes, 1),
        [b'P', b'6', ..] => decode_pnm(bytes, 3),
        [b'P', b'1'..=b'4', ..] => Err(DecodeError::Unsupported("only binary PGM (P5) and PPM (P6) are supported".into())),
        [0x89, b'P', b'N', b'G', ..] | [0xFF, 0xD8, ..] => decode_external(bytes),
        _ => Err(DecodeError::Unsupported("unrecognized file signature".into())),
    }
}

#[cfg(feature = "formats")]
fn decode_external(bytes: &[u8]) -> Result<GrayImage, DecodeError> {
    let img = image::load_from_memory(bytes).map_err(|e| match e {
        image::ImageError::Unsupported(u) => DecodeError::Unsupported(u.to_string()),
        other => DecodeError::Corrupt(other.to_string()),
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let gray = match img {
        image::DynamicImage::ImageLuma8(g) => GrayImage::new(w, h, g.into_raw()),
        other => GrayImage::from_rgb(w, h, other.to_rgb8().as_raw()),
    };
    gray.map_err(|e| DecodeError::Corrupt(e.to_string()))
}

#[cfg(not(feature = "formats"))]
fn decode_external(_bytes: &[u8]) -> Result<GrayImage, DecodeError> {
    Err(DecodeError::Unsupported("built without PNG/JPEG support".into()))
}

/// Netpbm header: magic, width, height, maxval, each separated by whitespace
/// with `#` comments allowed, then exactly one whitespace byte before data.
fn decode_pnm(bytes: &[u8], channels: usize) -> Result<GrayImage, DecodeError> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(DecodeError::Corrupt("truncated or malformed header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| DecodeError::Corrupt("header value out of range".into()))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(DecodeError::Corrupt("missing whitespace after header".into()));
    }
    pos += 1;

    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(DecodeError::Unsupported(format!("maxval {maxval} (only 8-bit samples are supported)")));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| DecodeError::Corrupt("dimensions overflow".into()))?;
    let data = &bytes[pos..];
    if data.len() < expected {
        return Err(DecodeError::Corrupt(format!("expected {expected} data bytes, found {}", data.len())));
    }
    let data = &data[..expected];
    let img = if channels == 1 {
        GrayImage::new(width, height, data.to_vec())
    } else {
        GrayImage::from_rgb(width, height, data)
    };
    img.map_err(|e| DecodeError::Corrupt(e.to_string()))
}

/// Synthetic image families used as fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Constant(u8),
    /// `pixel(c, r) = c mod 256`
    RampX,
    /// `pixel(c, r) = r mod 256`
    RampY,
    /// Squares of side `period`, 0 at the origin and 255 next to it.
    Checker(usize),
}

pub fn synth_image(kind: SynthKind, width: usize, height: usize) -> Result<GrayImage> {
    if let SynthKind::Checker(0) = kind {
        return Err(Error::InvalidParams("checker period must be >= 1".into()));
    }
    GrayImage::from_fn(width, height, |c, r| match kind {
        SynthKind::Constant(v) => v,
        SynthKind::RampX => (c % 256) as u8,
        SynthKind::RampY => (r % 256) as u8,
        SynthKind::Checker(p) => {
            if (c / p + r / p) % 2 == 0 {
                0
            } else {
                255
            }
        }
    })
}
