//! RTLNP encoding: subsector averages, per-pixel codes, feature images and
//! histograms.

use rayon::prelude::*;

use crate::geometry::{RingOffset, SectorGeometry};
use crate::imaging::GrayImage;
use crate::{lbp, Error, Result};

/// Per-pixel codes of a descriptor. Pixels closer than `margin` to the
/// border are not encoded and hold 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureImage {
    width: usize,
    height: usize,
    margin: usize,
    bits: u32,
    codes: Vec<u32>,
}

impl FeatureImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Bits per code; codes are below `2^bits`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn code(&self, col: usize, row: usize) -> u32 {
        self.codes[row * self.width + col]
    }

    pub fn interior_len(&self) -> usize {
        (self.width - 2 * self.margin) * (self.height - 2 * self.margin)
    }

    /// Interior codes, row by row.
    pub fn interior(&self) -> impl Iterator<Item = u32> + '_ {
        let (w, m) = (self.width, self.margin);
        (m..self.height - m).flat_map(move |r| self.codes[r * w + m..r * w + w - m].iter().copied())
    }

    /// Codes rescaled to `floor(code * 255 / (2^bits - 1))` for viewing.
    pub fn to_visual(&self) -> GrayImage {
        let max = (1u64 << self.bits) - 1;
        let pixels = self.codes.iter().map(|&c| (c as u64 * 255 / max) as u8).collect();
        GrayImage::new(self.width, self.height, pixels).expect("feature image has source dimensions")
    }

    pub(crate) fn from_rows(
        image: &GrayImage,
        margin: usize,
        bits: u32,
        encode_row: impl Fn(usize, &mut [u32]) + Sync,
    ) -> Result<Self> {
        let (width, height) = (image.width(), image.height());
        if width <= 2 * margin || height <= 2 * margin {
            return Err(Error::ImageTooSmall { width, height, min: 2 * margin });
        }
        let mut codes = vec![0u32; width * height];
        codes
            .par_chunks_mut(width)
            .enumerate()
            .filter(|(row, _)| *row >= margin && *row < height - margin)
            .for_each(|(row, out)| encode_row(row, &mut out[margin..width - margin]));
        Ok(FeatureImage { width, height, margin, bits, codes })
    }
}

/// Code counts over the encoded interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    bins: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn from_bins(bins: Vec<u64>) -> Self {
        let total = bins.iter().sum();
        Histogram { bins, total }
    }

    pub fn bins(&self) -> &[u64] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// L1-normalized copy; all zeros when the histogram is empty.
    pub fn normalized(&self) -> Vec<f64> {
        if self.total == 0 {
            return vec![0.0; self.bins.len()];
        }
        let t = self.total as f64;
        self.bins.iter().map(|&b| b as f64 / t).collect()
    }
}

/// `floor((sum of sampled intensities [+ reference]) / (count [+ 1]))`.
pub fn subsector_average(
    image: &GrayImage,
    center: (usize, usize),
    offsets: &[RingOffset],
    include_reference: bool,
) -> Result<u32> {
    let (col, row) = center;
    let mut sum = 0u32;
    let mut count = 0u32;
    if include_reference {
        if col >= image.width() || row >= image.height() {
            return Err(Error::OutOfBounds { col, row, margin: 0 });
        }
        sum += image.get(col, row) as u32;
        count += 1;
    }
    for o in offsets {
        let c = col as i64 + o.dc as i64;
        let r = row as i64 + o.dr as i64;
        if c < 0 || r < 0 || c >= image.width() as i64 || r >= image.height() as i64 {
            return Err(Error::OutOfBounds { col, row, margin: o.ring as usize });
        }
        sum += image.get(c as usize, r as usize) as u32;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidParams("empty subsector".into()));
    }
    Ok(sum / count)
}

/// 1 when the inner average exceeds the outer one, 0 otherwise.
#[inline]
pub fn encode_bit(a_in: u32, a_out: u32) -> u32 {
    (a_in > a_out) as u32
}

/// RTLNP code of one pixel, `sum_j 2^(j-1) * C(A_in_j, A_out_j)`.
pub fn encode_pixel(image: &GrayImage, center: (usize, usize), geometry: &SectorGeometry) -> Result<u32> {
    let m = geometry.margin();
    let (col, row) = center;
    if col < m || row < m || col + m >= image.width() || row + m >= image.height() {
        return Err(Error::OutOfBounds { col, row, margin: m });
    }
    let mut code = 0;
    for (j, sector) in geometry.sectors().iter().enumerate() {
        let a_in = subsector_average(image, center, &sector.inner, true)?;
        let a_out = subsector_average(image, center, &sector.outer, false)?;
        code |= encode_bit(a_in, a_out) << j;
    }
    Ok(code)
}

/// Sector offsets flattened to linear pixel strides for one image width.
struct LinearEncoder {
    /// `(inner strides, inner count incl. reference, outer strides, outer count)` per sector
    sectors: Vec<(Vec<isize>, u32, Vec<isize>, u32)>,
}

impl LinearEncoder {
    fn new(geometry: &SectorGeometry, width: usize) -> Self {
        let stride = |o: &RingOffset| o.dr as isize * width as isize + o.dc as isize;
        let sectors = geometry
            .sectors()
            .iter()
            .map(|s| {
                let inner: Vec<isize> = s.inner.iter().map(stride).collect();
                let outer: Vec<isize> = s.outer.iter().map(stride).collect();
                let (ni, no) = (inner.len() as u32 + 1, outer.len() as u32);
                (inner, ni, outer, no)
            })
            .collect();
        LinearEncoder { sectors }
    }

    #[inline]
    fn encode(&self, pixels: &[u8], at: usize) -> u32 {
        let reference = pixels[at] as u32;
        let mut code = 0;
        for (j, (inner, ni, outer, no)) in self.sectors.iter().enumerate() {
            let sum_in: u32 = reference + inner.iter().map(|&d| pixels[at.wrapping_add_signed(d)] as u32).sum::<u32>();
            let sum_out: u32 = outer.iter().map(|&d| pixels[at.wrapping_add_signed(d)] as u32).sum();
            code |= encode_bit(sum_in / ni, sum_out / no) << j;
        }
        code
    }
}

/// Encodes every pixel at least `r_out` away from the border.
///
/// Rows are encoded in parallel on the current rayon pool; the result does
/// not depend on the number of workers.
pub fn feature_image(image: &GrayImage, geometry: &SectorGeometry) -> Result<FeatureImage> {
    let margin = geometry.margin();
    let width = image.width();
    let encoder = LinearEncoder::new(geometry, width);
    let pixels = image.pixels();
    FeatureImage::from_rows(image, margin, geometry.sector_count(), |row, out| {
        let base = row * width + margin;
        for (i, code) in out.iter_mut().enumerate() {
            *code = encoder.encode(pixels, base + i);
        }
    })
}

/// Counts interior codes into `2^bits` bins.
pub fn histogram(feature: &FeatureImage, bits: u32) -> Result<Histogram> {
    let len = 1usize << bits;
    let mut bins = vec![0u64; len];
    for code in feature.interior() {
        match bins.get_mut(code as usize) {
            Some(b) => *b += 1,
            None => return Err(Error::CodeOutOfRange { code, bins: len }),
        }
    }
    Ok(Histogram::from_bins(bins))
}

/// A histogram descriptor ready to be applied to images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Descriptor {
    Rtlnp(SectorGeometry),
    Lbp,
}

impl Descriptor {
    pub fn name(&self) -> &'static str {
        match self {
            Descriptor::Rtlnp(_) => "rtlnp",
            Descriptor::Lbp => "lbp",
        }
    }

    pub fn bits(&self) -> u32 {
        match self {
            Descriptor::Rtlnp(g) => g.sector_count(),
            Descriptor::Lbp => 8,
        }
    }

    pub fn histogram_len(&self) -> usize {
        1 << self.bits()
    }

    pub fn margin(&self) -> usize {
        match self {
            Descriptor::Rtlnp(g) => g.margin(),
            Descriptor::Lbp => 1,
        }
    }

    pub fn feature_image(&self, image: &GrayImage) -> Result<FeatureImage> {
        match self {
            Descriptor::Rtlnp(g) => feature_image(image, g),
            Descriptor::Lbp => lbp::lbp_feature_image(image),
        }
    }

    pub fn histogram(&self, image: &GrayImage) -> Result<Histogram> {
        histogram(&self.feature_image(image)?, self.bits())
    }
}
