//! Radius-1, 8-neighbor local binary pattern baseline.
//!
//! Bit `p` is set when the `p`-th ring-1 neighbor (in [`ring_offsets`]
//! order) is at least as bright as the center.

use crate::descriptor::{histogram, FeatureImage, Histogram};
use crate::geometry::ring_offsets;
use crate::imaging::GrayImage;
use crate::{Error, Result};

fn neighbors() -> [(i32, i32); 8] {
    let ring = ring_offsets(1);
    std::array::from_fn(|i| (ring[i].dc, ring[i].dr))
}

pub fn lbp_code(image: &GrayImage, center: (usize, usize)) -> Result<u32> {
    let (col, row) = center;
    if col < 1 || row < 1 || col + 1 >= image.width() || row + 1 >= image.height() {
        return Err(Error::OutOfBounds { col, row, margin: 1 });
    }
    let c = image.get(col, row);
    let code = neighbors().iter().enumerate().fold(0, |code, (p, &(dc, dr))| {
        let n = image.get((col as i32 + dc) as usize, (row as i32 + dr) as usize);
        code | (((n >= c) as u32) << p)
    });
    Ok(code)
}

pub fn lbp_feature_image(image: &GrayImage) -> Result<FeatureImage> {
    let width = image.width() as isize;
    let strides = neighbors().map(|(dc, dr)| dr as isize * width + dc as isize);
    let pixels = image.pixels();
    FeatureImage::from_rows(image, 1, 8, |row, out| {
        let base = row * image.width() + 1;
        for (i, code) in out.iter_mut().enumerate() {
            let at = base + i;
            let c = pixels[at];
            *code = strides
                .iter()
                .enumerate()
                .fold(0, |acc, (p, &d)| acc | (((pixels[at.wrapping_add_signed(d)] >= c) as u32) << p));
        }
    })
}

/// 256-bin LBP histogram over the margin-1 interior.
pub fn lbp_histogram(image: &GrayImage) -> Result<Histogram> {
    histogram(&lbp_feature_image(image)?, 8)
}
