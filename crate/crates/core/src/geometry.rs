//! Sector geometry of the RTLNP operator.
//!
//! The neighborhood of a reference pixel is a stack of square (Chebyshev)
//! rings; ring `n` holds `8n` pixels. The neighborhood is split into
//! `S = floor(360 / dt)` sectors, and each sector takes a run of
//! consecutive pixels from every ring. Rings `1..=r_in` feed the inner
//! subsector and rings `r_in+1..=r_out` the outer one.
//!
//! Bracketed quotients in the per-sector count and the ring ordinal are
//! ceilings: `ceil(n * dt / 45)` pixels per ring, starting after ordinal
//! `ceil(n * dt * (j - 1) / 45)`, clamped to the last pixel `8n` of the ring.
//! Adjacent sectors may therefore share pixels on small rings.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported sector count; the histogram has `2^S` bins.
pub const MAX_SECTORS: u32 = 24;

/// Start angle of the first sector, in degrees.
pub const THETA_ZERO_DEG: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RtlnpParams {
    pub r_in: u32,
    pub r_out: u32,
    /// Angular width of a sector in whole degrees.
    pub delta_theta: u32,
}

impl Default for RtlnpParams {
    fn default() -> Self {
        RtlnpParams { r_in: 3, r_out: 6, delta_theta: 36 }
    }
}

impl RtlnpParams {
    pub fn new(r_in: u32, r_out: u32, delta_theta: u32) -> Result<Self> {
        let p = RtlnpParams { r_in, r_out, delta_theta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_in < 1 || self.r_in >= self.r_out {
            return Err(Error::InvalidParams(format!(
                "need 1 <= r_in < r_out, got r_in={} r_out={}",
                self.r_in, self.r_out
            )));
        }
        let s = sector_count(self.delta_theta)?;
        if s > MAX_SECTORS {
            return Err(Error::InvalidParams(format!(
                "delta_theta={} gives {s} sectors; at most {MAX_SECTORS} are supported",
                self.delta_theta
            )));
        }
        Ok(())
    }

    pub fn sector_count(&self) -> u32 {
        360 / self.delta_theta
    }
}

/// `S = floor(360 / dt)` for `dt` in `1..=360`.
pub fn sector_count(delta_theta: u32) -> Result<u32> {
    if !(1..=360).contains(&delta_theta) {
        return Err(Error::InvalidParams(format!("delta_theta must be in 1..=360, got {delta_theta}")));
    }
    Ok(360 / delta_theta)
}

#[inline]
fn ceil_div_45(x: u32) -> u32 {
    x.div_ceil(45)
}

/// Pixels a sector takes from ring `ring`: `ceil(ring * dt / 45)`.
pub fn neighbors_per_sector(ring: u32, delta_theta: u32) -> u32 {
    ceil_div_45(ring * delta_theta)
}

/// 1-based ordinal on ring `ring` of the `k`-th pixel of sector `sector`.
pub fn neighbor_index(ring: u32, sector: u32, k: u32, delta_theta: u32) -> u32 {
    debug_assert!(sector >= 1 && k >= 1);
    (ceil_div_45(ring * delta_theta * (sector - 1)) + k).min(8 * ring)
}

/// A pixel position relative to the reference pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingOffset {
    /// Column offset, positive to the right.
    pub dc: i32,
    /// Row offset, positive downwards.
    pub dr: i32,
    pub ring: u32,
    /// 1-based position on the ring.
    pub ordinal: u32,
}

/// The `8 * ring` offsets at Chebyshev distance `ring`, in counterclockwise
/// order as seen on screen (from `+col` towards `-row`), starting at
/// `(ring, 0)`.
pub fn ring_offsets(ring: u32) -> Vec<RingOffset> {
    let r = ring as i32;
    let mut pts: Vec<(i32, i32)> = Vec::with_capacity(8 * ring as usize);
    // right edge, upper half
    pts.extend((0..r).map(|i| (r, -i)));
    // top edge, right to left
    pts.extend((0..2 * r).map(|i| (r - i, -r)));
    // left edge, top to bottom
    pts.extend((0..2 * r).map(|i| (-r, -r + i)));
    // bottom edge, left to right
    pts.extend((0..2 * r).map(|i| (-r + i, r)));
    // right edge, lower half
    pts.extend((0..r).map(|i| (r, r - i)));

    pts.into_iter()
        .enumerate()
        .map(|(i, (dc, dr))| RingOffset { dc, dr, ring, ordinal: i as u32 + 1 })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    pub inner: Vec<RingOffset>,
    pub outer: Vec<RingOffset>,
}

/// Precomputed per-sector pixel offsets for one parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorGeometry {
    params: RtlnpParams,
    sectors: Vec<Sector>,
}

impl SectorGeometry {
    pub fn params(&self) -> RtlnpParams {
        self.params
    }

    pub fn sector_count(&self) -> u32 {
        self.sectors.len() as u32
    }

    /// Sectors in order `j = 1..=S`; bit `j - 1` of a code belongs to `sectors()[j - 1]`.
    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Border width that is never encoded.
    pub fn margin(&self) -> usize {
        self.params.r_out as usize
    }

    pub fn histogram_len(&self) -> usize {
        1usize << self.sector_count()
    }
}

pub fn build_geometry(params: RtlnpParams) -> Result<SectorGeometry> {
    params.validate()?;
    let dt = params.delta_theta;
    let rings: Vec<Vec<RingOffset>> = (1..=params.r_out).map(ring_offsets).collect();

    let take = |ring: u32, j: u32| -> Vec<RingOffset> {
        let ring_pixels = &rings[ring as usize - 1];
        (1..=neighbors_per_sector(ring, dt))
            .map(|k| ring_pixels[neighbor_index(ring, j, k, dt) as usize - 1])
            .collect()
    };

    let sectors = (1..=params.sector_count())
        .map(|j| Sector {
            inner: (1..=params.r_in).flat_map(|n| take(n, j)).collect(),
            outer: (params.r_in + 1..=params.r_out).flat_map(|n| take(n, j)).collect(),
        })
        .collect();

    Ok(SectorGeometry { params, sectors })
}
