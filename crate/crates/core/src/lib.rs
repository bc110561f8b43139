//! Texture descriptors and histogram retrieval for face image datasets.
//!
//! The crate implements the R-Theta local neighborhood pattern (RTLNP): the
//! local neighborhood of every pixel is cut into equal angular sectors, each
//! sector is split into an inner and an outer subsector, and one bit per
//! sector records whether the inner average exceeds the outer one. Codes are
//! pooled into a `2^S` bin histogram and compared with the chi-square
//! distance. A radius-1 LBP is provided as a baseline, together with the
//! leave-one-out retrieval metrics (ARP, ARR, F-score, ANMRR, recognition
//! rate, CMC) used to compare them.

pub mod cli;
pub mod descriptor;
mod error;
pub mod geometry;
pub mod imaging;
pub mod lbp;
pub mod metrics;
pub mod parallel;
pub mod retrieval;

pub use descriptor::{encode_bit, encode_pixel, feature_image, histogram, subsector_average, Descriptor, FeatureImage, Histogram};
pub use error::{Error, ErrorKind, Result};
pub use geometry::{build_geometry, neighbor_index, neighbors_per_sector, ring_offsets, sector_count, RingOffset, RtlnpParams, SectorGeometry};
pub use imaging::{load_grayscale, synth_image, GrayImage, SynthKind};
pub use retrieval::{chi_square, rank_gallery, GalleryEntry, GalleryIndex, RankedList};
