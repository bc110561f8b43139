//! C ABI over the `rtlnp` crate.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_load`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`RtlnpStatus`]; the message of the last failure on the calling
//! thread is available from [`rtlnp_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rtlnp::retrieval::{build_index, DescriptorKind};
use rtlnp::{chi_square, load_grayscale, rank_gallery, Descriptor, Error, ErrorKind, GalleryIndex, GrayImage, RtlnpParams};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtlnpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotFound = 3,
    Io = 4,
    Format = 5,
    Params = 6,
    Bounds = 7,
    Dataset = 8,
    Index = 9,
    Metric = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

impl From<&Error> for RtlnpStatus {
    fn from(e: &Error) -> Self {
        match e.kind() {
            ErrorKind::NotFound => RtlnpStatus::NotFound,
            ErrorKind::Io => RtlnpStatus::Io,
            ErrorKind::Format => RtlnpStatus::Format,
            ErrorKind::Params => RtlnpStatus::Params,
            ErrorKind::Bounds => RtlnpStatus::Bounds,
            ErrorKind::Dataset => RtlnpStatus::Dataset,
            ErrorKind::Index => RtlnpStatus::Index,
            ErrorKind::Metric => RtlnpStatus::Metric,
        }
    }
}

/// Opaque grayscale image.
pub struct RtlnpImage(GrayImage);

/// Opaque descriptor (RTLNP with fixed parameters, or LBP).
pub struct RtlnpDescriptor {
    kind: DescriptorKind,
    inner: Descriptor,
}

/// Opaque gallery index.
pub struct RtlnpIndex(GalleryIndex);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(RtlnpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(RtlnpStatus::from(&e), e.to_string())
    }
}

fn fail(status: RtlnpStatus, msg: &str) -> Failure {
    Failure(status, msg.to_owned())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RtlnpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            RtlnpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RtlnpStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(RtlnpStatus::NullPointer, "path is null"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(RtlnpStatus::InvalidArgument, "path is not valid UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(RtlnpStatus::NullPointer, format!("{what} is null")))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(RtlnpStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, needed: usize) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(fail(RtlnpStatus::NullPointer, "output buffer is null"));
    }
    if len < needed {
        return Err(Failure(RtlnpStatus::BufferTooSmall, format!("buffer holds {len}, need {needed}")));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

/// Message of the most recent status-returning call on this thread; empty
/// after a successful call.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn rtlnp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn rtlnp_status_name(status: RtlnpStatus) -> *const c_char {
    let s: &'static CStr = match status {
        RtlnpStatus::Ok => c"ok",
        RtlnpStatus::NullPointer => c"null-pointer",
        RtlnpStatus::InvalidArgument => c"invalid-argument",
        RtlnpStatus::NotFound => c"not-found",
        RtlnpStatus::Io => c"io",
        RtlnpStatus::Format => c"format",
        RtlnpStatus::Params => c"params",
        RtlnpStatus::Bounds => c"bounds",
        RtlnpStatus::Dataset => c"dataset",
        RtlnpStatus::Index => c"index",
        RtlnpStatus::Metric => c"metric",
        RtlnpStatus::BufferTooSmall => c"buffer-too-small",
        RtlnpStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Copies `width * height` row-major intensities into a new image.
///
/// # Safety
/// `pixels` must point to `width * height` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_image_new(
    width: usize,
    height: usize,
    pixels: *const u8,
    out: *mut *mut RtlnpImage,
) -> RtlnpStatus {
    guard(|| {
        if pixels.is_null() {
            return Err(fail(RtlnpStatus::NullPointer, "pixels is null"));
        }
        let n = width.checked_mul(height).ok_or_else(|| fail(RtlnpStatus::InvalidArgument, "size overflow"))?;
        let data = std::slice::from_raw_parts(pixels, n).to_vec();
        store(out, RtlnpImage(GrayImage::new(width, height, data)?))
    })
}

/// Loads PGM/PPM (and PNG/JPEG when built with image support) as grayscale.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_image_load(path: *const c_char, out: *mut *mut RtlnpImage) -> RtlnpStatus {
    guard(|| {
        let img = load_grayscale(path_arg(path)?)?;
        store(out, RtlnpImage(img))
    })
}

/// # Safety
/// `image` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_image_width(image: *const RtlnpImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.width())
}

/// # Safety
/// `image` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_image_height(image: *const RtlnpImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.height())
}

/// # Safety
/// `image` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_image_free(image: *mut RtlnpImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Creates an RTLNP descriptor; sector geometry is precomputed once here.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_descriptor_rtlnp(
    r_in: u32,
    r_out: u32,
    delta_theta: u32,
    out: *mut *mut RtlnpDescriptor,
) -> RtlnpStatus {
    guard(|| {
        let kind = DescriptorKind::Rtlnp(RtlnpParams::new(r_in, r_out, delta_theta)?);
        store(out, RtlnpDescriptor { kind, inner: kind.instantiate()? })
    })
}

/// Creates the radius-1 LBP baseline descriptor.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_descriptor_lbp(out: *mut *mut RtlnpDescriptor) -> RtlnpStatus {
    guard(|| store(out, RtlnpDescriptor { kind: DescriptorKind::Lbp, inner: Descriptor::Lbp }))
}

/// Number of histogram bins, `2^S` (256 for LBP); 0 for NULL.
///
/// # Safety
/// `descriptor` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_descriptor_histogram_len(descriptor: *const RtlnpDescriptor) -> usize {
    descriptor.as_ref().map_or(0, |d| d.inner.histogram_len())
}

/// Width of the non-encoded border; 0 for NULL.
///
/// # Safety
/// `descriptor` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_descriptor_margin(descriptor: *const RtlnpDescriptor) -> usize {
    descriptor.as_ref().map_or(0, |d| d.inner.margin())
}

/// # Safety
/// `descriptor` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_descriptor_free(descriptor: *mut RtlnpDescriptor) {
    if !descriptor.is_null() {
        drop(Box::from_raw(descriptor));
    }
}

/// Writes raw code counts into `bins[0..histogram_len]`.
///
/// # Safety
/// Handles must be live; `bins` must point to `len` writable `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_histogram(
    descriptor: *const RtlnpDescriptor,
    image: *const RtlnpImage,
    bins: *mut u64,
    len: usize,
) -> RtlnpStatus {
    guard(|| {
        let d = handle(descriptor, "descriptor")?;
        let img = handle(image, "image")?;
        let dst = out_slice(bins, len, d.inner.histogram_len())?;
        let h = d.inner.histogram(&img.0)?;
        dst.copy_from_slice(h.bins());
        Ok(())
    })
}

/// Writes the row-major feature image (`width * height` codes, border 0).
///
/// # Safety
/// Handles must be live; `codes` must point to `len` writable `uint32_t`.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_feature_image(
    descriptor: *const RtlnpDescriptor,
    image: *const RtlnpImage,
    codes: *mut u32,
    len: usize,
) -> RtlnpStatus {
    guard(|| {
        let d = handle(descriptor, "descriptor")?;
        let img = handle(image, "image")?;
        let dst = out_slice(codes, len, img.0.width() * img.0.height())?;
        let f = d.inner.feature_image(&img.0)?;
        dst.copy_from_slice(f.codes());
        Ok(())
    })
}

/// Chi-square distance of two `len`-element vectors.
///
/// # Safety
/// `x` and `y` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_chi_square(x: *const f64, y: *const f64, len: usize, out: *mut f64) -> RtlnpStatus {
    guard(|| {
        if x.is_null() || y.is_null() || out.is_null() {
            return Err(fail(RtlnpStatus::NullPointer, "null argument"));
        }
        let (x, y) = (std::slice::from_raw_parts(x, len), std::slice::from_raw_parts(y, len));
        *out = chi_square(x, y)?;
        Ok(())
    })
}

/// Builds an index over `dataset_root/<class>/<image>`.
///
/// # Safety
/// `dataset_root` must be NUL-terminated; `descriptor` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_index_build(
    dataset_root: *const c_char,
    descriptor: *const RtlnpDescriptor,
    out: *mut *mut RtlnpIndex,
) -> RtlnpStatus {
    guard(|| {
        let root = path_arg(dataset_root)?;
        let d = handle(descriptor, "descriptor")?;
        store(out, RtlnpIndex(build_index(root, d.kind)?))
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_index_load(path: *const c_char, out: *mut *mut RtlnpIndex) -> RtlnpStatus {
    guard(|| {
        let idx = GalleryIndex::load(path_arg(path)?)?;
        store(out, RtlnpIndex(idx))
    })
}

/// # Safety
/// `index` must be live; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_index_save(index: *const RtlnpIndex, path: *const c_char) -> RtlnpStatus {
    guard(|| {
        let idx = handle(index, "index")?;
        idx.0.save(path_arg(path)?)?;
        Ok(())
    })
}

/// Number of entries; 0 for NULL.
///
/// # Safety
/// `index` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_index_len(index: *const RtlnpIndex) -> usize {
    index.as_ref().map_or(0, |i| i.0.len())
}

/// Leave-one-out ranking of entry `query_id`: the other `N - 1` ids nearest
/// first (ties by id) and their distances.
///
/// # Safety
/// `index` must be live; `ids` and `distances` must each hold `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_index_rank(
    index: *const RtlnpIndex,
    query_id: usize,
    ids: *mut usize,
    distances: *mut f64,
    len: usize,
) -> RtlnpStatus {
    guard(|| {
        let idx = handle(index, "index")?;
        let ranked = rank_gallery(query_id, &idx.0)?;
        out_slice(ids, len, ranked.len())?.copy_from_slice(&ranked.ids);
        out_slice(distances, len, ranked.len())?.copy_from_slice(&ranked.distances);
        Ok(())
    })
}

/// # Safety
/// `index` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn rtlnp_index_free(index: *mut RtlnpIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}
