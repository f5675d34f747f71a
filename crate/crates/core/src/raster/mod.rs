//! Image containers shared by every stage of the pipeline.
//!
//! [`GrayImage`] holds 8-bit gray levels and is what the codec, the
//! ditherers and the statistics operate on. [`FloatImage`] holds real
//! intensities and is what the box filter and the diffusion engine evolve.

mod pgm;

pub use pgm::{read_pgm, write_pgm, PgmError};

use thiserror::Error;

/// Number of representable gray levels in an 8-bit image.
pub const GRAY_LEVELS: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RasterError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("image dimensions {width}x{height} overflow the address space")]
    DimensionOverflow { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite intensity {value} at pixel index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("cannot quantize NaN at pixel index {index}")]
    NanPixel { index: usize },
}

fn checked_len(width: usize, height: usize) -> Result<usize, RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::EmptyImage { width, height });
    }
    width
        .checked_mul(height)
        .ok_or(RasterError::DimensionOverflow { width, height })
}

/// 8-bit single-channel raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        let expected = checked_len(width, height)?;
        if data.len() != expected {
            return Err(RasterError::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, RasterError> {
        let len = checked_len(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![value; len],
        })
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, RasterError> {
        let len = checked_len(width, height)?;
        let mut data = Vec::with_capacity(len);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false: images have at least one pixel.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> Option<&[u8]> {
        if row >= self.height {
            return None;
        }
        let start = row * self.width;
        Some(&self.data[start..start + self.width])
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks_exact(self.width)
    }

    pub fn to_float(&self) -> FloatImage {
        to_float(self)
    }

    pub fn histogram(&self) -> Histogram {
        histogram(self)
    }
}

/// Real-valued raster, row-major. Values are nominally in `[0, 255]` but are
/// never clamped; every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl FloatImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, RasterError> {
        let expected = checked_len(width, height)?;
        if data.len() != expected {
            return Err(RasterError::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(RasterError::NonFinite { index, value });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, RasterError> {
        let len = checked_len(width, height)?;
        Self::new(width, height, vec![value; len])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, RasterError> {
        let len = checked_len(width, height)?;
        let mut data = Vec::with_capacity(len);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self::new(width, height, data)
    }

    /// Wraps a buffer the caller has already checked. Used by the filters,
    /// which only ever produce finite values from finite inputs.
    pub(crate) fn from_parts_unchecked(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    /// `(min, max)` over all pixels.
    pub fn range(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn to_gray(&self) -> Result<GrayImage, RasterError> {
        to_gray(self)
    }
}

/// Exact widening conversion.
pub fn to_float(img: &GrayImage) -> FloatImage {
    FloatImage::from_parts_unchecked(
        img.width,
        img.height,
        img.data.iter().map(|&v| f64::from(v)).collect(),
    )
}

/// Quantizes to 8 bits: round half up, then clamp to `[0, 255]`.
pub fn to_gray(img: &FloatImage) -> Result<GrayImage, RasterError> {
    let mut data = Vec::with_capacity(img.data.len());
    for (index, &v) in img.data.iter().enumerate() {
        if v.is_nan() {
            return Err(RasterError::NanPixel { index });
        }
        data.push(quantize(v));
    }
    Ok(GrayImage {
        width: img.width,
        height: img.height,
        data,
    })
}

#[inline]
fn quantize(v: f64) -> u8 {
    // `as` saturates, which also handles the infinities.
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Gray-level occurrence counts `n_k` for `k` in `0..256`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; GRAY_LEVELS],
    total: u64,
}

impl Histogram {
    pub fn counts(&self) -> &[u64; GRAY_LEVELS] {
        &self.counts
    }

    pub fn count(&self, level: u8) -> u64 {
        self.counts[level as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `p(r_k) = n_k / n`
    pub fn probability(&self, level: u8) -> f64 {
        self.counts[level as usize] as f64 / self.total as f64
    }

    pub fn probabilities(&self) -> impl Iterator<Item = (u8, f64)> + '_ {
        let n = self.total as f64;
        self.counts
            .iter()
            .enumerate()
            .map(move |(k, &c)| (k as u8, c as f64 / n))
    }
}

pub fn histogram(img: &GrayImage) -> Histogram {
    let mut counts = [0u64; GRAY_LEVELS];
    for &v in &img.data {
        counts[v as usize] += 1;
    }
    Histogram {
        counts,
        total: img.data.len() as u64,
    }
}
