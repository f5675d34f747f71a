//! Box (moving-average) pre-filter with replicate-edge borders.

use crate::raster::FloatImage;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmoothError {
    #[error("box window must be odd and at least 3, got {0}")]
    InvalidWindow(usize),
    #[error("box filter needs at least one pass")]
    ZeroPasses,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxFilterSpec {
    window: usize,
    passes: usize,
}

impl BoxFilterSpec {
    pub fn new(window: usize, passes: usize) -> Result<Self, SmoothError> {
        if window < 3 || window.is_multiple_of(2) {
            return Err(SmoothError::InvalidWindow(window));
        }
        if passes == 0 {
            return Err(SmoothError::ZeroPasses);
        }
        Ok(Self { window, passes })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn passes(&self) -> usize {
        self.passes
    }
}

impl Default for BoxFilterSpec {
    /// 3x3 window, two passes.
    fn default() -> Self {
        Self {
            window: 3,
            passes: 2,
        }
    }
}

/// Applies the `window x window` mean `passes` times.
///
/// Samples outside the image take the value of the nearest edge pixel. The
/// 2-D mean is computed as a row mean followed by a column mean, which is
/// the same average since both the window and the clamping are separable.
pub fn box_filter(img: &FloatImage, spec: BoxFilterSpec) -> FloatImage {
    let (width, height) = img.dimensions();
    let radius = spec.window / 2;
    let mut current = img.pixels().to_vec();
    let mut scratch = vec![0.0; current.len()];
    for _ in 0..spec.passes {
        for row in 0..height {
            let line = &current[row * width..(row + 1) * width];
            let out = &mut scratch[row * width..(row + 1) * width];
            for (col, slot) in out.iter_mut().enumerate() {
                *slot = window_mean(spec.window, radius, width, col, |i| line[i]);
            }
        }
        for col in 0..width {
            for row in 0..height {
                current[row * width + col] = window_mean(spec.window, radius, height, row, |i| {
                    scratch[i * width + col]
                });
            }
        }
    }
    FloatImage::from_parts_unchecked(width, height, current)
}

/// Mean of the clamped 1-D window centered on `center`, accumulated as
/// offsets from the center sample so a constant neighborhood reproduces the
/// center value exactly.
#[inline]
fn window_mean(
    window: usize,
    radius: usize,
    len: usize,
    center: usize,
    sample: impl Fn(usize) -> f64,
) -> f64 {
    let base = sample(center);
    let last = len - 1;
    let mut acc = 0.0;
    for k in 0..window {
        let idx = (center + k).saturating_sub(radius).min(last);
        acc += sample(idx) - base;
    }
    base + acc / window as f64
}
