//! Bilevel conversion of 8-bit images. Output pixels are 0 or 255.

use crate::raster::GrayImage;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DitherError {
    #[error("ordered dither matrix order must be 2, 4 or 8, got {0}")]
    InvalidOrder(usize),
}

/// Side length of a Bayer index matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BayerOrder(usize);

impl BayerOrder {
    pub fn new(order: usize) -> Result<Self, DitherError> {
        match order {
            2 | 4 | 8 => Ok(Self(order)),
            other => Err(DitherError::InvalidOrder(other)),
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DitherMethod {
    #[default]
    FloydSteinberg,
    Ordered(BayerOrder),
}

impl DitherMethod {
    pub fn apply(self, img: &GrayImage) -> GrayImage {
        match self {
            DitherMethod::FloydSteinberg => dither_floyd_steinberg(img),
            DitherMethod::Ordered(order) => dither_ordered(img, order),
        }
    }
}

/// Working values at or above this quantize to white.
pub const FS_THRESHOLD: f64 = 128.0;

/// Floyd-Steinberg error diffusion in plain raster order.
///
/// Each pixel's working value is quantized to 255 if it is at least 128 and
/// to 0 otherwise; the residual is pushed onto the unvisited neighbors with
/// weights 7/16 (right), 3/16 (below-left), 5/16 (below) and 1/16
/// (below-right). Shares that would land outside the image are dropped.
pub fn dither_floyd_steinberg(img: &GrayImage) -> GrayImage {
    let (width, height) = img.dimensions();
    let mut work: Vec<f64> = img.pixels().iter().map(|&v| f64::from(v)).collect();
    let mut out = vec![0u8; work.len()];

    for row in 0..height {
        for col in 0..width {
            let idx = row * width + col;
            let value = work[idx];
            let (level, quantized) = if value >= FS_THRESHOLD {
                (255u8, 255.0)
            } else {
                (0u8, 0.0)
            };
            out[idx] = level;
            let err = value - quantized;
            if err == 0.0 {
                continue;
            }
            if col + 1 < width {
                work[idx + 1] += err * 7.0 / 16.0;
            }
            if row + 1 < height {
                let below = idx + width;
                if col > 0 {
                    work[below - 1] += err * 3.0 / 16.0;
                }
                work[below] += err * 5.0 / 16.0;
                if col + 1 < width {
                    work[below + 1] += err * 1.0 / 16.0;
                }
            }
        }
    }

    GrayImage::new(width, height, out).expect("dimensions unchanged")
}

/// Standard recursive Bayer index matrix of side `n`, row-major.
///
/// `B_1 = [0]`, `B_2n = [[4B, 4B+2], [4B+3, 4B+1]]`.
pub fn bayer_matrix(order: BayerOrder) -> Vec<usize> {
    let mut matrix = vec![0usize];
    let mut n = 1;
    while n < order.get() {
        let m = 2 * n;
        let mut next = vec![0usize; m * m];
        for r in 0..n {
            for c in 0..n {
                let b = 4 * matrix[r * n + c];
                next[r * m + c] = b;
                next[r * m + c + n] = b + 2;
                next[(r + n) * m + c] = b + 3;
                next[(r + n) * m + c + n] = b + 1;
            }
        }
        matrix = next;
        n = m;
    }
    matrix
}

/// Ordered (Bayer) dithering: white iff the pixel exceeds
/// `255 * (B[i mod n][j mod n] + 0.5) / n^2`.
pub fn dither_ordered(img: &GrayImage, order: BayerOrder) -> GrayImage {
    let n = order.get();
    let cells = (n * n) as f64;
    let thresholds: Vec<f64> = bayer_matrix(order)
        .into_iter()
        .map(|b| 255.0 * (b as f64 + 0.5) / cells)
        .collect();
    let (width, height) = img.dimensions();
    GrayImage::from_fn(width, height, |row, col| {
        if f64::from(img.get(row, col)) > thresholds[(row % n) * n + col % n] {
            255
        } else {
            0
        }
    })
    .expect("dimensions unchanged")
}

/// True iff every pixel is 0 or 255.
pub fn is_bilevel(img: &GrayImage) -> bool {
    img.pixels().iter().all(|&v| v == 0 || v == 255)
}
