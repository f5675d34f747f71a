use super::StatsError;
use crate::raster::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityMetrics {
    pub mse: f64,
    /// Decibels; `f64::INFINITY` when the images are identical.
    pub psnr: f64,
}

/// Mean squared error and PSNR (peak 255) between two equally sized images.
pub fn fidelity(
    original: &GrayImage,
    reconstructed: &GrayImage,
) -> Result<FidelityMetrics, StatsError> {
    if original.dimensions() != reconstructed.dimensions() {
        return Err(StatsError::DimensionMismatch {
            left: original.dimensions(),
            right: reconstructed.dimensions(),
        });
    }
    // Exact integer accumulation: at most 65025 per pixel.
    let sse: u64 = original
        .pixels()
        .iter()
        .zip(reconstructed.pixels())
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum();
    let mse = sse as f64 / original.len() as f64;
    let psnr = if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (255.0 / mse.sqrt()).log10()
    };
    Ok(FidelityMetrics { mse, psnr })
}
