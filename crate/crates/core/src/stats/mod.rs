//! Features evaluated on every diffusion iterate: first-order histogram
//! statistics, co-occurrence (GLCM) statistics and MSE/PSNR fidelity.

mod fidelity;
mod first_order;
mod glcm;

pub use fidelity::{fidelity, FidelityMetrics};
pub use first_order::{first_order, FirstOrderStats};
pub use glcm::{glcm, second_order, Direction, Glcm, SecondOrderStats};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("unsupported co-occurrence direction {0} degrees (use 0, 45, 90 or 135)")]
    InvalidDirection(u32),
    #[error("co-occurrence displacement must be at least 1")]
    ZeroDisplacement,
    #[error("image has no pixel pairs at the requested direction and displacement")]
    NoPairs,
    #[error("correlation is undefined: a marginal has zero deviation")]
    CorrelationUndefined,
    #[error("image dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
}

/// `-p log2 p`, taking `0 log 0 = 0`.
#[inline]
pub(crate) fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}
