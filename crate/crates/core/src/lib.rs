//! Reconstruction of 8-bit grayscale images from bilevel dithered ones.
//!
//! The pipeline box-filters the dithered image, evolves it with
//! total-variation-type anisotropic diffusion, and measures first-order,
//! co-occurrence and fidelity statistics at every step.
//!
//! ```
//! use undither_core::{dither, pipeline, raster::GrayImage};
//!
//! let original = GrayImage::from_fn(32, 32, |r, c| (r * 4 + c * 3) as u8).unwrap();
//! let bilevel = dither::dither_floyd_steinberg(&original);
//! let config = pipeline::UnditherConfig::default();
//! let outcome = pipeline::undither(&bilevel, Some(&original), &config).unwrap();
//! assert_eq!(outcome.rows.len(), 202);
//! ```

pub mod diffuse;
pub mod dither;
pub mod pipeline;
pub mod raster;
pub mod smooth;
pub mod stats;

pub use raster::{FloatImage, GrayImage, Histogram};
