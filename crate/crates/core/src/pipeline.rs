//! Undithering pipeline: box pre-filter, diffusion, and a metrics row for
//! every observed iterate.
//!
//! Iterates are quantized with [`to_gray`] before any feature is evaluated,
//! so all statistics are taken over 8-bit gray levels.

use crate::diffuse::{diffuse, DiffuseError, DiffusionParams};
use crate::raster::{histogram, to_float, to_gray, FloatImage, GrayImage};
use crate::smooth::{box_filter, BoxFilterSpec};
use crate::stats::{
    fidelity, first_order, glcm, second_order, Direction, FidelityMetrics, FirstOrderStats,
    SecondOrderStats, StatsError,
};
use std::fmt::Write as _;
use thiserror::Error;

/// Step value of the row describing the reference (original) image.
pub const REFERENCE_STEP: i64 = -1;

pub const CSV_HEADER: &str = "step,mean,variance,mu3_paper,mu4,energy1,entropy1,energy2,entropy2,contrast,homogeneity,correlation,mse,psnr";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Diffusion(#[from] DiffuseError),
    #[error("metrics stride must be at least 1")]
    ZeroStride,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub step: i64,
    pub first: FirstOrderStats,
    pub second: SecondOrderStats,
    pub fidelity: Option<FidelityMetrics>,
}

impl MetricsRow {
    /// Features of `img`, plus MSE/PSNR against `reference` when given.
    pub fn measure(
        step: i64,
        img: &GrayImage,
        reference: Option<&GrayImage>,
        direction: Direction,
        distance: usize,
    ) -> Result<Self, StatsError> {
        let first = first_order(&histogram(img))?;
        let second = second_order(&glcm(img, direction, distance)?);
        let fidelity = reference.map(|r| fidelity(r, img)).transpose()?;
        Ok(Self {
            step,
            first,
            second,
            fidelity,
        })
    }

    pub fn mse(&self) -> Option<f64> {
        self.fidelity.map(|f| f.mse)
    }

    /// One CSV line (no trailing newline) in [`CSV_HEADER`] column order.
    pub fn to_csv(&self) -> String {
        let mut line = self.step.to_string();
        let values = [
            Some(self.first.mean),
            Some(self.first.variance),
            Some(self.first.mu3),
            Some(self.first.mu4),
            Some(self.first.energy),
            Some(self.first.entropy),
            Some(self.second.energy),
            Some(self.second.entropy),
            Some(self.second.contrast),
            Some(self.second.homogeneity),
            Some(self.second.correlation.unwrap_or(f64::NAN)),
            self.fidelity.map(|f| f.mse),
            self.fidelity.map(|f| f.psnr),
        ];
        for v in values {
            line.push(',');
            if let Some(v) = v {
                line.push_str(&format_sig9(v));
            }
        }
        line
    }
}

/// Formats like C's `%.9g`, except that negative zero prints as `0`.
pub fn format_sig9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_fraction(format!("{v:.decimals$}"))
    } else {
        let mut out = trim_fraction(mantissa.to_string());
        let _ = write!(out, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
        out
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Renders the header and rows as CSV text, newline-terminated.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 160 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnditherConfig {
    pub filter: BoxFilterSpec,
    pub diffusion: DiffusionParams,
    pub direction: Direction,
    pub distance: usize,
    /// Measure every `stride`-th step; the last step is always measured.
    pub stride: usize,
    /// Steps whose quantized iterate should be retained.
    pub keep_steps: Vec<usize>,
}

impl Default for UnditherConfig {
    fn default() -> Self {
        Self {
            filter: BoxFilterSpec::default(),
            diffusion: DiffusionParams::default(),
            direction: Direction::Deg0,
            distance: 1,
            stride: 1,
            keep_steps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestSnapshot {
    pub step: usize,
    pub mse: f64,
    pub image: GrayImage,
}

#[derive(Debug, Clone)]
pub struct UnditherOutcome {
    /// Box-filtered input (step 0).
    pub filtered: FloatImage,
    pub final_image: FloatImage,
    /// Reference row first (when a reference is given), then steps in order.
    pub rows: Vec<MetricsRow>,
    /// Earliest measured step with minimal MSE; requires a reference.
    pub best: Option<BestSnapshot>,
    pub kept: Vec<(usize, GrayImage)>,
    pub range_violations: Vec<usize>,
    pub max_step_change: f64,
}

impl UnditherOutcome {
    pub fn step_rows(&self) -> impl Iterator<Item = &MetricsRow> {
        self.rows.iter().filter(|r| r.step >= 0)
    }
}

/// Box-filters `dithered`, diffuses it and measures every observed step.
pub fn undither(
    dithered: &GrayImage,
    reference: Option<&GrayImage>,
    config: &UnditherConfig,
) -> Result<UnditherOutcome, PipelineError> {
    if config.stride == 0 {
        return Err(PipelineError::ZeroStride);
    }
    let measure = |step: i64, img: &GrayImage| {
        MetricsRow::measure(step, img, reference, config.direction, config.distance)
    };

    let mut rows = Vec::with_capacity(config.diffusion.iterations() + 2);
    if let Some(reference) = reference {
        rows.push(MetricsRow::measure(
            REFERENCE_STEP,
            reference,
            None,
            config.direction,
            config.distance,
        )?);
    }

    let filtered = box_filter(&to_float(dithered), config.filter);
    let filtered_gray = to_gray(&filtered).expect("box filter output is finite");
    let step0 = measure(0, &filtered_gray)?;
    let mut best = step0.mse().map(|mse| BestSnapshot {
        step: 0,
        mse,
        image: filtered_gray.clone(),
    });
    let mut kept = Vec::new();
    if config.keep_steps.contains(&0) {
        kept.push((0, filtered_gray));
    }
    rows.push(step0);

    let last = config.diffusion.iterations();
    // Dimensions are fixed, so once step 0 measured cleanly later steps cannot fail.
    let mut failure = None;
    let run = diffuse(&filtered, &config.diffusion, |step, image| {
        let wanted = step % config.stride == 0 || step == last;
        let keep = config.keep_steps.contains(&step);
        if failure.is_some() || !(wanted || keep) {
            return;
        }
        let gray = to_gray(image).expect("diffusion output is finite");
        if wanted {
            match measure(step as i64, &gray) {
                Ok(row) => {
                    if let (Some(mse), Some(b)) = (row.mse(), best.as_mut()) {
                        if mse < b.mse {
                            *b = BestSnapshot {
                                step,
                                mse,
                                image: gray.clone(),
                            };
                        }
                    }
                    rows.push(row);
                }
                Err(e) => failure = Some(e),
            }
        }
        if keep {
            kept.push((step, gray));
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }

    Ok(UnditherOutcome {
        filtered,
        final_image: run.image,
        rows,
        best,
        kept,
        range_violations: run.range_violations,
        max_step_change: run.max_change,
    })
}
