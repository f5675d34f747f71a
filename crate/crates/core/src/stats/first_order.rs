use super::{entropy_term, StatsError};
use crate::raster::Histogram;

/// Moments of the gray-level distribution.
///
/// `mu3` and `mu4` are unnormalized central moments taken as
/// `sum (mean - r_k)^m p(r_k)`; note the order of the difference, which
/// flips the sign of `mu3` relative to the usual `(r_k - mean)^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderStats {
    pub mean: f64,
    pub variance: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub energy: f64,
    /// Bits.
    pub entropy: f64,
}

pub fn first_order(hist: &Histogram) -> Result<FirstOrderStats, StatsError> {
    if hist.total() == 0 {
        return Err(StatsError::EmptyHistogram);
    }
    let occupied: Vec<(f64, f64)> = hist
        .probabilities()
        .filter(|&(_, p)| p > 0.0)
        .map(|(k, p)| (f64::from(k), p))
        .collect();

    let mean: f64 = occupied.iter().map(|&(r, p)| r * p).sum();
    let mut stats = FirstOrderStats {
        mean,
        variance: 0.0,
        mu3: 0.0,
        mu4: 0.0,
        energy: 0.0,
        entropy: 0.0,
    };
    for &(r, p) in &occupied {
        let d = mean - r;
        let d2 = d * d;
        stats.variance += d2 * p;
        stats.mu3 += d2 * d * p;
        stats.mu4 += d2 * d2 * p;
        stats.energy += p * p;
        stats.entropy += entropy_term(p);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{histogram, GrayImage};

    #[test]
    fn degenerate_distribution() {
        let s = first_order(&histogram(&GrayImage::filled(4, 4, 128).unwrap())).unwrap();
        assert_eq!(
            s,
            FirstOrderStats {
                mean: 128.0,
                variance: 0.0,
                mu3: 0.0,
                mu4: 0.0,
                energy: 1.0,
                entropy: 0.0
            }
        );
    }

    #[test]
    fn two_level_distribution() {
        let img = GrayImage::from_fn(4, 4, |r, _| if r < 2 { 0 } else { 255 }).unwrap();
        let s = first_order(&histogram(&img)).unwrap();
        assert_eq!(s.mean, 127.5);
        assert_eq!(s.variance, 16256.25);
        assert_eq!(s.mu3, 0.0);
        assert_eq!(s.mu4, 127.5f64.powi(4));
        assert_eq!(s.energy, 0.5);
        assert_eq!(s.entropy, 1.0);
    }

    #[test]
    fn skew_sign_follows_mean_minus_level() {
        // Long tail toward high levels: conventional skew > 0, so mu3 < 0 here.
        let mut px = vec![10u8; 15];
        px.push(250);
        let s = first_order(&histogram(&GrayImage::new(16, 1, px).unwrap())).unwrap();
        assert!(s.mu3 < 0.0);
    }

    #[test]
    fn entropy_of_uniform_levels() {
        let img = GrayImage::from_fn(16, 16, |r, c| (r * 16 + c) as u8).unwrap();
        let s = first_order(&histogram(&img)).unwrap();
        assert!((s.entropy - 8.0).abs() < 1e-12);
        assert!((s.energy - 1.0 / 256.0).abs() < 1e-15);
    }
}
