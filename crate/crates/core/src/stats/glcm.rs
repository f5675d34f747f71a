use super::{entropy_term, StatsError};
use crate::raster::{GrayImage, GRAY_LEVELS};

/// Co-occurrence direction. Offsets are in (row, col) terms with rows
/// growing downward, so 90 degrees points up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl Direction {
    pub fn from_degrees(deg: u32) -> Result<Self, StatsError> {
        match deg {
            0 => Ok(Direction::Deg0),
            45 => Ok(Direction::Deg45),
            90 => Ok(Direction::Deg90),
            135 => Ok(Direction::Deg135),
            other => Err(StatsError::InvalidDirection(other)),
        }
    }

    pub fn degrees(self) -> u32 {
        match self {
            Direction::Deg0 => 0,
            Direction::Deg45 => 45,
            Direction::Deg90 => 90,
            Direction::Deg135 => 135,
        }
    }

    /// Unit step as (d_row, d_col).
    pub fn unit(self) -> (isize, isize) {
        match self {
            Direction::Deg0 => (0, 1),
            Direction::Deg45 => (-1, 1),
            Direction::Deg90 => (-1, 0),
            Direction::Deg135 => (-1, -1),
        }
    }
}

/// Ordered (non-symmetrized) gray-level co-occurrence matrix over all 256
/// levels. Entry `(a, b)` counts pixels of level `a` whose neighbor at
/// `distance` steps along `direction` has level `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glcm {
    counts: Vec<u64>,
    pairs: u64,
    direction: Direction,
    distance: usize,
}

impl Glcm {
    pub fn levels(&self) -> usize {
        GRAY_LEVELS
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn pair_count(&self) -> u64 {
        self.pairs
    }

    pub fn count(&self, a: u8, b: u8) -> u64 {
        self.counts[a as usize * GRAY_LEVELS + b as usize]
    }

    /// `p(a, b)`
    pub fn probability(&self, a: u8, b: u8) -> f64 {
        self.count(a, b) as f64 / self.pairs as f64
    }

    /// Nonzero entries as `(a, b, p(a, b))` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.pairs as f64;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (i / GRAY_LEVELS, i % GRAY_LEVELS, c as f64 / n))
    }
}

pub fn glcm(img: &GrayImage, direction: Direction, distance: usize) -> Result<Glcm, StatsError> {
    if distance == 0 {
        return Err(StatsError::ZeroDisplacement);
    }
    let (width, height) = img.dimensions();
    let (ur, uc) = direction.unit();
    let (dr, dc) = (ur * distance as isize, uc * distance as isize);

    // Rows/cols whose displaced partner stays inside the image.
    let span = |delta: isize, len: usize| -> Option<std::ops::Range<usize>> {
        let shift = delta.unsigned_abs();
        if shift >= len {
            return None;
        }
        Some(if delta < 0 {
            shift..len
        } else {
            0..len - shift
        })
    };
    let (Some(rows), Some(cols)) = (span(dr, height), span(dc, width)) else {
        return Err(StatsError::NoPairs);
    };

    let mut counts = vec![0u64; GRAY_LEVELS * GRAY_LEVELS];
    let px = img.pixels();
    for row in rows {
        let partner_row = (row as isize + dr) as usize;
        for col in cols.clone() {
            let partner_col = (col as isize + dc) as usize;
            let a = px[row * width + col] as usize;
            let b = px[partner_row * width + partner_col] as usize;
            counts[a * GRAY_LEVELS + b] += 1;
        }
    }
    let pairs = counts.iter().sum();
    Ok(Glcm {
        counts,
        pairs,
        direction,
        distance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderStats {
    pub energy: f64,
    /// Bits.
    pub entropy: f64,
    pub contrast: f64,
    pub homogeneity: f64,
    /// `None` when either marginal has zero standard deviation.
    pub correlation: Option<f64>,
}

impl SecondOrderStats {
    pub fn try_correlation(&self) -> Result<f64, StatsError> {
        self.correlation.ok_or(StatsError::CorrelationUndefined)
    }
}

/// Energy, entropy, contrast, homogeneity and correlation of a GLCM.
///
/// Correlation uses the marginal means `mu_x = sum_a a p_x(a)`,
/// `mu_y = sum_b b p_y(b)` and the marginal standard deviations.
pub fn second_order(m: &Glcm) -> SecondOrderStats {
    let mut px = [0.0f64; GRAY_LEVELS];
    let mut py = [0.0f64; GRAY_LEVELS];
    let mut energy = 0.0;
    let mut entropy = 0.0;
    let mut contrast = 0.0;
    let mut homogeneity = 0.0;
    for (a, b, p) in m.entries() {
        px[a] += p;
        py[b] += p;
        let diff = a.abs_diff(b) as f64;
        energy += p * p;
        entropy += entropy_term(p);
        contrast += diff * diff * p;
        homogeneity += p / (1.0 + diff);
    }

    let moments = |marginal: &[f64; GRAY_LEVELS]| {
        let mean: f64 = marginal
            .iter()
            .enumerate()
            .map(|(k, &p)| k as f64 * p)
            .sum();
        let var: f64 = marginal
            .iter()
            .enumerate()
            .map(|(k, &p)| (k as f64 - mean).powi(2) * p)
            .sum();
        (mean, var.sqrt())
    };
    let (mu_x, sigma_x) = moments(&px);
    let (mu_y, sigma_y) = moments(&py);
    let correlation = if sigma_x * sigma_y > 0.0 {
        let cov: f64 = m
            .entries()
            .map(|(a, b, p)| (a as f64 - mu_x) * (b as f64 - mu_y) * p)
            .sum();
        Some(cov / (sigma_x * sigma_y))
    } else {
        None
    };

    SecondOrderStats {
        energy,
        entropy,
        contrast,
        homogeneity,
        correlation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image() {
        let m = glcm(&GrayImage::filled(2, 2, 7).unwrap(), Direction::Deg0, 1).unwrap();
        assert_eq!(m.probability(7, 7), 1.0);
        assert_eq!(m.entries().count(), 1);
        let s = second_order(&m);
        assert_eq!(
            (s.energy, s.entropy, s.contrast, s.homogeneity),
            (1.0, 0.0, 0.0, 1.0)
        );
        assert_eq!(s.correlation, None);
        assert_eq!(s.try_correlation(), Err(StatsError::CorrelationUndefined));
    }

    #[test]
    fn checkerboard() {
        let img = GrayImage::new(2, 2, vec![0, 1, 1, 0]).unwrap();
        let m = glcm(&img, Direction::Deg0, 1).unwrap();
        assert_eq!(m.pair_count(), 2);
        assert_eq!(m.probability(0, 1), 0.5);
        assert_eq!(m.probability(1, 0), 0.5);
        let s = second_order(&m);
        assert_eq!(s.energy, 0.5);
        assert_eq!(s.entropy, 1.0);
        assert_eq!(s.contrast, 1.0);
        assert_eq!(s.homogeneity, 0.5);
        assert!((s.correlation.unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn ordered_pairs_not_symmetrized() {
        let img = GrayImage::new(3, 1, vec![5, 5, 9]).unwrap();
        let m = glcm(&img, Direction::Deg0, 1).unwrap();
        assert_eq!(m.probability(5, 5), 0.5);
        assert_eq!(m.probability(5, 9), 0.5);
        assert_eq!(m.probability(9, 5), 0.0);
    }

    #[test]
    fn directions_follow_row_col_offsets() {
        // 2x2 image [[1, 2], [3, 4]]
        let img = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        let single = |d| {
            let m = glcm(&img, d, 1).unwrap();
            m.entries().map(|(a, b, _)| (a, b)).collect::<Vec<_>>()
        };
        assert_eq!(single(Direction::Deg45), vec![(3, 2)]);
        assert_eq!(single(Direction::Deg90), vec![(3, 1), (4, 2)]);
        assert_eq!(single(Direction::Deg135), vec![(4, 1)]);
    }

    #[test]
    fn pair_counts() {
        let img = GrayImage::filled(7, 5, 0).unwrap();
        assert_eq!(glcm(&img, Direction::Deg0, 1).unwrap().pair_count(), 5 * 6);
        assert_eq!(glcm(&img, Direction::Deg90, 2).unwrap().pair_count(), 3 * 7);
        assert_eq!(glcm(&img, Direction::Deg135, 4).unwrap().pair_count(), 3);
    }

    #[test]
    fn errors() {
        let img = GrayImage::filled(3, 1, 0).unwrap();
        assert_eq!(glcm(&img, Direction::Deg90, 1), Err(StatsError::NoPairs));
        assert_eq!(glcm(&img, Direction::Deg0, 3), Err(StatsError::NoPairs));
        assert_eq!(
            glcm(&img, Direction::Deg0, 0),
            Err(StatsError::ZeroDisplacement)
        );
        assert_eq!(
            Direction::from_degrees(180),
            Err(StatsError::InvalidDirection(180))
        );
    }
}
