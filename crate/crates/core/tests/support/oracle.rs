//! Brute-force reference implementations used to check the statistics.
//!
//! These work from raw pixel tallies and exact integer sums wherever
//! possible and share no code with the library.

#![allow(dead_code)]

use std::collections::BTreeMap;
use undither_core::GrayImage;

/// Expected value together with the magnitude of the terms it was summed
/// from, so comparisons can use a tolerance relative to that magnitude.
#[derive(Debug, Clone, Copy)]
pub struct Expected {
    pub value: f64,
    pub scale: f64,
}

impl Expected {
    fn plain(value: f64) -> Self {
        Self {
            value,
            scale: value.abs(),
        }
    }

    /// `|actual - value| <= tol * max(1, scale)`
    pub fn matches(&self, actual: f64, tol: f64) -> bool {
        (actual - self.value).abs() <= tol * self.scale.max(1.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FirstOrderOracle {
    pub mean: Expected,
    pub variance: Expected,
    pub mu3: Expected,
    pub mu4: Expected,
    pub energy: Expected,
    pub entropy: Expected,
}

fn tally<K: Ord>(items: impl Iterator<Item = K>) -> BTreeMap<K, u64> {
    let mut map = BTreeMap::new();
    for k in items {
        *map.entry(k).or_insert(0) += 1;
    }
    map
}

/// `log2(n) - (1/n) sum c log2 c` over the occupied cells.
fn entropy_from_counts(counts: &BTreeMap<impl Ord, u64>, n: u64) -> f64 {
    let nf = n as f64;
    let weighted: f64 = counts.values().map(|&c| c as f64 * (c as f64).log2()).sum();
    nf.log2() - weighted / nf
}

fn energy_from_counts(counts: &BTreeMap<impl Ord, u64>, n: u64) -> f64 {
    let squares: u128 = counts
        .values()
        .map(|&c| u128::from(c) * u128::from(c))
        .sum();
    squares as f64 / (u128::from(n) * u128::from(n)) as f64
}

/// Per-pixel moments in exact integer arithmetic: with `S = sum x`,
/// `sum (mean - x)^m / n = sum (S - n x)^m / n^(m+1)`.
pub fn first_order(img: &GrayImage) -> FirstOrderOracle {
    let px = img.pixels();
    let n = px.len() as i128;
    let s: i128 = px.iter().map(|&v| v as i128).sum();
    let moment = |m: u32| {
        let (signed, abs) = px.iter().fold((0i128, 0i128), |(acc, acc_abs), &v| {
            let d = (s - n * v as i128).pow(m);
            (acc + d, acc_abs + d.abs())
        });
        let denom = (n as f64).powi(m as i32 + 1);
        Expected {
            value: signed as f64 / denom,
            scale: abs as f64 / denom,
        }
    };
    let counts = tally(px.iter().copied());
    FirstOrderOracle {
        mean: Expected::plain(s as f64 / n as f64),
        variance: moment(2),
        mu3: moment(3),
        mu4: moment(4),
        energy: Expected::plain(energy_from_counts(&counts, n as u64)),
        entropy: Expected::plain(entropy_from_counts(&counts, n as u64)),
    }
}

/// Every ordered pair `(x(i, j), x((i, j) + d * unit(theta)))` with both
/// ends inside the image. The unit step comes from the angle itself:
/// `(-round(sin), round(cos))` in (row, col) terms.
pub fn pairs(img: &GrayImage, degrees: u32, d: usize) -> Vec<(u8, u8)> {
    let rad = (degrees as f64).to_radians();
    let drow = -(rad.sin().round() as i64) * d as i64;
    let dcol = (rad.cos().round() as i64) * d as i64;
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let (r2, c2) = (r + drow, c + dcol);
            if (0..h).contains(&r2) && (0..w).contains(&c2) {
                out.push((
                    img.get(r as usize, c as usize),
                    img.get(r2 as usize, c2 as usize),
                ));
            }
        }
    }
    out
}

pub fn glcm_counts(img: &GrayImage, degrees: u32, d: usize) -> (BTreeMap<(u8, u8), u64>, u64) {
    let list = pairs(img, degrees, d);
    let n = list.len() as u64;
    (tally(list.into_iter()), n)
}

#[derive(Debug, Clone, Copy)]
pub struct SecondOrderOracle {
    pub energy: Expected,
    pub entropy: Expected,
    pub contrast: Expected,
    pub homogeneity: Expected,
    pub correlation: Option<Expected>,
}

/// Features as expectations over the pair list; correlation is the Pearson
/// coefficient of the pair sequence computed from exact integer sums.
pub fn second_order(img: &GrayImage, degrees: u32, d: usize) -> SecondOrderOracle {
    let list = pairs(img, degrees, d);
    let n = list.len() as i128;
    let counts = tally(list.iter().copied());
    let (mut sa, mut sb, mut saa, mut sbb, mut sab, mut sdd) =
        (0i128, 0i128, 0i128, 0i128, 0i128, 0i128);
    let mut homogeneity = 0.0;
    for &(a, b) in &list {
        let (a, b) = (a as i128, b as i128);
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
        sdd += (a - b) * (a - b);
        homogeneity += 1.0 / (1.0 + (a - b).abs() as f64);
    }
    let var_a = n * saa - sa * sa;
    let var_b = n * sbb - sb * sb;
    let correlation = (var_a > 0 && var_b > 0).then(|| {
        Expected::plain(
            (n * sab - sa * sb) as f64 / ((var_a as f64).sqrt() * (var_b as f64).sqrt()),
        )
    });
    SecondOrderOracle {
        energy: Expected::plain(energy_from_counts(&counts, n as u64)),
        entropy: Expected::plain(entropy_from_counts(&counts, n as u64)),
        contrast: Expected::plain(sdd as f64 / n as f64),
        homogeneity: Expected::plain(homogeneity / n as f64),
        correlation,
    }
}
