//! Security metrics and attack simulations for the cipher.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::chaos::{MU_CHAOTIC_MAX, MU_CHAOTIC_MIN};
use crate::cipher::{encrypt, Cipher, CipherError, CipherMatrix, GrayImage, KeyBundle, P1_MODULUS, P2_MODULUS};
use crate::dlct::ComplexMatrix;

/// Default seed of the adjacent-pixel sampler.
pub const DEFAULT_CORRELATION_SEED: u64 = 42;
/// Default seed of the noise attack.
pub const DEFAULT_NOISE_SEED: u64 = 7;
/// Default number of sampled adjacent pairs.
pub const DEFAULT_PAIRS: usize = 6000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("need at least 2 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("image {rows}x{cols} offers {available} {direction} pairs, {requested} requested")]
    ImageTooSmall {
        rows: usize,
        cols: usize,
        direction: Direction,
        available: usize,
        requested: usize,
    },
    #[error("sample has zero variance, correlation is undefined")]
    ZeroVariance,
    #[error("real part is constant ({0}), cannot map it onto 0..=255")]
    DegenerateRange(f64),
    #[error("key-space entries must be positive and finite")]
    NonPositiveKeySpace,
    #[error("unsupported occlusion fraction {0}, use 0.25, 0.5 or 0.75")]
    UnsupportedFraction(f64),
    #[error("occlusion rectangle {row0}+{rows} x {col0}+{cols} exceeds {max_rows}x{max_cols}")]
    RectOutOfBounds {
        row0: usize,
        col0: usize,
        rows: usize,
        cols: usize,
        max_rows: usize,
        max_cols: usize,
    },
    #[error("noise level must be finite and non-negative, got {0}")]
    NegativeSigma(f64),
    #[error("perturbed discard count {0} is negative")]
    NegativeDiscard(f64),
    #[error("unknown key parameter `{0}`")]
    UnknownParameter(String),
    #[error(transparent)]
    Cipher(#[from] CipherError),
}

fn same_shape(a: &GrayImage, b: &GrayImage) -> Result<(), AnalysisError> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(AnalysisError::DimensionMismatch(a.rows(), a.cols(), b.rows(), b.cols()));
    }
    Ok(())
}

/// Mean squared pixel difference.
pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64, AnalysisError> {
    same_shape(a, b)?;
    let sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = u64::from(x.abs_diff(y));
            d * d
        })
        .sum();
    Ok(sum as f64 / a.pixels().len() as f64)
}

/// `10 log10(255^2 / mse)`; zero error maps to `f64::INFINITY`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

/// PSNR in dB; identical images give `f64::INFINITY`.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64, AnalysisError> {
    Ok(psnr_from_mse(mse(a, b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Horizontal, Direction::Vertical, Direction::Diagonal];

    /// (row, col) step to the neighbouring pixel.
    pub fn offset(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::Diagonal => (1, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Correlation of sampled neighbour pairs, with the pairs themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSample {
    pub r: f64,
    /// (pixel, neighbour) values.
    pub pairs: Vec<(u8, u8)>,
}

/// Pearson correlation coefficient of two equally long samples.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    assert_eq!(x.len(), y.len(), "samples must have equal length");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalysisError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Samples `pairs` distinct pixel positions (seeded) that have a neighbour in
/// `direction` and correlates each pixel with that neighbour.
pub fn adjacent_correlation(
    img: &GrayImage,
    direction: Direction,
    pairs: usize,
    seed: u64,
) -> Result<CorrelationSample, AnalysisError> {
    if pairs < 2 {
        return Err(AnalysisError::TooFewPairs(pairs));
    }
    let (dr, dc) = direction.offset();
    let rows = img.rows().saturating_sub(dr);
    let cols = img.cols().saturating_sub(dc);
    let available = rows * cols;
    if available < pairs {
        return Err(AnalysisError::ImageTooSmall {
            rows: img.rows(),
            cols: img.cols(),
            direction,
            available,
            requested: pairs,
        });
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let sampled: Vec<(u8, u8)> = index::sample(&mut rng, available, pairs)
        .into_iter()
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            (img.get(r, c), img.get(r + dr, c + dc))
        })
        .collect();
    let x: Vec<f64> = sampled.iter().map(|p| f64::from(p.0)).collect();
    let y: Vec<f64> = sampled.iter().map(|p| f64::from(p.1)).collect();
    Ok(CorrelationSample { r: pearson(&x, &y)?, pairs: sampled })
}

pub fn histogram256(img: &GrayImage) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &p in img.pixels() {
        counts[usize::from(p)] += 1;
    }
    counts
}

/// Symmetric chi-square distance `sum (a - b)^2 / (a + b)` over non-empty bins.
pub fn chi_square_distance(a: &[u64; 256], b: &[u64; 256]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(&x, &y)| x + y > 0)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d / (x + y) as f64
        })
        .sum()
}

/// Display form of a ciphertext: the real part mapped affinely from
/// `[min, max]` onto `[0, 255]`, rounding halves up.
pub fn quantize_complex(c: &CipherMatrix) -> Result<GrayImage, AnalysisError> {
    let data = c.matrix().data();
    let (lo, hi) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)));
    if hi <= lo {
        return Err(AnalysisError::DegenerateRange(lo));
    }
    let scale = 255.0 / (hi - lo);
    let pixels = data
        .iter()
        .map(|z| ((z.re - lo) * scale + 0.5).floor().clamp(0.0, 255.0) as u8)
        .collect();
    Ok(GrayImage::new(c.rows(), c.cols(), pixels)?)
}

/// One independent key component for the key-space count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KeyDimension {
    /// A real key resolved to `precision` over an interval of length `range`.
    Continuous { name: String, range: f64, precision: f64 },
    /// An integer key with `states` possible values.
    Discrete { name: String, states: f64 },
}

impl KeyDimension {
    fn log2_states(&self) -> Result<f64, AnalysisError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match self {
            KeyDimension::Continuous { range, precision, .. } if ok(*range) && ok(*precision) => {
                Ok(range.log2() - precision.log2())
            }
            KeyDimension::Discrete { states, .. } if ok(*states) => Ok(states.log2()),
            _ => Err(AnalysisError::NonPositiveKeySpace),
        }
    }
}

/// `log2 prod(range_i / precision)` for real keys sharing one precision.
pub fn key_space_log2(ranges: &[f64], precision: f64) -> Result<f64, AnalysisError> {
    if ranges.is_empty() || !(precision.is_finite() && precision > 0.0) {
        return Err(AnalysisError::NonPositiveKeySpace);
    }
    ranges.iter().try_fold(0.0, |acc, &range| {
        Ok(acc + KeyDimension::Continuous { name: String::new(), range, precision }.log2_states()?)
    })
}

/// Sum of `log2(states)` over all dimensions.
pub fn key_space_bits(dims: &[KeyDimension]) -> Result<f64, AnalysisError> {
    if dims.is_empty() {
        return Err(AnalysisError::NonPositiveKeySpace);
    }
    dims.iter().map(KeyDimension::log2_states).sum()
}

/// Machine precision assumed for real-valued keys.
pub const KEY_PRECISION: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeySpacePreset {
    /// Reproduces the commonly quoted total of about 10^74 (~245.8 bits).
    /// x0, y0 span (0, 1) and mu1, mu2 span the chaotic regime, all at
    /// 1e-14; p1, p2 count their moduli; each chirp rate is counted over
    /// its aliasing period [0, 256) of a 256-wide image at a resolution of
    /// 1e-3. That chirp resolution is not derived from anything: it is the
    /// residual that makes the total match, and chirp errors below ~1e-3
    /// barely change the decryption. Treat this figure as a citation,
    /// not a measurement.
    Paper,
    /// Same as `Paper`, but the chirp rates are counted at 1e-14 too.
    Physical,
}

impl KeySpacePreset {
    pub fn dimensions(self) -> Vec<KeyDimension> {
        let chirp_precision = match self {
            KeySpacePreset::Paper => 1e-3,
            KeySpacePreset::Physical => KEY_PRECISION,
        };
        let real = |name: &str, range: f64, precision: f64| KeyDimension::Continuous {
            name: name.into(),
            range,
            precision,
        };
        let mu_range = MU_CHAOTIC_MAX - MU_CHAOTIC_MIN;
        vec![
            real("x0", 1.0, KEY_PRECISION),
            real("mu1", mu_range, KEY_PRECISION),
            KeyDimension::Discrete { name: "p1".into(), states: P1_MODULUS as f64 },
            real("beta_x", 256.0, chirp_precision),
            real("beta_y", 256.0, chirp_precision),
            real("y0", 1.0, KEY_PRECISION),
            real("mu2", mu_range, KEY_PRECISION),
            KeyDimension::Discrete { name: "p2".into(), states: P2_MODULUS as f64 },
        ]
    }

    pub fn bits(self) -> f64 {
        key_space_bits(&self.dimensions()).expect("preset entries are positive")
    }
}

impl FromStr for KeySpacePreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "physical" => Ok(Self::Physical),
            other => Err(format!("unknown key-space preset `{other}` (paper, physical)")),
        }
    }
}

/// Axis-aligned block of ciphertext entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub row0: usize,
    pub col0: usize,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occlusion {
    /// Top-left quadrant.
    Quarter,
    /// Top half.
    Half,
    /// Everything except the bottom-right quadrant.
    ThreeQuarters,
}

impl Occlusion {
    pub fn from_fraction(f: f64) -> Result<Self, AnalysisError> {
        match f {
            0.25 => Ok(Self::Quarter),
            0.5 => Ok(Self::Half),
            0.75 => Ok(Self::ThreeQuarters),
            other => Err(AnalysisError::UnsupportedFraction(other)),
        }
    }

    pub fn fraction(self) -> f64 {
        match self {
            Self::Quarter => 0.25,
            Self::Half => 0.5,
            Self::ThreeQuarters => 0.75,
        }
    }

    /// Zeroed blocks for an `rows x cols` ciphertext; halves round up.
    pub fn regions(self, rows: usize, cols: usize) -> Vec<Rect> {
        let (hr, hc) = (rows.div_ceil(2), cols.div_ceil(2));
        match self {
            Self::Quarter => vec![Rect { row0: 0, col0: 0, rows: hr, cols: hc }],
            Self::Half => vec![Rect { row0: 0, col0: 0, rows: hr, cols }],
            Self::ThreeQuarters => vec![
                Rect { row0: 0, col0: 0, rows: hr, cols },
                Rect { row0: hr, col0: 0, rows: rows - hr, cols: hc },
            ],
        }
    }
}

/// Sets every entry inside `rect` to zero.
pub fn occlude_rect(c: &CipherMatrix, rect: Rect) -> Result<CipherMatrix, AnalysisError> {
    let (n, m) = (c.rows(), c.cols());
    if rect.row0 + rect.rows > n || rect.col0 + rect.cols > m {
        return Err(AnalysisError::RectOutOfBounds {
            row0: rect.row0,
            col0: rect.col0,
            rows: rect.rows,
            cols: rect.cols,
            max_rows: n,
            max_cols: m,
        });
    }
    let mut out = c.matrix().clone();
    let data = out.data_mut();
    for r in rect.row0..rect.row0 + rect.rows {
        for v in &mut data[r * m + rect.col0..r * m + rect.col0 + rect.cols] {
            *v = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    Ok(CipherMatrix::new(out))
}

pub fn occlude(c: &CipherMatrix, occlusion: Occlusion) -> Result<CipherMatrix, AnalysisError> {
    occlusion
        .regions(c.rows(), c.cols())
        .into_iter()
        .try_fold(c.clone(), |acc, rect| occlude_rect(&acc, rect))
}

/// Adds zero-mean Gaussian noise to each part; the standard deviation is
/// `sigma` times that part's dynamic range (max - min). Draws are taken
/// row-major, real before imaginary.
pub fn add_gaussian_noise(c: &CipherMatrix, sigma: f64, seed: u64) -> Result<CipherMatrix, AnalysisError> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(AnalysisError::NegativeSigma(sigma));
    }
    let data = c.matrix().data();
    let range = |part: fn(&num_complex::Complex64) -> f64| {
        let (lo, hi) = data
            .iter()
            .map(part)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    let (sd_re, sd_im) = (sigma * range(|z| z.re), sigma * range(|z| z.im));
    let mut rng = SplitMix64::seed_from_u64(seed);
    let noisy = data
        .iter()
        .map(|z| {
            let nr: f64 = StandardNormal.sample(&mut rng);
            let ni: f64 = StandardNormal.sample(&mut rng);
            num_complex::Complex64::new(z.re + sd_re * nr, z.im + sd_im * ni)
        })
        .collect();
    Ok(CipherMatrix::new(
        ComplexMatrix::new(c.rows(), c.cols(), noisy).map_err(CipherError::from)?,
    ))
}

/// One of the eight scalar key components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyParameter {
    X0,
    Mu1,
    P1,
    BetaX,
    BetaY,
    Y0,
    Mu2,
    P2,
}

impl KeyParameter {
    pub const ALL: [KeyParameter; 8] = [
        Self::X0,
        Self::Mu1,
        Self::P1,
        Self::BetaX,
        Self::BetaY,
        Self::Y0,
        Self::Mu2,
        Self::P2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::X0 => "x0",
            Self::Mu1 => "mu1",
            Self::P1 => "p1",
            Self::BetaX => "beta_x",
            Self::BetaY => "beta_y",
            Self::Y0 => "y0",
            Self::Mu2 => "mu2",
            Self::P2 => "p2",
        }
    }

    /// `keys` with this component shifted by `delta`. Discard counts move by
    /// `delta` rounded to the nearest integer. Fails if the result leaves the
    /// key domain.
    pub fn perturb(self, keys: &KeyBundle, delta: f64) -> Result<KeyBundle, AnalysisError> {
        let mut k = *keys;
        let shift = |p: &mut u64| -> Result<(), AnalysisError> {
            let v = *p as f64 + delta.round();
            if !(0.0..=u64::MAX as f64).contains(&v) {
                return Err(AnalysisError::NegativeDiscard(v));
            }
            *p = v as u64;
            Ok(())
        };
        match self {
            Self::X0 => k.key1.x0 += delta,
            Self::Mu1 => k.key1.mu += delta,
            Self::P1 => shift(&mut k.key1.discard)?,
            Self::BetaX => k.key2.beta_x += delta,
            Self::BetaY => k.key2.beta_y += delta,
            Self::Y0 => k.key3.x0 += delta,
            Self::Mu2 => k.key3.mu += delta,
            Self::P2 => shift(&mut k.key3.discard)?,
        }
        k.validate()?;
        Ok(k)
    }
}

impl fmt::Display for KeyParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KeyParameter {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| AnalysisError::UnknownParameter(s.to_string()))
    }
}

/// MSE of wrong-key decryptions against the plain image as one key moves.
/// `mse_values[i]` is `None` when `deviations[i]` pushed the key out of its domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCurve {
    pub parameter: KeyParameter,
    pub deviations: Vec<f64>,
    pub mse_values: Vec<Option<f64>>,
}

impl SensitivityCurve {
    /// `deviation,mse` rows; skipped points are left out.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("deviation,mse\n");
        for (d, m) in self.deviations.iter().zip(&self.mse_values) {
            if let Some(m) = m {
                out.push_str(&format!("{d:e},{m}\n"));
            }
        }
        out
    }
}

pub fn sensitivity_sweep(
    img: &GrayImage,
    keys: &KeyBundle,
    parameter: KeyParameter,
    deviations: &[f64],
) -> Result<SensitivityCurve, AnalysisError> {
    let cipher = encrypt(img, keys)?;
    let mse_values = deviations
        .par_iter()
        .map(|&delta| -> Result<Option<f64>, AnalysisError> {
            let Ok(k) = parameter.perturb(keys, delta) else {
                return Ok(None);
            };
            let decrypted = match Cipher::new(&k, img.rows(), img.cols()) {
                Ok(c) => c.decrypt(&cipher)?,
                // e.g. a perturbed mu = 4 orbit collapsing onto 0
                Err(CipherError::Chaos(_)) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            Ok(Some(mse(img, &decrypted)?))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SensitivityCurve { parameter, deviations: deviations.to_vec(), mse_values })
}

/// Signed logarithmic grid: `-max..-min, 0, min..max` with `points`
/// magnitudes per sign.
pub fn log_deviation_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    let mags: Vec<f64> = match points {
        0 => vec![],
        1 => vec![min],
        _ => {
            let (a, b) = (min.log10(), max.log10());
            (0..points)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64))
                .collect()
        }
    };
    mags.iter().rev().map(|m| -m).chain([0.0]).chain(mags.iter().copied()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub horizontal: f64,
    pub vertical: f64,
    pub diagonal: f64,
}

/// Statistics of one 8-bit image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageStatistics {
    pub correlations: Correlations,
    pub histogram: Vec<u64>,
}

/// Correlations in all three directions and the histogram; also returns the
/// sampled pairs per direction.
pub fn image_statistics(
    img: &GrayImage,
    pairs: usize,
    seed: u64,
) -> Result<(ImageStatistics, Vec<(Direction, CorrelationSample)>), AnalysisError> {
    let samples = Direction::ALL
        .into_iter()
        .map(|d| Ok((d, adjacent_correlation(img, d, pairs, seed)?)))
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let stats = ImageStatistics {
        correlations: Correlations {
            horizontal: samples[0].1.r,
            vertical: samples[1].1.r,
            diagonal: samples[2].1.r,
        },
        histogram: histogram256(img).to_vec(),
    };
    Ok((stats, samples))
}

/// Everything `analyze` reports. `mse`/`psnr_db` compare the plain image with
/// the correct-key decryption and are present only when a key was given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub seed: u64,
    pub pairs: usize,
    pub plain: ImageStatistics,
    pub cipher: Option<ImageStatistics>,
    pub mse: Option<f64>,
    #[serde(with = "psnr_json")]
    pub psnr_db: Option<f64>,
    pub key_space_preset: KeySpacePreset,
    pub key_space_bits: f64,
}

/// JSON has no infinity; an infinite PSNR is written as the string "inf".
mod psnr_json {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if x.is_infinite() && *x > 0.0 => s.serialize_some("inf"),
            Some(x) => s.serialize_some(x),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Finite(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
            Some(Repr::Text(t)) => Err(serde::de::Error::custom(format!("bad psnr value {t:?}"))),
        }
    }
}
