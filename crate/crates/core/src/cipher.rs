//! Scramble, transform, scramble: the encryption pipeline and its inverse.
//!
//! Encryption flattens the image row-major, reorders the pixels with the
//! argsort permutation of the first logistic key, applies the 2D DLCT with
//! the chirp-rate key, and reorders the complex coefficients with the
//! permutation of the second logistic key. Decryption undoes each step in
//! reverse order and quantizes the real part back to 8 bits.

use thiserror::Error;

use crate::chaos::{scrambling_permutation, ChaosError, LogisticParams, Permutation};
use crate::dlct::{ChirpRates, ComplexMatrix, Dlct2Plan, DlctError};

/// Modulus turning the pixel sum into the first discard count.
pub const P1_MODULUS: u64 = 9999;
/// Modulus turning the pixel sum into the second discard count.
pub const P2_MODULUS: u64 = 9990;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CipherError {
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error(transparent)]
    Dlct(#[from] DlctError),
    #[error("image must be at least 1x1, got {rows}x{cols}")]
    EmptyImage { rows: usize, cols: usize },
    #[error("pixel buffer has {actual} bytes, expected {expected}")]
    PixelCount { expected: usize, actual: usize },
    #[error("encryption needs at least 2x2 pixels, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
}

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self, CipherError> {
        if rows == 0 || cols == 0 {
            return Err(CipherError::EmptyImage { rows, cols });
        }
        if pixels.len() != rows * cols {
            return Err(CipherError::PixelCount { expected: rows * cols, actual: pixels.len() });
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self, CipherError> {
        let pixels = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Self::new(rows, cols, pixels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.cols + col]
    }

    pub fn pixel_sum(&self) -> u64 {
        self.pixels.iter().map(|&p| u64::from(p)).sum()
    }
}

/// The eight secret scalars: two logistic keys and the chirp rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyBundle {
    /// x0, mu1, p1: scrambles pixels before the transform.
    pub key1: LogisticParams,
    /// beta_x, beta_y.
    pub key2: ChirpRates,
    /// y0, mu2, p2: scrambles transform coefficients.
    pub key3: LogisticParams,
}

impl KeyBundle {
    pub fn validate(&self) -> Result<(), CipherError> {
        self.key1.validate()?;
        self.key2.validate()?;
        self.key3.validate()?;
        Ok(())
    }

    /// The reference parameter set (x0 = 0.31, mu1 = 3.8, beta = (1.5, -3.5),
    /// y0 = 0.25, mu2 = 3.7) with discard counts derived from `img`.
    pub fn reference_for(img: &GrayImage) -> Self {
        let (p1, p2) = derive_discards(img);
        Self::reference(p1, p2)
    }

    pub fn reference(p1: u64, p2: u64) -> Self {
        Self {
            key1: LogisticParams { x0: 0.31, mu: 3.8, discard: p1 },
            key2: ChirpRates { beta_x: 1.5, beta_y: -3.5 },
            key3: LogisticParams { x0: 0.25, mu: 3.7, discard: p2 },
        }
    }
}

/// Plaintext-dependent discard counts `(sum mod 9999, sum mod 9990)`.
pub fn derive_discards(img: &GrayImage) -> (u64, u64) {
    let sum = img.pixel_sum();
    (sum % P1_MODULUS, sum % P2_MODULUS)
}

/// Encrypted image: the scrambled complex spectrum, same shape as the plain image.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherMatrix(ComplexMatrix);

impl CipherMatrix {
    pub fn new(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl From<ComplexMatrix> for CipherMatrix {
    fn from(m: ComplexMatrix) -> Self {
        Self(m)
    }
}

/// Permutations and transform plan for one key bundle and image shape.
/// Reusing it avoids regenerating the chaotic sequences.
#[derive(Clone)]
pub struct Cipher {
    pixel_scramble: Permutation,
    coefficient_scramble: Permutation,
    plan: Dlct2Plan,
}

impl Cipher {
    pub fn new(keys: &KeyBundle, rows: usize, cols: usize) -> Result<Self, CipherError> {
        if rows < 2 || cols < 2 {
            return Err(CipherError::TooSmall { rows, cols });
        }
        keys.validate()?;
        let len = rows * cols;
        Ok(Self {
            pixel_scramble: scrambling_permutation(&keys.key1, len)?,
            coefficient_scramble: scrambling_permutation(&keys.key3, len)?,
            plan: Dlct2Plan::new(rows, cols, keys.key2)?,
        })
    }

    /// Builds a pipeline from explicit permutations, e.g. identities to
    /// isolate the transform.
    pub fn from_parts(
        pixel_scramble: Permutation,
        coefficient_scramble: Permutation,
        plan: Dlct2Plan,
    ) -> Result<Self, CipherError> {
        let (rows, cols) = (plan.rows(), plan.cols());
        if rows < 2 || cols < 2 {
            return Err(CipherError::TooSmall { rows, cols });
        }
        for p in [&pixel_scramble, &coefficient_scramble] {
            if p.len() != rows * cols {
                return Err(ChaosError::LengthMismatch { vector: rows * cols, permutation: p.len() }.into());
            }
        }
        Ok(Self { pixel_scramble, coefficient_scramble, plan })
    }

    pub fn rows(&self) -> usize {
        self.plan.rows()
    }

    pub fn cols(&self) -> usize {
        self.plan.cols()
    }

    fn check_shape(&self, rows: usize, cols: usize) -> Result<(), CipherError> {
        if (rows, cols) != (self.rows(), self.cols()) {
            return Err(CipherError::DimensionMismatch {
                expected_rows: self.rows(),
                expected_cols: self.cols(),
                rows,
                cols,
            });
        }
        Ok(())
    }

    pub fn encrypt(&self, img: &GrayImage) -> Result<CipherMatrix, CipherError> {
        self.check_shape(img.rows, img.cols)?;
        let scrambled = self.pixel_scramble.apply(&img.pixels)?;
        let values: Vec<f64> = scrambled.into_iter().map(f64::from).collect();
        let spatial = ComplexMatrix::from_real(img.rows, img.cols, &values)?;
        let spectrum = self.plan.forward(&spatial)?;
        let mixed = self.coefficient_scramble.apply(spectrum.data())?;
        Ok(CipherMatrix(ComplexMatrix::new(img.rows, img.cols, mixed)?))
    }

    /// Decryption before quantization: the recovered complex image.
    pub fn decrypt_unquantized(&self, c: &CipherMatrix) -> Result<ComplexMatrix, CipherError> {
        self.check_shape(c.rows(), c.cols())?;
        let spectrum = self.coefficient_scramble.inverse().apply(c.0.data())?;
        let spectrum = ComplexMatrix::new(c.rows(), c.cols(), spectrum)?;
        let spatial = self.plan.inverse(&spectrum)?;
        let pixels = self.pixel_scramble.inverse().apply(spatial.data())?;
        Ok(ComplexMatrix::new(c.rows(), c.cols(), pixels)?)
    }

    /// Decrypts and quantizes: `clamp(round(re), 0, 255)`.
    pub fn decrypt(&self, c: &CipherMatrix) -> Result<GrayImage, CipherError> {
        let raw = self.decrypt_unquantized(c)?;
        let pixels = raw.data().iter().map(|z| quantize_pixel(z.re)).collect();
        GrayImage::new(raw.rows(), raw.cols(), pixels)
    }
}

fn quantize_pixel(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn encrypt(img: &GrayImage, keys: &KeyBundle) -> Result<CipherMatrix, CipherError> {
    Cipher::new(keys, img.rows, img.cols)?.encrypt(img)
}

pub fn decrypt(c: &CipherMatrix, keys: &KeyBundle) -> Result<GrayImage, CipherError> {
    Cipher::new(keys, c.rows(), c.cols())?.decrypt(c)
}
