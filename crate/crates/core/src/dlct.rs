//! The discrete linear chirp transform (DLCT) in one and two dimensions.
//!
//! The 1D kernel of size `N` with chirp rate `beta` is
//!
//! ```text
//! K(n, k) = exp(-i * 2*pi/N * (k*n + beta*n^2))
//! ```
//!
//! and the 2D kernel is the product of one such kernel per axis. Because
//! `K(n, k) = exp(-i*2*pi*beta*n^2/N) * exp(-i*2*pi*k*n/N)`, each 1D transform
//! is a pointwise chirp modulation followed by an ordinary DFT, which is how
//! the fast path evaluates it. [`dlct2_forward_direct`] evaluates the double
//! sum literally and exists to check the fast path.
//!
//! The forward transform is unnormalized; the inverse carries the full
//! `1/(N*M)` factor (see [`inverse_scale`]).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

/// Largest `rows * cols` accepted by [`dlct2_forward_direct`].
pub const DIRECT_SUM_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DlctError {
    #[error("matrix dimensions must be at least 1x1, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("data length {actual} does not match {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, actual: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("chirp rate {0} is not finite")]
    NonFiniteRate(f64),
    #[error("kernel index ({n}, {k}) out of range for size {size}")]
    IndexOutOfRange { n: usize, k: usize, size: usize },
    #[error("vector length must be at least 1")]
    EmptyVector,
    #[error("direct summation of a {rows}x{cols} matrix exceeds the limit of {limit} entries")]
    TooLargeForDirect { rows: usize, cols: usize, limit: usize },
    #[error("plan is for {expected_rows}x{expected_cols}, matrix is {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
}

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, DlctError> {
        if rows == 0 || cols == 0 {
            return Err(DlctError::EmptyShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(DlctError::DataLength { rows, cols, actual: data.len() });
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DlctError::NonFinite { row: i / cols, col: i % cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, DlctError> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self, DlctError> {
        let data = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Self::new(rows, cols, data)
    }

    /// Embeds real values, e.g. pixel intensities.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self, DlctError> {
        Self::new(rows, cols, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    /// Mutable access to the entries. Callers must keep them finite.
    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish_non_exhaustive()
    }
}

/// Chirp rates for the two axes: `beta_x` runs along the `N` rows,
/// `beta_y` along the `M` columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpRates {
    pub beta_x: f64,
    pub beta_y: f64,
}

impl ChirpRates {
    pub fn new(beta_x: f64, beta_y: f64) -> Result<Self, DlctError> {
        let rates = Self { beta_x, beta_y };
        rates.validate()?;
        Ok(rates)
    }

    pub fn validate(&self) -> Result<(), DlctError> {
        for beta in [self.beta_x, self.beta_y] {
            if !beta.is_finite() {
                return Err(DlctError::NonFiniteRate(beta));
            }
        }
        Ok(())
    }
}

/// Scale applied by the inverse transform so that `inverse(forward(x)) == x`.
pub fn inverse_scale(rows: usize, cols: usize) -> f64 {
    1.0 / (rows as f64 * cols as f64)
}

/// `beta * n^2` reduced modulo `size`; the phase only depends on this residue.
fn chirp_residue(n: usize, size: usize, beta: f64) -> f64 {
    let nf = n as f64;
    (beta * nf * nf).rem_euclid(size as f64)
}

/// One entry of the 1D kernel, `exp(-i*2*pi/N*(k*n + beta*n^2))`.
pub fn kernel_value(n: usize, k: usize, size: usize, beta: f64) -> Result<Complex64, DlctError> {
    if n >= size || k >= size {
        return Err(DlctError::IndexOutOfRange { n, k, size });
    }
    let linear = ((k as u128 * n as u128) % size as u128) as f64;
    let exponent = linear + chirp_residue(n, size, beta);
    Ok(Complex64::from_polar(1.0, -2.0 * PI * exponent / size as f64))
}

/// Precomputed 1D transform of one size and chirp rate.
#[derive(Clone)]
pub struct Dlct1 {
    size: usize,
    beta: f64,
    chirp: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Dlct1 {
    pub fn new(size: usize, beta: f64) -> Result<Self, DlctError> {
        Self::with_planner(&mut FftPlanner::new(), size, beta)
    }

    fn with_planner(planner: &mut FftPlanner<f64>, size: usize, beta: f64) -> Result<Self, DlctError> {
        if size == 0 {
            return Err(DlctError::EmptyVector);
        }
        if !beta.is_finite() {
            return Err(DlctError::NonFiniteRate(beta));
        }
        let chirp = (0..size)
            .map(|n| Complex64::from_polar(1.0, -2.0 * PI * chirp_residue(n, size, beta) / size as f64))
            .collect();
        Ok(Self {
            size,
            beta,
            chirp,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The quadratic-phase table `exp(-i*2*pi*beta*n^2/N)`.
    pub fn chirp(&self) -> &[Complex64] {
        &self.chirp
    }

    fn scratch(&self) -> Vec<Complex64> {
        let len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        vec![Complex64::new(0.0, 0.0); len]
    }

    fn forward_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        for (x, c) in buf.iter_mut().zip(&self.chirp) {
            *x *= c;
        }
        self.forward.process_with_scratch(buf, scratch);
    }

    /// Unnormalized conjugate-kernel sum.
    fn inverse_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
        for (x, c) in buf.iter_mut().zip(&self.chirp) {
            *x *= c.conj();
        }
    }

    pub fn forward(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.size, "vector length does not match plan");
        let mut buf = v.to_vec();
        self.forward_in_place(&mut buf, &mut self.scratch());
        buf
    }

    pub fn inverse(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.size, "vector length does not match plan");
        let mut buf = v.to_vec();
        self.inverse_in_place(&mut buf, &mut self.scratch());
        let scale = 1.0 / self.size as f64;
        buf.iter_mut().for_each(|x| *x *= scale);
        buf
    }
}

/// `X[k] = sum_n v[n] * K(n, k)` for a single axis.
pub fn dlct1_forward(v: &[Complex64], beta: f64) -> Result<Vec<Complex64>, DlctError> {
    if v.is_empty() {
        return Err(DlctError::EmptyVector);
    }
    Ok(Dlct1::new(v.len(), beta)?.forward(v))
}

/// Inverse of [`dlct1_forward`], including the `1/N` factor.
pub fn dlct1_inverse(v: &[Complex64], beta: f64) -> Result<Vec<Complex64>, DlctError> {
    if v.is_empty() {
        return Err(DlctError::EmptyVector);
    }
    Ok(Dlct1::new(v.len(), beta)?.inverse(v))
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

/// Separable 2D transform for a fixed shape and pair of chirp rates. Holding
/// on to a plan reuses the FFT plans and chirp tables across calls.
#[derive(Clone)]
pub struct Dlct2Plan {
    /// Transforms each column (length `rows`, rate `beta_x`).
    along_x: Dlct1,
    /// Transforms each row (length `cols`, rate `beta_y`).
    along_y: Dlct1,
}

impl Dlct2Plan {
    pub fn new(rows: usize, cols: usize, rates: ChirpRates) -> Result<Self, DlctError> {
        if rows == 0 || cols == 0 {
            return Err(DlctError::EmptyShape { rows, cols });
        }
        rates.validate()?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            along_x: Dlct1::with_planner(&mut planner, rows, rates.beta_x)?,
            along_y: Dlct1::with_planner(&mut planner, cols, rates.beta_y)?,
        })
    }

    pub fn rows(&self) -> usize {
        self.along_x.size
    }

    pub fn cols(&self) -> usize {
        self.along_y.size
    }

    pub fn rates(&self) -> ChirpRates {
        ChirpRates { beta_x: self.along_x.beta, beta_y: self.along_y.beta }
    }

    fn check_shape(&self, m: &ComplexMatrix) -> Result<(), DlctError> {
        if (m.rows, m.cols) != (self.rows(), self.cols()) {
            return Err(DlctError::ShapeMismatch {
                expected_rows: self.rows(),
                expected_cols: self.cols(),
                rows: m.rows,
                cols: m.cols,
            });
        }
        Ok(())
    }

    /// Rows first (with `beta_y`), then columns (with `beta_x`).
    pub fn forward(&self, m: &ComplexMatrix) -> Result<ComplexMatrix, DlctError> {
        self.check_shape(m)?;
        let mut data = m.data.clone();
        transform_rows(&self.along_y, &mut data, Direction::Forward);
        transform_columns(&self.along_x, &mut data, self.rows(), self.cols(), Direction::Forward);
        Ok(ComplexMatrix { rows: m.rows, cols: m.cols, data })
    }

    /// Columns first, then rows. Agrees with [`Dlct2Plan::forward`] up to rounding.
    pub fn forward_columns_first(&self, m: &ComplexMatrix) -> Result<ComplexMatrix, DlctError> {
        self.check_shape(m)?;
        let mut data = m.data.clone();
        transform_columns(&self.along_x, &mut data, self.rows(), self.cols(), Direction::Forward);
        transform_rows(&self.along_y, &mut data, Direction::Forward);
        Ok(ComplexMatrix { rows: m.rows, cols: m.cols, data })
    }

    pub fn inverse(&self, m: &ComplexMatrix) -> Result<ComplexMatrix, DlctError> {
        self.check_shape(m)?;
        let mut data = m.data.clone();
        transform_rows(&self.along_y, &mut data, Direction::Inverse);
        transform_columns(&self.along_x, &mut data, self.rows(), self.cols(), Direction::Inverse);
        let scale = inverse_scale(m.rows, m.cols);
        data.par_iter_mut().for_each(|x| *x *= scale);
        Ok(ComplexMatrix { rows: m.rows, cols: m.cols, data })
    }
}

fn transform_rows(plan: &Dlct1, data: &mut [Complex64], direction: Direction) {
    data.par_chunks_mut(plan.size).for_each_init(
        || plan.scratch(),
        |scratch, row| match direction {
            Direction::Forward => plan.forward_in_place(row, scratch),
            Direction::Inverse => plan.inverse_in_place(row, scratch),
        },
    );
}

fn transform_columns(plan: &Dlct1, data: &mut [Complex64], rows: usize, cols: usize, direction: Direction) {
    let mut transposed = transpose(data, rows, cols);
    transform_rows(plan, &mut transposed, direction);
    let back = transpose(&transposed, cols, rows);
    data.copy_from_slice(&back);
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for (r, row) in data.chunks_exact(cols).enumerate() {
        for (c, &v) in row.iter().enumerate() {
            out[c * rows + r] = v;
        }
    }
    out
}

pub fn dlct2_forward(img: &ComplexMatrix, rates: ChirpRates) -> Result<ComplexMatrix, DlctError> {
    Dlct2Plan::new(img.rows, img.cols, rates)?.forward(img)
}

pub fn dlct2_inverse(spectrum: &ComplexMatrix, rates: ChirpRates) -> Result<ComplexMatrix, DlctError> {
    Dlct2Plan::new(spectrum.rows, spectrum.cols, rates)?.inverse(spectrum)
}

/// Literal `O(N^2 M^2)` evaluation of the 2D forward sum, capped at
/// [`DIRECT_SUM_LIMIT`] entries.
pub fn dlct2_forward_direct(img: &ComplexMatrix, rates: ChirpRates) -> Result<ComplexMatrix, DlctError> {
    dlct2_forward_direct_with_limit(img, rates, DIRECT_SUM_LIMIT)
}

pub fn dlct2_forward_direct_with_limit(
    img: &ComplexMatrix,
    rates: ChirpRates,
    limit: usize,
) -> Result<ComplexMatrix, DlctError> {
    let (rows, cols) = (img.rows, img.cols);
    if rows * cols > limit {
        return Err(DlctError::TooLargeForDirect { rows, cols, limit });
    }
    rates.validate()?;
    let table = |size: usize, beta: f64| -> Result<Vec<Complex64>, DlctError> {
        let mut t = Vec::with_capacity(size * size);
        for n in 0..size {
            for k in 0..size {
                t.push(kernel_value(n, k, size, beta)?);
            }
        }
        Ok(t)
    };
    let kx = table(rows, rates.beta_x)?;
    let ky = table(cols, rates.beta_y)?;
    let mut out = Vec::with_capacity(rows * cols);
    for k in 0..rows {
        for l in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..rows {
                for m in 0..cols {
                    acc += img.data[n * cols + m] * kx[n * rows + k] * ky[m * cols + l];
                }
            }
            out.push(acc);
        }
    }
    ComplexMatrix::new(rows, cols, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
    }

    fn delta(rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |r, c_| if r == 0 && c_ == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .unwrap()
    }

    fn constant(rows: usize, cols: usize, v: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| c(v, 0.0)).unwrap()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_value(0, 5, 8, 7.3).unwrap(), c(1.0, 0.0));
        assert_eq!(kernel_value(1, 0, 4, 0.0).unwrap(), c(1.0, 0.0));
        let v = kernel_value(1, 1, 4, 1.0).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((kernel_value(3, 2, 7, -2.25).unwrap().norm() - 1.0).abs() < 1e-15);
        assert_eq!(
            kernel_value(4, 0, 4, 0.0),
            Err(DlctError::IndexOutOfRange { n: 4, k: 0, size: 4 })
        );
    }

    #[test]
    fn matrix_invariants() {
        assert!(matches!(ComplexMatrix::zeros(0, 3), Err(DlctError::EmptyShape { .. })));
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]),
            Err(DlctError::DataLength { actual: 3, .. })
        ));
        let mut data = vec![c(0.0, 0.0); 4];
        data[3] = c(f64::NAN, 0.0);
        assert_eq!(ComplexMatrix::new(2, 2, data), Err(DlctError::NonFinite { row: 1, col: 1 }));
        assert_eq!(ChirpRates::new(f64::INFINITY, 0.0), Err(DlctError::NonFiniteRate(f64::INFINITY)));
    }

    #[test]
    fn dlct1_examples() {
        let out = dlct1_forward(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 3.7).unwrap();
        assert!(out.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-12));

        let out = dlct1_forward(&[c(1.0, 0.0); 4], 0.0).unwrap();
        let want = [c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(out.iter().zip(&want).all(|(a, b)| (a - b).norm() < 1e-12));

        let v = [c(1.0, 0.0), c(0.0, 1.0)];
        let out = dlct1_forward(&v, 0.5).unwrap();
        for (k, x) in out.iter().enumerate() {
            let direct: Complex64 = (0..2).map(|n| v[n] * kernel_value(n, k, 2, 0.5).unwrap()).sum();
            assert!((x - direct).norm() < 1e-12);
        }
        assert_eq!(dlct1_forward(&[], 1.0), Err(DlctError::EmptyVector));
    }

    #[test]
    fn dlct1_round_trip_odd_size() {
        let mut rng = SplitMix64::seed_from_u64(5);
        let v: Vec<_> = (0..37).map(|_| c(rng.gen(), rng.gen())).collect();
        let back = dlct1_inverse(&dlct1_forward(&v, -4.2).unwrap(), -4.2).unwrap();
        assert!(v.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn forward_examples() {
        for rates in [ChirpRates::new(0.0, 0.0).unwrap(), ChirpRates::new(1.5, -3.5).unwrap()] {
            let out = dlct2_forward(&delta(5, 6), rates).unwrap();
            assert!(out.max_abs_diff(&constant(5, 6, 1.0)) < 1e-12);
            let direct = dlct2_forward_direct(&delta(5, 6), rates).unwrap();
            assert!(direct.max_abs_diff(&constant(5, 6, 1.0)) < 1e-12);
        }
        let out = dlct2_forward(&constant(4, 4, 1.0), ChirpRates::new(0.0, 0.0).unwrap()).unwrap();
        let mut want = ComplexMatrix::zeros(4, 4).unwrap();
        want.data_mut()[0] = c(16.0, 0.0);
        assert!(out.max_abs_diff(&want) < 1e-12);

        let mut rng = SplitMix64::seed_from_u64(8);
        let img = random_matrix(&mut rng, 8, 8);
        let rates = ChirpRates::new(1.5, -3.5).unwrap();
        let fast = dlct2_forward(&img, rates).unwrap();
        let direct = dlct2_forward_direct(&img, rates).unwrap();
        assert!(fast.max_abs_diff(&direct) <= 1e-8);
    }

    #[test]
    fn direct_single_entry_and_two_by_two() {
        let z = c(0.3, -2.0);
        let one = ComplexMatrix::new(1, 1, vec![z]).unwrap();
        assert_eq!(dlct2_forward_direct(&one, ChirpRates::new(9.1, -2.2).unwrap()).unwrap().get(0, 0), z);

        // Identity-like 2x2 input [[1, 0], [0, 1]] with beta = (0.25, 0.5):
        // K_x(1, k) = exp(-i*pi*(k + 0.25)), K_y(1, l) = exp(-i*pi*(l + 0.5)),
        // so X(k, l) = 1 + K_x(1, k) * K_y(1, l) = 1 + exp(-i*pi*(k + l + 0.75)).
        let img = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let out = dlct2_forward_direct(&img, ChirpRates::new(0.25, 0.5).unwrap()).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                let want = c(1.0, 0.0) + Complex64::from_polar(1.0, -PI * ((k + l) as f64 + 0.75));
                assert!((out.get(k, l) - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn direct_refuses_large_inputs() {
        let big = ComplexMatrix::zeros(65, 64).unwrap();
        assert_eq!(
            dlct2_forward_direct(&big, ChirpRates::new(0.0, 0.0).unwrap()),
            Err(DlctError::TooLargeForDirect { rows: 65, cols: 64, limit: DIRECT_SUM_LIMIT })
        );
        assert!(dlct2_forward_direct_with_limit(&ComplexMatrix::zeros(3, 3).unwrap(), ChirpRates::new(0.0, 0.0).unwrap(), 8).is_err());
    }

    #[test]
    fn inverse_examples() {
        let rates = ChirpRates::new(2.75, -0.125).unwrap();
        let out = dlct2_inverse(&constant(6, 3, 1.0), rates).unwrap();
        assert!(out.max_abs_diff(&delta(6, 3)) < 1e-12);

        let mut scaled = ComplexMatrix::zeros(4, 4).unwrap();
        scaled.data_mut()[0] = c(16.0, 0.0);
        let out = dlct2_inverse(&scaled, ChirpRates::new(0.0, 0.0).unwrap()).unwrap();
        assert!(out.max_abs_diff(&constant(4, 4, 1.0)) < 1e-12);

        let mut rng = SplitMix64::seed_from_u64(16);
        let x = random_matrix(&mut rng, 16, 16);
        let rates = ChirpRates::new(1.5, -3.5).unwrap();
        let back = dlct2_inverse(&dlct2_forward(&x, rates).unwrap(), rates).unwrap();
        assert!(back.max_abs_diff(&x) <= 1e-9);
    }

    #[test]
    fn normalization_constant_is_pinned() {
        assert_eq!(inverse_scale(4, 8), 1.0 / 32.0);
        assert_eq!(inverse_scale(1, 1), 1.0);
    }

    #[test]
    fn plan_rejects_wrong_shape() {
        let plan = Dlct2Plan::new(4, 5, ChirpRates::new(1.0, 1.0).unwrap()).unwrap();
        assert!(matches!(plan.forward(&ComplexMatrix::zeros(5, 4).unwrap()), Err(DlctError::ShapeMismatch { .. })));
    }

    #[test]
    fn parseval_at_zero_rates() {
        let mut rng = SplitMix64::seed_from_u64(3);
        let x = random_matrix(&mut rng, 12, 7);
        let big = dlct2_forward(&x, ChirpRates::new(0.0, 0.0).unwrap()).unwrap();
        let e_time: f64 = x.data().iter().map(|z| z.norm_sqr()).sum();
        let e_freq: f64 = big.data().iter().map(|z| z.norm_sqr()).sum();
        assert!((e_freq - 84.0 * e_time).abs() <= 1e-9 * e_freq);
    }

    #[test]
    fn large_round_trip() {
        let mut rng = SplitMix64::seed_from_u64(256);
        let x = random_matrix(&mut rng, 256, 256);
        let rates = ChirpRates::new(123.456, -98.7).unwrap();
        let back = dlct2_inverse(&dlct2_forward(&x, rates).unwrap(), rates).unwrap();
        assert!(back.max_abs_diff(&x) <= 1e-9);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let mut rng = SplitMix64::seed_from_u64(11);
        let x = random_matrix(&mut rng, 48, 30);
        let rates = ChirpRates::new(-1.25, 0.75).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| dlct2_forward(&x, rates).unwrap())
        };
        let one = run(1);
        let many = run(4);
        assert!(one.data().iter().zip(many.data()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn fast_path_matches_direct(rows in 1usize..=24, cols in 1usize..=24, bx in -10.0f64..10.0, by in -10.0f64..10.0, seed: u64) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let x = random_matrix(&mut rng, rows, cols);
            let rates = ChirpRates::new(bx, by).unwrap();
            let fast = dlct2_forward(&x, rates).unwrap();
            let direct = dlct2_forward_direct(&x, rates).unwrap();
            prop_assert!(fast.max_abs_diff(&direct) <= 1e-8);
        }

        #[test]
        fn round_trip_and_axis_order(rows in 1usize..=80, cols in 1usize..=80, bx in -1e3f64..1e3, by in -1e3f64..1e3, seed: u64) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let x = random_matrix(&mut rng, rows, cols);
            let plan = Dlct2Plan::new(rows, cols, ChirpRates::new(bx, by).unwrap()).unwrap();
            let fwd = plan.forward(&x).unwrap();
            prop_assert!(plan.inverse(&fwd).unwrap().max_abs_diff(&x) <= 1e-9);
            prop_assert!(plan.forward_columns_first(&x).unwrap().max_abs_diff(&fwd) <= 1e-9);
        }
    }
}
