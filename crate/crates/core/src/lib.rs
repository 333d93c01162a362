//! Grayscale image encryption by chaotic scrambling and the two-dimensional
//! discrete linear chirp transform, with the statistics used to assess it.
//!
//! The pipeline lives in [`cipher`]; [`chaos`] and [`dlct`] are its building
//! blocks, [`analysis`] holds the security metrics and attack simulations,
//! and [`imageio`] the on-disk formats.

pub mod analysis;
pub mod chaos;
pub mod cipher;
pub mod dlct;
pub mod imageio;

pub use chaos::{LogisticParams, Permutation};
pub use cipher::{decrypt, derive_discards, encrypt, Cipher, CipherMatrix, GrayImage, KeyBundle};
pub use dlct::{ChirpRates, ComplexMatrix};
