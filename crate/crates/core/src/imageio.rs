//! On-disk formats: binary PGM images, the `DLC1` ciphertext container and
//! the `name=value` key file.
//!
//! Ciphertext layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "DLC1"
//! 4       2     version (u16) = 1
//! 6       4     rows N (u32)
//! 10      4     cols M (u32)
//! 14      16*NM (re, im) pairs of IEEE-754 f64, row-major
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::chaos::LogisticParams;
use crate::cipher::{CipherError, CipherMatrix, GrayImage, KeyBundle};
use crate::dlct::{ChirpRates, ComplexMatrix, DlctError};

pub const CIPHER_MAGIC: &[u8; 4] = b"DLC1";
pub const CIPHER_VERSION: u16 = 1;
pub const CIPHER_HEADER_LEN: usize = 14;

/// Key file field names, in the order they are written.
pub const KEY_FIELDS: [&str; 8] = ["x0", "mu1", "p1", "beta_x", "beta_y", "y0", "mu2", "p2"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("unsupported image format {0:?}, only binary PGM (P5) is accepted")]
    UnsupportedFormat(String),
    #[error("malformed PGM header: {0}")]
    PgmHeader(String),
    #[error("PGM maxval must be 255, got {0}")]
    MaxVal(u32),
    #[error("truncated pixel data: expected {expected} bytes, found {actual}")]
    TruncatedPixels { expected: usize, actual: usize },
    #[error("bad ciphertext magic {0:?}")]
    BadMagic(Vec<u8>),
    #[error("unsupported ciphertext version {0}")]
    BadVersion(u16),
    #[error("ciphertext length mismatch: expected {expected} bytes, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid ciphertext matrix: {0}")]
    Matrix(#[from] DlctError),
    #[error("image: {0}")]
    Image(#[from] CipherError),
    #[error("key file line {line}: {message}")]
    KeySyntax { line: usize, message: String },
    #[error("key file is missing field `{0}`")]
    MissingField(&'static str),
    #[error("key file repeats field `{0}`")]
    DuplicateField(String),
    #[error("key file has unknown field `{0}`")]
    UnknownField(String),
    #[error("key file field `{field}` has invalid value {value:?}")]
    InvalidValue { field: String, value: String },
    #[error("key file values out of domain: {0}")]
    KeyDomain(CipherError),
}

/// Cursor over PGM header tokens, skipping whitespace and `#` comments.
struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n' && b != b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, FormatError> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(FormatError::PgmHeader(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| FormatError::PgmHeader(format!("{what} is out of range")))
    }
}

/// Parses a binary (P5) PGM with maxval 255. Bytes after the first image are ignored.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, FormatError> {
    let magic = bytes.get(..2).unwrap_or(bytes);
    if magic != b"P5" {
        return Err(FormatError::UnsupportedFormat(String::from_utf8_lossy(magic).into_owned()));
    }
    let mut header = HeaderReader { bytes, pos: 2 };
    let width = header.number("width")? as usize;
    let height = header.number("height")? as usize;
    let maxval = header.number("maxval")?;
    if maxval != 255 {
        return Err(FormatError::MaxVal(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        _ => return Err(FormatError::PgmHeader("missing whitespace after maxval".into())),
    }
    if width == 0 || height == 0 {
        return Err(FormatError::PgmHeader(format!("empty image {width}x{height}")));
    }
    let expected = width * height;
    let raster = &bytes[header.pos..];
    if raster.len() < expected {
        return Err(FormatError::TruncatedPixels { expected, actual: raster.len() });
    }
    Ok(GrayImage::new(height, width, raster[..expected].to_vec())?)
}

/// Canonical P5 encoding: `P5\n<cols> <rows>\n255\n` followed by the raster.
pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn write_cipher_file(c: &CipherMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(CIPHER_HEADER_LEN + 16 * c.rows() * c.cols());
    out.extend_from_slice(CIPHER_MAGIC);
    out.extend_from_slice(&CIPHER_VERSION.to_le_bytes());
    out.extend_from_slice(&(c.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(c.cols() as u32).to_le_bytes());
    for z in c.matrix().data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn read_cipher_file(bytes: &[u8]) -> Result<CipherMatrix, FormatError> {
    if bytes.len() < CIPHER_HEADER_LEN {
        if bytes.len() >= 4 && &bytes[..4] != CIPHER_MAGIC {
            return Err(FormatError::BadMagic(bytes[..4].to_vec()));
        }
        return Err(FormatError::LengthMismatch { expected: CIPHER_HEADER_LEN, actual: bytes.len() });
    }
    if &bytes[..4] != CIPHER_MAGIC {
        return Err(FormatError::BadMagic(bytes[..4].to_vec()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != CIPHER_VERSION {
        return Err(FormatError::BadVersion(version));
    }
    let rows = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(16))
        .and_then(|n| n.checked_add(CIPHER_HEADER_LEN))
        .unwrap_or(usize::MAX);
    if bytes.len() != expected {
        return Err(FormatError::LengthMismatch { expected, actual: bytes.len() });
    }
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let data = (0..rows * cols)
        .map(|i| {
            let off = CIPHER_HEADER_LEN + 16 * i;
            Complex64::new(f64_at(off), f64_at(off + 8))
        })
        .collect();
    Ok(CipherMatrix::new(ComplexMatrix::new(rows, cols, data)?))
}

/// Writes the eight key fields, one `name=value` per line. Reals use the
/// shortest decimal form that parses back to the same double.
pub fn write_key_file(k: &KeyBundle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "x0={}", k.key1.x0);
    let _ = writeln!(out, "mu1={}", k.key1.mu);
    let _ = writeln!(out, "p1={}", k.key1.discard);
    let _ = writeln!(out, "beta_x={}", k.key2.beta_x);
    let _ = writeln!(out, "beta_y={}", k.key2.beta_y);
    let _ = writeln!(out, "y0={}", k.key3.x0);
    let _ = writeln!(out, "mu2={}", k.key3.mu);
    let _ = writeln!(out, "p2={}", k.key3.discard);
    out
}

/// Parses a key file. Blank lines and `#` comments are allowed; every field
/// must appear exactly once.
pub fn read_key_file(text: &str) -> Result<KeyBundle, FormatError> {
    let mut values: HashMap<&str, &str> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, value) = line.split_once('=').ok_or_else(|| FormatError::KeySyntax {
            line: i + 1,
            message: "expected name=value".into(),
        })?;
        let (name, value) = (name.trim(), value.trim());
        if !KEY_FIELDS.contains(&name) {
            return Err(FormatError::UnknownField(name.to_string()));
        }
        if values.insert(name, value).is_some() {
            return Err(FormatError::DuplicateField(name.to_string()));
        }
    }
    let field = |name: &'static str| values.get(name).copied().ok_or(FormatError::MissingField(name));
    let real = |name: &'static str| -> Result<f64, FormatError> {
        let v = field(name)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| FormatError::InvalidValue { field: name.into(), value: v.into() })
    };
    let count = |name: &'static str| -> Result<u64, FormatError> {
        let v = field(name)?;
        v.parse::<u64>()
            .map_err(|_| FormatError::InvalidValue { field: name.into(), value: v.into() })
    };
    let keys = KeyBundle {
        key1: LogisticParams { x0: real("x0")?, mu: real("mu1")?, discard: count("p1")? },
        key2: ChirpRates { beta_x: real("beta_x")?, beta_y: real("beta_y")? },
        key3: LogisticParams { x0: real("y0")?, mu: real("mu2")?, discard: count("p2")? },
    };
    keys.validate().map_err(FormatError::KeyDomain)?;
    Ok(keys)
}
