//! Reader and writer for the IDX container used by MNIST, KMNIST and EMNIST.
//!
//! Layout: two zero bytes, a type code (`0x08` = unsigned bytes), a rank byte,
//! `rank` big-endian `u32` extents, then the raw data. Images are rank 3
//! `(count, height, width)`, labels rank 1 `(count)`. EMNIST's transposed
//! storage is passed through untouched.

use std::io::Read;

use thiserror::Error;

use crate::pixelgrid::{common_dims, DimsError, GrayImage};

pub const TYPE_UNSIGNED_BYTE: u8 = 0x08;
pub const IMAGE_RANK: u8 = 3;
pub const LABEL_RANK: u8 = 1;

const GZIP_MAGIC: [u8; 2] = [0x1F, 0x8B];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdxError {
    #[error("bad magic {found:02X?}, expected {expected:02X?}{}", gzip_hint(*.found))]
    BadMagic { found: [u8; 4], expected: [u8; 4] },
    #[error("truncated: expected {expected} bytes, found {actual}")]
    TruncatedData { expected: u64, actual: u64 },
    #[error("{} trailing bytes after the {expected} bytes the header declares", .actual - .expected)]
    TrailingBytes { expected: u64, actual: u64 },
    #[error("header declares {count} images of zero size {height}x{width}")]
    ZeroImageDims { count: u32, height: u32, width: u32 },
    #[error(transparent)]
    HeterogeneousDims(#[from] DimsError),
    #[error("{count} entries do not fit a 32-bit extent")]
    CountOverflow { count: usize },
    #[error("label {label} at index {index} does not fit in one byte")]
    LabelOverflow { index: usize, label: u32 },
}

fn gzip_hint(found: [u8; 4]) -> &'static str {
    if found[..2] == GZIP_MAGIC {
        " (file looks gzip-compressed; decompress it first, e.g. with gunzip)"
    } else {
        ""
    }
}

impl IdxError {
    /// Byte offset in the input where the problem was detected, for read errors.
    pub fn offset(&self) -> Option<u64> {
        match self {
            IdxError::BadMagic { .. } => Some(0),
            IdxError::TruncatedData { actual, .. } => Some(*actual),
            IdxError::TrailingBytes { expected, .. } => Some(*expected),
            IdxError::ZeroImageDims { .. } => Some(8),
            _ => None,
        }
    }

    pub fn is_gzip(&self) -> bool {
        matches!(self, IdxError::BadMagic { found, .. } if found[..2] == GZIP_MAGIC)
    }
}

/// Parsed IDX header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxHeader {
    pub type_code: u8,
    pub dims: Vec<u32>,
}

impl IdxHeader {
    pub fn magic(&self) -> [u8; 4] {
        [0, 0, self.type_code, self.dims.len() as u8]
    }

    pub fn rank(&self) -> u8 {
        self.dims.len() as u8
    }

    /// Length of the encoded header in bytes.
    pub fn encoded_len(&self) -> usize {
        4 + 4 * self.dims.len()
    }

    /// Number of data bytes the header promises.
    pub fn data_len(&self) -> u128 {
        self.dims.iter().map(|&d| u128::from(d)).product()
    }

    fn check_magic(found: [u8; 4], rank: Option<u8>) -> Result<(), IdxError> {
        let ok_prefix = found[0] == 0 && found[1] == 0 && found[2] == TYPE_UNSIGNED_BYTE;
        let ok_rank = match rank {
            Some(r) => found[3] == r,
            None => found[3] == IMAGE_RANK || found[3] == LABEL_RANK,
        };
        if ok_prefix && ok_rank {
            Ok(())
        } else {
            Err(IdxError::BadMagic {
                found,
                expected: [0, 0, TYPE_UNSIGNED_BYTE, rank.unwrap_or(IMAGE_RANK)],
            })
        }
    }

    /// Parses the header at the start of `bytes`, requiring `rank` if given
    /// (otherwise rank 1 or 3).
    pub fn parse(bytes: &[u8], rank: Option<u8>) -> Result<Self, IdxError> {
        let mut found = [0u8; 4];
        let n = bytes.len().min(4);
        found[..n].copy_from_slice(&bytes[..n]);
        if n < 4 {
            // a short file with a wrong prefix is still a magic error
            if found[..n]
                .iter()
                .zip([0u8, 0, TYPE_UNSIGNED_BYTE])
                .any(|(a, b)| *a != b)
            {
                Self::check_magic(found, rank)?;
            }
            return Err(IdxError::TruncatedData {
                expected: 4,
                actual: n as u64,
            });
        }
        Self::check_magic(found, rank)?;
        let header_len = 4 + 4 * usize::from(found[3]);
        if bytes.len() < header_len {
            return Err(IdxError::TruncatedData {
                expected: header_len as u64,
                actual: bytes.len() as u64,
            });
        }
        let dims = bytes[4..header_len]
            .chunks_exact(4)
            .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(Self {
            type_code: found[2],
            dims,
        })
    }

    /// Reads only the header from `reader`, leaving the data unread.
    pub fn read_from<R: Read>(
        reader: &mut R,
        rank: Option<u8>,
    ) -> std::io::Result<Result<Self, IdxError>> {
        let mut buf = Vec::with_capacity(16);
        reader.by_ref().take(4).read_to_end(&mut buf)?;
        if buf.len() == 4 {
            if let Err(e) = Self::check_magic([buf[0], buf[1], buf[2], buf[3]], rank) {
                return Ok(Err(e));
            }
            let extra = 4 * u64::from(buf[3]);
            reader.by_ref().take(extra).read_to_end(&mut buf)?;
        }
        Ok(Self::parse(&buf, rank))
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&self.magic());
        for d in &self.dims {
            out.extend_from_slice(&d.to_be_bytes());
        }
        out
    }
}

/// Validates total length against the header before touching the payload.
fn payload<'a>(bytes: &'a [u8], header: &IdxHeader) -> Result<&'a [u8], IdxError> {
    let expected = header.encoded_len() as u128 + header.data_len();
    let actual = bytes.len() as u128;
    if actual < expected {
        return Err(IdxError::TruncatedData {
            expected: u64::try_from(expected).unwrap_or(u64::MAX),
            actual: actual as u64,
        });
    }
    if actual > expected {
        return Err(IdxError::TrailingBytes {
            expected: expected as u64,
            actual: actual as u64,
        });
    }
    Ok(&bytes[header.encoded_len()..])
}

pub fn read_images(bytes: &[u8]) -> Result<Vec<GrayImage>, IdxError> {
    let header = IdxHeader::parse(bytes, Some(IMAGE_RANK))?;
    let (count, height, width) = (header.dims[0], header.dims[1], header.dims[2]);
    if count > 0 && (height == 0 || width == 0) {
        return Err(IdxError::ZeroImageDims {
            count,
            height,
            width,
        });
    }
    let data = payload(bytes, &header)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let (w, h) = (width as usize, height as usize);
    Ok(data
        .chunks_exact(w * h)
        .map(|chunk| GrayImage::new(w, h, chunk.to_vec()).expect("sizes checked against header"))
        .collect())
}

pub fn write_images(images: &[GrayImage]) -> Result<Vec<u8>, IdxError> {
    let (width, height) = common_dims(images)?;
    let extent = |n: usize| u32::try_from(n).map_err(|_| IdxError::CountOverflow { count: n });
    let header = IdxHeader {
        type_code: TYPE_UNSIGNED_BYTE,
        dims: vec![extent(images.len())?, extent(height)?, extent(width)?],
    };
    let mut out = header.encode();
    out.reserve(images.len() * width * height);
    for img in images {
        out.extend_from_slice(img.pixels());
    }
    Ok(out)
}

pub fn read_labels(bytes: &[u8]) -> Result<Vec<u32>, IdxError> {
    let header = IdxHeader::parse(bytes, Some(LABEL_RANK))?;
    let data = payload(bytes, &header)?;
    Ok(data.iter().map(|&b| u32::from(b)).collect())
}

pub fn write_labels(labels: &[u32]) -> Result<Vec<u8>, IdxError> {
    let count = u32::try_from(labels.len()).map_err(|_| IdxError::CountOverflow {
        count: labels.len(),
    })?;
    let header = IdxHeader {
        type_code: TYPE_UNSIGNED_BYTE,
        dims: vec![count],
    };
    let mut out = header.encode();
    for (index, &label) in labels.iter().enumerate() {
        let byte = u8::try_from(label).map_err(|_| IdxError::LabelOverflow { index, label })?;
        out.push(byte);
    }
    Ok(out)
}
