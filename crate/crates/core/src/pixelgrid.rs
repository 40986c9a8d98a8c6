//! Pixel-grid value types and the seeded random stream every kernel draws from.
//!
//! Intensities follow the MNIST convention: 0 is background, larger values are ink.

use thiserror::Error;

/// Errors raised when constructing images or datasets from raw parts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values but {width}x{height} needs {expected}")]
    BufferLength {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
}

/// Raised when a sequence of images cannot be given one common shape.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimsError {
    #[error("no images given, dimensions are indeterminable")]
    EmptyInput,
    #[error("image {index} is {found_width}x{found_height}, expected {width}x{height}")]
    Mismatch {
        index: usize,
        width: usize,
        height: usize,
        found_width: usize,
        found_height: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("{images} images but {labels} labels")]
    LengthMismatch { images: usize, labels: usize },
    #[error("label {label} at index {index} is not below num_classes = {num_classes}")]
    LabelOutOfRange {
        index: usize,
        label: u32,
        num_classes: u32,
    },
    #[error("num_classes must be positive")]
    NoClasses,
    #[error(transparent)]
    Dims(#[from] DimsError),
}

/// An 8-bit grayscale image stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(ImageError::ZeroDimension { width, height })?;
        if pixels.len() != expected {
            return Err(ImageError::BufferLength {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// An all-background image.
    ///
    /// Panics if either dimension is zero.
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    /// Builds an image from equal-length rows. Panics on ragged or empty input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut pixels = Vec::with_capacity(width * height);
        for row in rows {
            assert_eq!(row.as_ref().len(), width, "ragged rows");
            pixels.extend_from_slice(row.as_ref());
        }
        Self::new(width, height, pixels).expect("rows must form a non-empty grid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.pixels[row * self.width..(row + 1) * self.width]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [u8] {
        &mut self.pixels[row * self.width..(row + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.pixels.chunks_exact(self.width)
    }

    /// Number of pixels with non-zero intensity.
    pub fn nonzero_count(&self) -> u64 {
        self.pixels.iter().filter(|&&p| p != 0).count() as u64
    }

    /// Sum of all intensities.
    pub fn ink_sum(&self) -> u64 {
        self.pixels.iter().map(|&p| u64::from(p)).sum()
    }
}

/// Returns the shared `(width, height)` of `images`.
pub fn common_dims(images: &[GrayImage]) -> Result<(usize, usize), DimsError> {
    let first = images.first().ok_or(DimsError::EmptyInput)?;
    let (width, height) = first.dims();
    for (index, img) in images.iter().enumerate().skip(1) {
        if img.dims() != (width, height) {
            return Err(DimsError::Mismatch {
                index,
                width,
                height,
                found_width: img.width,
                found_height: img.height,
            });
        }
    }
    Ok((width, height))
}

/// Images paired with class labels. All images share one shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    images: Vec<GrayImage>,
    labels: Vec<u32>,
    num_classes: u32,
}

impl LabeledDataset {
    pub fn new(
        images: Vec<GrayImage>,
        labels: Vec<u32>,
        num_classes: u32,
    ) -> Result<Self, DatasetError> {
        if num_classes == 0 {
            return Err(DatasetError::NoClasses);
        }
        if images.len() != labels.len() {
            return Err(DatasetError::LengthMismatch {
                images: images.len(),
                labels: labels.len(),
            });
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= num_classes) {
            return Err(DatasetError::LabelOutOfRange {
                index,
                label,
                num_classes,
            });
        }
        match common_dims(&images) {
            Ok(_) | Err(DimsError::EmptyInput) => {}
            Err(e) => return Err(e.into()),
        }
        Ok(Self {
            images,
            labels,
            num_classes,
        })
    }

    /// Infers `num_classes` as one past the largest label (1 for an empty set).
    pub fn with_inferred_classes(
        images: Vec<GrayImage>,
        labels: Vec<u32>,
    ) -> Result<Self, DatasetError> {
        let num_classes = labels.iter().max().map_or(1, |&m| m + 1);
        Self::new(images, labels, num_classes)
    }

    pub fn images(&self) -> &[GrayImage] {
        &self.images
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn into_parts(self) -> (Vec<GrayImage>, Vec<u32>, u32) {
        (self.images, self.labels, self.num_classes)
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Source of raw 64-bit draws, plus the integer and Bernoulli mappings every
/// kernel uses. The mappings consume exactly one raw draw each.
pub trait DrawSource {
    fn next_u64(&mut self) -> u64;

    /// Uniform integer in `[0, n)` by multiply-high: `floor(u * n / 2^64)`.
    ///
    /// Panics if `n == 0` or `n > 2^32`.
    fn uniform_below(&mut self, n: u64) -> u64 {
        assert!(
            (1..=1 << 32).contains(&n),
            "uniform_below: n must be in [1, 2^32]"
        );
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// True iff the draw is below `floor(p * 2^64)`; `p == 1` is always true.
    ///
    /// Panics if `p` is not in `[0, 1]`.
    fn bernoulli(&mut self, p: f64) -> bool {
        assert!((0.0..=1.0).contains(&p), "bernoulli: p must be in [0, 1]");
        let u = self.next_u64();
        if p >= 1.0 {
            return true;
        }
        // exact: scaling by a power of two, truncation is floor for p >= 0
        let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
        u < threshold
    }
}

/// SplitMix64 generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Stream for image `index` under `base_seed`: seeded with the
    /// `(index + 1)`-th output of a master stream started at `base_seed`.
    ///
    /// The master state after `n` steps is `base_seed + n * gamma`, so this
    /// jumps there directly instead of stepping.
    pub fn substream(base_seed: u64, index: u64) -> Self {
        let state = base_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
        Self::new(mix64(state))
    }
}

impl DrawSource for RngStream {
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}

impl<T: DrawSource + ?Sized> DrawSource for &mut T {
    fn next_u64(&mut self) -> u64 {
        (**self).next_u64()
    }
}
