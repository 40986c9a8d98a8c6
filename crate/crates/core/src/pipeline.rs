//! Dataset-level augmentation with per-image derived streams.
//!
//! Image `i` draws from `RngStream::substream(base_seed, i)`. Its first draw
//! is the apply decision, consumed whether or not the image is augmented; the
//! kernel continues on the same stream. Output is therefore independent of
//! iteration order and thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::augment::{self, check_probability, AugmentConfig, ConfigError};
use crate::pixelgrid::{DrawSource, GrayImage, LabeledDataset, RngStream};

pub const DEFAULT_APPLY_PROB: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub augment: AugmentConfig,
    apply_prob: f64,
    pub base_seed: u64,
}

impl PipelineConfig {
    pub fn new(augment: AugmentConfig, base_seed: u64) -> Self {
        Self {
            augment,
            apply_prob: DEFAULT_APPLY_PROB,
            base_seed,
        }
    }

    pub fn with_apply_prob(mut self, apply_prob: f64) -> Result<Self, ConfigError> {
        self.apply_prob = check_probability(apply_prob)?;
        Ok(self)
    }

    pub fn apply_prob(&self) -> f64 {
        self.apply_prob
    }

    /// Config for training epoch `epoch`: the base seed is offset by the epoch index.
    pub fn for_epoch(mut self, epoch: u64) -> Self {
        self.base_seed = self.base_seed.wrapping_add(epoch);
        self
    }
}

/// How images are scheduled across threads. Output never depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    Sequential,
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with this many threads.
    Threads(usize),
}

/// Result of augmenting one image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmented {
    pub image: GrayImage,
    /// The apply draw came up true and the kernel ran.
    pub applied: bool,
}

impl Augmented {
    /// Kernel ran and actually changed at least one pixel.
    pub fn changed(&self, original: &GrayImage) -> bool {
        self.applied && self.image != *original
    }
}

/// Augments the image at dataset position `index`.
pub fn augment_image(img: &GrayImage, index: u64, cfg: &PipelineConfig) -> Augmented {
    let mut rng = RngStream::substream(cfg.base_seed, index);
    if rng.bernoulli(cfg.apply_prob) {
        Augmented {
            image: augment::apply(img, &cfg.augment, &mut rng),
            applied: true,
        }
    } else {
        Augmented {
            image: img.clone(),
            applied: false,
        }
    }
}

/// Augments every image, preserving order.
pub fn augment_images(
    images: &[GrayImage],
    cfg: &PipelineConfig,
    schedule: Schedule,
) -> Vec<Augmented> {
    let one = |(i, img): (usize, &GrayImage)| augment_image(img, i as u64, cfg);
    match schedule {
        Schedule::Sequential => images.iter().enumerate().map(one).collect(),
        Schedule::Parallel => images.par_iter().enumerate().map(one).collect(),
        Schedule::Threads(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("failed to build thread pool")
            .install(|| images.par_iter().enumerate().map(one).collect()),
    }
}

/// Counts reported alongside an augmented dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct AugmentSummary {
    pub processed: usize,
    /// Images whose apply draw came up true.
    pub applied: usize,
    /// Applied images whose pixels actually differ from the input.
    pub changed: usize,
}

/// Augments a dataset; labels and order are carried through unchanged.
pub fn augment_dataset(ds: &LabeledDataset, cfg: &PipelineConfig) -> LabeledDataset {
    augment_dataset_with(ds, cfg, Schedule::default()).0
}

pub fn augment_dataset_with(
    ds: &LabeledDataset,
    cfg: &PipelineConfig,
    schedule: Schedule,
) -> (LabeledDataset, AugmentSummary) {
    let (images, summary) = augment_all(ds.images(), cfg, schedule);
    let out = LabeledDataset::new(images, ds.labels().to_vec(), ds.num_classes())
        .expect("kernels preserve dimensions and labels");
    (out, summary)
}

/// Image-only variant of [`augment_dataset_with`], for unlabeled files.
pub fn augment_all(
    images: &[GrayImage],
    cfg: &PipelineConfig,
    schedule: Schedule,
) -> (Vec<GrayImage>, AugmentSummary) {
    let results = augment_images(images, cfg, schedule);
    let mut summary = AugmentSummary {
        processed: images.len(),
        ..Default::default()
    };
    for (res, original) in results.iter().zip(images) {
        summary.applied += usize::from(res.applied);
        summary.changed += usize::from(res.changed(original));
    }
    (results.into_iter().map(|r| r.image).collect(), summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InkStats {
    pub nonzero: u64,
    pub ink_sum: u64,
}

pub fn ink_stats(images: &[GrayImage]) -> Vec<InkStats> {
    images
        .iter()
        .map(|img| InkStats {
            nonzero: img.nonzero_count(),
            ink_sum: img.ink_sum(),
        })
        .collect()
}
