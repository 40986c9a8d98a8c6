//! Stroke-level data augmentation for handwritten-character datasets.
//!
//! Four kernels perturb strokes row by row: [`augment::thicken`],
//! [`augment::thin`], [`augment::elongate`] and [`augment::line_erase`].
//! Datasets are read and written in the IDX format ([`idx`]), augmented
//! reproducibly with per-image seeded streams ([`pipeline`]) and previewed as
//! PNG sample sheets ([`render`]).

pub mod augment;
pub mod cli;
pub mod idx;
pub mod pipeline;
pub mod pixelgrid;
pub mod render;

pub use augment::{AugmentConfig, Method, Mode};
pub use pipeline::{augment_dataset, PipelineConfig, Schedule};
pub use pixelgrid::{DrawSource, GrayImage, LabeledDataset, RngStream};
