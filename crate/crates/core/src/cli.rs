//! Command-line front end. Every subcommand is a thin layer over the library.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 parse or validation error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::augment::{
    AugmentConfig, ConfigError, Method, Mode, DEFAULT_K, DEFAULT_ROW_PROB, DEFAULT_THRESHOLD,
};
use crate::idx::{self, IdxError, IdxHeader};
use crate::pipeline::{self, augment_image, PipelineConfig, Schedule, DEFAULT_APPLY_PROB};
use crate::pixelgrid::GrayImage;
use crate::render::{self, Cell, GridSpec, RenderError};

const AFTER_HELP: &str = "Inputs must be uncompressed IDX files. Distributed MNIST-family \
files are usually gzip-compressed (*.gz); run gunzip on them first.";

#[derive(Debug, Parser)]
#[command(name = "strokeaug", version, about = "Stroke-level augmentation for handwritten-character IDX datasets", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Augment an IDX image file and write the result as IDX.
    Augment(AugmentArgs),
    /// Render images as a PNG sample sheet with a JSON manifest.
    Grid(GridArgs),
    /// Print ink statistics for an IDX image file.
    Stats(StatsArgs),
    /// Print an IDX header without loading the data.
    Info(InfoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Thick,
    Thin,
    Elongate,
    #[value(alias = "line-erase")]
    Lineerase,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Thick => Method::Thick,
            MethodArg::Thin => Method::Thin,
            MethodArg::Elongate => Method::Elongate,
            MethodArg::Lineerase => Method::LineErase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Complete,
    Random,
    X,
    Y,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Complete => Mode::Complete,
            ModeArg::Random => Mode::Random,
            ModeArg::X => Mode::XAxis,
            ModeArg::Y => Mode::YAxis,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// complete|random for thick/thin, x|y for elongate/lineerase.
    /// Defaults to complete or x.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-image probability that the kernel runs.
    #[arg(long, default_value_t = DEFAULT_APPLY_PROB)]
    pub apply_prob: f64,
    /// Per-row probability in random mode.
    #[arg(long, default_value_t = DEFAULT_ROW_PROB)]
    pub row_prob: f64,
    /// Fill values are reduced by a draw from [0, k).
    #[arg(long, default_value_t = u64::from(DEFAULT_K))]
    pub k: u64,
    /// Pixels above this value are ink.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: u8,
    /// Worker threads: 0 uses all cores, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

impl KernelArgs {
    fn pipeline(&self) -> Result<Option<PipelineConfig>, CliError> {
        let Some(method) = self.method.map(Method::from) else {
            if self.mode.is_some() {
                return Err(CliError::Usage("--mode requires --method".into()));
            }
            return Ok(None);
        };
        let mode = self.mode.map_or(method.modes()[0], Mode::from);
        let augment = AugmentConfig::new(method, mode)?
            .with_threshold(self.threshold)
            .with_k(self.k)?
            .with_row_prob(self.row_prob)?;
        Ok(Some(
            PipelineConfig::new(augment, self.seed).with_apply_prob(self.apply_prob)?,
        ))
    }

    fn schedule(&self) -> Schedule {
        match self.threads {
            0 => Schedule::Parallel,
            1 => Schedule::Sequential,
            n => Schedule::Threads(n),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub images: PathBuf,
    /// Label file, validated and copied to --out-labels.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub out_labels: Option<PathBuf>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Print the summary as one JSON object.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub images: PathBuf,
    /// Render the first N images.
    #[arg(long, conflicts_with = "indices")]
    pub count: Option<usize>,
    /// Comma-separated image indices to render, in order.
    #[arg(long, value_delimiter = ',')]
    pub indices: Option<Vec<usize>>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub scale: usize,
    #[arg(long, default_value_t = 1)]
    pub border: usize,
    /// Output PNG path.
    #[arg(long)]
    pub out: PathBuf,
    /// Manifest path; defaults to the PNG path with a .json extension.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Tag recorded for every cell; defaults to "<method>-<mode>" when augmenting.
    #[arg(long)]
    pub tag: Option<String>,
    /// Optionally augment the selected images before rendering. Each image
    /// uses the stream of its dataset index, matching `augment` output.
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub images: PathBuf,
    /// Also print one JSON line per image.
    #[arg(long)]
    pub per_image: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct InfoArgs {
    /// IDX image or label file.
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}{}", path.display(), offset_note(source))]
    Parse { path: PathBuf, source: IdxError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("writing output: {0}")]
    Stdout(#[source] io::Error),
}

fn offset_note(err: &IdxError) -> String {
    err.offset()
        .map(|o| format!(" (at byte offset {o})"))
        .unwrap_or_default()
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Stdout(_) => 1,
            _ => 2,
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_images(path: &Path) -> Result<Vec<GrayImage>, CliError> {
    idx::read_images(&read_file(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn encode(path: &Path, result: Result<Vec<u8>, IdxError>) -> Result<Vec<u8>, CliError> {
    result.map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: &mut dyn Write, line: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(CliError::Stdout)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Augment(args) => cmd_augment(&args, out),
        Command::Grid(args) => cmd_grid(&args, out),
        Command::Stats(args) => cmd_stats(&args, out),
        Command::Info(args) => cmd_info(&args, out),
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn cmd_augment(args: &AugmentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = args
        .kernel
        .pipeline()?
        .ok_or_else(|| CliError::Usage("augment requires --method".into()))?;
    if args.out_labels.is_some() && args.labels.is_none() {
        return Err(CliError::Usage("--out-labels requires --labels".into()));
    }
    let images = load_images(&args.images)?;
    let labels = match &args.labels {
        Some(path) => {
            let labels = idx::read_labels(&read_file(path)?).map_err(|source| CliError::Parse {
                path: path.clone(),
                source,
            })?;
            if labels.len() != images.len() {
                return Err(CliError::Usage(format!(
                    "{}: {} labels for {} images",
                    path.display(),
                    labels.len(),
                    images.len()
                )));
            }
            Some(labels)
        }
        None => None,
    };

    let (augmented, summary) = if images.is_empty() {
        (Vec::new(), pipeline::AugmentSummary::default())
    } else {
        pipeline::augment_all(&images, &cfg, args.kernel.schedule())
    };
    let bytes = if augmented.is_empty() {
        // no images to take dimensions from: pass the input header through
        read_file(&args.images)?
    } else {
        encode(&args.out, idx::write_images(&augmented))?
    };
    write_file(&args.out, &bytes)?;
    if let (Some(path), Some(labels)) = (&args.out_labels, &labels) {
        write_file(path, &encode(path, idx::write_labels(labels))?)?;
    }

    let a = cfg.augment;
    if args.json {
        let summary = json!({
            "processed": summary.processed,
            "modified": summary.applied,
            "changed": summary.changed,
            "seed": cfg.base_seed,
            "method": a.method().name(),
            "mode": a.mode().name(),
            "apply_prob": cfg.apply_prob(),
            "row_prob": a.row_prob(),
            "k": a.k(),
            "threshold": a.threshold(),
            "out": args.out,
            "out_labels": args.out_labels,
        });
        emit(out, summary)
    } else {
        emit(
            out,
            format_args!(
                "processed {} images, modified {} ({} changed), seed {}, method {}, mode {}",
                summary.processed,
                summary.applied,
                summary.changed,
                cfg.base_seed,
                a.method(),
                a.mode()
            ),
        )
    }
}

pub fn cmd_grid(args: &GridArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = args.kernel.pipeline()?;
    let images = load_images(&args.images)?;
    let indices: Vec<usize> = match (&args.indices, args.count) {
        (Some(indices), _) => {
            if let Some(&bad) = indices.iter().find(|&&i| i >= images.len()) {
                return Err(CliError::Usage(format!(
                    "--indices: index {bad} out of range for {} images (valid 0..{})",
                    images.len(),
                    images.len()
                )));
            }
            indices.clone()
        }
        (None, Some(count)) => {
            if count > images.len() {
                return Err(CliError::Usage(format!(
                    "--count {count} exceeds the {} images in {}",
                    images.len(),
                    args.images.display()
                )));
            }
            (0..count).collect()
        }
        (None, None) => {
            let cap = match (args.rows, args.cols) {
                (Some(r), Some(c)) => r * c,
                _ => 10,
            };
            (0..images.len().min(cap)).collect()
        }
    };

    let n = indices.len();
    let cols = args.cols.unwrap_or_else(|| match args.rows {
        Some(r) if r > 0 => n.div_ceil(r).max(1),
        _ => n.clamp(1, 10),
    });
    let rows = args.rows.unwrap_or_else(|| n.div_ceil(cols.max(1)).max(1));
    let spec = GridSpec::new(rows, cols)
        .with_scale(args.scale)
        .with_border(args.border);
    if n > spec.capacity() {
        return Err(RenderError::GridOverflow {
            count: n,
            rows,
            cols,
        }
        .into());
    }

    let selected: Vec<GrayImage> = indices
        .iter()
        .map(|&i| match &cfg {
            Some(cfg) => augment_image(&images[i], i as u64, cfg).image,
            None => images[i].clone(),
        })
        .collect();
    let default_tag = cfg.map(|c| format!("{}-{}", c.augment.method(), c.augment.mode()));
    let tag = args.tag.clone().or(default_tag);
    let cells: Vec<Cell<'_>> = selected
        .iter()
        .zip(&indices)
        .map(|(image, &source_index)| Cell {
            image,
            source_index,
            tag: tag.as_deref(),
        })
        .collect();
    let sheet = render::render_cells(&cells, &spec)?;

    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.out.with_extension("json"));
    write_file(&args.out, &sheet.png)?;
    let manifest = serde_json::to_vec_pretty(&sheet.manifest).expect("manifest serializes");
    write_file(&manifest_path, &manifest)?;

    let (w, h) = sheet.canvas.dims();
    if args.json {
        emit(
            out,
            json!({
                "cells": n,
                "rows": rows,
                "cols": cols,
                "width": w,
                "height": h,
                "png": args.out,
                "manifest": manifest_path,
            }),
        )
    } else {
        emit(
            out,
            format_args!(
                "rendered {n} cells on a {rows}x{cols} grid ({w}x{h} px) to {}, manifest {}",
                args.out.display(),
                manifest_path.display()
            ),
        )
    }
}

#[derive(Debug, Serialize)]
struct DatasetStats {
    count: usize,
    width: Option<usize>,
    height: Option<usize>,
    mean_ink_sum: f64,
    mean_nonzero: f64,
}

pub fn cmd_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let images = load_images(&args.images)?;
    let records = pipeline::ink_stats(&images);
    let count = records.len();
    let mean = |f: fn(&pipeline::InkStats) -> u64| {
        if count == 0 {
            0.0
        } else {
            records.iter().map(f).sum::<u64>() as f64 / count as f64
        }
    };
    let stats = DatasetStats {
        count,
        width: images.first().map(GrayImage::width),
        height: images.first().map(GrayImage::height),
        mean_ink_sum: mean(|r| r.ink_sum),
        mean_nonzero: mean(|r| r.nonzero),
    };
    if args.per_image {
        for (index, r) in records.iter().enumerate() {
            emit(
                out,
                json!({"index": index, "nonzero": r.nonzero, "ink_sum": r.ink_sum}),
            )?;
        }
    }
    if args.json {
        emit(out, serde_json::to_string(&stats).expect("stats serialize"))
    } else {
        let dims = match (stats.width, stats.height) {
            (Some(w), Some(h)) => format!("{h}x{w}"),
            _ => "-".into(),
        };
        emit(
            out,
            format_args!(
                "count {} dims {} mean_ink_sum {:.4} mean_nonzero {:.4}",
                stats.count, dims, stats.mean_ink_sum, stats.mean_nonzero
            ),
        )
    }
}

pub fn cmd_info(args: &InfoArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let path = &args.file;
    let io_err = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    let mut file = fs::File::open(path).map_err(io_err)?;
    let header = IdxHeader::read_from(&mut file, None)
        .map_err(io_err)?
        .map_err(|source| CliError::Parse {
            path: path.clone(),
            source,
        })?;
    let magic = header.magic();
    if args.json {
        emit(
            out,
            json!({
                "magic": format!("{:02x}{:02x}{:02x}{:02x}", magic[0], magic[1], magic[2], magic[3]),
                "type_code": header.type_code,
                "rank": header.rank(),
                "extents": header.dims,
            }),
        )
    } else {
        let extents: Vec<String> = header.dims.iter().map(u32::to_string).collect();
        emit(
            out,
            format_args!(
                "magic 0x{:02X}{:02X}{:02X}{:02X} type 0x{:02X} rank {} extents ({})",
                magic[0],
                magic[1],
                magic[2],
                magic[3],
                header.type_code,
                header.rank(),
                extents.join(", ")
            ),
        )
    }
}
