//! Stroke-level augmentation kernels.
//!
//! Every kernel is a pure function of the input image, its config and the
//! state of the draw source it is handed. Draw order is fixed and documented
//! per kernel so that replaying a stream reproduces the output bit-exactly.
//!
//! A pixel is *ink* when its value is above `threshold` and *background*
//! otherwise.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::pixelgrid::{DrawSource, GrayImage};

pub const DEFAULT_THRESHOLD: u8 = 10;
pub const DEFAULT_K: u32 = 10;
pub const DEFAULT_ROW_PROB: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Thick,
    Thin,
    Elongate,
    LineErase,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Thick,
        Method::Thin,
        Method::Elongate,
        Method::LineErase,
    ];

    /// Modes this method accepts.
    pub fn modes(self) -> [Mode; 2] {
        match self {
            Method::Thick | Method::Thin => [Mode::Complete, Mode::Random],
            Method::Elongate | Method::LineErase => [Mode::XAxis, Mode::YAxis],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Thick => "thick",
            Method::Thin => "thin",
            Method::Elongate => "elongate",
            Method::LineErase => "lineerase",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Complete,
    Random,
    /// Operates on a row.
    XAxis,
    /// Operates on a column.
    YAxis,
}

impl Mode {
    pub fn is_axis(self) -> bool {
        matches!(self, Mode::XAxis | Mode::YAxis)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Complete => "complete",
            Mode::Random => "random",
            Mode::XAxis => "x",
            Mode::YAxis => "y",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "thick" => Ok(Method::Thick),
            "thin" => Ok(Method::Thin),
            "elongate" => Ok(Method::Elongate),
            "lineerase" | "line-erase" | "line_erase" => Ok(Method::LineErase),
            _ => Err(ConfigError::UnknownMethod(s.to_string())),
        }
    }
}

impl FromStr for Mode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "complete" => Ok(Mode::Complete),
            "random" => Ok(Mode::Random),
            "x" | "x-axis" | "xaxis" => Ok(Mode::XAxis),
            "y" | "y-axis" | "yaxis" => Ok(Mode::YAxis),
            _ => Err(ConfigError::UnknownMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("mode {mode} is not valid for method {method} (expected {} or {})", method.modes()[0], method.modes()[1])]
    ModeMismatch { method: Method, mode: Mode },
    #[error("k must be at least 1 and at most 2^32, got {0}")]
    InvalidK(u64),
    #[error("probability must be in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("unknown method {0:?} (expected thick, thin, elongate or lineerase)")]
    UnknownMethod(String),
    #[error("unknown mode {0:?} (expected complete, random, x or y)")]
    UnknownMode(String),
}

pub(crate) fn check_probability(p: f64) -> Result<f64, ConfigError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(ConfigError::InvalidProbability(p))
    }
}

/// A validated kernel configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentConfig {
    method: Method,
    mode: Mode,
    threshold: u8,
    k: u64,
    row_prob: f64,
}

impl AugmentConfig {
    /// Config with default threshold (10), k (10) and row probability (0.5).
    pub fn new(method: Method, mode: Mode) -> Result<Self, ConfigError> {
        if !method.modes().contains(&mode) {
            return Err(ConfigError::ModeMismatch { method, mode });
        }
        Ok(Self {
            method,
            mode,
            threshold: DEFAULT_THRESHOLD,
            k: u64::from(DEFAULT_K),
            row_prob: DEFAULT_ROW_PROB,
        })
    }

    pub fn with_threshold(mut self, threshold: u8) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_k(mut self, k: u64) -> Result<Self, ConfigError> {
        if k == 0 || k > 1 << 32 {
            return Err(ConfigError::InvalidK(k));
        }
        self.k = k;
        Ok(self)
    }

    pub fn with_row_prob(mut self, row_prob: f64) -> Result<Self, ConfigError> {
        self.row_prob = check_probability(row_prob)?;
        Ok(self)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn threshold(&self) -> u8 {
        self.threshold
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn row_prob(&self) -> f64 {
        self.row_prob
    }
}

/// Runs the kernel selected by `cfg.method()`.
pub fn apply<R: DrawSource>(img: &GrayImage, cfg: &AugmentConfig, rng: &mut R) -> GrayImage {
    match cfg.method {
        Method::Thick => thicken(img, cfg, rng),
        Method::Thin => thin(img, cfg, rng),
        Method::Elongate => elongate(img, cfg, rng),
        Method::LineErase => line_erase(img, cfg, rng),
    }
}

/// Row selection shared by thicken and thin: every row in complete mode,
/// one Bernoulli(row_prob) draw per row in random mode.
fn row_selected<R: DrawSource>(cfg: &AugmentConfig, rng: &mut R) -> bool {
    match cfg.mode {
        Mode::Random => rng.bernoulli(cfg.row_prob),
        _ => true,
    }
}

/// Bolds strokes by filling the background pixel in front of every
/// background-to-ink transition.
///
/// For each selected row, a left-to-right pass fills `row[c]` when
/// `row[c] <= threshold < row[c + 1]`, then a right-to-left pass over the
/// already-updated row fills `row[c]` when `row[c] <= threshold < row[c - 1]`.
/// The filled value is the neighbouring ink value minus `d`, with a fresh
/// `d = uniform_below(k)` per filled pixel, clamped at 0.
pub fn thicken<R: DrawSource>(img: &GrayImage, cfg: &AugmentConfig, rng: &mut R) -> GrayImage {
    debug_assert_eq!(cfg.method, Method::Thick);
    let t = cfg.threshold;
    let mut out = img.clone();
    for r in 0..out.height() {
        if !row_selected(cfg, rng) {
            continue;
        }
        let row = out.row_mut(r);
        for c in 0..row.len().saturating_sub(1) {
            if row[c] <= t && row[c + 1] > t {
                row[c] = fill_value(row[c + 1], rng.uniform_below(cfg.k));
            }
        }
        for c in (1..row.len()).rev() {
            if row[c] <= t && row[c - 1] > t {
                row[c] = fill_value(row[c - 1], rng.uniform_below(cfg.k));
            }
        }
    }
    out
}

fn fill_value(ink: u8, d: u64) -> u8 {
    u64::from(ink).saturating_sub(d) as u8
}

/// Erodes strokes by zeroing the first ink pixel of every run, scanning each
/// selected row left to right and then right to left over the updated row.
///
/// The image border counts as background, so a run touching the edge loses
/// its edge pixel. Only row selection consumes draws.
pub fn thin<R: DrawSource>(img: &GrayImage, cfg: &AugmentConfig, rng: &mut R) -> GrayImage {
    debug_assert_eq!(cfg.method, Method::Thin);
    let t = cfg.threshold;
    let mut out = img.clone();
    for r in 0..out.height() {
        if !row_selected(cfg, rng) {
            continue;
        }
        let row = out.row_mut(r);
        erode_run_starts(row.iter_mut(), t);
        erode_run_starts(row.iter_mut().rev(), t);
    }
    out
}

fn erode_run_starts<'a>(pixels: impl Iterator<Item = &'a mut u8>, threshold: u8) {
    let mut after_background = true;
    for p in pixels {
        if *p > threshold {
            if after_background {
                *p = 0;
            }
            after_background = false;
        } else {
            after_background = true;
        }
    }
}

/// Duplicates one line and drops the last one so dimensions are unchanged.
///
/// X-axis draws a row `r = uniform_below(height)`; output rows are
/// `in[0..=r], in[r], in[r+1..height-1]`. Y-axis does the same on columns.
/// Exactly one draw.
pub fn elongate<R: DrawSource>(img: &GrayImage, cfg: &AugmentConfig, rng: &mut R) -> GrayImage {
    debug_assert_eq!(cfg.method, Method::Elongate);
    let (w, h) = img.dims();
    let src = |i: usize, picked: usize| if i <= picked { i } else { i - 1 };
    let mut out = img.clone();
    match cfg.mode {
        Mode::XAxis => {
            let picked = rng.uniform_below(h as u64) as usize;
            for r in picked + 1..h {
                out.row_mut(r).copy_from_slice(img.row(src(r, picked)));
            }
        }
        _ => {
            let picked = rng.uniform_below(w as u64) as usize;
            for r in 0..h {
                let row_in = img.row(r);
                let row_out = out.row_mut(r);
                for c in picked + 1..w {
                    row_out[c] = row_in[src(c, picked)];
                }
            }
        }
    }
    out
}

/// Sets one uniformly chosen row (x-axis) or column (y-axis) to 0. One draw.
pub fn line_erase<R: DrawSource>(img: &GrayImage, cfg: &AugmentConfig, rng: &mut R) -> GrayImage {
    debug_assert_eq!(cfg.method, Method::LineErase);
    let (w, h) = img.dims();
    let mut out = img.clone();
    match cfg.mode {
        Mode::XAxis => {
            let r = rng.uniform_below(h as u64) as usize;
            out.row_mut(r).fill(0);
        }
        _ => {
            let c = rng.uniform_below(w as u64) as usize;
            for r in 0..h {
                out.set(r, c, 0);
            }
        }
    }
    out
}
