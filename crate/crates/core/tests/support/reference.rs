//! Naive reference kernels, written independently of the library on nested
//! `Vec` rows and fed a pre-recorded tape of raw 64-bit draws.

#![allow(dead_code)]

use strokeaug::{DrawSource, GrayImage, Method, Mode, RngStream};

pub type Grid = Vec<Vec<u8>>;

pub struct Tape {
    draws: Vec<u64>,
    pub pos: usize,
}

impl Tape {
    /// Records the next `len` raw outputs of `rng` without advancing it.
    pub fn record(rng: &RngStream, len: usize) -> Self {
        let mut copy = rng.clone();
        Self {
            draws: (0..len).map(|_| copy.next_u64()).collect(),
            pos: 0,
        }
    }

    pub fn from_raw(draws: Vec<u64>) -> Self {
        Self { draws, pos: 0 }
    }

    fn raw(&mut self) -> u64 {
        let v = self.draws[self.pos];
        self.pos += 1;
        v
    }

    /// floor(u * n / 2^64)
    fn below(&mut self, n: usize) -> usize {
        let u = self.raw() as u128;
        (u * n as u128 / (1u128 << 64)) as usize
    }

    fn coin(&mut self, p: f64) -> bool {
        let u = self.raw();
        if p == 1.0 {
            return true;
        }
        let cut = (p * 2f64.powi(64)).floor();
        (u as u128) < cut as u128
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RefConfig {
    pub method: Method,
    pub mode: Mode,
    pub threshold: u8,
    pub k: usize,
    pub row_prob: f64,
}

pub fn to_grid(img: &GrayImage) -> Grid {
    img.rows().map(<[u8]>::to_vec).collect()
}

pub fn from_grid(g: &Grid) -> GrayImage {
    GrayImage::from_rows(g)
}

fn transpose(g: &Grid) -> Grid {
    let (h, w) = (g.len(), g[0].len());
    (0..w).map(|c| (0..h).map(|r| g[r][c]).collect()).collect()
}

pub fn run(g: &Grid, cfg: &RefConfig, tape: &mut Tape) -> Grid {
    match cfg.method {
        Method::Thick => thick(g, cfg, tape),
        Method::Thin => thin(g, cfg, tape),
        Method::Elongate => elongate(g, cfg, tape),
        Method::LineErase => erase(g, cfg, tape),
    }
}

fn row_on(cfg: &RefConfig, tape: &mut Tape) -> bool {
    if cfg.mode == Mode::Random {
        tape.coin(cfg.row_prob)
    } else {
        true
    }
}

fn thick(g: &Grid, cfg: &RefConfig, tape: &mut Tape) -> Grid {
    let t = cfg.threshold as i32;
    let mut out = g.clone();
    for row in out.iter_mut() {
        if !row_on(cfg, tape) {
            continue;
        }
        let w = row.len();
        let mut c = 0;
        while c + 1 < w {
            let (here, next) = (row[c] as i32, row[c + 1] as i32);
            if here <= t && next > t {
                let d = tape.below(cfg.k) as i32;
                row[c] = (next - d).max(0) as u8;
            }
            c += 1;
        }
        let mut c = w - 1;
        while c >= 1 {
            let (here, prev) = (row[c] as i32, row[c - 1] as i32);
            if here <= t && prev > t {
                let d = tape.below(cfg.k) as i32;
                row[c] = (prev - d).max(0) as u8;
            }
            c -= 1;
        }
    }
    out
}

/// Each pass zeroes every run start found on the row as it was when the pass
/// began; the border counts as background.
fn thin(g: &Grid, cfg: &RefConfig, tape: &mut Tape) -> Grid {
    let t = cfg.threshold;
    let mut out = g.clone();
    for row in out.iter_mut() {
        if !row_on(cfg, tape) {
            continue;
        }
        let w = row.len();
        let snap = row.clone();
        let starts: Vec<usize> = (0..w)
            .filter(|&c| snap[c] > t && (c == 0 || snap[c - 1] <= t))
            .collect();
        for c in starts {
            row[c] = 0;
        }
        let snap = row.clone();
        let ends: Vec<usize> = (0..w)
            .filter(|&c| snap[c] > t && (c == w - 1 || snap[c + 1] <= t))
            .collect();
        for c in ends {
            row[c] = 0;
        }
    }
    out
}

fn elongate(g: &Grid, cfg: &RefConfig, tape: &mut Tape) -> Grid {
    let dup = |rows: &Grid, r: usize| {
        let mut v = rows.clone();
        v.insert(r + 1, rows[r].clone());
        v.pop();
        v
    };
    if cfg.mode == Mode::XAxis {
        let r = tape.below(g.len());
        dup(g, r)
    } else {
        let tg = transpose(g);
        let c = tape.below(tg.len());
        transpose(&dup(&tg, c))
    }
}

fn erase(g: &Grid, cfg: &RefConfig, tape: &mut Tape) -> Grid {
    let mut out = g.clone();
    if cfg.mode == Mode::XAxis {
        let r = tape.below(g.len());
        out[r] = vec![0; g[0].len()];
    } else {
        let c = tape.below(g[0].len());
        for row in out.iter_mut() {
            row[c] = 0;
        }
    }
    out
}
