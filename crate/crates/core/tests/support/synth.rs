//! Deterministic synthetic "handwriting": a few soft pen strokes on a black
//! 28x28 canvas, with faint sub-threshold noise like scanned digits have.

#![allow(dead_code)]

use strokeaug::{DrawSource, GrayImage, RngStream};

pub const SIDE: usize = 28;

fn unit(rng: &mut RngStream) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// One synthetic glyph; the same `(seed, index)` always gives the same image.
pub fn glyph(seed: u64, index: u64) -> GrayImage {
    let mut rng = RngStream::substream(seed ^ 0x5EED, index);
    let mut canvas = vec![0f64; SIDE * SIDE];
    let strokes = 1 + rng.uniform_below(3);
    for _ in 0..strokes {
        let (x0, y0) = (4.0 + 20.0 * unit(&mut rng), 4.0 + 20.0 * unit(&mut rng));
        let (x1, y1) = (4.0 + 20.0 * unit(&mut rng), 4.0 + 20.0 * unit(&mut rng));
        let bend = (unit(&mut rng) - 0.5) * 12.0;
        let pen = 0.8 + 1.2 * unit(&mut rng);
        for step in 0..=64 {
            let t = step as f64 / 64.0;
            let (mx, my) = ((x0 + x1) / 2.0 + bend, (y0 + y1) / 2.0 - bend);
            let x = (1.0 - t) * (1.0 - t) * x0 + 2.0 * (1.0 - t) * t * mx + t * t * x1;
            let y = (1.0 - t) * (1.0 - t) * y0 + 2.0 * (1.0 - t) * t * my + t * t * y1;
            let reach = pen + 1.0;
            let lo = |v: f64| (v - reach).floor().max(0.0) as usize;
            let hi = |v: f64| ((v + reach).ceil() as usize).min(SIDE - 1);
            for cy in lo(y)..=hi(y) {
                for cx in lo(x)..=hi(x) {
                    let dist = ((cx as f64 - x).powi(2) + (cy as f64 - y).powi(2)).sqrt();
                    let ink = (1.0 - (dist - pen).max(0.0)).clamp(0.0, 1.0);
                    let px = &mut canvas[cy * SIDE + cx];
                    *px = px.max(ink);
                }
            }
        }
    }
    let pixels = canvas
        .iter()
        .map(|&v| {
            let noise = if rng.bernoulli(0.03) {
                rng.uniform_below(9) as f64
            } else {
                0.0
            };
            (v * 255.0).max(noise).round() as u8
        })
        .collect();
    GrayImage::new(SIDE, SIDE, pixels).unwrap()
}

pub fn glyphs(seed: u64, count: usize) -> Vec<GrayImage> {
    (0..count as u64).map(|i| glyph(seed, i)).collect()
}

/// Random small image of the given size: a mix of blank, faint and inked pixels.
pub fn random_image(rng: &mut RngStream, width: usize, height: usize) -> GrayImage {
    let pixels = (0..width * height)
        .map(|_| match rng.uniform_below(4) {
            0 | 1 => 0,
            2 => rng.uniform_below(21) as u8,
            _ => rng.uniform_below(256) as u8,
        })
        .collect();
    GrayImage::new(width, height, pixels).unwrap()
}
