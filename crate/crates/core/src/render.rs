//! Sample-sheet montages: images laid out row-major on a grid, written as an
//! 8-bit grayscale PNG, plus a manifest numbering each cell.
//!
//! Cells are `w * scale` by `h * scale` with nearest-neighbour upscaling and
//! are separated by `border` pixels. The frame around an occupied cell is drawn
//! at [`BORDER_INTENSITY`]; everything else outside occupied cells is black.

use std::io::Cursor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pixelgrid::{DimsError, GrayImage};

pub const BORDER_INTENSITY: u8 = 128;
/// Cell size used when there are no images to take it from.
pub const FALLBACK_CELL: (usize, usize) = (28, 28);

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    HeterogeneousDims(#[from] DimsError),
    #[error("{count} images do not fit a {rows}x{cols} grid")]
    GridOverflow {
        count: usize,
        rows: usize,
        cols: usize,
    },
    #[error("grid rows, cols and scale must be positive")]
    EmptyGrid,
    #[error("canvas of {width}x{height} exceeds PNG limits")]
    CanvasTooLarge { width: usize, height: usize },
    #[error("png encoding: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("png decoding: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("expected 8-bit grayscale PNG, got {0:?} at {1:?}")]
    NotGray8(png::ColorType, png::BitDepth),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub border: usize,
    pub scale: usize,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            border: 1,
            scale: 4,
        }
    }

    pub fn with_border(mut self, border: usize) -> Self {
        self.border = border;
        self
    }

    pub fn with_scale(mut self, scale: usize) -> Self {
        self.scale = scale;
        self
    }

    pub fn capacity(&self) -> usize {
        self.rows * self.cols
    }

    /// Canvas `(width, height)` for cells of `cell` source pixels.
    pub fn canvas_dims(&self, cell: (usize, usize)) -> (usize, usize) {
        (
            self.cols * (cell.0 * self.scale + self.border) + self.border,
            self.rows * (cell.1 * self.scale + self.border) + self.border,
        )
    }

    /// Top-left canvas pixel `(x, y)` of the interior of 0-based cell `n`.
    pub fn cell_origin(&self, cell: (usize, usize), n: usize) -> (usize, usize) {
        let (row, col) = (n / self.cols, n % self.cols);
        (
            self.border + col * (cell.0 * self.scale + self.border),
            self.border + row * (cell.1 * self.scale + self.border),
        )
    }
}

/// One image to place on the sheet, with the provenance recorded in the manifest.
#[derive(Debug, Clone, Copy)]
pub struct Cell<'a> {
    pub image: &'a GrayImage,
    pub source_index: usize,
    pub tag: Option<&'a str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// 1-based, row-major.
    pub cell: usize,
    pub source_index: usize,
    pub tag: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GridSheet {
    pub canvas: GrayImage,
    pub png: Vec<u8>,
    pub manifest: Vec<ManifestEntry>,
}

/// Convenience wrapper: cell `i` shows `images[i]` with source index `i`.
pub fn render_grid(
    images: &[GrayImage],
    spec: &GridSpec,
    tag: Option<&str>,
) -> Result<GridSheet, RenderError> {
    let cells: Vec<Cell<'_>> = images
        .iter()
        .enumerate()
        .map(|(source_index, image)| Cell {
            image,
            source_index,
            tag,
        })
        .collect();
    render_cells(&cells, spec)
}

pub fn render_cells(cells: &[Cell<'_>], spec: &GridSpec) -> Result<GridSheet, RenderError> {
    if spec.rows == 0 || spec.cols == 0 || spec.scale == 0 {
        return Err(RenderError::EmptyGrid);
    }
    if cells.len() > spec.capacity() {
        return Err(RenderError::GridOverflow {
            count: cells.len(),
            rows: spec.rows,
            cols: spec.cols,
        });
    }
    let cell = match cells.first() {
        None => FALLBACK_CELL,
        Some(first) => {
            let dims = first.image.dims();
            if let Some((index, c)) = cells
                .iter()
                .enumerate()
                .find(|(_, c)| c.image.dims() != dims)
            {
                return Err(DimsError::Mismatch {
                    index,
                    width: dims.0,
                    height: dims.1,
                    found_width: c.image.width(),
                    found_height: c.image.height(),
                }
                .into());
            }
            dims
        }
    };

    let (cw, ch) = spec.canvas_dims(cell);
    if u32::try_from(cw).is_err() || u32::try_from(ch).is_err() {
        return Err(RenderError::CanvasTooLarge {
            width: cw,
            height: ch,
        });
    }
    let mut canvas = vec![0u8; cw * ch];
    let (iw, ih) = (cell.0 * spec.scale, cell.1 * spec.scale);

    for (n, c) in cells.iter().enumerate() {
        let (x0, y0) = spec.cell_origin(cell, n);
        // frame
        for y in y0 - spec.border..y0 + ih + spec.border {
            for x in x0 - spec.border..x0 + iw + spec.border {
                canvas[y * cw + x] = BORDER_INTENSITY;
            }
        }
        for dy in 0..ih {
            let src = c.image.row(dy / spec.scale);
            let dst = &mut canvas[(y0 + dy) * cw + x0..(y0 + dy) * cw + x0 + iw];
            for (dx, px) in dst.iter_mut().enumerate() {
                *px = src[dx / spec.scale];
            }
        }
    }

    let png = encode_gray_png(&canvas, cw, ch)?;
    let manifest = cells
        .iter()
        .enumerate()
        .map(|(n, c)| ManifestEntry {
            cell: n + 1,
            source_index: c.source_index,
            tag: c.tag.map(str::to_owned),
        })
        .collect();
    Ok(GridSheet {
        canvas: GrayImage::new(cw, ch, canvas).expect("canvas is non-empty"),
        png,
        manifest,
    })
}

pub fn encode_gray_png(pixels: &[u8], width: usize, height: usize) -> Result<Vec<u8>, RenderError> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width as u32, height as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header()?;
        writer.write_image_data(pixels)?;
        writer.finish()?;
    }
    Ok(out)
}

/// Decodes an 8-bit grayscale PNG such as the ones [`render_grid`] writes.
pub fn decode_gray_png(bytes: &[u8]) -> Result<GrayImage, RenderError> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info()?;
    let mut buf = vec![
        0;
        reader
            .output_buffer_size()
            .expect("png dimensions overflow")
    ];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(RenderError::NotGray8(info.color_type, info.bit_depth));
    }
    buf.truncate(info.buffer_size());
    Ok(
        GrayImage::new(info.width as usize, info.height as usize, buf)
            .expect("decoded png is non-empty"),
    )
}
