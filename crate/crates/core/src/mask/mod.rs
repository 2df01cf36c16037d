//! Binary-mask to midline pipeline: fixture exclusion, thinning, skeleton
//! graph construction, branch pruning and base-to-tip ordering.

mod extract;
mod graph;
mod io;
mod raster;
mod thin;

pub use extract::{extract_frame, extract_frames, extract_sequence, Extraction, FrameGap};
pub use graph::{build_graph, prune_and_order, BaseHint, SkeletonGraph};
pub use io::{parse_mask, read_mask, write_pbm, write_rle};
pub use raster::{distance_to_polyline, rasterize_polyline};
pub use thin::thin;

use crate::error::{Error, Result};

/// Row-major boolean image of the segmented arm. `pitch` is meters per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    pitch: f64,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>, pitch: f64) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(Error::invalid(format!(
                "mask must be at least 3x3, got {width}x{height}"
            )));
        }
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::invalid(format!("pixel pitch must be > 0, got {pitch}")));
        }
        if bits.len() != width * height {
            return Err(Error::invalid(format!(
                "mask has {} bits, expected {}",
                bits.len(),
                width * height
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
            pitch,
        })
    }

    pub fn empty(width: usize, height: usize, pitch: f64) -> Result<Self> {
        Self::new(width, height, vec![false; width * height], pitch)
    }

    /// Parse rows of `#`/`1` (foreground) and `.`/`0` (background).
    pub fn from_ascii(rows: &[&str], pitch: f64) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut bits = Vec::with_capacity(width * height);
        for (y, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::invalid(format!("row {y} has ragged width")));
            }
            bits.extend(row.bytes().map(|b| b == b'#' || b == b'1'));
        }
        Self::new(width, height, bits, pitch)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Out-of-range coordinates read as background.
    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.bits[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Foreground pixel coordinates in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }

    pub fn to_ascii(&self) -> Vec<String> {
        self.bits
            .chunks(self.width)
            .map(|r| r.iter().map(|&b| if b { '#' } else { '.' }).collect())
            .collect()
    }

    /// Number of 8-connected foreground components.
    pub fn component_count(&self) -> usize {
        self.component_labels().1
    }

    /// Per-pixel 8-connected component label (0 for background, 1.. in
    /// raster order of each component's first pixel) and the label count.
    pub(crate) fn component_labels(&self) -> (Vec<u32>, usize) {
        let mut label = vec![0u32; self.bits.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || label[start] != 0 {
                continue;
            }
            count += 1;
            label[start] = count as u32;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (x, y) = ((i % self.width) as i64, (i / self.width) as i64);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if self.get(nx, ny) {
                            let j = ny as usize * self.width + nx as usize;
                            if label[j] == 0 {
                                label[j] = count as u32;
                                stack.push(j);
                            }
                        }
                    }
                }
            }
        }
        (label, count)
    }
}

/// Foreground of `mask` minus foreground of `fixture`.
pub fn apply_exclusion(mask: &BinaryMask, fixture: &BinaryMask) -> Result<BinaryMask> {
    if mask.width != fixture.width || mask.height != fixture.height {
        return Err(Error::invalid(format!(
            "fixture is {}x{}, mask is {}x{}",
            fixture.width, fixture.height, mask.width, mask.height
        )));
    }
    let bits = mask
        .bits
        .iter()
        .zip(&fixture.bits)
        .map(|(&m, &f)| m && !f)
        .collect();
    BinaryMask::new(mask.width, mask.height, bits, mask.pitch)
}
