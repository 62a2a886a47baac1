//! Gray-level co-occurrence matrices and the two statistics drawn from them.

use crate::error::{Error, Result};
use crate::imgproc::GrayImage;

/// Quantized image; every value is `< levels`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelImage {
    width: usize,
    height: usize,
    levels: usize,
    values: Vec<u16>,
}

impl LevelImage {
    pub fn new(width: usize, height: usize, levels: usize, values: Vec<u16>) -> Result<Self> {
        if !(2..=256).contains(&levels) {
            return Err(Error::InvalidLevels(levels));
        }
        if width == 0 || height == 0 || width * height != values.len() {
            return Err(Error::InvalidDimensions(format!(
                "{width}x{height} with {} values",
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v as usize >= levels) {
            return Err(Error::InvalidDimensions(format!("level {v} >= {levels}")));
        }
        Ok(Self {
            width,
            height,
            levels,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }
}

/// `min(floor(v * levels), levels - 1)` per pixel.
pub fn quantize(img: &GrayImage, levels: usize) -> Result<LevelImage> {
    if !(2..=256).contains(&levels) {
        return Err(Error::InvalidLevels(levels));
    }
    let top = (levels - 1) as f64;
    let values = img
        .values()
        .iter()
        .map(|&v| (v * levels as f64).floor().min(top) as u16)
        .collect();
    Ok(LevelImage {
        width: img.width(),
        height: img.height(),
        levels,
        values,
    })
}

/// Normalized symmetric co-occurrence matrix, `levels × levels`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GlcmMatrix {
    levels: usize,
    entries: Vec<f64>,
}

impl GlcmMatrix {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.levels + j]
    }
}

/// Counts level pairs at every offset in both directions, sums the counts
/// over offsets and normalizes to a joint probability table.
pub fn glcm(img: &LevelImage, offsets: &[(isize, isize)]) -> Result<GlcmMatrix> {
    if offsets.is_empty() {
        return Err(Error::NoValidPairs { dx: 0, dy: 0 });
    }
    let n = img.levels;
    let (w, h) = (img.width as isize, img.height as isize);
    let mut counts = vec![0u64; n * n];
    let mut total = 0u64;
    for &(dx, dy) in offsets {
        let xs = 0.max(-dx)..w.min(w - dx);
        let ys = 0.max(-dy)..h.min(h - dy);
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::NoValidPairs { dx, dy });
        }
        for y in ys {
            for x in xs.clone() {
                let a = img.get(x as usize, y as usize) as usize;
                let b = img.get((x + dx) as usize, (y + dy) as usize) as usize;
                counts[a * n + b] += 1;
                counts[b * n + a] += 1;
                total += 2;
            }
        }
    }
    let total = total as f64;
    Ok(GlcmMatrix {
        levels: n,
        entries: counts.into_iter().map(|c| c as f64 / total).collect(),
    })
}

/// Angular second moment, `Σ P(i,j)²`.
pub fn glcm_energy(p: &GlcmMatrix) -> f64 {
    p.entries.iter().map(|v| v * v).sum()
}

/// `Σ (i-j)² P(i,j)`.
pub fn glcm_contrast(p: &GlcmMatrix) -> f64 {
    let n = p.levels;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = i as f64 - j as f64;
            acc += d * d * p.entries[i * n + j];
        }
    }
    acc
}
