#![allow(dead_code)]

use std::path::PathBuf;

use irs_core::harness::{ingest_corpus, load_standardized, Corpus};
use irs_core::imgproc::GrayImage;
use irs_core::measures::LevelImage;

pub fn photos_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/photos")
}

pub fn photo_corpus() -> Corpus {
    ingest_corpus(&photos_dir(), None, "photos").expect("bundled photos")
}

/// Standardized working images of the bundled photos, in path order.
pub fn standardized_photos() -> Vec<GrayImage> {
    photo_corpus()
        .entries
        .iter()
        .map(|e| load_standardized(&e.path).expect("photo decodes"))
        .collect()
}

/// Symmetric co-occurrence matrix by enumerating every ordered pixel pair
/// and testing whether it matches an offset.
pub fn naive_glcm(img: &LevelImage, offsets: &[(isize, isize)]) -> Vec<f64> {
    let (w, h, l) = (img.width() as isize, img.height() as isize, img.levels());
    let mut counts = vec![0u64; l * l];
    let mut total = 0u64;
    for &(dx, dy) in offsets {
        for y1 in 0..h {
            for x1 in 0..w {
                for y2 in 0..h {
                    for x2 in 0..w {
                        if x2 - x1 == dx && y2 - y1 == dy {
                            let a = img.get(x1 as usize, y1 as usize) as usize;
                            let b = img.get(x2 as usize, y2 as usize) as usize;
                            counts[a * l + b] += 1;
                            counts[b * l + a] += 1;
                            total += 2;
                        }
                    }
                }
            }
        }
    }
    counts.into_iter().map(|c| c as f64 / total as f64).collect()
}

/// Direct evaluation of the unnormalized 2-D DFT, returning |F| row-major
/// by frequency `(u, v)` at index `v*width + u`.
pub fn naive_dft_magnitude(img: &GrayImage) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h];
    for v in 0..h {
        for u in 0..w {
            let (mut re, mut im) = (0.0, 0.0);
            for y in 0..h {
                for x in 0..w {
                    let phase = -2.0 * std::f64::consts::PI * ((u * x) as f64 / w as f64 + (v * y) as f64 / h as f64);
                    let f = img.get(x, y);
                    re += f * phase.cos();
                    im += f * phase.sin();
                }
            }
            out[v * w + u] = re.hypot(im);
        }
    }
    out
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

/// Bilinear sample with pixel-center alignment, written independently of
/// the library resize.
pub fn reference_bilinear(src: &[f64], sw: usize, sh: usize, dw: usize, dh: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(dw * dh);
    for dy in 0..dh {
        let fy = ((dy as f64 + 0.5) * sh as f64 / dh as f64 - 0.5).clamp(0.0, (sh - 1) as f64);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let ty = fy - y0 as f64;
        for dx in 0..dw {
            let fx = ((dx as f64 + 0.5) * sw as f64 / dw as f64 - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let tx = fx - x0 as f64;
            let top = src[y0 * sw + x0] * (1.0 - tx) + src[y0 * sw + x1] * tx;
            let bot = src[y1 * sw + x0] * (1.0 - tx) + src[y1 * sw + x1] * tx;
            out.push(top * (1.0 - ty) + bot * ty);
        }
    }
    out
}
