//! Canny edge detection and the edge density measure.

use std::collections::VecDeque;

use crate::imgproc::{gaussian_blur, GrayImage};

/// Smoothing applied before the gradient stage.
pub const CANNY_SIGMA: f64 = 1.4;
/// Hysteresis thresholds as fractions of the maximum gradient magnitude.
pub const CANNY_LOW_RATIO: f64 = 0.10;
pub const CANNY_HIGH_RATIO: f64 = 0.20;

/// Per-pixel edge flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMask {
    width: usize,
    height: usize,
    edges: Vec<bool>,
}

impl EdgeMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn edges(&self) -> &[bool] {
        &self.edges
    }

    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.edges[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.edges.iter().filter(|&&e| e).count()
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.edges.len() as f64
    }
}

/// Gradient direction quantized to the four NMS neighbourhoods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Horizontal,
    Diagonal,
    Vertical,
    AntiDiagonal,
}

impl Direction {
    // tan(22.5°) and tan(67.5°)
    const TAN_22_5: f64 = 0.414_213_562_373_095_03;
    const TAN_67_5: f64 = 2.414_213_562_373_095;

    /// Bins `atan2(gy, gx)` (mod 180°) into [0,22.5) ∪ [157.5,180), [22.5,67.5),
    /// [67.5,112.5) and [112.5,157.5), using ratio comparisons instead of atan2.
    fn quantize(gx: f64, gy: f64) -> Self {
        // fold into the upper half plane: angle in [0, 180)
        let (gx, gy) = if gy < 0.0 || (gy == 0.0 && gx < 0.0) {
            (-gx, -gy)
        } else {
            (gx, gy)
        };
        let ax = gx.abs();
        if gx >= 0.0 {
            if gy < Self::TAN_22_5 * ax {
                Direction::Horizontal
            } else if gy < Self::TAN_67_5 * ax {
                Direction::Diagonal
            } else {
                Direction::Vertical
            }
        } else if gy <= Self::TAN_22_5 * ax {
            Direction::Horizontal
        } else if gy <= Self::TAN_67_5 * ax {
            Direction::AntiDiagonal
        } else {
            Direction::Vertical
        }
    }

    /// Offsets of the (negative, positive) neighbours along the gradient.
    fn neighbours(self) -> [(isize, isize); 2] {
        match self {
            Direction::Horizontal => [(-1, 0), (1, 0)],
            Direction::Diagonal => [(-1, -1), (1, 1)],
            Direction::Vertical => [(0, -1), (0, 1)],
            Direction::AntiDiagonal => [(1, -1), (-1, 1)],
        }
    }
}

pub(crate) struct Gradient {
    pub magnitude: Vec<f64>,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
}

/// 3×3 Sobel gradient with replicate borders.
pub(crate) fn sobel(img: &GrayImage) -> Gradient {
    let (w, h) = (img.width(), img.height());
    let v = img.values();
    let mut gx = vec![0.0; v.len()];
    let mut gy = vec![0.0; v.len()];
    let mut magnitude = vec![0.0; v.len()];
    for y in 0..h {
        let ym = y.saturating_sub(1) * w;
        let y0 = y * w;
        let yp = (y + 1).min(h - 1) * w;
        for x in 0..w {
            let xm = x.saturating_sub(1);
            let xp = (x + 1).min(w - 1);
            let dx = (v[ym + xp] + 2.0 * v[y0 + xp] + v[yp + xp]) - (v[ym + xm] + 2.0 * v[y0 + xm] + v[yp + xm]);
            let dy = (v[yp + xm] + 2.0 * v[yp + x] + v[yp + xp]) - (v[ym + xm] + 2.0 * v[ym + x] + v[ym + xp]);
            gx[y0 + x] = dx;
            gy[y0 + x] = dy;
            magnitude[y0 + x] = dx.hypot(dy);
        }
    }
    Gradient { magnitude, gx, gy }
}

/// Full Canny pipeline: Gaussian smoothing (σ = 1.4), Sobel gradients,
/// non-maximum suppression over four directions, and double-threshold
/// hysteresis at 10% / 20% of the peak gradient with 8-connected promotion.
pub fn canny(img: &GrayImage) -> EdgeMask {
    let (w, h) = (img.width(), img.height());
    let smoothed = gaussian_blur(img, CANNY_SIGMA).expect("constant sigma is valid");
    let grad = sobel(&smoothed);
    let max_mag = grad.magnitude.iter().copied().fold(0.0_f64, f64::max);
    let mut edges = vec![false; w * h];
    if max_mag <= 0.0 {
        return EdgeMask {
            width: w,
            height: h,
            edges,
        };
    }

    let mag_at = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            grad.magnitude[y as usize * w + x as usize]
        }
    };

    // Ties along the gradient keep the pixel on the positive side only, so
    // a symmetric plateau yields a single-pixel ridge.
    let mut thin = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = grad.magnitude[i];
            if m == 0.0 {
                continue;
            }
            let [(nx, ny), (px, py)] = Direction::quantize(grad.gx[i], grad.gy[i]).neighbours();
            let (xi, yi) = (x as isize, y as isize);
            if m > mag_at(xi + nx, yi + ny) && m >= mag_at(xi + px, yi + py) {
                thin[i] = m;
            }
        }
    }

    let low = CANNY_LOW_RATIO * max_mag;
    let high = CANNY_HIGH_RATIO * max_mag;
    let mut queue = VecDeque::new();
    for (i, &m) in thin.iter().enumerate() {
        if m >= high {
            edges[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !edges[j] && thin[j] >= low {
                    edges[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }

    EdgeMask {
        width: w,
        height: h,
        edges,
    }
}

/// Edge mask together with the fraction of edge pixels.
pub fn canny_edge_density(img: &GrayImage) -> (EdgeMask, f64) {
    let mask = canny(img);
    let density = mask.density();
    (mask, density)
}
