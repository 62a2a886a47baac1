//! Image decoding and the pixel-level primitives the measures build on.
//!
//! All planes are stored row-major with `f64` samples. Convolutions use
//! replicate (clamp-to-edge) border handling throughout.

use std::io::Cursor;

use image::{ImageFormat, ImageReader, Limits};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Side length of the working resolution every image is standardized to.
pub const WORKING_SIZE: usize = 256;

/// Smallest accepted input side for [`standardize`].
pub const MIN_INPUT_SIZE: usize = 16;

/// Decoded 8-bit RGB image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

/// Luminance image with every sample in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GrayImage {
    /// Builds a gray image, rejecting values outside `[0, 1]` (and NaN).
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::ValueOutOfRange { index, value });
        }
        Ok(Self { width, height, values })
    }

    /// Constant image of value `c`.
    pub fn filled(width: usize, height: usize, c: f64) -> Result<Self> {
        Self::new(width, height, vec![c; width * height])
    }

    /// Builds an image from a function of `(x, y)`; values are clamped to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Rotates the image by `quarter_turns` × 90° clockwise.
    pub fn rotate90(&self, quarter_turns: u32) -> GrayImage {
        let (width, height, values) = rotate_plane(self.width, self.height, &self.values, quarter_turns);
        GrayImage { width, height, values }
    }
}

/// Real-valued plane with no range restriction (filter responses, spectra).
#[derive(Clone, Debug, PartialEq)]
pub struct FloatField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl FloatField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        Ok(Self { width, height, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Rotates the field by `quarter_turns` × 90° clockwise.
    pub fn rotate90(&self, quarter_turns: u32) -> FloatField {
        let (width, height, values) = rotate_plane(self.width, self.height, &self.values, quarter_turns);
        FloatField { width, height, values }
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions(format!("{width}x{height}")));
    }
    match width.checked_mul(height) {
        Some(n) if n == len => Ok(()),
        _ => Err(Error::InvalidDimensions(format!(
            "{width}x{height} does not match {len} samples"
        ))),
    }
}

fn rotate_plane(width: usize, height: usize, src: &[f64], quarter_turns: u32) -> (usize, usize, Vec<f64>) {
    match quarter_turns % 4 {
        0 => (width, height, src.to_vec()),
        1 => {
            // clockwise: new (x, y) <- old (y, H-1-x)
            let (nw, nh) = (height, width);
            let mut out = Vec::with_capacity(src.len());
            for y in 0..nh {
                for x in 0..nw {
                    out.push(src[(height - 1 - x) * width + y]);
                }
            }
            (nw, nh, out)
        }
        2 => {
            let mut out = src.to_vec();
            out.reverse();
            (width, height, out)
        }
        _ => {
            let (nw, nh) = (height, width);
            let mut out = Vec::with_capacity(src.len());
            for y in 0..nh {
                for x in 0..nw {
                    out.push(src[x * width + (width - 1 - y)]);
                }
            }
            (nw, nh, out)
        }
    }
}

fn decode_limits() -> Limits {
    let mut limits = Limits::default();
    limits.max_image_width = Some(1 << 15);
    limits.max_image_height = Some(1 << 15);
    limits.max_alloc = Some(1 << 30);
    limits
}

/// Decodes a PNG, JPEG or BMP file held in memory.
pub fn decode_image(bytes: &[u8]) -> Result<RgbImage> {
    let format = image::guess_format(bytes).map_err(|_| Error::UnsupportedFormat)?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg | ImageFormat::Bmp) {
        return Err(Error::UnsupportedFormat);
    }
    let mut reader = ImageReader::with_format(Cursor::new(bytes), format);
    reader.limits(decode_limits());
    let decoded = reader
        .decode()
        .map_err(|e| Error::CorruptFile(e.to_string()))?
        .into_rgb8();
    let (w, h) = decoded.dimensions();
    let pixels = decoded.pixels().map(|p| p.0).collect();
    RgbImage::new(w as usize, h as usize, pixels)
}

/// Reads and decodes an image file.
pub fn load_image(path: &std::path::Path) -> Result<RgbImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

/// BT.601 luma, scaled to `[0, 1]`.
pub fn to_grayscale(img: &RgbImage) -> GrayImage {
    let values = img
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            let y = (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)) / 255.0;
            y.clamp(0.0, 1.0)
        })
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        values,
    }
}

/// Bilinear resample to `new_width × new_height` using pixel-center alignment.
pub fn resize_bilinear(img: &GrayImage, new_width: usize, new_height: usize) -> Result<GrayImage> {
    check_dims(new_width, new_height, new_width * new_height)?;
    let sx = img.width as f64 / new_width as f64;
    let sy = img.height as f64 / new_height as f64;
    let xs: Vec<_> = (0..new_width).map(|x| sample_pos(x, sx, img.width)).collect();
    let mut values = Vec::with_capacity(new_width * new_height);
    for y in 0..new_height {
        let (y0, y1, fy) = sample_pos(y, sy, img.height);
        for &(x0, x1, fx) in &xs {
            let top = img.get(x0, y0) * (1.0 - fx) + img.get(x1, y0) * fx;
            let bottom = img.get(x0, y1) * (1.0 - fx) + img.get(x1, y1) * fx;
            values.push((top * (1.0 - fy) + bottom * fy).clamp(0.0, 1.0));
        }
    }
    Ok(GrayImage {
        width: new_width,
        height: new_height,
        values,
    })
}

fn sample_pos(dst: usize, scale: f64, src_len: usize) -> (usize, usize, f64) {
    let max = (src_len - 1) as f64;
    let s = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, max);
    let i0 = s.floor() as usize;
    let i1 = (i0 + 1).min(src_len - 1);
    (i0, i1, s - i0 as f64)
}

/// Window of `width × height` starting at `(x0, y0)`.
pub fn crop(img: &GrayImage, x0: usize, y0: usize, width: usize, height: usize) -> Result<GrayImage> {
    if x0 + width > img.width || y0 + height > img.height {
        return Err(Error::InvalidDimensions(format!(
            "crop {width}x{height}+{x0}+{y0} exceeds {}x{}",
            img.width, img.height
        )));
    }
    let mut values = Vec::with_capacity(width * height);
    for y in y0..y0 + height {
        let row = y * img.width;
        values.extend_from_slice(&img.values[row + x0..row + x0 + width]);
    }
    GrayImage::new(width, height, values)
}

/// Resizes so the shorter side is 256, then center-crops to 256×256.
pub fn standardize(img: &GrayImage) -> Result<GrayImage> {
    let (w, h) = (img.width, img.height);
    if w.min(h) < MIN_INPUT_SIZE {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: MIN_INPUT_SIZE,
        });
    }
    if w == WORKING_SIZE && h == WORKING_SIZE {
        return Ok(img.clone());
    }
    let short = w.min(h) as f64;
    let scale = WORKING_SIZE as f64 / short;
    let rw = ((w as f64 * scale).round() as usize).max(WORKING_SIZE);
    let rh = ((h as f64 * scale).round() as usize).max(WORKING_SIZE);
    let resized = if rw == w && rh == h {
        img.clone()
    } else {
        resize_bilinear(img, rw, rh)?
    };
    crop(
        &resized,
        (rw - WORKING_SIZE) / 2,
        (rh - WORKING_SIZE) / 2,
        WORKING_SIZE,
        WORKING_SIZE,
    )
}

/// Normalized 1-D Gaussian kernel of radius `ceil(3σ)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-radius..=radius).map(|i| (-((i * i) as f64) / denom).exp()).collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    Ok(k)
}

#[inline]
fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

pub(crate) fn convolve_separable(width: usize, height: usize, src: &[f64], kernel: &[f64]) -> Vec<f64> {
    let r = (kernel.len() / 2) as isize;
    let mut tmp = vec![0.0; src.len()];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                acc += w * row[clamp_index(x as isize + k as isize - r, width)];
            }
            tmp[y * width + x] = acc;
        }
    }
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                acc += w * tmp[clamp_index(y as isize + k as isize - r, height) * width + x];
            }
            out[y * width + x] = acc;
        }
    }
    out
}

/// Separable Gaussian blur with replicate borders.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    let kernel = gaussian_kernel(sigma)?;
    let values = convolve_separable(img.width, img.height, &img.values, &kernel)
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    Ok(GrayImage {
        width: img.width,
        height: img.height,
        values,
    })
}

/// 4-neighbour Laplacian `[[0,1,0],[1,-4,1],[0,1,0]]` with replicate borders.
pub fn laplacian_filter(img: &GrayImage) -> FloatField {
    let (w, h) = (img.width, img.height);
    let v = &img.values;
    let mut out = Vec::with_capacity(v.len());
    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        for x in 0..w {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(w - 1);
            let c = v[y * w + x];
            out.push(v[up * w + x] + v[down * w + x] + v[y * w + left] + v[y * w + right] - 4.0 * c);
        }
    }
    FloatField {
        width: w,
        height: h,
        values: out,
    }
}

/// Magnitude of the unnormalized forward 2-D DFT. Entry `(u, v)` is stored
/// at `v * width + u`.
pub fn dft2_magnitude(img: &GrayImage) -> FloatField {
    let (w, h) = (img.width, img.height);
    let mut planner = FftPlanner::<f64>::new();
    let mut data: Vec<Complex<f64>> = img.values.iter().map(|&v| Complex::new(v, 0.0)).collect();

    let row_fft = planner.plan_fft_forward(w);
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }

    let col_fft = planner.plan_fft_forward(h);
    let mut column = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = data[y * w + x];
        }
        col_fft.process(&mut column);
        for y in 0..h {
            data[y * w + x] = column[y];
        }
    }

    FloatField {
        width: w,
        height: h,
        values: data.iter().map(|c| c.norm()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode_png(width: u32, height: u32, rgb: &[u8]) -> Vec<u8> {
        let buf = image::RgbImage::from_raw(width, height, rgb.to_vec()).unwrap();
        let mut out = Cursor::new(Vec::new());
        buf.write_to(&mut out, ImageFormat::Png).unwrap();
        out.into_inner()
    }

    #[test]
    fn decodes_hand_built_png() {
        let rgb = [255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30];
        let img = decode_image(&encode_png(2, 2, &rgb)).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[[255, 0, 0], [0, 255, 0], [0, 0, 255], [10, 20, 30]]);
    }

    #[test]
    fn truncated_png_is_corrupt() {
        let bytes = encode_png(8, 8, &[7u8; 8 * 8 * 3]);
        let err = decode_image(&bytes[..bytes.len() / 2]).unwrap_err();
        assert!(matches!(err, Error::CorruptFile(_)), "{err:?}");
    }

    #[test]
    fn text_is_unsupported() {
        let err = decode_image(b"just some text, not an image\n").unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat));
    }

    #[test]
    fn grayscale_weights() {
        let img = RgbImage::new(3, 1, vec![[255, 255, 255], [0, 0, 0], [255, 0, 0]]).unwrap();
        let g = to_grayscale(&img);
        assert_eq!(g.values()[0], 1.0);
        assert_eq!(g.values()[1], 0.0);
        assert!((g.values()[2] - 0.299).abs() < 1e-12);
    }

    #[test]
    fn gray_rejects_out_of_range() {
        assert!(matches!(
            GrayImage::new(2, 1, vec![0.5, 1.5]),
            Err(Error::ValueOutOfRange { index: 1, .. })
        ));
        assert!(GrayImage::new(2, 1, vec![0.5, f64::NAN]).is_err());
        assert!(GrayImage::new(0, 1, vec![]).is_err());
    }

    #[test]
    fn standardize_noop_and_constant() {
        let img = GrayImage::from_fn(256, 256, |x, y| ((x * 7 + y * 13) % 256) as f64 / 255.0).unwrap();
        assert_eq!(standardize(&img).unwrap(), img);

        let c = GrayImage::filled(512, 512, 0.37).unwrap();
        let s = standardize(&c).unwrap();
        assert_eq!((s.width(), s.height()), (256, 256));
        assert!(s.values().iter().all(|&v| (v - 0.37).abs() < 1e-12));
    }

    #[test]
    fn standardize_rejects_tiny() {
        let img = GrayImage::filled(15, 100, 0.5).unwrap();
        assert!(matches!(standardize(&img), Err(Error::ImageTooSmall { .. })));
        assert!(standardize(&GrayImage::filled(16, 16, 0.5).unwrap()).is_ok());
    }

    #[test]
    fn blur_rejects_bad_sigma() {
        let img = GrayImage::filled(4, 4, 0.5).unwrap();
        assert!(matches!(gaussian_blur(&img, 0.0), Err(Error::InvalidSigma(_))));
        assert!(matches!(gaussian_blur(&img, -1.0), Err(Error::InvalidSigma(_))));
        assert!(matches!(gaussian_blur(&img, f64::NAN), Err(Error::InvalidSigma(_))));
    }

    #[test]
    fn blur_preserves_constant() {
        let img = GrayImage::filled(20, 13, 0.42).unwrap();
        for sigma in [0.3, 1.0, 2.5, 7.0] {
            let b = gaussian_blur(&img, sigma).unwrap();
            assert!(b.values().iter().all(|&v| (v - 0.42).abs() < 1e-12));
        }
    }

    #[test]
    fn kernel_radius_and_sum() {
        let k = gaussian_kernel(1.4).unwrap();
        assert_eq!(k.len(), 2 * 5 + 1);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_impulse_is_kernel() {
        let img = GrayImage::from_fn(9, 9, |x, y| if x == 4 && y == 4 { 1.0 } else { 0.0 }).unwrap();
        let l = laplacian_filter(&img);
        assert_eq!(l.get(4, 4), -4.0);
        for (x, y) in [(3, 4), (5, 4), (4, 3), (4, 5)] {
            assert_eq!(l.get(x, y), 1.0);
        }
        assert_eq!(l.get(3, 3), 0.0);
        assert_eq!(l.values().iter().filter(|v| **v != 0.0).count(), 5);
    }

    #[test]
    fn laplacian_of_ramp_vanishes_inside() {
        let w = 32;
        let img = GrayImage::from_fn(w, 20, |x, _| x as f64 / w as f64).unwrap();
        let l = laplacian_filter(&img);
        for y in 0..20 {
            for x in 1..w - 1 {
                assert!(l.get(x, y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dft_of_constant_is_dc_only() {
        let (m, n) = (12, 10);
        let img = GrayImage::filled(m, n, 0.25).unwrap();
        let f = dft2_magnitude(&img);
        assert!((f.get(0, 0) - 0.25 * (m * n) as f64).abs() < 1e-9);
        for (i, v) in f.values().iter().enumerate().skip(1) {
            assert!(v.abs() < 1e-6, "entry {i} = {v}");
        }
    }

    #[test]
    fn dft_of_cosine_has_two_peaks() {
        let (m, n, k) = (32, 8, 5);
        let img = GrayImage::from_fn(m, n, |x, _| {
            0.5 + 0.5 * (2.0 * std::f64::consts::PI * (k * x) as f64 / m as f64).cos()
        })
        .unwrap();
        let f = dft2_magnitude(&img);
        // DC carries the 0.5 offset; the cosine contributes at u = ±k, v = 0.
        let expected_peak = 0.25 * (m * n) as f64;
        assert!((f.get(k, 0) - expected_peak).abs() < 1e-9);
        assert!((f.get(m - k, 0) - expected_peak).abs() < 1e-9);
        let nonzero: Vec<_> = (0..m * n).filter(|&i| i != 0 && f.values()[i] > 1e-6).collect();
        assert_eq!(nonzero, vec![k, m - k]);
    }

    #[test]
    fn rotation_round_trips() {
        let img = GrayImage::from_fn(5, 3, |x, y| (x + 5 * y) as f64 / 15.0).unwrap();
        let r1 = img.rotate90(1);
        assert_eq!((r1.width(), r1.height()), (3, 5));
        // top-left of a clockwise rotation is the old bottom-left
        assert_eq!(r1.get(0, 0), img.get(0, 2));
        assert_eq!(r1.rotate90(3), img);
        assert_eq!(img.rotate90(2).rotate90(2), img);
        assert_eq!(r1.rotate90(1), img.rotate90(2));
    }
}
