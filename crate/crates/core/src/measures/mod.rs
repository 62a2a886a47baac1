//! The five image statistics combined by the realism score.
//!
//! Every measure is computed on a standardized 256×256 gray image:
//!
//! | measure         | definition                                            |
//! |-----------------|-------------------------------------------------------|
//! | `glcm_contrast` | `Σ (i-j)² P(i,j)` over a 64-level symmetric GLCM      |
//! | `glcm_energy`   | `Σ P(i,j)²`                                           |
//! | `ced`           | Canny edge pixels / total pixels                      |
//! | `vbm`           | population variance of the 4-neighbour Laplacian      |
//! | `ms`            | mean magnitude of the unnormalized 2-D DFT (with DC)  |

mod canny;
mod glcm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgproc::{dft2_magnitude, laplacian_filter, GrayImage};

pub use canny::{canny, canny_edge_density, EdgeMask, CANNY_HIGH_RATIO, CANNY_LOW_RATIO, CANNY_SIGMA};
pub use glcm::{glcm, glcm_contrast, glcm_energy, quantize, GlcmMatrix, LevelImage};

/// Gray levels used for the GLCM statistics.
pub const GLCM_LEVELS: usize = 64;

/// The four unit-distance directions; counted symmetrically this set is
/// closed under 90° rotation.
pub const GLCM_OFFSETS: [(isize, isize); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// One of the five statistics, in canonical index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    GlcmContrast,
    GlcmEnergy,
    Ced,
    Vbm,
    Ms,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::GlcmContrast,
        Measure::GlcmEnergy,
        Measure::Ced,
        Measure::Vbm,
        Measure::Ms,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Measure> {
        Self::ALL.get(i).copied()
    }

    /// Field name used in files and reports.
    pub fn key(self) -> &'static str {
        match self {
            Measure::GlcmContrast => "glcm_contrast",
            Measure::GlcmEnergy => "glcm_energy",
            Measure::Ced => "ced",
            Measure::Vbm => "vbm",
            Measure::Ms => "ms",
        }
    }

    /// Short axis label for tables and plots.
    pub fn label(self) -> &'static str {
        match self {
            Measure::GlcmContrast => "GLCM_C",
            Measure::GlcmEnergy => "GLCM_E",
            Measure::Ced => "CED",
            Measure::Vbm => "VBM",
            Measure::Ms => "MS",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.key().eq_ignore_ascii_case(s) || m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidOrdering(format!("unknown measure {s:?}")))
    }
}

/// Five values keyed by measure.
///
/// Holds raw statistics of one image, and is reused for the per-measure
/// means and weights stored in a calibration profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureVector {
    pub glcm_contrast: f64,
    pub glcm_energy: f64,
    pub ced: f64,
    pub vbm: f64,
    pub ms: f64,
}

impl MeasureVector {
    pub fn from_array(a: [f64; 5]) -> Self {
        Self {
            glcm_contrast: a[0],
            glcm_energy: a[1],
            ced: a[2],
            vbm: a[3],
            ms: a[4],
        }
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.glcm_contrast, self.glcm_energy, self.ced, self.vbm, self.ms]
    }

    pub fn get(&self, m: Measure) -> f64 {
        self.to_array()[m.index()]
    }

    pub fn splat(v: f64) -> Self {
        Self::from_array([v; 5])
    }

    pub fn map(&self, f: impl Fn(Measure, f64) -> f64) -> Self {
        let a = self.to_array();
        Self::from_array(std::array::from_fn(|i| f(Measure::ALL[i], a[i])))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Componentwise arithmetic mean; `None` for an empty slice.
    pub fn mean(samples: &[MeasureVector]) -> Option<MeasureVector> {
        if samples.is_empty() {
            return None;
        }
        let mut acc = [0.0; 5];
        for s in samples {
            for (a, v) in acc.iter_mut().zip(s.to_array()) {
                *a += v;
            }
        }
        let n = samples.len() as f64;
        Some(Self::from_array(acc.map(|a| a / n)))
    }
}

/// Population variance of the Laplacian response.
pub fn variance_blur_measure(img: &GrayImage) -> f64 {
    let lap = laplacian_filter(img);
    population_variance(lap.values())
}

pub(crate) fn population_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Mean DFT magnitude over the full spectrum, DC included.
pub fn mean_spectrum(img: &GrayImage) -> f64 {
    let f = dft2_magnitude(img);
    f.values().iter().sum::<f64>() / f.values().len() as f64
}

/// GLCM over [`GLCM_LEVELS`] levels and [`GLCM_OFFSETS`].
pub fn texture_glcm(img: &GrayImage) -> Result<GlcmMatrix> {
    glcm(&quantize(img, GLCM_LEVELS)?, &GLCM_OFFSETS)
}

/// All five statistics of a (standardized) gray image.
pub fn measure_vector(img: &GrayImage) -> Result<MeasureVector> {
    let p = texture_glcm(img)?;
    let (_, ced) = canny_edge_density(img);
    Ok(MeasureVector {
        glcm_contrast: glcm_contrast(&p),
        glcm_energy: glcm_energy(&p),
        ced,
        vbm: variance_blur_measure(img),
        ms: mean_spectrum(img),
    })
}
