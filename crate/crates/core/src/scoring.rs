//! Pentagon-area score and the threshold verdict.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate_vector, CalibrationProfile, RadiiVector};
use crate::error::{Error, Result};
use crate::measures::MeasureVector;

/// Central angle between neighbouring radii.
pub const CENTRAL_ANGLE: f64 = 2.0 * PI / 5.0;

/// Area of the regular pentagon with unit radii, `2.5·sin 72°`.
pub fn unit_pentagon_area() -> f64 {
    2.5 * CENTRAL_ANGLE.sin()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Real,
    Fake,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Real => "Real",
            Label::Fake => "Fake",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Real" | "real" => Ok(Label::Real),
            "Fake" | "fake" => Ok(Label::Fake),
            other => Err(Error::InvalidReport(format!("unknown label {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IrsScore {
    pub value: f64,
    pub radii: RadiiVector,
    /// Triangle areas for slot pairs (1,2), (2,3), (3,4), (4,5), (5,1).
    pub triangle_areas: [f64; 5],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub label: Label,
    pub score: IrsScore,
    pub threshold: f64,
}

/// Sum of the five triangles spanned by adjacent radii at 72° apart.
pub fn pentagon_area(radii: &RadiiVector) -> Result<IrsScore> {
    let r = radii.values();
    for (index, &value) in r.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteRadius { index, value });
        }
        if value < 0.0 {
            return Err(Error::NegativeRadius { index, value });
        }
    }
    let half_sin = 0.5 * CENTRAL_ANGLE.sin();
    let triangle_areas: [f64; 5] = std::array::from_fn(|i| r[i] * r[(i + 1) % 5] * half_sin);
    Ok(IrsScore {
        value: triangle_areas.iter().sum(),
        radii: *radii,
        triangle_areas,
    })
}

/// Image realism score of a raw measure vector under `profile`.
///
/// The per-triangle weight product `w_a·w_b` is folded into the radii, which
/// leaves every triangle area unchanged.
pub fn irs(v: &MeasureVector, profile: &CalibrationProfile) -> Result<IrsScore> {
    pentagon_area(&calibrate_vector(v, profile))
}

/// `Fake` iff the score is strictly below `threshold`.
pub fn classify(score: &IrsScore, threshold: f64) -> Result<Verdict> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let label = if score.value < threshold {
        Label::Fake
    } else {
        Label::Real
    };
    Ok(Verdict {
        label,
        score: *score,
        threshold,
    })
}
