//! Calibration: turns raw measure vectors into pentagon radii.
//!
//! A [`CalibrationProfile`] stores the real-corpus means used for
//! normalization, the measures that are inverted, the re-scaling weights
//! that make the fake-corpus mean pentagon regular, the cyclic order of the
//! radii, and the decision threshold.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Measure, MeasureVector};

/// Format tag written to and required from profile files.
pub const PROFILE_VERSION: &str = "irs-profile/1";
/// Default decision threshold.
pub const DEFAULT_THRESHOLD: f64 = 3.0;
/// Upper bound on any single calibrated radius.
pub const DEFAULT_RADIUS_CLAMP: f64 = 3.0;
/// Denominator floor applied before taking a multiplicative inverse.
pub const INVERSION_FLOOR: f64 = 1e-9;
/// Measures replaced by their multiplicative inverse after normalization.
pub const INVERTED_MEASURES: [Measure; 3] = [Measure::GlcmEnergy, Measure::Vbm, Measure::Ms];

/// Reference pairwise correlations of the five raw measures over a large
/// natural-image corpus, in [`Measure`] index order.
pub const REFERENCE_CORRELATION: [[f64; 5]; 5] = [
    // GLCM_C  GLCM_E   CED    VBM    MS
    [1.00, -0.13, 0.76, 0.20, 0.14],
    [-0.13, 1.00, -0.28, 0.21, -0.35],
    [0.76, -0.28, 1.00, 0.05, 0.21],
    [0.20, 0.21, 0.05, 1.00, -0.07],
    [0.14, -0.35, 0.21, -0.07, 1.00],
];

/// Reference mean calibrated (normalized and inverted) fake-image vector,
/// whose reciprocals are the default re-scaling weights.
pub const REFERENCE_FAKE_MEANS: [f64; 5] = [0.43, 0.97, 0.64, 0.90, 0.98];

pub fn is_inverted(m: Measure) -> bool {
    INVERTED_MEASURES.contains(&m)
}

/// Symmetric 5×5 Pearson correlation matrix in [`Measure`] index order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationMatrix([[f64; 5]; 5]);

impl CorrelationMatrix {
    /// Validates symmetry, unit diagonal and the `[-1, 1]` range.
    pub fn new(m: [[f64; 5]; 5]) -> Result<Self> {
        for i in 0..5 {
            if (m[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidProfile(format!(
                    "correlation diagonal {i} is {}",
                    m[i][i]
                )));
            }
            for j in 0..5 {
                let v = m[i][j];
                if !(-1.0..=1.0).contains(&v) || (v - m[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidProfile(format!("bad correlation entry ({i},{j}) = {v}")));
                }
            }
        }
        Ok(Self(m))
    }

    /// The reference matrix.
    pub fn reference() -> Self {
        Self(REFERENCE_CORRELATION)
    }

    pub fn get(&self, a: Measure, b: Measure) -> f64 {
        self.0[a.index()][b.index()]
    }

    pub fn as_array(&self) -> &[[f64; 5]; 5] {
        &self.0
    }
}

/// Pairwise Pearson correlations of the raw measures.
pub fn correlation_matrix(samples: &[MeasureVector]) -> Result<CorrelationMatrix> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let cols: Vec<[f64; 5]> = samples.iter().map(MeasureVector::to_array).collect();
    let mut mean = [0.0; 5];
    for c in &cols {
        for k in 0..5 {
            mean[k] += c[k];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut cov = [[0.0; 5]; 5];
    for c in &cols {
        for i in 0..5 {
            let di = c[i] - mean[i];
            for j in i..5 {
                cov[i][j] += di * (c[j] - mean[j]);
            }
        }
    }
    for m in Measure::ALL {
        let var = cov[m.index()][m.index()];
        let scale = cols.iter().map(|c| c[m.index()].abs()).fold(0.0, f64::max);
        if !(var > (scale * scale) * n * 1e-24) {
            return Err(Error::DegenerateColumn(m));
        }
    }

    let mut r = [[0.0; 5]; 5];
    for i in 0..5 {
        r[i][i] = 1.0;
        for j in i + 1..5 {
            let v = (cov[i][j] / (cov[i][i].sqrt() * cov[j][j].sqrt())).clamp(-1.0, 1.0);
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(CorrelationMatrix(r))
}

/// Cyclic assignment of the five measures to pentagon slots `m1..m5`.
///
/// Stored canonically: `GLCM_C` occupies slot 1 and, of its two cycle
/// neighbours, the one with the lower measure index occupies slot 2. Two
/// orderings are equal iff they describe the same cycle up to rotation and
/// reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Measure>", into = "Vec<Measure>")]
pub struct Ordering([Measure; 5]);

impl Ordering {
    /// Canonicalizes any cyclic arrangement of the five measures.
    pub fn new(slots: [Measure; 5]) -> Result<Self> {
        let mut seen = [false; 5];
        for m in slots {
            if std::mem::replace(&mut seen[m.index()], true) {
                return Err(Error::InvalidOrdering(format!("{m} appears twice")));
            }
        }
        let start = slots.iter().position(|&m| m == Measure::GlcmContrast).unwrap();
        let mut rotated: [Measure; 5] = std::array::from_fn(|i| slots[(start + i) % 5]);
        if rotated[1] > rotated[4] {
            rotated[1..].reverse();
        }
        Ok(Self(rotated))
    }

    pub fn slots(&self) -> [Measure; 5] {
        self.0
    }

    pub fn slot(&self, i: usize) -> Measure {
        self.0[i]
    }

    /// The five adjacent slot pairs (1,2), (2,3), (3,4), (4,5), (5,1).
    pub fn adjacent_pairs(&self) -> [(Measure, Measure); 5] {
        std::array::from_fn(|i| (self.0[i], self.0[(i + 1) % 5]))
    }

    /// Sum of signed correlations over the five adjacent pairs.
    pub fn adjacency_sum(&self, corr: &CorrelationMatrix) -> f64 {
        self.adjacent_pairs().iter().map(|&(a, b)| corr.get(a, b)).sum()
    }

    /// Places per-measure values into slot order.
    pub fn arrange(&self, values: &MeasureVector) -> [f64; 5] {
        self.0.map(|m| values.get(m))
    }

    /// Whether `a` and `b` occupy neighbouring slots.
    pub fn are_adjacent(&self, a: Measure, b: Measure) -> bool {
        self.adjacent_pairs()
            .iter()
            .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    }
}

impl TryFrom<Vec<Measure>> for Ordering {
    type Error = Error;

    fn try_from(v: Vec<Measure>) -> Result<Self> {
        let slots: [Measure; 5] = v
            .try_into()
            .map_err(|v: Vec<Measure>| Error::InvalidOrdering(format!("expected 5 measures, got {}", v.len())))?;
        Ordering::new(slots)
    }
}

impl From<Ordering> for Vec<Measure> {
    fn from(o: Ordering) -> Self {
        o.0.to_vec()
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<_> = self.0.iter().map(|m| m.label()).collect();
        f.write_str(&labels.join("-"))
    }
}

/// The 12 distinct cyclic arrangements of five labelled radii, in canonical
/// lexicographic order.
pub fn enumerate_cyclic_orders() -> Vec<Ordering> {
    let rest = [Measure::GlcmEnergy, Measure::Ced, Measure::Vbm, Measure::Ms];
    let mut out = Vec::with_capacity(12);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let idx = [a, b, c, d];
                    if (0..4).any(|i| idx[i + 1..].contains(&idx[i])) {
                        continue;
                    }
                    let slots = [Measure::GlcmContrast, rest[a], rest[b], rest[c], rest[d]];
                    // keep only the canonical representative of each reflection pair
                    if slots[1] < slots[4] {
                        out.push(Ordering(slots));
                    }
                }
            }
        }
    }
    out
}

/// The cyclic order maximizing the summed adjacent-pair correlation; ties go
/// to the lexicographically first canonical ordering.
pub fn select_ordering(corr: &CorrelationMatrix) -> Ordering {
    let mut best: Option<(f64, Ordering)> = None;
    for o in enumerate_cyclic_orders() {
        let s = o.adjacency_sum(corr);
        match best {
            Some((b, _)) if s <= b + 1e-12 => {}
            _ => best = Some((s, o)),
        }
    }
    best.expect("twelve orderings").1
}

/// Calibrated radii in the profile's slot order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RadiiVector(pub [f64; 5]);

impl RadiiVector {
    pub fn values(&self) -> [f64; 5] {
        self.0
    }
}

/// Everything needed to map a [`MeasureVector`] to an IRS.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileFile", into = "ProfileFile")]
pub struct CalibrationProfile {
    real_means: MeasureVector,
    fake_calibrated_means: MeasureVector,
    weights: MeasureVector,
    ordering: Ordering,
    threshold: f64,
    radius_clamp: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    version: String,
    real_means: MeasureVector,
    inversion_mask: Vec<Measure>,
    fake_calibrated_means: MeasureVector,
    weights: MeasureVector,
    ordering: Ordering,
    threshold: f64,
    radius_clamp: f64,
}

impl From<CalibrationProfile> for ProfileFile {
    fn from(p: CalibrationProfile) -> Self {
        ProfileFile {
            version: PROFILE_VERSION.to_string(),
            real_means: p.real_means,
            inversion_mask: INVERTED_MEASURES.to_vec(),
            fake_calibrated_means: p.fake_calibrated_means,
            weights: p.weights,
            ordering: p.ordering,
            threshold: p.threshold,
            radius_clamp: p.radius_clamp,
        }
    }
}

impl TryFrom<ProfileFile> for CalibrationProfile {
    type Error = Error;

    fn try_from(f: ProfileFile) -> Result<Self> {
        if f.version != PROFILE_VERSION {
            return Err(Error::InvalidProfile(format!(
                "unsupported version {:?}, expected {PROFILE_VERSION:?}",
                f.version
            )));
        }
        let mut mask = f.inversion_mask.clone();
        mask.sort();
        if mask != INVERTED_MEASURES {
            return Err(Error::InvalidProfile(format!(
                "inversion mask must be {INVERTED_MEASURES:?}, got {:?}",
                f.inversion_mask
            )));
        }
        let p = CalibrationProfile {
            real_means: f.real_means,
            fake_calibrated_means: f.fake_calibrated_means,
            weights: f.weights,
            ordering: f.ordering,
            threshold: f.threshold,
            radius_clamp: f.radius_clamp,
        };
        p.validate()?;
        Ok(p)
    }
}

impl CalibrationProfile {
    /// Assembles a profile with weights set to the reciprocals of
    /// `fake_calibrated_means`.
    pub fn from_parts(
        real_means: MeasureVector,
        fake_calibrated_means: MeasureVector,
        ordering: Ordering,
        threshold: f64,
        radius_clamp: f64,
    ) -> Result<Self> {
        let p = CalibrationProfile {
            real_means,
            fake_calibrated_means,
            weights: fake_calibrated_means.map(|_, v| 1.0 / v),
            ordering,
            threshold,
            radius_clamp,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: &MeasureVector| -> Result<()> {
            for m in Measure::ALL {
                let x = v.get(m);
                if !(x.is_finite() && x > 0.0) {
                    return Err(Error::InvalidProfile(format!(
                        "{name}.{} must be finite and positive, got {x}",
                        m.key()
                    )));
                }
            }
            Ok(())
        };
        positive("real_means", &self.real_means)?;
        positive("fake_calibrated_means", &self.fake_calibrated_means)?;
        positive("weights", &self.weights)?;
        for m in Measure::ALL {
            let prod = self.weights.get(m) * self.fake_calibrated_means.get(m);
            if (prod - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidProfile(format!(
                    "weight of {} is not the reciprocal of its fake mean (product {prod})",
                    m.key()
                )));
            }
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "threshold must be positive, got {}",
                self.threshold
            )));
        }
        if !(self.radius_clamp.is_finite() && self.radius_clamp > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "radius_clamp must be positive, got {}",
                self.radius_clamp
            )));
        }
        Ok(())
    }

    pub fn real_means(&self) -> &MeasureVector {
        &self.real_means
    }

    pub fn fake_calibrated_means(&self) -> &MeasureVector {
        &self.fake_calibrated_means
    }

    pub fn weights(&self) -> &MeasureVector {
        &self.weights
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn radius_clamp(&self) -> f64 {
        self.radius_clamp
    }

    pub fn inversion_mask(&self) -> [Measure; 3] {
        INVERTED_MEASURES
    }

    /// Copy with a different decision threshold.
    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        let p = CalibrationProfile {
            threshold,
            ..self.clone()
        };
        p.validate()?;
        Ok(p)
    }

    /// Copy with a different slot ordering.
    pub fn with_ordering(&self, ordering: Ordering) -> Self {
        CalibrationProfile {
            ordering,
            ..self.clone()
        }
    }

    /// Copy with every weight multiplied by `factor`; fake means follow as
    /// reciprocals so the profile stays consistent.
    pub fn with_scaled_weights(&self, factor: f64) -> Result<Self> {
        let weights = self.weights.map(|_, w| w * factor);
        let p = CalibrationProfile {
            weights,
            fake_calibrated_means: weights.map(|_, w| 1.0 / w),
            ..self.clone()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("profile serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProfileFile = serde_json::from_str(text)?;
        Self::try_from(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::MissingReferenceFile(path.to_path_buf()))
            }
            Err(e) => return Err(Error::io(path, e)),
        };
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

const DEFAULT_PROFILE_JSON: &str = include_str!("../data/default_profile.json");

/// The bundled profile: reference weights and ordering, threshold 3.0, and
/// real-corpus means measured on the bundled photo set.
pub fn default_profile() -> Result<CalibrationProfile> {
    CalibrationProfile::from_json(DEFAULT_PROFILE_JSON)
}

/// Normalizes by the real means and inverts the masked measures (no weights).
pub fn normalize_and_invert(v: &MeasureVector, real_means: &MeasureVector) -> MeasureVector {
    v.map(|m, x| {
        let r = x / real_means.get(m);
        if is_inverted(m) {
            1.0 / r.max(INVERSION_FLOOR)
        } else {
            r
        }
    })
}

/// Normalized, inverted and weighted values before the radius clamp.
pub fn weighted_values(v: &MeasureVector, profile: &CalibrationProfile) -> MeasureVector {
    normalize_and_invert(v, &profile.real_means).map(|m, r| r * profile.weights.get(m))
}

/// Per-measure calibrated radii (weighted and clamped), keyed by measure.
pub fn calibrated_values(v: &MeasureVector, profile: &CalibrationProfile) -> MeasureVector {
    weighted_values(v, profile).map(|_, w| {
        if w.is_nan() {
            profile.radius_clamp
        } else {
            w.clamp(0.0, profile.radius_clamp)
        }
    })
}

/// Calibrated radii in slot order.
pub fn calibrate_vector(v: &MeasureVector, profile: &CalibrationProfile) -> RadiiVector {
    RadiiVector(profile.ordering.arrange(&calibrated_values(v, profile)))
}

/// Builds a profile from a real and a fake corpus of raw measure vectors.
pub fn compute_profile(real: &[MeasureVector], fake: &[MeasureVector], threshold: f64) -> Result<CalibrationProfile> {
    let real_means = MeasureVector::mean(real).ok_or(Error::EmptyCorpus("real"))?;
    if fake.is_empty() {
        return Err(Error::EmptyCorpus("fake"));
    }
    for m in Measure::ALL {
        let v = real_means.get(m);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::ZeroRealMean(m));
        }
    }
    let calibrated: Vec<_> = fake.iter().map(|v| normalize_and_invert(v, &real_means)).collect();
    let fake_means = MeasureVector::mean(&calibrated).expect("non-empty");
    for m in Measure::ALL {
        let v = fake_means.get(m);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::ZeroFakeMean(m));
        }
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let ordering = select_ordering(&correlation_matrix(real)?);
    CalibrationProfile::from_parts(real_means, fake_means, ordering, threshold, DEFAULT_RADIUS_CLAMP)
}
