//! Image Realism Score (IRS).
//!
//! Five classical statistics of a grayscale image (GLCM contrast and
//! energy, Canny edge density, variance of the Laplacian, mean Fourier
//! magnitude) are normalized against a reference corpus of real photos,
//! weighted, and laid out as the radii of a pentagon. The pentagon's area
//! is the score; images below a threshold are flagged as generated.
//!
//! ```no_run
//! use irs_core::{analyze_file, calibration::default_profile, scoring::{classify, irs}};
//!
//! let profile = default_profile()?;
//! let v = analyze_file("photo.jpg".as_ref())?;
//! let score = irs(&v, &profile)?;
//! println!("{:.3} {}", score.value, classify(&score, profile.threshold())?.label);
//! # Ok::<(), irs_core::Error>(())
//! ```

pub mod calibration;
pub mod error;
pub mod harness;
pub mod imgproc;
pub mod measures;
pub mod scoring;

pub use calibration::{default_profile, CalibrationProfile, Ordering, RadiiVector};
pub use error::{Error, Result};
pub use harness::{analyze_file, analyze_image, load_standardized};
pub use measures::{measure_vector, Measure, MeasureVector};
pub use scoring::{classify, irs, IrsScore, Label, Verdict};
