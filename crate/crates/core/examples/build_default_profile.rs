//! Regenerates `data/default_profile.json`.
//!
//! Real-image means are measured on `tests/data/photos`; the fake-side
//! means, weights and ordering are the fixed reference values.
//!
//! ```text
//! cargo run --release -p irs-core --example build_default_profile
//! ```

use std::path::Path;

use irs_core::calibration::{
    select_ordering, CalibrationProfile, CorrelationMatrix, DEFAULT_RADIUS_CLAMP, DEFAULT_THRESHOLD,
    REFERENCE_FAKE_MEANS,
};
use irs_core::harness::{ingest_corpus, measure_corpus};
use irs_core::MeasureVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let corpus = ingest_corpus(&root.join("tests/data/photos"), None, "photos")?;
    let measured = measure_corpus(&corpus, std::thread::available_parallelism().map_or(1, |n| n.get()))?;
    if !measured.failures.is_empty() {
        return Err(format!("{} photos failed to load", measured.failures.len()).into());
    }
    let real_means = MeasureVector::mean(&measured.vectors()).ok_or("no photos")?;
    let profile = CalibrationProfile::from_parts(
        real_means,
        MeasureVector::from_array(REFERENCE_FAKE_MEANS),
        select_ordering(&CorrelationMatrix::reference()),
        DEFAULT_THRESHOLD,
        DEFAULT_RADIUS_CLAMP,
    )?;
    let out = root.join("data/default_profile.json");
    profile.save(&out)?;
    eprintln!("{} photos -> {}", measured.entries.len(), out.display());
    Ok(())
}
