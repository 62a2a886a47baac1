#![no_main]

use irs_core::calibration::CalibrationProfile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = CalibrationProfile::from_json(text) {
        let again = CalibrationProfile::from_json(&p.to_json()).expect("re-parse of a written profile");
        assert_eq!(again, p);
    }
});
