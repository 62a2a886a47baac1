#![no_main]

use irs_core::harness::{read_report_json, write_report, ReportFormat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_report_json(data) {
        let mut out = Vec::new();
        if write_report(&records, ReportFormat::Json, &mut out).is_ok() {
            let _ = read_report_json(&out);
        }
    }
});
