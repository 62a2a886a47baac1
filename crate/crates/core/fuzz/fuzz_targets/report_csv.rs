#![no_main]

use irs_core::harness::{read_report_csv, write_report, ReportFormat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_report_csv(data) {
        let mut out = Vec::new();
        write_report(&records, ReportFormat::Csv, &mut out).expect("write to memory");
        let again = read_report_csv(&out).expect("re-parse of a written report");
        assert_eq!(again.len(), records.len());
    }
});
