#![no_main]

use ccapm_core::io::Report;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(report) = Report::from_json(data) {
        let _ = report.to_text();
        let again = Report::from_json(&report.to_json()).expect("re-serialized report must parse");
        assert_eq!(again.command, report.command);
    }
});
