#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(parsed) = ccapm_core::io::parse_stats_json(data) {
        let _ = ccapm_core::calibration::build_system(&parsed.stats.into());
    }
    let _ = ccapm_core::io::parse_stats(data);
});
