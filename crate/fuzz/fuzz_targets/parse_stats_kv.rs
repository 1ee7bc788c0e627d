#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(parsed) = ccapm_core::io::parse_stats_kv(data) {
        // anything accepted must be usable downstream
        let _ = ccapm_core::calibration::build_system(&parsed.stats.into());
    }
});
