//! Fuzzes the experiment configuration parser: parsing, validation, and
//! plan resolution must never panic on arbitrary input.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = cris_pla::config::parse_config(text) {
        let _ = config.validate();
        let _ = config.resolve_plans();
    }
});
