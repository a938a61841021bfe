//! Fuzzes `--set key=value` handling: each input line is applied as an
//! override to a minimal document, then the result is deserialized.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let overrides: Vec<String> = text.lines().map(str::to_string).collect();
    if let Ok(config) = cris_pla::config::parse_config_with_overrides("schema_version = 1\n", &overrides) {
        let _ = config.validate();
    }
});
