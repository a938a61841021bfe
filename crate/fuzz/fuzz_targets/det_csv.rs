//! Fuzzes the detection-error-curve reader.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(curve) = cris_pla::report::read_det_csv(text) {
        if !curve.points.is_empty() {
            let _ = curve.eer();
        }
    }
});
