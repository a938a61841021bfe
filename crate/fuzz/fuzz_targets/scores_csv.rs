//! Fuzzes the score-file reader; accepted files must survive curve building.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((h0, h1)) = cris_pla::report::read_scores_csv(text) {
        if !h0.is_empty() && !h1.is_empty() {
            let samples = cris_pla::pla::ScoreSamples {
                h0_scores: h0,
                h1_scores: h1,
                metadata: cris_pla::pla::SampleMetadata {
                    strategy: cris_pla::StrategyKind::FixedCyclic,
                    n_elements: 0,
                    attacker: String::new(),
                    seed: 0,
                },
            };
            let curve = cris_pla::pla::det_curve(&samples, 64).expect("non-empty scores");
            let _ = curve.eer();
        }
    }
});
