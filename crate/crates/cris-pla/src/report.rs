//! CSV artifacts: score samples, detection-error curves, and the run
//! summary, plus a gnuplot index for reproduced figure grids.
//!
//! All floats serialize through Rust's shortest round-trip `Display`, so
//! re-reading a file recovers the exact values; files are UTF-8 with LF line
//! endings, comma separators, and `.` decimal points.

use std::fmt::Write as _;

use crate::pla::{DetCurve, DetPoint, ScoreSamples};

/// Errors from re-reading emitted CSV files.
#[derive(Debug, thiserror::Error)]
pub enum CsvReadError {
    #[error("line {line}: expected {expected} fields, got {got}")]
    FieldCount { line: usize, expected: usize, got: usize },

    #[error("line {line}: bad {column}: {source}")]
    BadNumber {
        line: usize,
        column: &'static str,
        source: std::num::ParseFloatError,
    },

    #[error("line {line}: hypothesis must be h0 or h1, got '{got}'")]
    BadHypothesis { line: usize, got: String },

    #[error("line {line}: score must be finite and nonnegative, got {value}")]
    InvalidScore { line: usize, value: f64 },

    #[error("missing header line")]
    MissingHeader,

    #[error("unexpected header '{0}'")]
    BadHeader(String),
}

pub const SCORES_HEADER: &str = "trial,hypothesis,score";
pub const DET_HEADER: &str = "gamma,pfa,pmd";
pub const SUMMARY_HEADER: &str = "plan_id,scenario,n_elements,attacker,eer,runtime_s";

/// Scores CSV body: all h0 rows (by trial), then all h1 rows.
pub fn scores_csv(samples: &ScoreSamples) -> String {
    let mut out = String::with_capacity(32 * (samples.h0_scores.len() + samples.h1_scores.len()));
    out.push_str(SCORES_HEADER);
    out.push('\n');
    for (hypothesis, scores) in [("h0", &samples.h0_scores), ("h1", &samples.h1_scores)] {
        for (trial, score) in scores.iter().enumerate() {
            let _ = writeln!(out, "{trial},{hypothesis},{score}");
        }
    }
    out
}

/// Parses a scores CSV back into `(h0, h1)` score lists.
pub fn read_scores_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>), CsvReadError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(CsvReadError::MissingHeader)?;
    if header.trim_end() != SCORES_HEADER {
        return Err(CsvReadError::BadHeader(header.to_string()));
    }
    let mut h0 = Vec::new();
    let mut h1 = Vec::new();
    for (idx, row) in lines {
        let line = idx + 1;
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(CsvReadError::FieldCount { line, expected: 3, got: fields.len() });
        }
        let score: f64 = fields[2]
            .parse()
            .map_err(|source| CsvReadError::BadNumber { line, column: "score", source })?;
        // Likelihood statistics are sums of squares; anything else violates
        // the file contract and would poison downstream curve building.
        if !score.is_finite() || score < 0.0 {
            return Err(CsvReadError::InvalidScore { line, value: score });
        }
        match fields[1] {
            "h0" => h0.push(score),
            "h1" => h1.push(score),
            other => return Err(CsvReadError::BadHypothesis { line, got: other.to_string() }),
        }
    }
    Ok((h0, h1))
}

/// Detection-error curve CSV body, one row per threshold.
pub fn det_csv(curve: &DetCurve) -> String {
    let mut out = String::with_capacity(32 * curve.points.len());
    out.push_str(DET_HEADER);
    out.push('\n');
    for p in &curve.points {
        let _ = writeln!(out, "{},{},{}", p.gamma, p.pfa, p.pmd);
    }
    out
}

/// Parses a detection-error curve CSV body.
pub fn read_det_csv(text: &str) -> Result<DetCurve, CsvReadError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(CsvReadError::MissingHeader)?;
    if header.trim_end() != DET_HEADER {
        return Err(CsvReadError::BadHeader(header.to_string()));
    }
    let mut points = Vec::new();
    for (idx, row) in lines {
        let line = idx + 1;
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(CsvReadError::FieldCount { line, expected: 3, got: fields.len() });
        }
        let parse = |column: &'static str, s: &str| -> Result<f64, CsvReadError> {
            s.parse()
                .map_err(|source| CsvReadError::BadNumber { line, column, source })
        };
        points.push(DetPoint {
            gamma: parse("gamma", fields[0])?,
            pfa: parse("pfa", fields[1])?,
            pmd: parse("pmd", fields[2])?,
        });
    }
    Ok(DetCurve { points })
}

/// One summary row per evaluated plan.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub plan_id: String,
    pub scenario: String,
    pub n_elements: usize,
    pub attacker: String,
    pub eer: f64,
    pub runtime_s: f64,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.plan_id, r.scenario, r.n_elements, r.attacker, r.eer, r.runtime_s
        );
    }
    out
}

/// A gnuplot script stub that plots every curve of a reproduced figure grid.
pub fn gnuplot_index(figure: &str, entries: &[(String, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# gnuplot index for {figure}; run: gnuplot {figure}_index.gp");
    out.push_str("set datafile separator ','\n");
    out.push_str("set logscale xy\n");
    out.push_str("set xlabel 'P_FA'\nset ylabel 'P_MD'\n");
    let _ = writeln!(out, "set title '{figure} detection error tradeoff'");
    out.push_str("plot \\\n");
    for (i, (file, title)) in entries.iter().enumerate() {
        let sep = if i + 1 == entries.len() { "" } else { ", \\" };
        let _ = writeln!(out, "  '{file}' using 2:3 skip 1 with lines title '{title}'{sep}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cris::StrategyKind;
    use crate::pla::{det_curve, SampleMetadata};

    fn samples() -> ScoreSamples {
        ScoreSamples {
            h0_scores: vec![0.25, 1.5e-13, 3.0],
            h1_scores: vec![0.5, 2.25],
            metadata: SampleMetadata {
                strategy: StrategyKind::DynamicRandom,
                n_elements: 4,
                attacker: "passive_3.40_2.50_3.00".into(),
                seed: 42,
            },
        }
    }

    #[test]
    fn scores_roundtrip_exactly() {
        let s = samples();
        let text = scores_csv(&s);
        assert!(text.starts_with("trial,hypothesis,score\n"));
        assert_eq!(text.lines().count(), 1 + 5);
        let (h0, h1) = read_scores_csv(&text).unwrap();
        assert_eq!(h0, s.h0_scores);
        assert_eq!(h1, s.h1_scores);
    }

    #[test]
    fn det_roundtrip_reproduces_curve_bit_exactly() {
        let s = samples();
        let curve = det_curve(&s, 64).unwrap();
        let text = det_csv(&curve);
        let parsed = read_det_csv(&text).unwrap();
        assert_eq!(parsed, curve);
        // Recomputing the curve from round-tripped scores reproduces the
        // emitted file byte for byte.
        let (h0, h1) = read_scores_csv(&scores_csv(&s)).unwrap();
        let recomputed = det_curve(
            &ScoreSamples { h0_scores: h0, h1_scores: h1, metadata: s.metadata.clone() },
            64,
        )
        .unwrap();
        assert_eq!(det_csv(&recomputed), text);
    }

    #[test]
    fn det_csv_serializes_infinity_row() {
        let s = samples();
        let curve = det_curve(&s, 16).unwrap();
        let text = det_csv(&curve);
        let last_row = text.lines().last().unwrap();
        assert_eq!(last_row, "inf,0,1");
        assert!(read_det_csv(&text).unwrap().points.last().unwrap().gamma.is_infinite());
    }

    #[test]
    fn malformed_rows_rejected_with_line_numbers() {
        let text = "trial,hypothesis,score\n0,h0,1.0\n1,h2,2.0\n";
        match read_scores_csv(text) {
            Err(CsvReadError::BadHypothesis { line, got }) => {
                assert_eq!(line, 3);
                assert_eq!(got, "h2");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_scores_csv("wrong,header\n").is_err());
        assert!(matches!(
            read_scores_csv("trial,hypothesis,score\n0,h0\n"),
            Err(CsvReadError::FieldCount { line: 2, expected: 3, got: 2 })
        ));
        assert!(matches!(
            read_scores_csv("trial,hypothesis,score\n0,h0,abc\n"),
            Err(CsvReadError::BadNumber { line: 2, .. })
        ));
        assert!(matches!(
            read_scores_csv("trial,hypothesis,score\n0,h0,NaN\n"),
            Err(CsvReadError::InvalidScore { line: 2, .. })
        ));
        assert!(matches!(
            read_scores_csv("trial,hypothesis,score\n0,h0,-1.0\n"),
            Err(CsvReadError::InvalidScore { line: 2, .. })
        ));
    }

    #[test]
    fn summary_format() {
        let rows = vec![SummaryRow {
            plan_id: "00ff".into(),
            scenario: "dynamic-random".into(),
            n_elements: 1500,
            attacker: "los_0.10_2.50_0.85".into(),
            eer: 0.0175,
            runtime_s: 1.25,
        }];
        let text = summary_csv(&rows);
        assert_eq!(
            text,
            "plan_id,scenario,n_elements,attacker,eer,runtime_s\n00ff,dynamic-random,1500,los_0.10_2.50_0.85,0.0175,1.25\n"
        );
    }

    #[test]
    fn gnuplot_index_lists_every_entry() {
        let entries = vec![
            ("det_fig6_n960_x2.70.csv".to_string(), "N=960 x=2.70".to_string()),
            ("det_fig6_n960_los.csv".to_string(), "N=960 LoS".to_string()),
        ];
        let text = gnuplot_index("fig6", &entries);
        for (file, _) in &entries {
            assert!(text.contains(file.as_str()));
        }
        assert!(text.contains("set logscale"));
    }
}
