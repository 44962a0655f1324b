use earspo2::ingest::{epoch_align, parse_recording, render_recording, score_answers, IngestError, SessionManifest};
use earspo2::record::PpgRecord;
use earspo2::synth::{synthesize_cohort, CohortParams};
use proptest::prelude::*;

fn arb_record() -> impl Strategy<Value = PpgRecord> {
    (1usize..300, prop::sample::select(vec![25.0, 62.5, 100.0, 50.0 / 3.0])).prop_flat_map(|(n, fs)| {
        (
            prop::collection::vec(-1e6f64..1e6, n),
            prop::collection::vec(-1e6f64..1e6, n),
            prop::collection::vec(-1e6f64..1e6, n),
            prop::collection::btree_set(0..n, 0..n.min(20)),
            prop::option::of(0u8..4),
        )
            .prop_map(move |(red, ir, green, marks, level)| {
                // adjacent markers would merge into one rising edge
                let mut sync_markers: Vec<usize> = Vec::new();
                for m in marks {
                    if sync_markers.last().is_none_or(|&p| m > p + 1) {
                        sync_markers.push(m);
                    }
                }
                PpgRecord {
                    sample_rate: fs,
                    red,
                    ir,
                    green,
                    sync_markers,
                    subject_id: "s07".into(),
                    nback_level: level,
                }
            })
    })
}

proptest! {
    #[test]
    fn recording_round_trip_is_bit_exact(record in arb_record()) {
        let parsed = parse_recording(&render_recording(&record)).unwrap();
        prop_assert_eq!(parsed, record);
    }
}

#[test]
fn synthetic_trial_round_trips() {
    let params = CohortParams { n_subjects: 1, ..CohortParams::default() };
    let trial = &synthesize_cohort(&params).unwrap()[2];
    let parsed = parse_recording(&render_recording(&trial.record)).unwrap();
    assert_eq!(parsed, trial.record);
    let slices = epoch_align(&parsed, &trial.manifest).unwrap();
    assert_eq!(slices.len(), 68);
    assert_eq!(slices.iter().filter(|s| s.is_calibration).count(), 6);
}

#[test]
fn short_row_is_reported_with_its_line() {
    let text = "t,red,ir,green,sync\n0.0,1,2,3,0\n0.016,1,2,3\n";
    match parse_recording(text) {
        Err(IngestError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
}

/// A manifest as the browser runner exports it: unanswered epochs are null.
const UI_EXPORT: &str = r#"{
  "format_version": 1,
  "subject_id": "s03",
  "nback_level": 2,
  "sample_rate": 62.5,
  "epoch_seconds": 5.0,
  "total_epochs": 68,
  "calibration_epochs": 6,
  "answers": [null, null, 1, 3, null, 2],
  "truth_counts": [1, 2, 1, 2, 0, 4]
}"#;

#[test]
fn ui_export_parses_and_scores() {
    let m = SessionManifest::from_json(UI_EXPORT).unwrap();
    assert_eq!(m.answers[4], None);
    // epochs 2, 3 and 5 are scored against the counts of epochs 0, 1 and 3:
    // 1 = 1, 3 ≠ 2, 2 = 2
    assert!((score_answers(&m).unwrap() - 100.0 / 3.0).abs() < 1e-12);
    assert_eq!(SessionManifest::from_json(&m.to_json()).unwrap(), m);
}

#[test]
fn schema_violations_are_rejected() {
    for (from, to) in [
        ("\"nback_level\": 2", "\"nback_level\": 5"),
        ("\"total_epochs\": 68", "\"total_epochs\": 3"),
        ("[1, 2, 1, 2, 0, 4]", "[1, 2, 1, 9, 0, 4]"),
        ("\"sample_rate\": 62.5", "\"sample_rate\": -1"),
    ] {
        let bad = UI_EXPORT.replace(from, to);
        assert!(SessionManifest::from_json(&bad).is_err(), "accepted {to}");
    }
    assert!(SessionManifest::from_json("{\"subject_id\": \"s01\"}").is_err());
}

#[test]
fn scripted_three_back_error_rate() {
    // 64 scored epochs, 19 answered wrong: 29.6875%
    let truth: Vec<Option<u8>> = (0..68).map(|i| Some((i * 7 % 5) as u8)).collect();
    let mut answers: Vec<Option<u8>> = vec![None; 3];
    for i in 3..67 {
        let target = truth[i - 3].unwrap();
        answers.push(Some(if (i - 3) % 64 < 19 { (target + 1) % 5 } else { target }));
    }
    let mut m = SessionManifest::new("s01", 3, 62.5);
    m.truth_counts = truth;
    m.answers = answers;
    assert!((score_answers(&m).unwrap() - 29.7).abs() <= 0.1);
}

#[test]
fn simulated_mistake_rates_are_close_to_targets() {
    let params = CohortParams::default();
    let trials = synthesize_cohort(&params).unwrap();
    for level in 0..4u8 {
        let rates: Vec<f64> = trials
            .iter()
            .filter(|t| t.manifest.nback_level == level)
            .map(|t| score_answers(&t.manifest).unwrap())
            .collect();
        let mean = rates.iter().sum::<f64>() / rates.len() as f64;
        let target = 100.0 * params.mistake_rates[level as usize];
        assert!((mean - target).abs() < 6.0, "level {level}: {mean} vs {target}");
    }
}
