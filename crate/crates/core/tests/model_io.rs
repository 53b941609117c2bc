use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riskforge::fixtures::{self, random_model, GenConfig};
use riskforge::reports::{emit_fmea_document, emit_priority_report, FMEA_COLUMNS};
use riskforge::{parse_model, run_procedure, serialize_model, Format};

fn model_from(seed: u64) -> riskforge::DesignModel {
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), GenConfig::default())
}

#[test]
fn sample_models_round_trip() {
    for model in [fixtures::camera_model(), fixtures::smartphone_model()] {
        let text = serialize_model(&model);
        assert_eq!(parse_model(&text).unwrap(), model);
        assert_eq!(serialize_model(&parse_model(&text).unwrap()), text);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let text = serialize_model(&fixtures::camera_model())
        .replace("\"f_exec\"\n    ]", "\"f_nope\"\n    ]");
    let errors = parse_model(&text).unwrap_err();
    assert!(!errors.is_empty());
    for err in &errors {
        assert!(err.line >= 1 && err.column >= 1);
        let line = text.lines().nth(err.line - 1).unwrap();
        assert!(err.column <= line.len() + 1);
    }
}

#[test]
fn empty_input_is_a_parse_error() {
    let errors = parse_model("").unwrap_err();
    assert_eq!(errors.len(), 1);
    assert_eq!((errors[0].line, errors[0].column), (1, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip(seed in any::<u64>()) {
        let model = model_from(seed);
        let text = serialize_model(&model);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &model);
        prop_assert_eq!(serialize_model(&back), text);
    }

    #[test]
    fn csv_artifacts_read_back(seed in any::<u64>()) {
        let model = model_from(seed);
        let bundle = run_procedure(&model).unwrap();
        let mut total = 0;
        for doc in bundle.documents() {
            let text = emit_fmea_document(doc, Format::Csv);
            let mut reader = csv::Reader::from_reader(text.as_bytes());
            let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
            prop_assert_eq!(header, FMEA_COLUMNS.to_vec());
            let records: Vec<_> = reader.records().map(Result::unwrap).collect();
            prop_assert_eq!(records.len(), doc.rows.len());
            for (record, row) in records.iter().zip(&doc.rows) {
                prop_assert_eq!(&record[1], row.element_text.as_str());
                prop_assert_eq!(&record[4], row.description.as_str());
                prop_assert_eq!(record[11].to_string(), row.rpn.to_string());
            }
            total += records.len();
        }
        prop_assert_eq!(total, model.failure_modes.len());

        for report in [&bundle.requirement_priority, &bundle.function_priority] {
            let text = emit_priority_report(report, Format::Csv);
            let mut reader = csv::Reader::from_reader(text.as_bytes());
            let texts: Vec<String> = reader
                .records()
                .map(|r| r.unwrap()[1].to_string())
                .collect();
            let expected: Vec<String> = report.rows.iter().map(|r| r.element_text.clone()).collect();
            prop_assert_eq!(texts, expected);
        }
    }

    #[test]
    fn json_artifacts_are_valid(seed in any::<u64>()) {
        let bundle = run_procedure(&model_from(seed)).unwrap();
        for (name, text) in bundle.artifacts(Format::Json) {
            prop_assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok(), "{}", name);
        }
    }
}
