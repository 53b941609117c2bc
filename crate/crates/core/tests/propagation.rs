use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riskforge::analysis::{
    analyze, assign_detection, backward_occurrence, forward_severity, oracle_propagate, RankMap,
};
use riskforge::fixtures::{permuted, random_model, GenConfig};
use riskforge::model::MappingEdge;
use riskforge::{validate_model, DesignModel, ElementDomain, Strictness};

fn model_from(seed: u64) -> DesignModel {
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), GenConfig::default())
}

fn dominates(bigger: &RankMap, smaller: &RankMap) -> bool {
    smaller
        .iter()
        .all(|(id, rank)| bigger.get(id).is_some_and(|b| b >= rank))
}

/// Adds one rf or fc edge that is not already present, if any is missing.
fn with_extra_edge(model: &DesignModel, rng: &mut impl Rng) -> Option<DesignModel> {
    let mut candidates = Vec::new();
    for r in &model.requirements {
        for f in &model.functions {
            let edge = MappingEdge::new(r.id.clone(), f.id.clone());
            if !model.rf.contains(&edge) {
                candidates.push((true, edge));
            }
        }
    }
    for f in &model.functions {
        for c in &model.components {
            let edge = MappingEdge::new(f.id.clone(), c.id.clone());
            if !model.fc.contains(&edge) {
                candidates.push((false, edge));
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let (is_rf, edge) = candidates.swap_remove(rng.gen_range(0..candidates.len()));
    let mut out = model.clone();
    if is_rf {
        out.rf.push(edge);
    } else {
        out.fc.push(edge);
    }
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_models_are_analysis_ready(seed in any::<u64>()) {
        let model = model_from(seed);
        let report = validate_model(&model, Strictness::AnalysisReady);
        prop_assert!(!report.has_errors(), "{:?}", report.findings);
        prop_assert!(analyze(&model).is_ok());
    }

    #[test]
    fn propagation_matches_oracle(seed in any::<u64>()) {
        let model = model_from(seed);
        let (s, o, d) = oracle_propagate(&model).unwrap();
        prop_assert_eq!(forward_severity(&model).unwrap(), s);
        prop_assert_eq!(backward_occurrence(&model).unwrap(), o);
        prop_assert_eq!(assign_detection(&model).unwrap(), d);
    }

    #[test]
    fn severity_flows_down_occurrence_flows_up(seed in any::<u64>()) {
        let model = model_from(seed);
        let s = forward_severity(&model).unwrap();
        let o = backward_occurrence(&model).unwrap();
        for edge in model.rf.iter().chain(&model.fc) {
            if let Some(upper) = s.get(&edge.from) {
                prop_assert!(s[&edge.to] >= *upper);
            }
            if let Some(lower) = o.get(&edge.to) {
                prop_assert!(o[&edge.from] >= *lower);
            }
        }
    }

    #[test]
    fn extra_edge_never_lowers_ranks(seed in any::<u64>()) {
        let model = model_from(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        if let Some(grown) = with_extra_edge(&model, &mut rng) {
            let before = oracle_propagate(&model).unwrap();
            prop_assert!(dominates(&forward_severity(&grown).unwrap(), &before.0));
            prop_assert!(dominates(&backward_occurrence(&grown).unwrap(), &before.1));
            prop_assert!(dominates(&assign_detection(&grown).unwrap(), &before.2));
        }
    }

    #[test]
    fn rows_cover_every_failure_mode_once(seed in any::<u64>()) {
        let model = model_from(seed);
        let result = analyze(&model).unwrap();
        let mut ids: Vec<_> = result.rows.iter().map(|r| r.failure_mode.clone()).collect();
        ids.sort();
        let mut expected: Vec<_> = model.failure_modes.iter().map(|fm| fm.id.clone()).collect();
        expected.sort();
        prop_assert_eq!(ids, expected);
        for (i, row) in result.rows.iter().enumerate() {
            prop_assert_eq!(row.rank_position, i + 1);
            let d = row.detection.map_or(1, |d| u16::from(d.value()));
            prop_assert_eq!(
                row.rpn,
                u16::from(row.severity.value()) * u16::from(row.occurrence.value()) * d
            );
        }
        for pair in result.rows.windows(2) {
            prop_assert!(pair[0].priority_cmp(&pair[1]).is_lt());
        }
    }

    #[test]
    fn analysis_ignores_declaration_order(seed in any::<u64>()) {
        let model = model_from(seed);
        let shuffled = permuted(&model, &mut ChaCha8Rng::seed_from_u64(seed.rotate_left(7)));
        prop_assert_eq!(analyze(&model).unwrap(), analyze(&shuffled).unwrap());
    }

    #[test]
    fn component_severity_is_at_least_local(seed in any::<u64>()) {
        let model = model_from(seed);
        let s = forward_severity(&model).unwrap();
        let result = analyze(&model).unwrap();
        for row in &result.rows {
            if row.domain == ElementDomain::Component {
                prop_assert!(s[&row.element] >= row.severity);
            }
        }
    }
}
