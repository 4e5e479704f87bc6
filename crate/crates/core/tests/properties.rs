mod common;

use std::collections::HashMap;

use chrono::Utc;
use proptest::prelude::*;

use common::corpus;
use rulebridge::catalog::{clean_and_split, RawRecipe, RawRecipeSet};
use rulebridge::clean_name;
use rulebridge::evaluation::dataset_stats;
use rulebridge::pipeline::{apply_review_overrides, PipelineConfig, Translator};
use rulebridge::records::{parse_canonical, render_canonical};
use rulebridge::rulestore::{ReviewRecord, ReviewVerdict};
use rulebridge::scoring::ProxyEntailment;
use rulebridge::{Kind, Method};

fn raw_name() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z/ ]{0,12}",
        Just("Door/window opened".to_string()),
        Just("Any event starts".to_string()),
        Just("Cafe\u{301}".to_string()),
    ]
}

fn recipes() -> impl Strategy<Value = RawRecipeSet> {
    prop::collection::vec((raw_name(), raw_name()), 1..40).prop_map(|rows| RawRecipeSet {
        source_label: "prop".into(),
        rows: rows.into_iter().map(|(trigger, action)| RawRecipe { trigger, action }).collect(),
    })
}

proptest! {
    #[test]
    fn cleaning_is_idempotent(s in "\\PC{0,30}") {
        let once = clean_name(&s);
        prop_assert_eq!(clean_name(&once), once);
    }

    #[test]
    fn usage_is_conserved(raw in recipes()) {
        if let Ok((catalog, report)) = clean_and_split(&raw) {
            let stats = dataset_stats(&raw, &catalog);
            for (kind, k) in [(Kind::Trigger, &stats.triggers), (Kind::Action, &stats.actions)] {
                let dropped = report.dropped.iter().filter(|d| d.kind == kind).count();
                prop_assert_eq!(k.uses as usize + dropped, raw.rows.len());
                prop_assert_eq!(k.once_only + k.duplicates, k.distinct);
            }
            // Cleaning the cleaned catalog again changes nothing.
            let again = RawRecipeSet {
                source_label: "again".into(),
                rows: raw
                    .rows
                    .iter()
                    .map(|r| RawRecipe { trigger: clean_name(&r.trigger), action: clean_name(&r.action) })
                    .collect(),
            };
            let (catalog2, _) = clean_and_split(&again).unwrap();
            prop_assert_eq!(catalog2.triggers, catalog.triggers);
            prop_assert_eq!(catalog2.actions, catalog.actions);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn review_pin_survives_any_method(
        source_idx in 0usize..24,
        pick_idx in 0usize..29,
        method_idx in 0usize..3,
        threshold in 0.0f64..0.9,
    ) {
        let c = corpus();
        let config = PipelineConfig { threshold, ..PipelineConfig::default() };
        let proxy = ProxyEntailment::default();
        let t = Translator::new(&c.ontology, &c.vectors, &proxy, &config);
        let source = &c.catalog.triggers[source_idx % c.catalog.triggers.len()].name;
        let pick = &c.ontology.triggers[pick_idx % c.ontology.triggers.len()].name;
        let method = Method::ALL[method_idx];
        let mut reviews = HashMap::new();
        reviews.insert(
            (source.clone(), Kind::Trigger),
            ReviewRecord {
                source_name: source.clone(),
                kind: Kind::Trigger,
                verdict: ReviewVerdict::Chosen { candidate: pick.clone() },
                accuracy: None,
                method: None,
                reviewer: "prop".into(),
                created_at: Utc::now(),
            },
        );
        let plain = t.translate(source, Kind::Trigger, method).unwrap();
        let r = apply_review_overrides(plain.clone(), &reviews);
        prop_assert_eq!(&r.candidates[0].candidate_name, pick);
        prop_assert!(r.candidates[0].pinned_by_review);
        prop_assert!(!r.no_result);
        let ranks: Vec<usize> = r.candidates.iter().map(|c| c.rank).collect();
        prop_assert_eq!(ranks, (1..=r.candidates.len()).collect::<Vec<_>>());
        // Everything else keeps its relative order.
        let rest: Vec<&str> = r.candidates[1..].iter().map(|c| c.candidate_name.as_str()).collect();
        let expected: Vec<&str> = plain.candidates.iter().map(|c| c.candidate_name.as_str()).filter(|n| n != pick).collect();
        prop_assert_eq!(rest, expected);
    }

    #[test]
    fn canonical_round_trip(threshold in 0.0f64..0.9, method_idx in 0usize..3) {
        let c = corpus();
        let config = PipelineConfig { threshold, ..PipelineConfig::default() };
        let proxy = ProxyEntailment::default();
        let t = Translator::new(&c.ontology, &c.vectors, &proxy, &config);
        let out = t.translate_batch(&c.catalog, Method::ALL[method_idx]);
        prop_assert!(out.failures.is_empty());
        let text = render_canonical(&out.results);
        let back = parse_canonical(&text).unwrap();
        prop_assert_eq!(&back, &out.results);
        prop_assert_eq!(render_canonical(&back), text);
    }
}
