mod common;

use common::corpus;
use rulebridge::embedvec::cosine;
use rulebridge::evaluation::dataset_stats;
use rulebridge::pipeline::{PipelineConfig, Translator};
use rulebridge::scoring::ProxyEntailment;
use rulebridge::{Kind, Method};

// Reference values below come from fixtures/oracle.py.

#[test]
fn mean_vector_cosine_matches_oracle() {
    let c = corpus();
    let a = c.vectors.embed("ac turned off");
    let b = c.vectors.embed("device turned off");
    let got = cosine(&a, &b).unwrap();
    assert!(!got.degenerate);
    assert!((got.value - 0.9625668575840939).abs() < 1e-12, "{}", got.value);
}

#[test]
fn embedding_ranking_matches_oracle() {
    let c = corpus();
    let config = PipelineConfig::default();
    let proxy = ProxyEntailment::default();
    let t = Translator::new(&c.ontology, &c.vectors, &proxy, &config);

    let r = t.translate("A C turned off", Kind::Trigger, Method::Embedding).unwrap();
    let expected = [
        ("Device Turned Off", 0.9485527293249847),
        ("Device Turned On", 0.7814627599789535),
        ("Air Purifier Enabled", 0.6099275460026592),
    ];
    assert_eq!(r.candidates.len(), expected.len());
    for (got, (name, sim)) in r.candidates.iter().zip(expected) {
        assert_eq!(got.candidate_name, name);
        assert!((got.embedding_similarity.unwrap() - sim).abs() < 1e-12);
    }

    let r = t.translate("Any event starts", Kind::Trigger, Method::Embedding).unwrap();
    let names: Vec<&str> = r.candidates.iter().map(|c| c.candidate_name.as_str()).collect();
    assert_eq!(
        names,
        ["Started Activity", "Activity", "Started Cleaning", "Tap Button Activity", "Moving", "Taken"]
    );
    assert!((r.candidates[0].embedding_similarity.unwrap() - 0.9251045378376387).abs() < 1e-12);
    assert!((r.candidates[5].embedding_similarity.unwrap() - 0.5984843151056811).abs() < 1e-12);
}

#[test]
fn combined_puts_direct_match_first() {
    let c = corpus();
    let config = PipelineConfig::default();
    let proxy = ProxyEntailment::default();
    let t = Translator::new(&c.ontology, &c.vectors, &proxy, &config);
    let r = t.translate("A C turned off", Kind::Trigger, Method::Combined).unwrap();
    assert_eq!(r.candidates[0].candidate_name, "Device Turned Off");
    let on = r.candidates.iter().find(|c| c.candidate_name == "Device Turned On").unwrap();
    let triple = on.entailment_triple.unwrap();
    assert!(triple.contradiction > triple.neutral, "antonym conflict expected: {triple:?}");

    let r = t.translate("Send a notification", Kind::Action, Method::Combined).unwrap();
    assert_eq!(r.candidates[0].candidate_name, "Send Notification");
}

#[test]
fn fixture_catalogs_load() {
    let c = corpus();
    assert_eq!(c.ontology.triggers.len(), 29);
    assert!(c.ontology.contains("Received From DIY", Kind::Trigger));
    assert!(c.ontology.contains("Send Notification", Kind::Action));
    assert!(!c.ontology.contains("Lamp", Kind::Trigger));
    assert!(c.catalog.find("Doorwindow opened", Kind::Trigger).is_some());
    assert_eq!(c.vectors.dimension(), 16);
    assert_eq!(c.vectors.len(), 222);
}

#[test]
fn fixture_dataset_stats() {
    // Counted independently from recipes-mini.csv.
    let c = corpus();
    let s = dataset_stats(&c.raw, &c.catalog);
    assert_eq!(s.total_recipes, 30);
    assert_eq!((s.triggers.distinct, s.triggers.once_only, s.triggers.duplicates), (24, 19, 5));
    assert_eq!((s.actions.distinct, s.actions.once_only, s.actions.duplicates), (20, 16, 4));
    assert_eq!((s.triggers.distinct_raw, s.actions.distinct_raw), (24, 20));
}

#[test]
fn whole_catalog_batch() {
    let c = corpus();
    let config = PipelineConfig::default();
    let proxy = ProxyEntailment::default();
    let t = Translator::new(&c.ontology, &c.vectors, &proxy, &config);
    for method in Method::ALL {
        let out = t.translate_batch(&c.catalog, method);
        assert!(out.failures.is_empty(), "{:?}", out.failures);
        assert_eq!(out.results.len(), c.catalog.triggers.len() + c.catalog.actions.len());
        for r in &out.results {
            assert_eq!(r.no_result, r.candidates.is_empty());
        }
    }
}
