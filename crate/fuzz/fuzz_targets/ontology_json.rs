#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::catalog::{parse_ontology_json, OntologyConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_ontology_json(text, &OntologyConfig::default());
    }
});
