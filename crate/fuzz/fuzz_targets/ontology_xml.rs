#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::catalog::{parse_ontology_xml, OntologyConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(catalog) = parse_ontology_xml(text, &OntologyConfig::default()) {
            assert!(catalog.triggers.iter().all(|t| !t.name.is_empty()));
            assert!(catalog.actions.iter().all(|t| !t.name.is_empty()));
        }
    }
});
