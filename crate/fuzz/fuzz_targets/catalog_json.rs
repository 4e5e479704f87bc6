#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::catalog::ProprietaryCatalog;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(catalog) = ProprietaryCatalog::from_json(text) {
            let back = ProprietaryCatalog::from_json(&catalog.to_json()).expect("round trip");
            assert_eq!(back.triggers, catalog.triggers);
            assert_eq!(back.actions, catalog.actions);
        }
    }
});
