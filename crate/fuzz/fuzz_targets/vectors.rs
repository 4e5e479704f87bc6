#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::embedvec::{cosine, VectorStore};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(store) = VectorStore::parse(text) {
            let a = store.embed("device turned off");
            let b = store.embed("turned on");
            if let Ok(c) = cosine(&a, &b) {
                assert!(c.value >= 0.0 && c.value <= 1.0 + 1e-9);
            }
        }
    }
});
