#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::records::{parse_canonical, render_canonical};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(results) = parse_canonical(text) {
            let rendered = render_canonical(&results);
            let again = parse_canonical(&rendered).expect("rendered output must parse");
            assert_eq!(render_canonical(&again), rendered);
        }
    }
});
