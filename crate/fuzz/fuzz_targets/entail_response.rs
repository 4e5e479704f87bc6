#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::scoring::wire::parse_response;

fuzz_target!(|data: &[u8]| {
    if let Ok(t) = parse_response(data) {
        assert!(t.entailment >= 0.0 && t.contradiction >= 0.0 && t.neutral >= 0.0);
        assert!((t.entailment + t.contradiction + t.neutral - 100.0).abs() <= 0.01);
    }
});
