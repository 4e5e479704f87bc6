#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::scoring::wire::parse_batch_response;

fuzz_target!(|data: &[u8]| {
    let Some((&n, body)) = data.split_first() else {
        return;
    };
    if let Ok(results) = parse_batch_response(body, usize::from(n)) {
        assert_eq!(results.len(), usize::from(n));
    }
});
