#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::rulestore::replay_log;

fuzz_target!(|data: &[u8]| {
    if let Ok(replay) = replay_log(data) {
        assert!(replay.valid_len <= data.len());
        if replay.valid_len < data.len() {
            assert!(replay.torn_tail);
        }
    }
});
