#![no_main]
use libfuzzer_sys::fuzz_target;

use kfl::io::{parse_partition_json, partition_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_partition_json(text) {
        assert_eq!(parse_partition_json(&partition_to_json(&p)).unwrap(), p);
    }
});
