#![no_main]
use libfuzzer_sys::fuzz_target;

use kfl::io::{frame_to_json, parse_frame_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(frame) = parse_frame_json(text) {
        let back = parse_frame_json(&frame_to_json(&frame)).unwrap();
        assert_eq!(back, frame);
        if frame.n() <= 64 {
            let _ = frame.cluster_decomposition();
        }
    }
});
