#![no_main]
use libfuzzer_sys::fuzz_target;

use kfl::io::{model_to_json, parse_model_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(model) = parse_model_json(text) {
        let back = parse_model_json(&model_to_json(&model)).unwrap();
        assert_eq!(back.frame(), model.frame());
        assert_eq!(back.valuation(), model.valuation());
    }
});
