#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = kfl::parse(text) {
        let printed = f.to_string();
        let again = kfl::parse(&printed).expect("printed formula reparses");
        assert_eq!(again, f);
    }
});
