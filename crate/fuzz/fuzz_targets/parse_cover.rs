#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // a successfully parsed cover must also survive validation
        if let Ok(cover) = prym::json::parse_cover(text) {
            let _ = cover.validate();
        }
    }
});
