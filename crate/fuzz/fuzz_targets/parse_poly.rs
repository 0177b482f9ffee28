#![no_main]

use libfuzzer_sys::fuzz_target;
use prym::poly::MultiPoly;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = MultiPoly::parse(text) {
            // round trip through the canonical renderer
            let again = MultiPoly::parse(&p.render()).expect("rendered form must reparse");
            assert_eq!(p, again);
        }
    }
});
