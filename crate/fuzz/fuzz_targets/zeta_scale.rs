#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_secrecy::validate::ZetaScale;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scale) = ZetaScale::parse(text) {
        assert!(scale.factor > 0.0 && scale.factor.is_finite());
    }
});
