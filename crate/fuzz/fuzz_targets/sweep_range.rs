#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_secrecy::sweep::SweepRange;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(range) = SweepRange::parse(text) {
        let values = range.values();
        // an accepted range enumerates a finite, ordered, in-bounds grid
        assert!(!values.is_empty());
        assert!(values.len() <= 100_002);
        assert!(values.iter().all(|v| v.is_finite()));
        assert!(values.windows(2).all(|w| w[0] < w[1]));
        assert!(values[0] >= range.start - f64::EPSILON);
        assert!(*values.last().unwrap() <= range.stop + 1e-9 * range.step);
    }
});
