#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_secrecy::SystemConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = SystemConfig::from_json(text) {
        // accepted configs are valid and survive a serialize/parse round trip
        cfg.validate().expect("accepted config must validate");
        let json = serde_json::to_string(&cfg).expect("config serializes");
        let back = SystemConfig::from_json(&json).expect("round trip parses");
        assert_eq!(cfg, back);
        // and the derived statistics are finite
        let stats = ris_secrecy::channel::derive_stats(&cfg).expect("stats derive");
        assert!(stats.mu.is_finite() && stats.sigma2 > 0.0);
    }
});
