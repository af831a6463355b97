#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_secrecy::sweep::Method;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(methods) = Method::parse_list(text) {
        assert!(!methods.is_empty());
        // canonical: sorted and deduplicated
        assert!(methods.windows(2).all(|w| w[0] < w[1]));
        // names round trip through the parser
        let names: Vec<&str> = methods.iter().map(|m| m.name()).collect();
        assert_eq!(Method::parse_list(&names.join(",")).unwrap(), methods);
    }
});
