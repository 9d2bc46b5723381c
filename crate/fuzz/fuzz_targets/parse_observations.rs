#![no_main]

use libfuzzer_sys::fuzz_target;
use popdist::io::{parse_observations, write_observations};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(obs) = parse_observations(text) {
        // whatever parses must survive a write/parse round trip
        let again = parse_observations(&write_observations(&obs)).expect("written observations parse");
        assert_eq!(obs, again);
    }
});
