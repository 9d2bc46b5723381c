#![no_main]

use libfuzzer_sys::fuzz_target;
use popdist::estimators::Method;
use popdist::io::parse_spec_file;
use popdist::simulate::Truth;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = parse_spec_file(text) else {
        return;
    };
    let _ = spec.get::<usize>("N");
    let _ = spec.get::<u32>("t");
    let _ = spec.get::<u64>("seed");
    let _ = spec.get::<f64>("c1");
    if let Some(truth) = spec.raw("truth") {
        let _ = truth.parse::<Truth>();
    }
    if let Some(methods) = spec.raw("methods") {
        for m in methods.split(',') {
            let _ = m.parse::<Method>();
        }
    }
});
