#![no_main]

use libfuzzer_sys::fuzz_target;
use popdist::io::{parse_distribution_csv, write_distribution_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(dist) = parse_distribution_csv(text) {
        let total: f64 = dist.masses().iter().sum();
        assert!((total - 1.0).abs() <= 1e-9);
        assert!(dist.locations().windows(2).all(|w| w[0] < w[1]));
        // 12 significant digits may merge atoms closer than that, never fail
        let _ = parse_distribution_csv(&write_distribution_csv(&dist)).expect("written distribution parses");
    }
});
