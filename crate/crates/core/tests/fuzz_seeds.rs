// Replays the checked-in fuzz corpora so the seeds stay meaningful on stable.

use std::fs;
use std::path::PathBuf;

use popdist::io::{
    parse_distribution_csv, parse_observations, parse_spec_file, write_distribution_csv, write_observations,
};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn observation_seeds() {
    let mut parsed = 0;
    for (name, text) in seeds("parse_observations") {
        if let Ok(obs) = parse_observations(&text) {
            let again = parse_observations(&write_observations(&obs)).unwrap();
            assert_eq!(obs, again, "{name}");
            parsed += 1;
        }
    }
    assert!(parsed >= 3);
}

#[test]
fn distribution_seeds() {
    for (name, text) in seeds("parse_distribution_csv") {
        let dist = parse_distribution_csv(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let total: f64 = dist.masses().iter().sum();
        assert!((total - 1.0).abs() <= 1e-9, "{name}");
        assert!(dist.locations().windows(2).all(|w| w[0] < w[1]), "{name}");
        parse_distribution_csv(&write_distribution_csv(&dist)).unwrap();
    }
}

#[test]
fn spec_seeds() {
    let results: Vec<_> = seeds("parse_spec_file").into_iter().map(|(n, t)| (n, parse_spec_file(&t).is_ok())).collect();
    assert!(results.iter().any(|r| r.1));
    assert!(results.iter().any(|(n, ok)| n == "duplicate" && !ok));
}
