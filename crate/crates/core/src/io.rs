//! Text formats: observation files, distribution CSV, scenario spec files and
//! result tables. Numbers are written with 12 significant digits independent
//! of locale.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::distribution::AtomicDistribution;
use crate::error::{Error, Result};
use crate::observations::{ObservationSet, Observations, TrialMatrix};
use crate::simulate::{ResultRow, Summary};

const SIG_DIGITS: i32 = 12;

/// `%.12g`-style formatting: fixed notation for exponents in `[-4, 12)`,
/// scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // the exponent after rounding to 12 digits decides the notation
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS).contains(&exp) {
        let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-blank lines with their 1-based line numbers, line endings stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_t(value: &str, line: usize) -> Result<u32> {
    match value.trim().parse::<u32>() {
        Ok(t) if t >= 1 => Ok(t),
        _ => Err(parse_error(line, format!("expected a positive integer t, found {value:?}"))),
    }
}

/// Reads an observation file.
///
/// Counts: a header `t=<int>` and one success count per line.
/// Raw trials: a header `trials,t=<int>` and one string of `t` characters
/// `0`/`1` per individual.
pub fn parse_observations(text: &str) -> Result<Observations> {
    let mut lines = content_lines(text);
    let Some((hline, header)) = lines.next() else {
        return Err(parse_error(1, "empty input, expected header t=<int>"));
    };
    let header = header.trim_start_matches('\u{feff}');
    if let Some(rest) = header.strip_prefix("trials,t=") {
        let t = parse_t(rest, hline)?;
        let mut outcomes = Vec::new();
        for (no, l) in lines {
            if l.len() != t as usize {
                return Err(parse_error(no, format!("expected {t} trial outcomes, found {}", l.chars().count())));
            }
            for c in l.chars() {
                match c {
                    '0' => outcomes.push(false),
                    '1' => outcomes.push(true),
                    _ => return Err(parse_error(no, format!("trial outcome {c:?} is not 0 or 1"))),
                }
            }
        }
        if outcomes.is_empty() {
            return Err(parse_error(hline, "no individuals after header"));
        }
        return Ok(Observations::Trials(TrialMatrix::new(t, outcomes)?));
    }
    let Some(rest) = header.strip_prefix("t=") else {
        return Err(parse_error(hline, format!("expected header t=<int> or trials,t=<int>, found {header:?}")));
    };
    let t = parse_t(rest, hline)?;
    let mut counts = Vec::new();
    for (no, l) in lines {
        let x: u32 = l
            .parse()
            .map_err(|_| parse_error(no, format!("expected an integer count, found {l:?}")))?;
        if x > t {
            return Err(parse_error(no, format!("count {x} exceeds t={t}")));
        }
        counts.push(x);
    }
    if counts.is_empty() {
        return Err(parse_error(hline, "no individuals after header"));
    }
    Ok(Observations::Counts(ObservationSet::new(t, counts)?))
}

pub fn write_observations(obs: &Observations) -> String {
    let mut out = String::new();
    match obs {
        Observations::Counts(set) => {
            writeln!(out, "t={}", set.t()).unwrap();
            for x in set.counts() {
                writeln!(out, "{x}").unwrap();
            }
        }
        Observations::Trials(m) => {
            writeln!(out, "trials,t={}", m.t()).unwrap();
            for row in m.rows() {
                let line: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
                writeln!(out, "{line}").unwrap();
            }
        }
    }
    out
}

/// Reads `location,mass` rows. Masses must sum to one within `1e-9` and are
/// then renormalised.
pub fn parse_distribution_csv(text: &str) -> Result<AtomicDistribution> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, h)) if h.trim_start_matches('\u{feff}').replace(' ', "") == "location,mass" => {}
        Some((no, h)) => return Err(parse_error(no, format!("expected header location,mass, found {h:?}"))),
        None => return Err(parse_error(1, "empty input, expected header location,mass")),
    }
    let mut atoms = Vec::new();
    for (no, l) in lines {
        let (x, w) = l
            .split_once(',')
            .ok_or_else(|| parse_error(no, "expected two comma-separated fields"))?;
        let field = |s: &str, name: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_error(no, format!("{name} {:?} is not a finite number", s.trim())))
        };
        let (x, w) = (field(x, "location")?, field(w, "mass")?);
        if !(0.0..=1.0).contains(&x) {
            return Err(parse_error(no, format!("location {x} outside [0, 1]")));
        }
        if w < 0.0 {
            return Err(parse_error(no, format!("mass {w} is negative")));
        }
        atoms.push((x, w));
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("masses sum to {total}, expected 1")));
    }
    AtomicDistribution::normalized(atoms)
}

pub fn write_distribution_csv(dist: &AtomicDistribution) -> String {
    let mut out = String::from("location,mass\n");
    for (x, w) in dist.atoms() {
        writeln!(out, "{},{}", fmt_sig(x), fmt_sig(w)).unwrap();
    }
    out
}

/// Keys accepted in scenario spec files.
pub const SPEC_KEYS: &[&str] = &[
    "id", "truth", "N", "t", "seed", "reps", "methods", "grid_size", "jobs", "c1", "c2", "moments",
];

/// A flat `key = value` file; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecFile {
    entries: BTreeMap<String, (usize, String)>,
}

impl SpecFile {
    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    /// Parses the value for `key`, reporting its line on failure.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| parse_error(*line, format!("bad value for {key}: {e}"))),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }
}

pub fn parse_spec_file(text: &str) -> Result<SpecFile> {
    let mut spec = SpecFile::default();
    for (no, line) in content_lines(text) {
        let line = match line.split_once('#') {
            Some((before, _)) => before.trim(),
            None => line,
        };
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_error(no, format!("expected key = value, found {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if !SPEC_KEYS.contains(&key) {
            return Err(parse_error(
                no,
                format!("unknown key {key:?}; valid keys: {}", SPEC_KEYS.join(", ")),
            ));
        }
        if value.is_empty() {
            return Err(parse_error(no, format!("missing value for {key}")));
        }
        if spec.entries.insert(key.to_string(), (no, value.to_string())).is_some() {
            return Err(parse_error(no, format!("duplicate key {key}")));
        }
    }
    Ok(spec)
}

pub fn write_results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("scenario_id,estimator,N,t,rep,w1,runtime_ms\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.scenario_id,
            r.estimator,
            r.n,
            r.t,
            r.rep,
            fmt_sig(r.w1),
            fmt_sig(r.runtime_ms)
        )
        .unwrap();
    }
    out
}

pub fn write_summary_csv(scenario_id: &str, summaries: &[Summary]) -> String {
    let mut out = String::from("scenario_id,estimator,mean_w1,stderr_w1,successes,failures\n");
    for s in summaries {
        writeln!(
            out,
            "{scenario_id},{},{},{},{},{}",
            s.estimator,
            fmt_sig(s.mean_w1),
            fmt_sig(s.stderr_w1),
            s.successes,
            s.failures
        )
        .unwrap();
    }
    out
}
