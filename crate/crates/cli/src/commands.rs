use std::fmt::Write as _;

use anyhow::{anyhow, Context};
use popdist::estimators::{estimate as run_estimator, unbiased_moments, EstimatorConfig, Method};
use popdist::io::{
    fmt_sig, parse_distribution_csv, parse_observations, parse_spec_file, write_distribution_csv,
    write_results_csv, write_summary_csv, SpecFile,
};
use popdist::lowerbound::{theorem4_scenario_with, ScenarioConfig};
use popdist::metrics::{kl_divergence, pinsker_check, total_variation_fingerprint, MetricRecord};
use popdist::polyapprox::{kravchuk_bound_check, verify_coeff_bound};
use popdist::simulate::{run_scenario, ScenarioSpec, Truth};
use popdist::{expected_fingerprint, moments, wasserstein1};
use serde_json::json;

use crate::args::{CompareArgs, EstimateArgs, ScenarioArgs, SimulateArgs, VerifyArgs};
use crate::output::{json_text, read, write};
use crate::{exit, Failure};

type CmdResult = Result<(), Failure>;

fn input_error(msg: impl std::fmt::Display) -> Failure {
    Failure::new(exit::INPUT, anyhow!("{msg}"))
}

fn parse_method(s: &str) -> Result<Method, Failure> {
    s.trim().parse::<Method>().map_err(Failure::from)
}

pub fn estimate(a: EstimateArgs) -> CmdResult {
    let method = parse_method(&a.method)?;
    if a.moments.is_some() && method != Method::MomentMatching {
        return Err(input_error("--moments applies only to --method moment_matching"));
    }
    if (a.c1.is_some() || a.c2.is_some()) && method != Method::LocalMomentMatching {
        return Err(input_error("--c1/--c2 apply only to --method local_moment_matching"));
    }
    if a.max_iterations.is_some() && method != Method::Mle {
        return Err(input_error("--max-iterations applies only to --method mle"));
    }
    let text = read(&a.input).map_err(|e| Failure::new(exit::INPUT, e))?;
    let obs = parse_observations(&text).map_err(|e| Failure::from(anyhow::Error::from(e).context(a.input.display().to_string())))?;
    let t = obs.t();

    let mut cfg = EstimatorConfig::default();
    if let Some(g) = a.grid_size {
        cfg.mle.grid_size = g;
        cfg.moment_grid = g;
        cfg.lmm.grid_size = g;
    }
    if let Some(k) = a.moments {
        if k == 0 || k > t {
            return Err(input_error(format!("--moments must be between 1 and t={t}")));
        }
        cfg.moments = Some(k);
    }
    if let Some(c1) = a.c1 {
        cfg.lmm.c1 = c1;
    }
    if let Some(c2) = a.c2 {
        cfg.lmm.c2 = c2;
    }
    if let Some(it) = a.max_iterations {
        cfg.mle.max_iterations = it;
    }

    let report = run_estimator(method, &obs, &cfg)?;
    let counts = obs.counts();
    let observed = unbiased_moments(counts.counts(), t, t)?;
    let fitted = moments(&report.distribution, t as usize, 0.0)?;
    let mut diag = String::from("order,estimated,observed\n");
    for (k, (e, o)) in fitted.values.iter().zip(&observed).enumerate() {
        writeln!(diag, "{},{},{}", k + 1, fmt_sig(*e), fmt_sig(*o)).unwrap();
    }

    let mut json = report.to_json(a.timing);
    json["N"] = json!(counts.len());
    json["t"] = json!(t);
    write(&a.out_dir, "distribution.csv", &write_distribution_csv(&report.distribution))?;
    write(&a.out_dir, "report.json", &json_text(json))?;
    write(&a.out_dir, "moments.csv", &diag)?;
    println!(
        "{}: {} atoms, final objective {}, iterations {}",
        method,
        report.distribution.len(),
        fmt_sig(report.final_objective),
        report.iterations
    );
    if !report.converged {
        return Err(Failure::new(
            exit::NON_CONVERGENCE,
            anyhow!("{method} did not converge within its iteration limit; outputs hold the last iterate"),
        ));
    }
    Ok(())
}

fn parse_truth(s: &str) -> Result<Truth, Failure> {
    if let Some(path) = s.strip_prefix("custom:") {
        let text = read(path.as_ref()).map_err(|e| Failure::new(exit::INPUT, e))?;
        return Ok(Truth::Custom(parse_distribution_csv(&text).context(path.to_string())?));
    }
    Ok(s.parse::<Truth>()?)
}

fn pick<T: std::str::FromStr>(flag: Option<T>, file: &SpecFile, key: &str) -> Result<Option<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => Ok(file.get::<T>(key)?),
    }
}

pub fn simulate(a: SimulateArgs) -> CmdResult {
    let file = match &a.spec {
        Some(path) => {
            let text = read(path).map_err(|e| Failure::new(exit::INPUT, e))?;
            parse_spec_file(&text).map_err(|e| Failure::from(anyhow::Error::from(e).context(path.display().to_string())))?
        }
        None => SpecFile::default(),
    };
    let truth_text: String = pick(a.truth.clone(), &file, "truth")?.ok_or_else(|| input_error("--truth is required"))?;
    let truth = parse_truth(&truth_text)?;
    let n: usize = pick(a.n, &file, "N")?.ok_or_else(|| input_error("--N is required"))?;
    let t: u32 = pick(a.t, &file, "t")?.ok_or_else(|| input_error("--t is required"))?;
    let seed = match pick(a.seed, &file, "seed")? {
        Some(s) => s,
        None => match std::env::var("POPDIST_SEED") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| input_error(format!("POPDIST_SEED={v:?} is not an unsigned integer")))?,
            Err(_) => 0,
        },
    };
    let mut spec = ScenarioSpec::new(truth, n, t, seed);
    if let Some(id) = pick(a.id.clone(), &file, "id")? {
        if id.contains(',') || id.contains('\n') {
            return Err(input_error("scenario id may not contain commas or newlines"));
        }
        spec.id = id;
    }
    if let Some(r) = pick(a.reps, &file, "reps")? {
        spec.replications = r;
    }
    if let Some(list) = pick::<String>(a.methods.clone(), &file, "methods")? {
        spec.methods = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse_method)
            .collect::<Result<_, _>>()?;
    }
    if let Some(g) = pick(a.grid_size, &file, "grid_size")? {
        spec.estimators.mle.grid_size = g;
        spec.estimators.moment_grid = g;
        spec.estimators.lmm.grid_size = g;
    }
    if let Some(k) = pick(a.moments, &file, "moments")? {
        if k == 0 || k > t {
            return Err(input_error(format!("moments must be between 1 and t={t}")));
        }
        spec.estimators.moments = Some(k);
    }
    if let Some(c1) = pick(a.c1, &file, "c1")? {
        spec.estimators.lmm.c1 = c1;
    }
    if let Some(c2) = pick(a.c2, &file, "c2")? {
        spec.estimators.lmm.c2 = c2;
    }
    if let Some(j) = pick(a.jobs, &file, "jobs")? {
        if j == 0 {
            return Err(input_error("--jobs must be at least 1"));
        }
        spec.jobs = Some(j);
    }
    spec.validate()?;

    let mut result = run_scenario(&spec)?;
    if !a.timing {
        result.rows.iter_mut().for_each(|r| r.runtime_ms = 0.0);
    }
    for r in result.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: {} rep {} failed: {}",
            r.estimator,
            r.rep,
            r.error.as_deref().unwrap_or_default()
        );
    }
    write(&a.out_dir, "results.csv", &write_results_csv(&result.rows))?;
    write(&a.out_dir, "summary.csv", &write_summary_csv(&spec.id, &result.summaries))?;
    for s in &result.summaries {
        println!(
            "{}: mean W1 {} (stderr {}, {} ok, {} failed)",
            s.estimator,
            fmt_sig(s.mean_w1),
            fmt_sig(s.stderr_w1),
            s.successes,
            s.failures
        );
    }
    Ok(())
}

pub fn verify(a: VerifyArgs) -> CmdResult {
    if a.t_max == 0 {
        return Err(input_error("--t-max must be at least 1"));
    }
    let k_max = a.k_max.unwrap_or(a.t_max);
    if k_max == 0 {
        return Err(input_error("--k-max must be at least 1"));
    }
    let mut coeff = String::from("t,m,max_abs_coeff,lemma4_bound,conjecture_bound,lemma4_ok,conjecture_ok\n");
    let mut kravchuk = String::from("t,k,abs_sum,bound,holds,identity_error,identity_ok,exact\n");
    let (mut coeff_violations, mut conjecture_violations, mut kravchuk_failures) = (0, 0, 0);
    for t in 1..=a.t_max {
        let report = verify_coeff_bound(t)?;
        coeff_violations += report.violations;
        conjecture_violations += report.conjecture_violations;
        let r = report.worst_row();
        writeln!(
            coeff,
            "{},{},{},{},{},{},{}",
            r.t,
            r.m,
            fmt_sig(r.max_abs_coeff),
            fmt_sig(r.lemma4_bound),
            fmt_sig(r.conjecture_bound),
            report.violations == 0,
            report.conjecture_violations == 0
        )
        .unwrap();
        for k in 1..=k_max.min(t) {
            let r = kravchuk_bound_check(t, k)?;
            if !(r.holds && r.identity_ok) {
                kravchuk_failures += 1;
            }
            writeln!(
                kravchuk,
                "{},{},{},{},{},{},{},{}",
                r.t,
                r.k,
                fmt_sig(r.abs_sum),
                fmt_sig(r.bound),
                r.holds,
                fmt_sig(r.identity_error),
                r.identity_ok,
                r.exact
            )
            .unwrap();
        }
    }
    write(&a.out_dir, "coeff_bounds.csv", &coeff)?;
    write(&a.out_dir, "kravchuk.csv", &kravchuk)?;
    println!(
        "t <= {}: {} coefficient bound violations, {} Kravchuk failures ({} rows exceed the conjectured bound)",
        a.t_max, coeff_violations, kravchuk_failures, conjecture_violations
    );
    if coeff_violations + kravchuk_failures > 0 {
        return Err(Failure::new(exit::VERIFICATION, anyhow!("bound verification failed")));
    }
    Ok(())
}

pub fn compare(a: CompareArgs) -> CmdResult {
    let load = |path: &std::path::Path| -> Result<_, Failure> {
        let text = read(path).map_err(|e| Failure::new(exit::INPUT, e))?;
        parse_distribution_csv(&text).map_err(|e| Failure::from(anyhow::Error::from(e).context(path.display().to_string())))
    };
    let (p, q) = (load(&a.p)?, load(&a.q)?);
    let mut records = vec![MetricRecord {
        metric: "w1".into(),
        value: wasserstein1(&p, &q),
        details: json!({"atoms_p": p.len(), "atoms_q": q.len()}),
    }];
    if let Some(t) = a.t {
        if t == 0 {
            return Err(input_error("--t must be at least 1"));
        }
        let (hp, hq) = (expected_fingerprint(&p, t)?, expected_fingerprint(&q, t)?);
        let kl = kl_divergence(&hp, &hq)?;
        records.push(MetricRecord {
            metric: "kl".into(),
            value: kl,
            details: json!({"t": t, "units": "nats", "finite": kl.is_finite()}),
        });
        records.push(MetricRecord {
            metric: "tv".into(),
            value: total_variation_fingerprint(&hp, &hq)?,
            details: json!({"t": t}),
        });
        records.push(MetricRecord {
            metric: "pinsker".into(),
            value: if pinsker_check(&hp, &hq)? { 1.0 } else { 0.0 },
            details: json!({"t": t}),
        });
    }
    let text = json_text(serde_json::to_value(&records).expect("records serialise"));
    print!("{text}");
    if let Some(dir) = &a.out_dir {
        write(dir, "metrics.json", &text)?;
    }
    Ok(())
}

pub fn scenario(a: ScenarioArgs) -> CmdResult {
    let cfg = ScenarioConfig {
        s_cap: a.s_cap,
        ..ScenarioConfig::default()
    };
    let report = theorem4_scenario_with(a.n, a.t, &cfg)?;
    let text = json_text(serde_json::to_value(&report).expect("report serialises"));
    print!("{text}");
    if let Some(dir) = &a.out_dir {
        write(dir, "scenario.json", &text)?;
    }
    Ok(())
}
