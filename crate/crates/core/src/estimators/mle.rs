//! Nonparametric MLE on a uniform grid, solved by the EM fixed point
//! `q_j <- q_j * Σ_s h_s B_s(x_j) / (Bq)_s`.
//!
//! Each update is a multiplicative step that stays on the simplex and never
//! increases `KL(h_obs, Bq)`. The minimiser is unique only in fingerprint
//! space, so convergence is judged on the objective, not on `q`.

use std::time::Instant;

use super::{EstimateReport, Method};
use crate::bernstein::BernsteinMatrix;
use crate::distribution::AtomicDistribution;
use crate::error::{invalid, Result};
use crate::fingerprint::{fingerprint_of, Fingerprint};
use crate::metrics::kl_slices;
use crate::nnls::nnls;
use crate::observations::ObservationSet;

#[derive(Debug, Clone, PartialEq)]
pub struct MleConfig {
    /// Grid has `grid_size + 1` nodes at `j / grid_size`.
    pub grid_size: usize,
    pub max_iterations: usize,
    /// Stop once the objective falls by less than this over `window` iterations.
    pub tolerance: f64,
    pub window: usize,
    /// Atoms lighter than this are dropped from the reported distribution.
    pub support_floor: f64,
    /// Keep the per-iteration objective sequence in [`EmOutcome::objectives`].
    pub record_trace: bool,
    /// Budget of constrained Newton polishing steps (0 disables polishing).
    pub polish_steps: usize,
    /// Attempt polishing every this many EM iterations.
    pub polish_every: usize,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            grid_size: 1000,
            max_iterations: 20_000,
            tolerance: 1e-10,
            window: 10,
            support_floor: 1e-12,
            record_trace: false,
            polish_steps: 200,
            polish_every: 200,
        }
    }
}

impl MleConfig {
    pub fn with_grid(grid_size: usize) -> Self {
        Self {
            grid_size,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(invalid("MLE grid size must be at least 2"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("MLE tolerance must be positive"));
        }
        if self.window == 0 {
            return Err(invalid("MLE convergence window must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmOutcome {
    pub weights: Vec<f64>,
    pub objective: f64,
    /// Objective before the first update and after each one (empty unless
    /// tracing was requested).
    pub objectives: Vec<f64>,
    pub iterations: usize,
    /// Polishing steps taken after EM (included in `iterations`).
    pub polish_iterations: usize,
    /// `max_j Σ_s h_s B_s(x_j) / (Bq)_s`; equals 1 at the optimum.
    pub max_gradient_ratio: f64,
    pub converged: bool,
}

/// Runs EM from `init` (positive, any scale) against fingerprint `h`.
pub fn em_solve(h: &[f64], basis: &BernsteinMatrix, init: &[f64], cfg: &MleConfig) -> Result<EmOutcome> {
    let t = basis.t();
    if h.len() != t as usize + 1 {
        return Err(invalid("fingerprint length does not match the Bernstein table"));
    }
    if init.len() != basis.cols() || init.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(invalid("EM initialiser must be strictly positive on every grid node"));
    }
    let total: f64 = init.iter().sum();
    let mut q: Vec<f64> = init.iter().map(|w| w / total).collect();
    let mut v = basis.apply(&q);
    for (s, (&hs, &vs)) in h.iter().zip(&v).enumerate() {
        if hs > 0.0 && vs <= 0.0 {
            return Err(invalid(format!(
                "observed count {s} has zero probability under every grid node"
            )));
        }
    }
    let mut objective = kl_slices(h, &v);
    let mut history = vec![objective];
    let mut trace = Vec::new();
    if cfg.record_trace {
        trace.push(objective);
    }
    let mut ratio = vec![0.0; h.len()];
    let mut mult = vec![0.0; q.len()];
    let mut iterations = 0;
    let mut polish_iterations = 0;
    let mut converged = false;
    let mut ratio_max = f64::INFINITY;
    while iterations < cfg.max_iterations {
        for ((r, &hs), &vs) in ratio.iter_mut().zip(h).zip(&v) {
            *r = if hs > 0.0 { hs / vs } else { 0.0 };
        }
        mult.iter_mut().for_each(|m| *m = 0.0);
        for (s, &r) in ratio.iter().enumerate() {
            if r != 0.0 {
                for (m, &b) in mult.iter_mut().zip(basis.row(s as u32)) {
                    *m += r * b;
                }
            }
        }
        for (w, m) in q.iter_mut().zip(&mult) {
            *w *= m;
        }
        let total: f64 = q.iter().sum();
        q.iter_mut().for_each(|w| *w /= total);
        v = basis.apply(&q);
        objective = kl_slices(h, &v);
        iterations += 1;
        history.push(objective);
        if cfg.record_trace {
            trace.push(objective);
        }
        if history.len() > cfg.window {
            let past = history[history.len() - 1 - cfg.window];
            if past - objective < cfg.tolerance {
                converged = true;
                break;
            }
        }
        if cfg.polish_steps > 0 && cfg.polish_every > 0 && iterations % cfg.polish_every == 0 {
            let steps = polish(h, basis, &mut q, &mut v, cfg.polish_steps - polish_iterations, &mut trace, cfg.record_trace);
            polish_iterations += steps;
            objective = kl_slices(h, &v);
            history.push(objective);
            ratio_max = gradient_ratio(h, basis, &v);
            if ratio_max <= 1.0 + KKT_TOL {
                converged = true;
                break;
            }
        }
    }
    if cfg.polish_steps > polish_iterations && ratio_max > 1.0 + KKT_TOL {
        polish_iterations += polish(
            h,
            basis,
            &mut q,
            &mut v,
            cfg.polish_steps - polish_iterations,
            &mut trace,
            cfg.record_trace,
        );
        objective = kl_slices(h, &v);
    }
    ratio_max = gradient_ratio(h, basis, &v);
    converged = converged || ratio_max <= 1.0 + KKT_TOL;
    Ok(EmOutcome {
        weights: q,
        objective,
        objectives: trace,
        iterations: iterations + polish_iterations,
        polish_iterations,
        max_gradient_ratio: ratio_max,
        converged,
    })
}

/// Constrained Newton steps from `q`; returns the number of accepted steps.
fn polish(
    h: &[f64],
    basis: &BernsteinMatrix,
    q: &mut Vec<f64>,
    v: &mut Vec<f64>,
    max_steps: usize,
    trace: &mut Vec<f64>,
    record: bool,
) -> usize {
    let entropy: f64 = h.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum();
    let neg_ll = |v: &[f64]| -> f64 {
        h.iter()
            .zip(v)
            .filter(|(&hs, _)| hs > 0.0)
            .map(|(&hs, &vs)| if vs > 0.0 { -hs * vs.ln() } else { f64::INFINITY })
            .sum()
    };
    let mut current = neg_ll(v);
    let mut steps = 0;
    while steps < max_steps {
        if gradient_ratio(h, basis, v) <= 1.0 + KKT_TOL {
            break;
        }
        let target = newton_target(h, basis, v);
        let mut accepted = None;
        let mut alpha = 1.0;
        for _ in 0..60 {
            let trial: Vec<f64> = q.iter().zip(&target).map(|(a, b)| a + alpha * (b - a)).collect();
            let tv = basis.apply(&trial);
            let value = neg_ll(&tv);
            if value < current {
                accepted = Some((trial, tv, value));
                break;
            }
            alpha *= 0.5;
        }
        let Some((nq, nv, value)) = accepted else { break };
        let decrease = current - value;
        *q = nq;
        *v = nv;
        current = value;
        steps += 1;
        if record {
            trace.push((entropy + current).max(0.0));
        }
        if decrease < 1e-16 {
            break;
        }
    }
    steps
}

const KKT_TOL: f64 = 1e-10;

fn gradient_ratio(h: &[f64], basis: &BernsteinMatrix, v: &[f64]) -> f64 {
    let mut d = vec![0.0; basis.cols()];
    for (s, (&hs, &vs)) in h.iter().zip(v).enumerate() {
        if hs > 0.0 {
            let r = hs / vs;
            for (dj, &b) in d.iter_mut().zip(basis.row(s as u32)) {
                *dj += r * b;
            }
        }
    }
    d.into_iter().fold(0.0, f64::max)
}

/// Minimiser over the simplex of the quadratic model of `-Σ h log(Bq)` at
/// the current fingerprint `v`: `min ||A q - 2 sqrt(h)||` with
/// `A_sj = sqrt(h_s) B_s(x_j) / v_s`, the simplex enforced by a heavy row.
fn newton_target(h: &[f64], basis: &BernsteinMatrix, v: &[f64]) -> Vec<f64> {
    let active: Vec<usize> = (0..h.len()).filter(|&s| h[s] > 0.0).collect();
    let scale: Vec<f64> = active.iter().map(|&s| h[s].sqrt() / v[s]).collect();
    let mut heavy = 0.0f64;
    let mut columns: Vec<Vec<f64>> = (0..basis.cols())
        .map(|j| {
            let col: Vec<f64> = active
                .iter()
                .zip(&scale)
                .map(|(&s, &c)| c * basis.get(s as u32, j))
                .collect();
            heavy = col.iter().fold(heavy, |m, x| m.max(x.abs()));
            col
        })
        .collect();
    let heavy = 100.0 * (heavy + 1.0);
    columns.iter_mut().for_each(|c| c.push(heavy));
    let mut rhs: Vec<f64> = active.iter().map(|&s| 2.0 * h[s].sqrt()).collect();
    rhs.push(heavy);
    let mut x = nnls(&columns, &rhs, 4 * (active.len() + 2) + 50);
    let total: f64 = x.iter().sum();
    if total > 0.0 {
        x.iter_mut().for_each(|w| *w /= total);
    }
    x
}

/// NPMLE from the uniform initialiser.
pub fn estimate_mle(obs: &ObservationSet, cfg: &MleConfig) -> Result<EstimateReport> {
    estimate_mle_from(&fingerprint_of(obs), cfg, None)
}

/// NPMLE for a fingerprint, optionally from a caller-supplied positive
/// initialiser on the `grid_size + 1` nodes.
pub fn estimate_mle_from(h: &Fingerprint, cfg: &MleConfig, init: Option<&[f64]>) -> Result<EstimateReport> {
    cfg.validate()?;
    let start = Instant::now();
    let basis = BernsteinMatrix::new(h.t(), cfg.grid_size)?;
    let uniform;
    let init = match init {
        Some(i) => i,
        None => {
            uniform = vec![1.0; cfg.grid_size + 1];
            &uniform
        }
    };
    let out = em_solve(h.fractions(), &basis, init, cfg)?;
    let distribution = AtomicDistribution::on_grid(&out.weights)?.pruned(cfg.support_floor);
    Ok(EstimateReport {
        method: Method::Mle,
        distribution,
        iterations: out.iterations,
        final_objective: out.objective,
        converged: out.converged,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::wasserstein1;

    #[test]
    fn realisable_fingerprint_recovers_spike() {
        let obs = ObservationSet::new(2, vec![0, 1, 1, 2]).unwrap();
        let r = estimate_mle(&obs, &MleConfig::with_grid(2)).unwrap();
        let spike = AtomicDistribution::point_mass(0.5).unwrap();
        assert!(wasserstein1(&r.distribution, &spike) < 1e-6, "{:?}", r);
        assert!(r.final_objective <= 1e-10);
    }

    #[test]
    fn all_successes_give_spike_at_one() {
        let obs = ObservationSet::new(5, vec![5; 100]).unwrap();
        let r = estimate_mle(&obs, &MleConfig::default()).unwrap();
        let spike = AtomicDistribution::point_mass(1.0).unwrap();
        let w = wasserstein1(&r.distribution, &spike);
        assert!(w < 1e-6, "w1 = {w}, iterations = {}", r.iterations);
    }

    #[test]
    fn trace_is_monotone() {
        let obs = ObservationSet::new(4, vec![0, 1, 1, 3, 4, 4, 2]).unwrap();
        let cfg = MleConfig {
            grid_size: 50,
            record_trace: true,
            ..MleConfig::default()
        };
        let basis = BernsteinMatrix::new(4, 50).unwrap();
        let out = em_solve(fingerprint_of(&obs).fractions(), &basis, &vec![1.0; 51], &cfg).unwrap();
        assert_eq!(out.objectives.len(), out.iterations + 1);
        for w in out.objectives.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_config_and_init() {
        let obs = ObservationSet::new(2, vec![1]).unwrap();
        assert!(estimate_mle(&obs, &MleConfig::with_grid(1)).is_err());
        let h = fingerprint_of(&obs);
        let cfg = MleConfig::with_grid(4);
        assert!(estimate_mle_from(&h, &cfg, Some(&[1.0, 0.0, 1.0, 1.0, 1.0])).is_err());
        assert!(estimate_mle_from(&h, &cfg, Some(&[1.0; 3])).is_err());
    }
}
