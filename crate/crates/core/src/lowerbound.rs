//! Pairs of distributions that share their first `s` moments yet sit far
//! apart in Wasserstein distance, and the binomial-mixture total variation
//! between them.

use serde::Serialize;

use crate::bernstein::expected_fingerprint;
use crate::distribution::AtomicDistribution;
use crate::error::{invalid, Result};
use crate::lp::LinearProgram;
use crate::metrics::{moments, total_variation_fingerprint, wasserstein1};
use crate::polyapprox::shifted_chebyshev;

#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    /// Rounds of re-solving with the sign pattern of the previous solution.
    pub sign_rounds: usize,
    pub max_pivots: usize,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self {
            sign_rounds: 20,
            max_pivots: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MomentPair {
    pub p: AtomicDistribution,
    pub q: AtomicDistribution,
    pub s: usize,
    pub interval: (f64, f64),
    pub w1: f64,
    /// Largest `|E_P (x-a)^l - E_Q (x-a)^l|` over `l = 1..=s`.
    pub moment_residual: f64,
    pub lp_solves: usize,
}

impl MomentPair {
    /// `(b - a) / (2s)`
    pub fn guaranteed_w1(&self) -> f64 {
        (self.interval.1 - self.interval.0) / (2.0 * self.s as f64)
    }
}

/// Largest raw-moment mismatch about `shift` for orders `1..=s`.
pub fn moment_residual(p: &AtomicDistribution, q: &AtomicDistribution, s: usize, shift: f64) -> Result<f64> {
    let mp = moments(p, s, shift)?;
    let mq = moments(q, s, shift)?;
    Ok(mp.values
        .iter()
        .zip(&mq.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

pub fn moment_matched_pair(s: usize, interval: (f64, f64), grid_size: usize) -> Result<MomentPair> {
    moment_matched_pair_with(s, interval, grid_size, &PairConfig::default())
}

/// Maximises `W1(P, Q)` over pairs on the grid `a + (b-a) j/grid_size` whose
/// first `s` moments agree.
///
/// With `D_j = F_P(x_j) - F_Q(x_j)` the distance is `Δx Σ_j |D_j|`. For a fixed
/// sign pattern `σ` the objective `Δx Σ_j σ_j D_j` is linear, so each round
/// solves an LP and the next pattern is the sign of the achieved `D`. Every
/// round is at least as good as the last.
pub fn moment_matched_pair_with(
    s: usize,
    interval: (f64, f64),
    grid_size: usize,
    cfg: &PairConfig,
) -> Result<MomentPair> {
    let (a, b) = interval;
    if s == 0 {
        return Err(invalid("need at least one matched moment"));
    }
    if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= 1.0) {
        return Err(invalid(format!("interval [{a}, {b}] is not a nonempty subinterval of [0, 1]")));
    }
    if grid_size < 4 * s {
        return Err(invalid(format!("grid size {grid_size} below 4s = {}", 4 * s)));
    }
    let nodes = grid_size + 1;
    let xs: Vec<f64> = (0..nodes).map(|j| j as f64 / grid_size as f64).collect();
    let dx = 1.0 / grid_size as f64;

    let mut lp = LinearProgram::new(vec![0.0; 2 * nodes]);
    let mut row = vec![0.0; 2 * nodes];
    row[..nodes].fill(1.0);
    lp.add_eq(row.clone(), 1.0);
    row[..nodes].fill(0.0);
    row[nodes..].fill(1.0);
    lp.add_eq(row, 1.0);
    // Chebyshev basis keeps the constraint rows bounded by one
    for l in 1..=s {
        let mut row = vec![0.0; 2 * nodes];
        for (j, &x) in xs.iter().enumerate() {
            let v = shifted_chebyshev(l, x);
            row[j] = v;
            row[nodes + j] = -v;
        }
        lp.add_eq(row, 0.0);
    }

    // initial pattern alternates like sin((s+1) θ) with x = (1 - cos θ)/2
    let mut sigma: Vec<f64> = xs[..grid_size]
        .iter()
        .map(|&x| {
            let theta = (1.0 - 2.0 * (x + 0.5 * dx)).clamp(-1.0, 1.0).acos();
            if ((s + 1) as f64 * theta).sin() >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut solves = 0;
    for _ in 0..cfg.sign_rounds.max(1) {
        // P_i enters F_P(x_j) for every j >= i; maximise Σ σ_j D_j Δx
        let mut suffix = 0.0;
        let mut cost = vec![0.0; 2 * nodes];
        for i in (0..nodes).rev() {
            if i < grid_size {
                suffix += sigma[i] * dx;
            }
            cost[i] = -suffix;
            cost[nodes + i] = suffix;
        }
        lp.cost = cost;
        let sol = lp.solve(cfg.max_pivots)?;
        solves += 1;
        let x: Vec<f64> = sol.x.iter().map(|v| v.max(0.0)).collect();
        let (mut fp, mut fq) = (0.0, 0.0);
        let mut achieved = 0.0;
        let mut next = sigma.clone();
        for j in 0..grid_size {
            fp += x[j];
            fq += x[nodes + j];
            let d = fp - fq;
            achieved += d.abs() * dx;
            if d.abs() > 1e-12 {
                next[j] = d.signum();
            }
        }
        let improved = best.as_ref().is_none_or(|(w, _)| achieved > *w + 1e-12);
        if improved {
            best = Some((achieved, x));
        }
        if next == sigma || !improved {
            break;
        }
        sigma = next;
    }
    let (_, x) = best.expect("at least one LP round");
    let unit_p = AtomicDistribution::normalized(xs.iter().copied().zip(x[..nodes].iter().copied()))?;
    let unit_q = AtomicDistribution::normalized(xs.iter().copied().zip(x[nodes..].iter().copied()))?;
    let p = unit_p.affine(a, b)?;
    let q = unit_q.affine(a, b)?;
    Ok(MomentPair {
        w1: wasserstein1(&p, &q),
        moment_residual: moment_residual(&p, &q, s, a)?,
        p,
        q,
        s,
        interval,
        lp_solves: solves,
    })
}

/// Total variation between the count distributions of `t` trials under the
/// two mixtures: `½ Σ_s |E_P B_s^t - E_Q B_s^t|`.
pub fn binomial_channel_tv(p: &AtomicDistribution, q: &AtomicDistribution, t: u32) -> Result<f64> {
    total_variation_fingerprint(&expected_fingerprint(p, t)?, &expected_fingerprint(q, t)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Upper limit on the number of matched moments.
    pub s_cap: usize,
    pub min_grid: usize,
    pub pair: PairConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            s_cap: 40,
            min_grid: 200,
            pair: PairConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    #[serde(rename = "N")]
    pub n: f64,
    pub t: u32,
    pub s: usize,
    pub interval: [f64; 2],
    pub achieved_w1: f64,
    /// `1 / (e^4 sqrt(t ln N))`
    pub target_w1: f64,
    pub channel_tv: f64,
}

pub fn theorem4_scenario(n: f64, t: u32) -> Result<ScenarioReport> {
    theorem4_scenario_with(n, t, &ScenarioConfig::default())
}

/// Builds the pair on `[½ - sqrt(ln N / t), ½ + sqrt(ln N / t)] ∩ [0, 1]` with
/// `s = min(⌈e^4 ln N⌉, s_cap)` matched moments.
pub fn theorem4_scenario_with(n: f64, t: u32, cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    if t == 0 {
        return Err(invalid("t must be positive"));
    }
    if !(n > 1.0) || !n.is_finite() {
        return Err(invalid(format!("N = {n} gives a degenerate interval")));
    }
    let ln_n = n.ln();
    let half = (ln_n / t as f64).sqrt();
    let (a, b) = ((0.5 - half).max(0.0), (0.5 + half).min(1.0));
    let e4 = 4f64.exp();
    // ⌈e^4 ln N⌉ without letting round-off push an integer up
    let s = ((e4 * ln_n - 1e-9).ceil().max(1.0) as usize).min(cfg.s_cap.max(1));
    let grid = cfg.min_grid.max(4 * s);
    let pair = moment_matched_pair_with(s, (a, b), grid, &cfg.pair)?;
    Ok(ScenarioReport {
        n,
        t,
        s,
        interval: [a, b],
        achieved_w1: pair.w1,
        target_w1: 1.0 / (e4 * (t as f64 * ln_n).sqrt()),
        channel_tv: binomial_channel_tv(&pair.p, &pair.q, t)?,
    })
}
