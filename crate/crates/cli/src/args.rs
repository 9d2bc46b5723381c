use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "popdist", version, about = "Estimate the distribution of per-individual success probabilities from binomial counts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the mixing distribution from an observation file.
    Estimate(EstimateArgs),
    /// Run a synthetic benchmark and write per-replication W1 results.
    #[command(long_about = SIMULATE_HELP)]
    Simulate(SimulateArgs),
    /// Check the Chebyshev-in-Bernstein coefficient bounds and the Kravchuk bound.
    Verify(VerifyArgs),
    /// Compare two distribution files (W1, and fingerprint KL/TV for a given t).
    Compare(CompareArgs),
    /// Build the moment-matched pair for a lower-bound scenario.
    Scenario(ScenarioArgs),
}

const SIMULATE_HELP: &str = "\
Run a synthetic benchmark and write results.csv and summary.csv.

Settings come from flags, from a spec file given with --spec, or both (flags
win). A spec file holds one `key = value` pair per line; `#` starts a comment.
Keys: id, truth, N, t, seed, reps, methods, grid_size, jobs, c1, c2, moments.

    # spike benchmark
    truth = spike:0.5
    N = 10000
    t = 10
    methods = mle,empirical
    reps = 5

Truths: spike:<c>, three_spikes, truncated_gaussian[:<mean>:<variance>],
uniform, or custom:<path to a location,mass CSV>.

The seed falls back to POPDIST_SEED, then 0.";

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Observation file: header `t=<int>` then one count per line, or header
    /// `trials,t=<int>` then one 0/1 string per individual.
    #[arg(long)]
    pub input: PathBuf,
    /// mle, empirical, moment_matching or local_moment_matching.
    #[arg(long, default_value = "mle")]
    pub method: String,
    /// Grid intervals (mle and moment_matching default 1000, local_moment_matching 200 per bin).
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Matched moments for moment_matching (default t).
    #[arg(long)]
    pub moments: Option<u32>,
    /// Bin width constant for local_moment_matching.
    #[arg(long)]
    pub c1: Option<f64>,
    /// Moment count constant for local_moment_matching.
    #[arg(long)]
    pub c2: Option<f64>,
    /// EM iteration cap for mle.
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Record wall-clock time in report.json (otherwise written as 0).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Spec file with key = value lines.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long)]
    pub truth: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated estimator names.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub moments: Option<u32>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    /// Worker cap for replications.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Record runtimes in results.csv (otherwise written as 0).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 50)]
    pub t_max: u32,
    /// Largest derivative order for the Kravchuk check (default t-max).
    #[arg(long)]
    pub k_max: Option<u32>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// First distribution CSV (location,mass).
    #[arg(long)]
    pub p: PathBuf,
    /// Second distribution CSV.
    #[arg(long)]
    pub q: PathBuf,
    /// Also compare expected fingerprints for this many trials.
    #[arg(long)]
    pub t: Option<u32>,
    /// Write metrics.json here instead of printing only.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    /// Population size; the support half-width is sqrt(ln N / t).
    #[arg(long = "N")]
    pub n: f64,
    #[arg(long)]
    pub t: u32,
    /// Upper limit on matched moments.
    #[arg(long, default_value_t = 40)]
    pub s_cap: usize,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
