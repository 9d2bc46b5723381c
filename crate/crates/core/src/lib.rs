//! Estimating the distribution of per-individual success probabilities from
//! sparse binomial observations.
//!
//! Each of `N` individuals has an unknown `p_i` drawn from a mixing
//! distribution `P*`, and we see `X_i ~ Binomial(t, p_i)` with `t` small. The
//! crate provides the nonparametric MLE (EM on a grid), the empirical plug-in,
//! global and local moment matching, a Wasserstein-1 evaluation engine, and
//! numeric checks of the polynomial-approximation bounds that govern the
//! estimators' error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod distribution;
pub mod error;
pub mod estimators;
pub mod fingerprint;
pub mod io;
pub mod lowerbound;
pub mod lp;
pub mod metrics;
mod nnls;
pub mod observations;
pub mod polyapprox;
pub mod simulate;
pub mod special;

pub use bernstein::{expected_fingerprint, BernsteinMatrix};
pub use distribution::AtomicDistribution;
pub use error::{Error, Result};
pub use fingerprint::{fingerprint_of, Fingerprint};
pub use metrics::{kl_divergence, moments, total_variation_fingerprint, wasserstein1, MomentVector};
pub use observations::{ObservationSet, Observations, TrialMatrix};
