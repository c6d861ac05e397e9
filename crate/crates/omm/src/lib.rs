//! Online metric matching: simulation library for matching stochastic
//! requests to servers in a metric space, one request at a time.
//!
//! The crate is organized around six pieces:
//!
//! - [`space`]: metric spaces (`[0,1]^d` Euclidean, p-power costs, rooted
//!   tree metrics, HSTs) and request distributions with seeded sampling.
//! - [`optmatch`]: exact offline minimum-cost matching and Monte Carlo
//!   estimators of the offline optimum.
//! - [`online`]: the online policy contract and non-tree policies (greedy
//!   with pluggable tie-breaking, a simulate-optimize-assign-repeat policy,
//!   hierarchical greedy on dyadic grids).
//! - [`hst`]: random HST embeddings of finite point sets plus the tree
//!   greedy subroutines and an exact-expectation engine.
//! - [`reduce`]: wraps a self-distribution policy into one that serves
//!   adversarially placed servers by relaying through a fixed matching.
//! - [`harness`]: seeded experiment runner, adversarial server generators,
//!   scaling-law fits, and check suites behind the `omm` binary.
//!
//! Every randomized routine takes an explicit seed and is reproducible:
//! the same seed yields the same draws regardless of thread count.

pub mod harness;
pub mod hst;
pub mod online;
pub mod optmatch;
pub mod reduce;
pub mod seed;
pub mod space;

pub use online::{run_online, OnlinePolicy, RunRecord};
pub use optmatch::{opt_offline, Matching, OptEstimate};
pub use space::{Distribution, MetricSpace, Point};
