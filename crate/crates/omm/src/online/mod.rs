//! The online policy contract and the non-tree policies.
//!
//! A policy is initialized with the server set and then consumes requests
//! one at a time, each time naming a free server; the choice is
//! irrevocable. [`run_online`] drives a policy over a request sequence,
//! enforcing feasibility and recording per-request costs.

mod greedy;
mod hgreedy;
mod soar;

pub use greedy::{GreedyPolicy, LowestIndexTieBreak, TieBreakRule, UniformTieBreak};
pub use hgreedy::HierarchicalGreedyPolicy;
pub use soar::SoarPolicy;

use thiserror::Error;

use crate::optmatch::{pairwise_sum, OptError};
use crate::space::{MetricSpace, Point, SpaceError};

/// Shared tie tolerance: a server is "closest" if its distance is within
/// this of the minimum. Exact tree metrics produce exact ties; continuous
/// metrics almost never do.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum OnlineError {
    #[error("policy not initialized")]
    NotInitialized,
    #[error("need at least as many servers as requests: |S|={servers} < n={requests}")]
    NotEnoughServers { servers: usize, requests: usize },
    #[error("no free server available")]
    NoFreeServer,
    #[error("policy returned server {0}, which is not free")]
    ServerReuse(usize),
    #[error("served more requests than declared at init")]
    TooManyArrivals,
    #[error("policy requires {0}")]
    UnsupportedInstance(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Opt(#[from] Box<OptError>),
}

impl From<OptError> for OnlineError {
    fn from(e: OptError) -> Self {
        OnlineError::Opt(Box::new(e))
    }
}

/// A stateful online matching policy.
///
/// `init` receives the space, the full server set, the number of requests
/// that will arrive, and a seed for any internal randomness. Each `serve`
/// must return a currently free server index and marks it used. Instances
/// are single-threaded; run one instance per trial.
pub trait OnlinePolicy: Send {
    fn init(
        &mut self,
        space: &MetricSpace,
        servers: &[Point],
        n_requests: usize,
        seed: u64,
    ) -> Result<(), OnlineError>;

    fn serve(
        &mut self,
        space: &MetricSpace,
        servers: &[Point],
        request: &Point,
    ) -> Result<usize, OnlineError>;
}

/// One served request.
#[derive(Clone, Debug)]
pub struct RunStep {
    pub request: Point,
    pub server: usize,
    pub cost: f64,
}

/// Full trace of an online run. The total equals the sum of increments.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub steps: Vec<RunStep>,
    pub total_cost: f64,
}

/// All free servers within `tol` of the minimum distance to `r`.
pub fn closest_set(
    space: &MetricSpace,
    servers: &[Point],
    free: &[usize],
    r: &Point,
    tol: f64,
) -> Result<Vec<usize>, OnlineError> {
    if free.is_empty() {
        return Err(OnlineError::NoFreeServer);
    }
    let mut dists = Vec::with_capacity(free.len());
    let mut best = f64::INFINITY;
    for &j in free {
        let d = space.dist(r, &servers[j])?;
        if d < best {
            best = d;
        }
        dists.push(d);
    }
    Ok(free
        .iter()
        .zip(&dists)
        .filter(|(_, &d)| d <= best + tol)
        .map(|(&j, _)| j)
        .collect())
}

/// Feeds the request sequence to the policy in order. Aborts with
/// [`OnlineError::ServerReuse`] if the policy ever names a non-free
/// server; this is a policy contract violation, not a recoverable state.
pub fn run_online(
    policy: &mut dyn OnlinePolicy,
    space: &MetricSpace,
    servers: &[Point],
    requests: &[Point],
    seed: u64,
) -> Result<RunRecord, OnlineError> {
    if servers.len() < requests.len() {
        return Err(OnlineError::NotEnoughServers {
            servers: servers.len(),
            requests: requests.len(),
        });
    }
    policy.init(space, servers, requests.len(), seed)?;
    let mut free = vec![true; servers.len()];
    let mut steps = Vec::with_capacity(requests.len());
    for r in requests {
        let j = policy.serve(space, servers, r)?;
        if j >= servers.len() || !free[j] {
            return Err(OnlineError::ServerReuse(j));
        }
        free[j] = false;
        let cost = space.dist(r, &servers[j])?;
        steps.push(RunStep { request: r.clone(), server: j, cost });
    }
    let increments: Vec<f64> = steps.iter().map(|s| s.cost).collect();
    Ok(RunRecord { steps, total_cost: pairwise_sum(&increments) })
}
