//! Wrapping a self-distribution policy for adversarially placed servers.
//!
//! At init the wrapper samples a phantom server set `I` of size `n` from
//! the request distribution, computes the minimum-cost relay matching
//! from the real servers onto `I`, and initializes the inner policy on
//! `I`. Each arriving request is served by the inner policy against `I`
//! and relayed through the fixed matching to a real server. The relay is
//! injective and never changes, so feasibility carries over, and each
//! request's cost obeys
//! `δ(r, relay(i)) ≤ η·(δ(r, i) + δ(i, relay(i)))`
//! for the space's approximate-triangle parameter `η`. Summing over a
//! run gives the per-trial bound
//! `wrapped ≤ η·(relay matching cost + inner run cost)`,
//! which holds pointwise, not just in expectation.

use rayon::prelude::*;
use serde::Serialize;

use crate::online::{run_online, OnlineError, OnlinePolicy};
use crate::optmatch::{opt_offline, OptEstimate};
use crate::seed;
use crate::space::{sample, Distribution, MetricSpace, Point};

/// An inner-policy factory: one fresh instance per trial.
pub type PolicyFactory = std::sync::Arc<dyn Fn() -> Box<dyn OnlinePolicy> + Send + Sync>;

/// The wrapped policy. Exposes the relay and inner costs of the current
/// run so reports can check the per-trial triangle bound.
pub struct ReductionPolicy {
    inner: Box<dyn OnlinePolicy>,
    dist: Distribution,
    phantoms: Vec<Point>,
    relay: Vec<usize>,
    relay_cost: f64,
    inner_cost: f64,
    initialized: bool,
}

impl ReductionPolicy {
    pub fn new(inner: Box<dyn OnlinePolicy>, dist: Distribution) -> Self {
        ReductionPolicy {
            inner,
            dist,
            phantoms: Vec::new(),
            relay: Vec::new(),
            relay_cost: 0.0,
            inner_cost: 0.0,
            initialized: false,
        }
    }

    /// Cost of the fixed matching from real servers onto the phantom set;
    /// a realization of the offline optimum against `n` distribution draws.
    pub fn relay_cost(&self) -> f64 {
        self.relay_cost
    }

    /// Accumulated inner-policy cost `Σ δ(r, i)` over the served requests.
    pub fn inner_cost(&self) -> f64 {
        self.inner_cost
    }

    pub fn phantoms(&self) -> &[Point] {
        &self.phantoms
    }
}

impl OnlinePolicy for ReductionPolicy {
    fn init(
        &mut self,
        space: &MetricSpace,
        servers: &[Point],
        n_requests: usize,
        seed_val: u64,
    ) -> Result<(), OnlineError> {
        if servers.len() < n_requests {
            return Err(OnlineError::NotEnoughServers {
                servers: servers.len(),
                requests: n_requests,
            });
        }
        self.phantoms = sample(
            &self.dist,
            space,
            n_requests,
            seed::mix(seed_val, seed::tag::PHANTOMS),
        )?;
        // Minimum-cost matching covering every phantom; leftover real
        // servers stay permanently unused.
        let relay = opt_offline(space, servers, &self.phantoms)?;
        self.relay = relay.pairs;
        self.relay_cost = relay.total_cost;
        self.inner_cost = 0.0;
        self.inner
            .init(space, &self.phantoms, n_requests, seed::mix(seed_val, seed::tag::POLICY))?;
        self.initialized = true;
        Ok(())
    }

    fn serve(
        &mut self,
        space: &MetricSpace,
        _servers: &[Point],
        request: &Point,
    ) -> Result<usize, OnlineError> {
        if !self.initialized {
            return Err(OnlineError::NotInitialized);
        }
        let i = self.inner.serve(space, &self.phantoms, request)?;
        if i >= self.phantoms.len() {
            return Err(OnlineError::ServerReuse(i));
        }
        self.inner_cost += space.dist(request, &self.phantoms[i])?;
        Ok(self.relay[i])
    }
}

/// Convenience constructor mirroring the policy's role.
pub fn wrap_reduction(inner: Box<dyn OnlinePolicy>, dist: Distribution) -> ReductionPolicy {
    ReductionPolicy::new(inner, dist)
}

/// Monte Carlo comparison of the wrapped policy against
/// `η·(OPT(S,n) + inner self-distribution cost)`, with shared trial seeds.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub eta: f64,
    pub trials: usize,
    pub n: usize,
    pub servers: usize,
    /// Mean and SE of the wrapped policy's run cost on the fixed servers.
    pub wrapped: OptEstimate,
    /// Mean and SE of the relay matching cost, an estimate of OPT(S, n).
    pub opt_sn: OptEstimate,
    /// Mean and SE of the inner policy's cost on its phantom instances.
    pub inner: OptEstimate,
    /// `η·(opt_sn + inner) + 3·SE − wrapped`: nonnegative on pass.
    pub slack: f64,
    /// Trials where the pointwise bound
    /// `wrapped ≤ η·(relay + inner) + 1e−9` failed. Zero expected always.
    pub pointwise_violations: usize,
    pub pass: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ReduceError {
    #[error("need ≥ 30 trials for the statistical report, got {0}")]
    TooFewTrials(usize),
    #[error(transparent)]
    Online(#[from] OnlineError),
}

/// Runs `trials` wrapped executions on the fixed `servers`, measuring the
/// wrapped cost, the relay cost (whose mean estimates `OPT(S, n)`), and
/// the inner policy's self-distribution cost, then checks
/// `wrapped ≤ η·(OPT(S,n) + inner) + 3·SE` and the per-trial relay bound.
pub fn reduction_bound_report(
    space: &MetricSpace,
    servers: &[Point],
    dist: &Distribution,
    inner: &PolicyFactory,
    n: usize,
    trials: usize,
    master_seed: u64,
) -> Result<ReductionReport, ReduceError> {
    if trials < 30 {
        return Err(ReduceError::TooFewTrials(trials));
    }
    let eta = space.eta();
    let per_trial: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64, f64), ReduceError> {
            let ts = seed::trial_seed(master_seed, t);
            let requests = sample(dist, space, n, seed::mix(ts, seed::tag::REQUESTS))
                .map_err(OnlineError::from)?;
            let mut wrapped = ReductionPolicy::new(inner(), dist.clone());
            let record = run_online(
                &mut wrapped,
                space,
                servers,
                &requests,
                seed::mix(ts, seed::tag::POLICY),
            )?;
            Ok((record.total_cost, wrapped.relay_cost(), wrapped.inner_cost()))
        })
        .collect::<Result<_, _>>()?;

    let wrapped_costs: Vec<f64> = per_trial.iter().map(|x| x.0).collect();
    let relay_costs: Vec<f64> = per_trial.iter().map(|x| x.1).collect();
    let inner_costs: Vec<f64> = per_trial.iter().map(|x| x.2).collect();
    let pointwise_violations = per_trial
        .iter()
        .filter(|(w, r, i)| *w > eta * (r + i) + 1e-9)
        .count();

    let wrapped = OptEstimate::from_samples(&wrapped_costs, master_seed);
    let opt_sn = OptEstimate::from_samples(&relay_costs, master_seed);
    let inner_est = OptEstimate::from_samples(&inner_costs, master_seed);
    let combined_se =
        (wrapped.se.powi(2) + eta * eta * (opt_sn.se.powi(2) + inner_est.se.powi(2))).sqrt();
    let bound = eta * (opt_sn.mean + inner_est.mean) + 3.0 * combined_se;
    let slack = bound - wrapped.mean;
    Ok(ReductionReport {
        eta,
        trials,
        n,
        servers: servers.len(),
        wrapped,
        opt_sn,
        inner: inner_est,
        slack,
        pointwise_violations,
        pass: slack >= 0.0 && pointwise_violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::{GreedyPolicy, SoarPolicy, UniformTieBreak};

    fn pts(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::from(x)).collect()
    }

    #[test]
    fn single_server_relay_is_forced() {
        let space = MetricSpace::euclidean(1).unwrap();
        let servers = pts(&[0.7]);
        let mut policy = ReductionPolicy::new(
            Box::new(GreedyPolicy::new(UniformTieBreak)),
            Distribution::uniform(),
        );
        let rec = run_online(&mut policy, &space, &servers, &pts(&[0.2]), 7).unwrap();
        assert_eq!(rec.steps[0].server, 0);
        assert!((rec.total_cost - 0.5).abs() < 1e-12);
    }

    #[test]
    fn point_mass_phantom_makes_identity_relay() {
        // A single server location with all phantom mass on it: relay cost
        // is zero and the wrapped cost equals the inner cost exactly.
        let space = MetricSpace::euclidean(1).unwrap();
        let servers = pts(&[0.25, 0.25]);
        let dist = crate::space::make_server_uniform(&servers).unwrap();
        for seed_val in 0..10 {
            let mut policy = ReductionPolicy::new(
                Box::new(GreedyPolicy::new(UniformTieBreak)),
                dist.clone(),
            );
            let requests = pts(&[0.3, 0.6]);
            let rec = run_online(&mut policy, &space, &servers, &requests, seed_val).unwrap();
            assert_eq!(policy.relay_cost(), 0.0);
            assert!((rec.total_cost - policy.inner_cost()).abs() < 1e-12);
        }
    }

    #[test]
    fn pointwise_bound_holds_every_trial() {
        let space = MetricSpace::euclidean(2).unwrap();
        let dist = Distribution::uniform();
        let servers = sample(&dist, &space, 12, 400).unwrap();
        for seed_val in 0..25 {
            let requests = sample(&dist, &space, 8, 500 + seed_val).unwrap();
            let mut policy = ReductionPolicy::new(
                Box::new(GreedyPolicy::new(UniformTieBreak)),
                dist.clone(),
            );
            let rec = run_online(&mut policy, &space, &servers, &requests, seed_val).unwrap();
            assert!(
                rec.total_cost <= policy.relay_cost() + policy.inner_cost() + 1e-9,
                "wrapped {} vs relay {} + inner {}",
                rec.total_cost,
                policy.relay_cost(),
                policy.inner_cost()
            );
        }
    }

    #[test]
    fn report_passes_on_euclidean_line() {
        let space = MetricSpace::euclidean(1).unwrap();
        let servers = pts(&[0.05, 0.3, 0.55, 0.8, 0.92, 0.99]);
        let dist = Distribution::uniform();
        let factory: PolicyFactory =
            std::sync::Arc::new(|| Box::new(SoarPolicy::new(Distribution::uniform())));
        let report = reduction_bound_report(&space, &servers, &dist, &factory, 4, 60, 7).unwrap();
        assert_eq!(report.pointwise_violations, 0);
        assert!(report.pass, "slack {}", report.slack);
        assert_eq!(report.eta, 1.0);
    }

    #[test]
    fn report_rejects_thin_trials() {
        let space = MetricSpace::euclidean(1).unwrap();
        let factory: PolicyFactory =
            std::sync::Arc::new(|| Box::new(GreedyPolicy::new(UniformTieBreak)));
        let err = reduction_bound_report(
            &space,
            &pts(&[0.5]),
            &Distribution::uniform(),
            &factory,
            1,
            5,
            7,
        );
        assert!(matches!(err, Err(ReduceError::TooFewTrials(5))));
    }
}
