//! Simulate-optimize-assign-repeat.
//!
//! On the t-th arrival (1-indexed, n declared at init) the policy samples
//! `n − t` phantom requests from the declared distribution, solves the
//! exact offline matching between the free servers and the arriving
//! request plus phantoms, and commits the arriving request's assignment.
//! Phantom draws are independent across arrivals.

use super::{OnlineError, OnlinePolicy};
use crate::optmatch::opt_offline;
use crate::space::{Distribution, MetricSpace, Point};

pub struct SoarPolicy {
    dist: Distribution,
    n: usize,
    arrivals: usize,
    free: Vec<usize>,
    phantom_seed: u64,
}

impl SoarPolicy {
    pub fn new(dist: Distribution) -> Self {
        SoarPolicy { dist, n: 0, arrivals: 0, free: Vec::new(), phantom_seed: 0 }
    }
}

impl OnlinePolicy for SoarPolicy {
    fn init(
        &mut self,
        _space: &MetricSpace,
        servers: &[Point],
        n_requests: usize,
        seed: u64,
    ) -> Result<(), OnlineError> {
        if servers.len() < n_requests {
            return Err(OnlineError::NotEnoughServers {
                servers: servers.len(),
                requests: n_requests,
            });
        }
        self.n = n_requests;
        self.arrivals = 0;
        self.free = (0..servers.len()).collect();
        self.phantom_seed = crate::seed::mix(seed, crate::seed::tag::PHANTOMS);
        Ok(())
    }

    fn serve(
        &mut self,
        space: &MetricSpace,
        servers: &[Point],
        request: &Point,
    ) -> Result<usize, OnlineError> {
        if self.free.is_empty() {
            return Err(OnlineError::NoFreeServer);
        }
        if self.arrivals >= self.n {
            return Err(OnlineError::TooManyArrivals);
        }
        let t = self.arrivals + 1;
        let phantom_count = self.n - t;
        let phantoms = crate::space::sample(
            &self.dist,
            space,
            phantom_count,
            crate::seed::mix(self.phantom_seed, t as u64),
        )?;
        let mut sim_requests = Vec::with_capacity(phantom_count + 1);
        sim_requests.push(request.clone());
        sim_requests.extend(phantoms);
        let free_points: Vec<Point> = self.free.iter().map(|&j| servers[j].clone()).collect();
        let matching = opt_offline(space, &free_points, &sim_requests)?;
        let chosen = self.free[matching.pairs[0]];
        let pos = self.free.iter().position(|&j| j == chosen).unwrap();
        self.free.swap_remove(pos);
        self.arrivals = t;
        Ok(chosen)
    }
}
