//! Greedy matching with pluggable tie-breaking.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{closest_set, OnlineError, OnlinePolicy, TIE_TOL};
use crate::space::{MetricSpace, Point};

/// A randomized rule for choosing among the tied closest servers.
///
/// Rules are *local*: they see only the tied candidate set. A rule is
/// *non-increasing* if no candidate's probability rises when the tied set
/// grows; the uniform rule has this property since `1/|S'| ≥ 1/|S''|`
/// whenever `S' ⊆ S''`.
pub trait TieBreakRule: Send + Sync {
    /// Selection probabilities for the candidates, in input order.
    /// Must be a probability vector over any nonempty input.
    fn probabilities(&self, tied: &[usize]) -> Vec<f64>;
}

/// Uniform over the tied set.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformTieBreak;

impl TieBreakRule for UniformTieBreak {
    fn probabilities(&self, tied: &[usize]) -> Vec<f64> {
        vec![1.0 / tied.len() as f64; tied.len()]
    }
}

/// Deterministically picks the lowest server index. Also local and
/// non-increasing: the minimum of a subset keeps probability 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct LowestIndexTieBreak;

impl TieBreakRule for LowestIndexTieBreak {
    fn probabilities(&self, tied: &[usize]) -> Vec<f64> {
        let min = *tied.iter().min().expect("nonempty tied set");
        tied.iter().map(|&j| if j == min { 1.0 } else { 0.0 }).collect()
    }
}

/// Matches each request to one of the closest free servers, drawn from
/// the tie-break rule.
pub struct GreedyPolicy<T: TieBreakRule> {
    rule: T,
    free: Vec<usize>,
    rng: Option<ChaCha8Rng>,
}

impl<T: TieBreakRule> GreedyPolicy<T> {
    pub fn new(rule: T) -> Self {
        GreedyPolicy { rule, free: Vec::new(), rng: None }
    }
}

impl<T: TieBreakRule> OnlinePolicy for GreedyPolicy<T> {
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
        self.free = (0..servers.len()).collect();
        self.rng = Some(crate::seed::rng(seed));
        Ok(())
    }

    fn serve(
        &mut self,
        space: &MetricSpace,
        servers: &[Point],
        request: &Point,
    ) -> Result<usize, OnlineError> {
        let rng = self.rng.as_mut().ok_or(OnlineError::NotInitialized)?;
        let tied = closest_set(space, servers, &self.free, request, TIE_TOL)?;
        let probs = self.rule.probabilities(&tied);
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let mut u: f64 = rng.gen();
        let mut chosen = *tied.last().expect("closest_set is never empty");
        for (&j, &p) in tied.iter().zip(&probs) {
            if u < p {
                chosen = j;
                break;
            }
            u -= p;
        }
        let pos = self
            .free
            .iter()
            .position(|&j| j == chosen)
            .ok_or(OnlineError::ServerReuse(chosen))?;
        self.free.swap_remove(pos);
        Ok(chosen)
    }
}
