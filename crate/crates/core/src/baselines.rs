//! Reference synchronization policies.

use crate::agent::select_action;
use crate::nn::BranchingNet;
use crate::seeds::SimRng;
use crate::views::{ActionVector, StalenessVector};

/// Broadcast everything; exempt from the budget.
pub fn full_sync_action(n: usize) -> ActionVector {
    ActionVector::ones(n)
}

/// Broadcast nothing; exempt from the budget.
pub fn no_sync_action(n: usize) -> ActionVector {
    ActionVector::zeros(n)
}

/// Broadcast the `budget` stalest items, ties to the lower index; minimizes
/// the post-broadcast maximum staleness.
pub fn greedy_minmax_action(staleness: &StalenessVector, budget: u32) -> ActionVector {
    let n = staleness.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| staleness.count(b).cmp(&staleness.count(a)).then(a.cmp(&b)));
    order.truncate((budget as usize).min(n));
    ActionVector::from_indices(n, &order)
}

/// Broadcast a uniformly random subset of `min(budget, n)` items.
pub fn anti_entropy_action(n: usize, budget: u32, rng: &mut SimRng) -> ActionVector {
    let k = (budget as usize).min(n);
    let chosen = rand::seq::index::sample(rng, n, k);
    ActionVector::from_indices(n, &chosen.into_vec())
}

/// A synchronization policy the harness can run against the environment.
#[derive(Debug)]
pub enum PolicyKind {
    FullSync,
    NoSync,
    GreedyMinMax,
    AntiEntropy,
    Learned(BranchingNet),
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::FullSync => "full-sync",
            PolicyKind::NoSync => "no-sync",
            PolicyKind::GreedyMinMax => "greedy",
            PolicyKind::AntiEntropy => "anti-entropy",
            PolicyKind::Learned(_) => "learned",
        }
    }

    /// The two reference bounds ignore the per-slot budget.
    pub fn budget_exempt(&self) -> bool {
        matches!(self, PolicyKind::FullSync | PolicyKind::NoSync)
    }

    pub fn decide(
        &self,
        staleness: &StalenessVector,
        budget: u32,
        rng: &mut SimRng,
    ) -> ActionVector {
        let n = staleness.len();
        match self {
            PolicyKind::FullSync => full_sync_action(n),
            PolicyKind::NoSync => no_sync_action(n),
            PolicyKind::GreedyMinMax => greedy_minmax_action(staleness, budget),
            PolicyKind::AntiEntropy => anti_entropy_action(n, budget, rng),
            PolicyKind::Learned(net) => {
                let input = net.encode_counts(staleness.counts());
                let output = net.forward(&input).expect("checkpoint matches environment");
                select_action(&output, budget, 0.0, rng)
            }
        }
    }
}

/// Largest staleness left standing after applying `action` to `staleness`.
pub fn post_broadcast_max(staleness: &StalenessVector, action: &ActionVector) -> u32 {
    (0..staleness.len())
        .map(|i| if action.get(i) { 0 } else { staleness.count(i) })
        .max()
        .unwrap_or(0)
}
