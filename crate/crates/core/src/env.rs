//! The synchronization MDP.
//!
//! One step covers a full time slot: the broadcast lands, every origin
//! controller re-paths its requests from the updated views, the true
//! latencies of the chosen paths are recorded, and the network evolves. The
//! reward is a same-slot counterfactual — the average true latency the same
//! requests would have seen under the pre-broadcast views, minus the latency
//! they actually saw — so the zero action always earns exactly zero.
//!
//! Staleness bookkeeping: counts tick at the start of the slot and broadcast
//! entries then drop to zero, so after a step `counts[i] == 0` exactly when
//! the action carried item `i`.

use crate::dynamics::{
    advance_bis_values, change_probabilities, sample_budget, sample_requests, DynamicsConfig,
    ServiceRequest, TrueNetworkState,
};
use crate::error::{Error, Result};
use crate::pathing::{construct_service_path, evaluate_true_latency, DomainAdjacency};
use crate::seeds::{stream, stream_rng, SimRng};
use crate::topology::{
    build_topology, enumerate_bises, place_services, BisRegistry, DomainGraph, ServicePlacement,
    TopologySpec,
};
use crate::views::{apply_broadcast, refresh_own_domain, ActionVector, ControllerView, StalenessVector};

/// Service placement knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceSpec {
    pub count: usize,
    pub copies: usize,
    pub favored_domains: Vec<usize>,
    pub favored_prob: f64,
}

/// Everything one episode needs.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub domains: usize,
    pub topology: TopologySpec,
    pub services: ServiceSpec,
    pub dynamics: DynamicsConfig,
    /// Slots per episode.
    pub horizon: u32,
    pub discount: f64,
    /// Pins the world: topology sampling and service placement. Runs that
    /// must share one network (training and every evaluation seed of a
    /// comparison) share this; a learned scheduler's arm indices only mean
    /// anything on the world it was trained on.
    pub world_seed: u64,
    /// Drives everything that varies per run: initial values, budgets,
    /// requests, and value changes.
    pub seed: u64,
    /// Start all controllers synchronized with truth at slot 0.
    pub synchronized_start: bool,
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::InvalidArgument("discount outside (0, 1)".into()));
        }
        self.dynamics.validate()
    }
}

/// What one slot produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    /// Counterfactual latency reduction: baseline minus after.
    pub reward: f64,
    pub avg_latency_after: f64,
    pub avg_latency_baseline: f64,
    pub budget: u32,
    pub next_state: StalenessVector,
}

/// One simulation instance. Cloning yields an independent replica with
/// identical upcoming randomness, which is how tests replay a slot under
/// different actions.
#[derive(Debug, Clone)]
pub struct SyncEnv {
    graph: DomainGraph,
    placement: ServicePlacement,
    registry: BisRegistry,
    adjacency: DomainAdjacency,
    dynamics: DynamicsConfig,
    change_probs: Vec<f64>,
    truth: TrueNetworkState,
    views: Vec<ControllerView>,
    staleness: StalenessVector,
    slot: u32,
    horizon: u32,
    discount: f64,
    slot_budget: u32,
    rng: SimRng,
}

impl SyncEnv {
    /// Builds the world and returns the environment at slot 0 with zero
    /// staleness (the initial MDP state).
    pub fn new(config: &EpisodeConfig) -> Result<Self> {
        config.validate()?;
        let mut world_rng = stream_rng(config.world_seed, stream::WORLD);
        let graph = build_topology(config.domains, &config.topology, &mut world_rng)?;
        let placement = place_services(
            &graph,
            config.services.count,
            config.services.copies,
            &config.services.favored_domains,
            config.services.favored_prob,
            &mut world_rng,
        )?;
        let mut rng = stream_rng(config.seed, stream::ENV);
        let registry = enumerate_bises(&graph, &placement);
        let adjacency = DomainAdjacency::new(&graph, &registry);
        let truth = TrueNetworkState::init(&config.dynamics, registry.len(), &mut rng);
        let views = (0..graph.domain_count())
            .map(|owner| {
                let believed = if config.synchronized_start {
                    truth.values.clone()
                } else {
                    (0..registry.len())
                        .map(|_| config.dynamics.value_distribution.sample(&mut rng))
                        .collect()
                };
                let mut view = ControllerView::new(owner, believed);
                refresh_own_domain(&mut view, &registry, &truth);
                view
            })
            .collect();
        let change_probs = change_probabilities(&config.dynamics, registry.len());
        let slot_budget = sample_budget(config.dynamics.budget_mean, &mut rng);
        let staleness = StalenessVector::zeros(registry.len());
        Ok(Self {
            graph,
            placement,
            registry,
            adjacency,
            dynamics: config.dynamics.clone(),
            change_probs,
            truth,
            views,
            staleness,
            slot: 0,
            horizon: config.horizon,
            discount: config.discount,
            slot_budget,
            rng,
        })
    }

    pub fn n(&self) -> usize {
        self.registry.len()
    }

    pub fn slot(&self) -> u32 {
        self.slot
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn is_finished(&self) -> bool {
        self.slot >= self.horizon
    }

    pub fn registry(&self) -> &BisRegistry {
        &self.registry
    }

    pub fn graph(&self) -> &DomainGraph {
        &self.graph
    }

    pub fn placement(&self) -> &ServicePlacement {
        &self.placement
    }

    /// Current MDP state.
    pub fn staleness(&self) -> &StalenessVector {
        &self.staleness
    }

    /// This slot's synchronization budget. Drawn once per slot; repeated
    /// calls within a slot return the same value.
    pub fn current_budget(&self) -> Result<u32> {
        if self.is_finished() {
            return Err(Error::EpisodeFinished { slot: self.slot, horizon: self.horizon });
        }
        Ok(self.slot_budget)
    }

    /// Runs one slot under the budget constraint.
    pub fn step(&mut self, action: &ActionVector) -> Result<SlotOutcome> {
        self.step_inner(action, true)
    }

    /// Runs one slot ignoring the budget; for the budget-exempt reference
    /// policies (all-ones / all-zeros) and dominance checks.
    pub fn step_unbudgeted(&mut self, action: &ActionVector) -> Result<SlotOutcome> {
        self.step_inner(action, false)
    }

    fn step_inner(&mut self, action: &ActionVector, enforce_budget: bool) -> Result<SlotOutcome> {
        if self.is_finished() {
            return Err(Error::EpisodeFinished { slot: self.slot, horizon: self.horizon });
        }
        if action.len() != self.n() {
            return Err(Error::ShapeMismatch(format!(
                "action length {} against {} registered items",
                action.len(),
                self.n()
            )));
        }
        let budget = self.slot_budget;
        if enforce_budget {
            let used = action.count_ones();
            if used > budget as usize {
                return Err(Error::BudgetExceeded { used, budget: budget as usize });
            }
        }
        let requests =
            sample_requests(&self.placement, &self.dynamics, self.graph.domain_count(), &mut self.rng);
        self.transition(action, &requests, budget)
    }

    /// The slot transition with explicit requests; the crate's tests use this
    /// to replay hand-built slots.
    pub(crate) fn transition(
        &mut self,
        action: &ActionVector,
        requests: &[ServiceRequest],
        budget: u32,
    ) -> Result<SlotOutcome> {
        for view in &mut self.views {
            refresh_own_domain(view, &self.registry, &self.truth);
        }
        let snapshot = self.views.clone();

        self.staleness.tick();
        apply_broadcast(
            &mut self.views,
            &mut self.staleness,
            action,
            &self.truth,
            &self.registry,
            None,
        )?;

        let avg_latency_after = self.average_true_latency(&self.views, requests)?;
        let avg_latency_baseline = self.average_true_latency(&snapshot, requests)?;
        let reward = avg_latency_baseline - avg_latency_after;

        advance_bis_values(&mut self.truth, &self.change_probs, &self.dynamics, &mut self.rng);
        self.slot += 1;
        self.truth.slot = self.slot;
        self.slot_budget = sample_budget(self.dynamics.budget_mean, &mut self.rng);

        Ok(SlotOutcome {
            reward,
            avg_latency_after,
            avg_latency_baseline,
            budget,
            next_state: self.staleness.clone(),
        })
    }

    fn average_true_latency(
        &self,
        views: &[ControllerView],
        requests: &[ServiceRequest],
    ) -> Result<f64> {
        if requests.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for request in requests {
            let path = construct_service_path(
                &self.adjacency,
                &self.registry,
                &self.placement,
                &views[request.origin_domain],
                request,
            )?;
            total += evaluate_true_latency(&self.adjacency, &self.registry, &path, &self.truth);
        }
        Ok(total / requests.len() as f64)
    }

    #[cfg(test)]
    pub(crate) fn force_truth(&mut self, values: Vec<f64>) {
        assert_eq!(values.len(), self.n());
        self.truth.values = values;
    }

    #[cfg(test)]
    pub(crate) fn force_view(&mut self, owner: usize, values: Vec<f64>) {
        assert_eq!(values.len(), self.n());
        self.views[owner] = ControllerView::new(owner, values);
    }
}

/// Discounted return of a reward sequence: the t-th reward (1-based) is
/// weighted by `discount^t`.
pub fn discounted_return(rewards: &[f64], discount: f64) -> f64 {
    rewards
        .iter()
        .enumerate()
        .map(|(i, &r)| discount.powi(i as i32 + 1) * r)
        .sum()
}
