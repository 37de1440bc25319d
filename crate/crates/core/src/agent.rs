//! The learned scheduler: budget-constrained epsilon-greedy action selection,
//! FIFO replay memory, double-Q targets against a delayed network, and the
//! semi-online training loop.

use crate::env::{SlotOutcome, SyncEnv};
use crate::error::{Error, Result};
use crate::nn::{BranchingNet, ForwardOutput, NetShape};
use crate::seeds::SimRng;
use crate::views::{ActionVector, StalenessVector};
use rand::Rng;
use std::collections::VecDeque;

/// One stored experience. `reward` already carries the broadcast offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: StalenessVector,
    pub action: ActionVector,
    pub reward: f64,
    pub next_state: StalenessVector,
    pub terminal: bool,
}

/// Fixed-capacity FIFO buffer of transitions.
#[derive(Debug, Clone)]
pub struct ReplayMemory {
    capacity: usize,
    buffer: VecDeque<Transition>,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self { capacity, buffer: VecDeque::with_capacity(capacity) }
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, index: usize) -> &Transition {
        &self.buffer[index]
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.buffer.iter()
    }

    pub fn push(&mut self, transition: Transition) {
        if self.buffer.len() == self.capacity {
            self.buffer.pop_front();
        }
        self.buffer.push_back(transition);
    }
}

/// Linear anneal from `start` to `end` over the first `anneal_slots` slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub anneal_slots: u32,
}

impl EpsilonSchedule {
    pub fn value(&self, slot: u32) -> f64 {
        if self.anneal_slots == 0 || slot >= self.anneal_slots {
            return self.end;
        }
        let frac = slot as f64 / self.anneal_slots as f64;
        self.start + (self.end - self.start) * frac
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub epsilon: EpsilonSchedule,
    pub minibatch: usize,
    pub replay_capacity: usize,
    /// Delayed network refresh period, in training steps.
    pub target_sync: u32,
    /// Reward offset per broadcast sub-action.
    pub offset_unit: f64,
    pub learning_rate: f64,
    pub discount: f64,
    /// Trunk and head widths of the networks.
    pub trunk: [usize; 2],
    pub head_hidden: usize,
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.minibatch == 0 || self.replay_capacity == 0 {
            return Err(Error::InvalidArgument("minibatch and capacity must be positive".into()));
        }
        if self.target_sync == 0 {
            return Err(Error::InvalidArgument("target sync gap must be at least 1".into()));
        }
        if self.offset_unit < 0.0 {
            return Err(Error::InvalidArgument("offset unit must be nonnegative".into()));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        for e in [self.epsilon.start, self.epsilon.end] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidArgument("epsilon outside [0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// Budget-constrained epsilon-greedy selection.
///
/// With probability `epsilon` a uniformly random feasible subset is
/// broadcast. Otherwise each arm prefers its higher-Q sub-action; if more
/// arms ask to broadcast than the budget allows, the arms with the greatest
/// broadcast Q-values keep their slots (ties to the lower arm index). Arms
/// preferring to stay silent are never forced on.
pub fn select_action(
    output: &ForwardOutput,
    budget: u32,
    epsilon: f64,
    rng: &mut SimRng,
) -> ActionVector {
    let n = output.arms();
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        let cap = (budget as usize).min(n);
        let k = rng.random_range(0..=cap);
        let chosen = rand::seq::index::sample(rng, n, k);
        return ActionVector::from_indices(n, &chosen.into_vec());
    }
    let mut wanting: Vec<usize> = (0..n)
        .filter(|&i| output.q_values[i][1] > output.q_values[i][0])
        .collect();
    if wanting.len() > budget as usize {
        wanting.sort_by(|&a, &b| {
            output.q_values[b][1]
                .total_cmp(&output.q_values[a][1])
                .then(a.cmp(&b))
        });
        wanting.truncate(budget as usize);
    }
    ActionVector::from_indices(n, &wanting)
}

/// Offsets the raw reward by the broadcast count and stores the tuple.
pub fn store_transition(
    replay: &mut ReplayMemory,
    state: StalenessVector,
    action: ActionVector,
    raw_reward: f64,
    next_state: StalenessVector,
    terminal: bool,
    offset_unit: f64,
) {
    let broadcasts = action.count_ones() as f64;
    let reward = raw_reward - broadcasts * offset_unit;
    replay.push(Transition { state, action, reward, next_state, terminal });
}

/// Double-Q per-arm targets: the online network picks each arm's best next
/// sub-action, the delayed network prices it. Terminal transitions collapse
/// to the stored reward.
pub fn compute_target(
    transition: &Transition,
    online: &BranchingNet,
    delayed: &BranchingNet,
    discount: f64,
) -> Result<Vec<f64>> {
    let arms = online.arms();
    if transition.terminal {
        return Ok(vec![transition.reward; arms]);
    }
    let next_input = online.encode_counts(transition.next_state.counts());
    let online_next = online.forward(&next_input)?;
    let delayed_next = delayed.forward(&next_input)?;
    Ok((0..arms)
        .map(|arm| {
            let best = online_next.arm_argmax(arm);
            transition.reward + discount * delayed_next.q_values[arm][best]
        })
        .collect())
}

/// Copies the online network into the delayed one every `every` steps.
/// Returns whether a copy happened.
pub fn sync_target(
    online: &BranchingNet,
    delayed: &mut BranchingNet,
    step: u64,
    every: u32,
) -> Result<bool> {
    if step % every as u64 == 0 {
        online.copy_into(delayed)?;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// One minibatch update: uniform sampling with replacement, double-Q
/// targets, the mean per-arm squared error across the batch, one Adam step.
/// Returns the batch loss.
pub fn train_step(
    replay: &ReplayMemory,
    online: &mut BranchingNet,
    delayed: &BranchingNet,
    config: &AgentConfig,
    rng: &mut SimRng,
) -> Result<f64> {
    if replay.len() < config.minibatch {
        return Err(Error::InsufficientReplay { have: replay.len(), need: config.minibatch });
    }
    let mut grad = vec![0.0; online.param_count()];
    let mut loss = 0.0;
    for _ in 0..config.minibatch {
        let transition = replay.get(rng.random_range(0..replay.len()));
        let targets = compute_target(transition, online, delayed, config.discount)?;
        let input = online.encode_counts(transition.state.counts());
        let chosen: Vec<usize> =
            transition.action.bits().iter().map(|&b| usize::from(b)).collect();
        loss += online.backward_into(&input, &chosen, &targets, &mut grad)?;
    }
    let scale = 1.0 / config.minibatch as f64;
    loss *= scale;
    for g in &mut grad {
        *g *= scale;
    }
    online.adam_step(&grad, config.learning_rate)?;
    Ok(loss)
}

/// Per-slot training telemetry.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub slot: u32,
    pub budget: u32,
    /// Raw environment reward.
    pub reward: f64,
    /// Reward after the broadcast offset, as stored in replay.
    pub offset_reward: f64,
    /// Batch loss, when an update ran this slot.
    pub loss: Option<f64>,
    pub epsilon: f64,
}

/// Online network, delayed copy, replay, and the loop driving them.
#[derive(Debug)]
pub struct Trainer {
    pub online: BranchingNet,
    pub delayed: BranchingNet,
    pub replay: ReplayMemory,
    config: AgentConfig,
    rng: SimRng,
    train_steps: u64,
}

impl Trainer {
    /// Fresh trainer for `arms` items; `input_scale` is recorded in the
    /// network and must match between training and evaluation.
    pub fn new(arms: usize, input_scale: f64, config: AgentConfig, rng: SimRng) -> Result<Self> {
        config.validate()?;
        let shape = NetShape { arms, trunk: config.trunk, head_hidden: config.head_hidden };
        let mut seed_rng = rng;
        let net_seed = seed_rng.random::<u64>();
        let online = BranchingNet::with_shape(shape, input_scale, net_seed);
        let delayed = online.clone();
        let replay = ReplayMemory::new(config.replay_capacity);
        Ok(Self { online, delayed, replay, config, rng: seed_rng, train_steps: 0 })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn train_steps(&self) -> u64 {
        self.train_steps
    }

    /// Loads history into replay, oldest first.
    pub fn seed_replay(&mut self, history: Vec<Transition>) {
        for transition in history {
            self.replay.push(transition);
        }
    }

    fn update_once(&mut self) -> Result<f64> {
        let loss = train_step(&self.replay, &mut self.online, &self.delayed, &self.config, &mut self.rng)?;
        self.train_steps += 1;
        sync_target(&self.online, &mut self.delayed, self.train_steps, self.config.target_sync)?;
        Ok(loss)
    }

    /// Runs `steps` updates on the already-stored history, without touching
    /// any environment.
    pub fn pretrain(&mut self, steps: u32) -> Result<Vec<f64>> {
        if steps == 0 {
            return Ok(Vec::new());
        }
        if self.replay.is_empty() {
            return Err(Error::InsufficientReplay { have: 0, need: self.config.minibatch });
        }
        (0..steps).map(|_| self.update_once()).collect()
    }

    /// The semi-online loop: act epsilon-greedily under the slot budget,
    /// store the offset reward, update on a minibatch once replay can fill
    /// one, refresh the delayed network on schedule.
    pub fn run_training(&mut self, env: &mut SyncEnv) -> Result<Vec<TrainRecord>> {
        if env.n() != self.online.arms() {
            return Err(Error::ShapeMismatch(format!(
                "environment has {} items, network has {} arms",
                env.n(),
                self.online.arms()
            )));
        }
        let total = env.horizon();
        let mut records = Vec::with_capacity(total as usize);
        let mut state = env.staleness().clone();
        for slot in env.slot()..total {
            let budget = env.current_budget()?;
            let epsilon = self.config.epsilon.value(slot);
            let input = self.online.encode_counts(state.counts());
            let output = self.online.forward(&input)?;
            let action = select_action(&output, budget, epsilon, &mut self.rng);
            let outcome: SlotOutcome = env.step(&action)?;
            let offset_reward =
                outcome.reward - action.count_ones() as f64 * self.config.offset_unit;
            store_transition(
                &mut self.replay,
                state,
                action,
                outcome.reward,
                outcome.next_state.clone(),
                env.is_finished(),
                self.config.offset_unit,
            );
            let loss = if self.replay.len() >= self.config.minibatch {
                Some(self.update_once()?)
            } else {
                None
            };
            records.push(TrainRecord {
                slot,
                budget,
                reward: outcome.reward,
                offset_reward,
                loss,
                epsilon,
            });
            state = outcome.next_state;
        }
        Ok(records)
    }
}

/// Rolls a fixed policy through a fresh environment and returns the
/// transitions it generated, rewards already offset. Used to seed replay
/// before pretraining.
pub fn generate_history(
    env: &mut SyncEnv,
    policy: &crate::baselines::PolicyKind,
    slots: u32,
    offset_unit: f64,
    policy_rng: &mut SimRng,
) -> Result<Vec<Transition>> {
    let mut history = Vec::with_capacity(slots as usize);
    let mut state = env.staleness().clone();
    for _ in 0..slots {
        let budget = env.current_budget()?;
        let action = policy.decide(&state, budget, policy_rng);
        let outcome = if policy.budget_exempt() {
            env.step_unbudgeted(&action)?
        } else {
            env.step(&action)?
        };
        let broadcasts = action.count_ones() as f64;
        history.push(Transition {
            state,
            action,
            reward: outcome.reward - broadcasts * offset_unit,
            next_state: outcome.next_state.clone(),
            terminal: env.is_finished(),
        });
        state = outcome.next_state;
    }
    Ok(history)
}
