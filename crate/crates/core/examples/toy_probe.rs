//! Scratch check: the Q-machinery on a synthetic known-answer MDP (temporary).
//!
//! Four arms, reward 2.0 whenever arm 0 broadcasts plus 0.5 for arm 1,
//! nothing else pays. After training, arm 0 must dominate, arms 2-3 must
//! stay silent under a small offset.

use rand::Rng;
use syncsched_core::agent::{
    select_action, store_transition, sync_target, train_step, AgentConfig, EpsilonSchedule,
    ReplayMemory,
};
use syncsched_core::nn::{BranchingNet, NetShape};
use syncsched_core::seeds::stream_rng;
use syncsched_core::views::{ActionVector, StalenessVector};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let steps: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(600);
    let lr: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let gamma: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.99);
    let scale: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0.05);

    let n = 4;
    let cfg = AgentConfig {
        epsilon: EpsilonSchedule { start: 1.0, end: 0.1, anneal_slots: steps / 2 },
        minibatch: 32,
        replay_capacity: 2000,
        target_sync: 20,
        offset_unit: 0.1,
        learning_rate: lr,
        discount: gamma,
        trunk: [64, 32],
        head_hidden: 16,
    };
    let shape = NetShape { arms: n, trunk: cfg.trunk, head_hidden: cfg.head_hidden };
    let mut online = BranchingNet::with_shape(shape, scale, 7);
    let mut delayed = online.clone();
    let mut replay = ReplayMemory::new(cfg.replay_capacity);
    let mut rng = stream_rng(3, 70);

    let mut staleness = StalenessVector::zeros(n);
    let mut train_steps = 0u64;
    for step in 0..steps {
        let budget = 2u32;
        let eps = cfg.epsilon.value(step);
        let input = online.encode_counts(staleness.counts());
        let out = online.forward(&input).unwrap();
        let action = select_action(&out, budget, eps, &mut rng);
        let reward = 2.0 * f64::from(action.get(0)) + 0.5 * f64::from(action.get(1))
            + 0.05 * rng.random_range(-1.0..1.0);
        let mut next = staleness.clone();
        next.tick();
        let next = StalenessVector::from_counts(
            (0..n).map(|i| if action.get(i) { 0 } else { next.count(i).min(60) }).collect(),
        );
        store_transition(
            &mut replay,
            staleness.clone(),
            action,
            reward,
            next.clone(),
            false,
            cfg.offset_unit,
        );
        if replay.len() >= cfg.minibatch {
            train_step(&replay, &mut online, &delayed, &cfg, &mut rng).unwrap();
            train_steps += 1;
            sync_target(&online, &mut delayed, train_steps, cfg.target_sync).unwrap();
        }
        staleness = next;
    }

    // Greedy rollout: how often does each arm get broadcast?
    let mut counts = vec![0u32; n];
    let mut staleness = StalenessVector::zeros(n);
    for _ in 0..100 {
        let input = online.encode_counts(staleness.counts());
        let out = online.forward(&input).unwrap();
        let action = select_action(&out, 2, 0.0, &mut rng);
        for i in action.indices() {
            counts[i] += 1;
        }
        let mut next_counts = Vec::new();
        for i in 0..n {
            next_counts.push(if action.get(i) { 0 } else { (staleness.count(i) + 1).min(60) });
        }
        staleness = StalenessVector::from_counts(next_counts);
    }
    println!("greedy broadcast counts over 100 slots: {counts:?}");
    let input = online.encode_counts(&[5, 5, 5, 5]);
    let out = online.forward(&input).unwrap();
    for arm in 0..n {
        println!(
            "arm {arm}: q0 {:8.4} q1 {:8.4} gap {:8.4}",
            out.q_values[arm][0],
            out.q_values[arm][1],
            out.q_values[arm][1] - out.q_values[arm][0]
        );
    }
    println!("V {:8.4}", out.state_value);
}
