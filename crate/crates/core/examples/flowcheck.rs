//! Scratch: mean counterfactual reward per policy on eval episodes.
use syncsched_core::baselines::PolicyKind;
use syncsched_core::nn::BranchingNet;
use syncsched_core::seeds::{stream, stream_rng};
use syncsched_core::{ScenarioConfig, SyncEnv};

fn main() {
    let ckpt = std::env::args().nth(1).expect("checkpoint path");
    let requests: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(4);
    let mut cfg = ScenarioConfig::default();
    cfg.dynamics.requests_per_domain = requests;
    let net = BranchingNet::load(std::path::Path::new(&ckpt)).unwrap();
    let policies = vec![
        PolicyKind::Learned(net),
        PolicyKind::GreedyMinMax,
        PolicyKind::AntiEntropy,
    ];
    for policy in &policies {
        let mut flow_total = 0.0;
        for seed in 1..=5u64 {
            let episode = cfg.episode_config(seed, 500);
            let mut env = SyncEnv::new(&episode).unwrap();
            let mut rng = stream_rng(seed, stream::POLICY);
            for _ in 0..500 {
                let budget = env.current_budget().unwrap();
                let action = policy.decide(env.staleness(), budget, &mut rng);
                flow_total += env.step(&action).unwrap().reward;
            }
        }
        println!("{:12} mean reward/slot {:.4}", policy.name(), flow_total / 2500.0);
    }
}
