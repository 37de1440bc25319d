//! Scratch ceiling measurement (temporary): per-slot clairvoyant index policy
//! that broadcasts the arms with the largest true single-arm counterfactual
//! recovery, measured by cloning the environment.

use syncsched_core::views::ActionVector;
use syncsched_core::{ScenarioConfig, SyncEnv};

fn run_policy(
    cfg: &ScenarioConfig,
    seed: u64,
    slots: u32,
    mut decide: impl FnMut(&SyncEnv, u32) -> ActionVector,
) -> f64 {
    let episode = cfg.episode_config(seed, slots);
    let mut base_env = SyncEnv::new(&episode).unwrap();
    let mut env = SyncEnv::new(&episode).unwrap();
    let mut cum = 0.0;
    for _ in 0..slots {
        let budget = env.current_budget().unwrap();
        let action = decide(&env, budget);
        let out = env.step_unbudgeted(&action).unwrap();
        let base = base_env.step(&ActionVector::zeros(base_env.n())).unwrap();
        cum += base.avg_latency_after - out.avg_latency_after;
    }
    cum
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let requests: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cyclic: bool = args.get(2).map(|s| s == "cyclic").unwrap_or(false);
    let peak: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let slots: u32 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(200);

    let mut cfg = ScenarioConfig::default();
    cfg.dynamics.requests_per_domain = requests;
    cfg.dynamics.change_peak_prob = peak;
    if cyclic {
        cfg.topology.edges = Some(vec![
            [0, 1], [1, 0], [0, 2], [2, 0], [0, 3], [3, 0], [1, 2], [2, 1],
            [1, 4], [4, 1], [2, 5], [5, 2], [3, 6], [6, 3], [4, 7], [7, 4],
            [5, 7], [7, 5], [6, 7], [7, 6],
        ]);
    }
    let seeds = [1u64, 2, 3, 4, 5];

    let mut clair_total = 0.0;
    let mut greedy_total = 0.0;
    let mut anti_total = 0.0;
    let mut full_total = 0.0;
    for &seed in &seeds {
        let clair = run_policy(&cfg, seed, slots, |env, budget| {
            let n = env.n();
            // True single-arm recovery for each arm on this exact slot.
            let mut scored: Vec<(usize, f64)> = (0..n)
                .map(|arm| {
                    let mut replica = env.clone();
                    let action = ActionVector::from_indices(n, &[arm]);
                    let reward = replica.step_unbudgeted(&action).unwrap().reward;
                    (arm, reward)
                })
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let take: Vec<usize> = scored
                .iter()
                .take(budget as usize)
                .filter(|&&(_, r)| r > 0.0)
                .map(|&(a, _)| a)
                .collect();
            ActionVector::from_indices(n, &take)
        });
        clair_total += clair;

        let greedy = run_policy(&cfg, seed, slots, |env, budget| {
            syncsched_core::baselines::greedy_minmax_action(env.staleness(), budget)
        });
        greedy_total += greedy;

        let mut rng = syncsched_core::seeds::stream_rng(seed, 1);
        let anti = run_policy(&cfg, seed, slots, |env, budget| {
            syncsched_core::baselines::anti_entropy_action(env.n(), budget, &mut rng)
        });
        anti_total += anti;

        let full = run_policy(&cfg, seed, slots, |env, _| ActionVector::ones(env.n()));
        full_total += full;
        println!("seed {seed}: clairvoyant {clair:.1} greedy {greedy:.1} anti {anti:.1} full {full:.1}");
    }
    let k = seeds.len() as f64;
    println!(
        "MEANS requests={requests} cyclic={cyclic} peak={peak}: clairvoyant {:.1} greedy {:.1} (ratio {:.3}) anti {:.1} (ratio {:.3}) full {:.1}",
        clair_total / k,
        greedy_total / k,
        clair_total / greedy_total,
        anti_total / k,
        clair_total / anti_total,
        full_total / k
    );
}
// Reward-rate measurement appended for diagnosis (temporary).
