//! Scratch analysis: how good is a static per-arm ranking policy? (temporary)

use syncsched_core::baselines::PolicyKind;
use syncsched_core::harness::run_comparison;
use syncsched_core::seeds::{stream, stream_rng};
use syncsched_core::views::ActionVector;
use syncsched_core::{ScenarioConfig, SyncEnv};

fn mean_latency_with_action(cfg: &ScenarioConfig, seed: u64, slots: u32, arms: &[usize]) -> f64 {
    let episode = cfg.episode_config(seed, slots);
    let mut env = SyncEnv::new(&episode).unwrap();
    let action = ActionVector::from_indices(env.n(), arms);
    let mut total = 0.0;
    for _ in 0..slots {
        let out = env.step_unbudgeted(&action).unwrap();
        total += out.avg_latency_after;
    }
    total / slots as f64
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let requests: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cyclic: bool = args.get(2).map(|s| s == "cyclic").unwrap_or(false);
    let peak: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.5);
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
    let probe_slots = 400;

    let episode = cfg.episode_config(1, 1);
    let env = SyncEnv::new(&episode).unwrap();
    let n = env.n();
    println!("n = {n}");
    for (i, entry) in env.registry().entries().iter().enumerate() {
        println!("arm {i:2}: {entry:?}");
    }

    let nothing: f64 = [1u64, 2, 3]
        .iter()
        .map(|&s| mean_latency_with_action(&cfg, s, probe_slots, &[]))
        .sum::<f64>()
        / 3.0;
    println!("no-broadcast mean latency {nothing:.4}");

    let mut gains: Vec<(usize, f64)> = (0..n)
        .map(|arm| {
            let lat: f64 = [1u64, 2, 3]
                .iter()
                .map(|&s| mean_latency_with_action(&cfg, s, probe_slots, &[arm]))
                .sum::<f64>()
                / 3.0;
            (arm, nothing - lat)
        })
        .collect();
    gains.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("single-arm gains (arm, latency gain):");
    for (arm, gain) in &gains {
        println!("  arm {arm:2}: {gain:8.4}");
    }

    // Static policy: broadcast the top-`budget` arms of the ranking each slot.
    let ranking: Vec<usize> = gains.iter().map(|&(a, _)| a).collect();
    let seeds = [1u64, 2, 3, 4, 5];
    let eval_slots = 200u32;
    let mut static_cum = Vec::new();
    for &seed in &seeds {
        let episode = cfg.episode_config(seed, eval_slots);
        // Baseline (no-sync) for reductions.
        let mut base_env = SyncEnv::new(&episode).unwrap();
        let mut env = SyncEnv::new(&episode).unwrap();
        let mut cum = 0.0;
        for _ in 0..eval_slots {
            let budget = env.current_budget().unwrap() as usize;
            let arms: Vec<usize> = ranking.iter().copied().take(budget).collect();
            let action = ActionVector::from_indices(env.n(), &arms);
            let out = env.step(&action).unwrap();
            let base = base_env
                .step(&ActionVector::zeros(env.n()))
                .unwrap()
                .avg_latency_after;
            cum += base - out.avg_latency_after;
        }
        static_cum.push(cum);
    }
    let static_mean = static_cum.iter().sum::<f64>() / seeds.len() as f64;
    println!("static-oracle mean cum reduction {static_mean:.3} per-seed {static_cum:?}");

    // Drift-weighted rotation oracle: score arms by measured impact times the
    // probability the value changed since its last broadcast.
    let change_probs = syncsched_core::dynamics::change_probabilities(&cfg.dynamics_config(), n);
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let gain = gains.iter().find(|&&(a, _)| a == i).unwrap().1.max(0.0);
            gain / change_probs[i]
        })
        .collect();
    let mut drift_cum = Vec::new();
    for &seed in &seeds {
        let episode = cfg.episode_config(seed, eval_slots);
        let mut base_env = SyncEnv::new(&episode).unwrap();
        let mut env = SyncEnv::new(&episode).unwrap();
        let mut cum = 0.0;
        for _ in 0..eval_slots {
            let budget = env.current_budget().unwrap() as usize;
            let staleness = env.staleness();
            let mut scored: Vec<(usize, f64)> = (0..n)
                .map(|i| {
                    let s = staleness.count(i) as f64 + 1.0;
                    let p_changed = 1.0 - (1.0 - change_probs[i]).powf(s);
                    (i, weights[i] * p_changed)
                })
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let arms: Vec<usize> = scored.iter().take(budget).map(|&(i, _)| i).collect();
            let action = ActionVector::from_indices(n, &arms);
            let out = env.step(&action).unwrap();
            let base = base_env
                .step(&ActionVector::zeros(n))
                .unwrap()
                .avg_latency_after;
            cum += base - out.avg_latency_after;
        }
        drift_cum.push(cum);
    }
    let drift_mean = drift_cum.iter().sum::<f64>() / seeds.len() as f64;
    println!("drift-oracle mean cum reduction {drift_mean:.3} per-seed {drift_cum:?}");

    let mut eval_cfg = cfg.clone();
    eval_cfg.env.horizon = eval_slots;
    let rows = run_comparison(
        &eval_cfg,
        &seeds,
        &[PolicyKind::FullSync, PolicyKind::GreedyMinMax, PolicyKind::AntiEntropy],
    )
    .unwrap();
    for policy in ["full-sync", "greedy", "anti-entropy"] {
        let finals: Vec<f64> = seeds
            .iter()
            .map(|&s| {
                rows.iter()
                    .filter(|r| r.seed == s && r.policy == policy)
                    .last()
                    .unwrap()
                    .cum_reduction
            })
            .collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        println!("{policy:12} mean cum reduction {mean:.3} per-seed {finals:?}");
    }
    let _ = stream_rng(0, stream::POLICY);
}
