//! Scratch probe for hyperparameter calibration (temporary).

use std::time::Instant;
use syncsched_core::baselines::PolicyKind;
use syncsched_core::harness::{cmd_train, run_comparison, Overrides};
use syncsched_core::nn::BranchingNet;
use syncsched_core::ScenarioConfig;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let train_slots: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(600);
    let pretrain: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(300);
    let lr: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1e-4);
    let eval_slots: u32 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(200);
    let offset: f64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let gamma: f64 = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(0.99);
    let pretrain_steps: u32 = args.get(7).and_then(|s| s.parse().ok()).unwrap_or(pretrain);
    let input_scale: Option<f64> = args.get(8).and_then(|s| s.parse().ok());

    let eps_end: f64 = args.get(9).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let requests: usize = args.get(10).and_then(|s| s.parse().ok()).unwrap_or(1);
    let trunk1: usize = args.get(11).and_then(|s| s.parse().ok()).unwrap_or(512);
    let trunk2: usize = args.get(12).and_then(|s| s.parse().ok()).unwrap_or(256);
    let head: usize = args.get(13).and_then(|s| s.parse().ok()).unwrap_or(128);
    let minibatch: usize = args.get(14).and_then(|s| s.parse().ok()).unwrap_or(32);

    let mut cfg = ScenarioConfig::default();
    cfg.dynamics.requests_per_domain = requests;
    cfg.agent.trunk = [trunk1, trunk2];
    cfg.agent.head_hidden = head;
    cfg.agent.minibatch = minibatch;
    cfg.agent.train_slots = train_slots;
    cfg.agent.pretrain_transitions = pretrain;
    cfg.agent.pretrain_steps = pretrain_steps;
    cfg.agent.learning_rate = lr;
    cfg.agent.offset_unit = offset;
    cfg.agent.input_scale = input_scale;
    cfg.agent.epsilon_end = eps_end;
    cfg.env.discount = gamma;
    cfg.env.horizon = eval_slots;
    cfg.env.seed = 1;

    let dir = std::env::temp_dir().join(format!(
        "probe-{train_slots}-{pretrain}-{lr}-{offset}-{gamma}-{pretrain_steps}-{input_scale:?}-{eps_end}-{requests}-{trunk1}-{minibatch}"
    ));
    std::fs::create_dir_all(&dir).unwrap();
    let overrides = Overrides { out_dir: Some(dir.clone()), ..Default::default() };

    let t0 = Instant::now();
    let artifacts = cmd_train(&cfg, &overrides).unwrap();
    let train_time = t0.elapsed();
    println!("train: {train_time:?}");

    let net = BranchingNet::load(&artifacts.checkpoint).unwrap();
    let policies = vec![
        PolicyKind::FullSync,
        PolicyKind::Learned(net),
        PolicyKind::GreedyMinMax,
        PolicyKind::AntiEntropy,
        PolicyKind::NoSync,
    ];
    let seeds = [1, 2, 3, 4, 5];
    let t1 = Instant::now();
    let rows = run_comparison(&cfg, &seeds, &policies).unwrap();
    println!("eval: {:?}", t1.elapsed());

    // Diagnostics: what does the learned policy actually broadcast?
    {
        use syncsched_core::seeds::{stream_rng, stream};
        use syncsched_core::SyncEnv;
        let net = BranchingNet::load(&artifacts.checkpoint).unwrap();
        let episode = cfg.episode_config(1, eval_slots);
        let mut env = SyncEnv::new(&episode).unwrap();
        let mut rng = stream_rng(1, stream::POLICY);
        let policy = PolicyKind::Learned(net);
        let mut per_arm = vec![0u32; env.n()];
        let mut total = 0usize;
        let mut budget_total = 0u32;
        for _ in 0..eval_slots {
            let budget = env.current_budget().unwrap();
            let action = policy.decide(env.staleness(), budget, &mut rng);
            total += action.count_ones();
            budget_total += budget;
            for i in action.indices() {
                per_arm[i] += 1;
            }
            env.step(&action).unwrap();
        }
        println!(
            "learned broadcasts: {total} of {budget_total} budget over {eval_slots} slots"
        );
        println!("per-arm: {per_arm:?}");
        // Staleness sensitivity: per-arm broadcast-vs-keep gap at low and
        // high own-staleness, all other counts held at 10.
        let net2 = BranchingNet::load(&artifacts.checkpoint).unwrap();
        let n = env.n();
        let gap_at = |arm: usize, s: u32| {
            let mut counts = vec![10u32; n];
            counts[arm] = s;
            let out = net2.forward(&net2.encode_counts(&counts)).unwrap();
            out.q_values[arm][1] - out.q_values[arm][0]
        };
        let lows: Vec<f64> = (0..n).map(|a| gap_at(a, 2)).collect();
        let highs: Vec<f64> = (0..n).map(|a| gap_at(a, 30)).collect();
        let slopes: Vec<f64> = lows.iter().zip(&highs).map(|(l, h)| h - l).collect();
        let pos = slopes.iter().filter(|&&s| s > 0.0).count();
        println!(
            "gap slope s=2 -> s=30: positive for {pos}/{n} arms; mean {:.4}",
            slopes.iter().sum::<f64>() / n as f64
        );
        let mut preview: Vec<(usize, f64, f64)> = (0..n).map(|a| (a, lows[a], highs[a])).collect();
        preview.sort_by(|x, y| y.2.total_cmp(&x.2));
        for &(a, l, h) in preview.iter().take(8) {
            println!("  arm {a:2}: gap(2) {l:8.4} gap(30) {h:8.4}");
        }
        // Training reward trend.
        let text = std::fs::read_to_string(&artifacts.metrics).unwrap();
        let rewards: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        let q = rewards.len() / 4;
        for (i, chunk) in rewards.chunks(q.max(1)).enumerate().take(4) {
            let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
            println!("train reward quarter {i}: {mean:.4}");
        }
    }

    for policy in ["full-sync", "learned", "greedy", "anti-entropy", "no-sync"] {
        let finals: Vec<f64> = seeds
            .iter()
            .map(|&s| {
                rows.iter()
                    .filter(|r| r.seed == s && r.policy == policy)
                    .last()
                    .map(|r| r.cum_reduction)
                    .unwrap()
            })
            .collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        let lat: f64 = rows
            .iter()
            .filter(|r| r.policy == policy)
            .map(|r| r.avg_latency)
            .sum::<f64>()
            / rows.iter().filter(|r| r.policy == policy).count() as f64;
        println!("{policy:12} mean_cum_reduction {mean:10.3}  mean_latency {lat:8.4}  per-seed {finals:?}");
    }
}
