//! End-to-end behaviour through the public API: config files, checkpoint
//! reuse, training trends, and policy quality on small worlds.

use std::path::PathBuf;
use syncsched_core::agent::Trainer;
use syncsched_core::baselines::PolicyKind;
use syncsched_core::config::PolicyName;
use syncsched_core::harness::{cmd_online_train, cmd_train, run_comparison, Overrides};
use syncsched_core::nn::BranchingNet;
use syncsched_core::seeds::{stream, stream_rng};
use syncsched_core::{parse_config, ScenarioConfig, SyncEnv};

fn training_config() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.env.horizon = 60;
    cfg.env.discount = 0.7;
    cfg.agent.train_slots = 400;
    cfg.agent.pretrain_transitions = 300;
    cfg.agent.pretrain_steps = 600;
    cfg.agent.learning_rate = 7e-4;
    cfg.agent.offset_unit = 0.02;
    cfg.agent.input_scale = Some(0.05);
    cfg.agent.epsilon_end = 0.1;
    cfg.agent.trunk = [96, 48];
    cfg.agent.head_hidden = 24;
    cfg
}

#[test]
fn config_files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = training_config();
    cfg.run.checkpoint = Some(PathBuf::from("model.ckpt"));
    let path = dir.path().join("scenario.toml");
    std::fs::write(&path, cfg.to_toml_string()).unwrap();
    let parsed = parse_config(&path).unwrap();
    assert_eq!(parsed, cfg);
}

#[test]
fn reloaded_checkpoints_reproduce_the_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = training_config();
    cfg.agent.train_slots = 60;
    cfg.agent.pretrain_transitions = 40;
    cfg.agent.pretrain_steps = 40;
    let artifacts = cmd_train(
        &cfg,
        &Overrides { out_dir: Some(dir.path().into()), ..Default::default() },
    )
    .unwrap();
    let run = || {
        let net = BranchingNet::load(&artifacts.checkpoint).unwrap();
        let rows = run_comparison(&cfg, &[4, 9], &[PolicyKind::Learned(net)]).unwrap();
        rows.iter().map(|r| r.avg_latency.to_bits()).collect::<Vec<u64>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn online_training_improves_over_its_own_start() {
    // Late-window training rewards beat the exploration-heavy early window,
    // pooled over five seeds.
    let mut early_total = 0.0;
    let mut late_total = 0.0;
    for seed in 1..=5u64 {
        let mut cfg = training_config();
        cfg.env.seed = seed;
        let dir = tempfile::tempdir().unwrap();
        let artifacts = cmd_online_train(
            &cfg,
            &Overrides { out_dir: Some(dir.path().into()), ..Default::default() },
        )
        .unwrap();
        let text = std::fs::read_to_string(&artifacts.metrics).unwrap();
        let rewards: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert_eq!(rewards.len(), 400);
        early_total += rewards[..100].iter().sum::<f64>() / 100.0;
        late_total += rewards[300..].iter().sum::<f64>() / 100.0;
    }
    assert!(
        late_total >= early_total,
        "late {late_total:.3} vs early {early_total:.3}"
    );
}

#[test]
fn pretraining_lowers_initial_latency() {
    // A net pretrained on greedy history must evaluate better than the same
    // net untouched, pooled over five seeds.
    let cfg = training_config();
    let trained = {
        let dir = tempfile::tempdir().unwrap();
        let mut pre_cfg = cfg.clone();
        pre_cfg.agent.train_slots = 1; // pretraining only, a single online slot
        pre_cfg.agent.pretrain_transitions = 400;
        pre_cfg.agent.pretrain_steps = 1200;
        let artifacts = cmd_train(
            &pre_cfg,
            &Overrides { out_dir: Some(dir.path().into()), ..Default::default() },
        )
        .unwrap();
        BranchingNet::load(&artifacts.checkpoint).unwrap()
    };
    let untrained = {
        let trainer = Trainer::new(
            trained.arms(),
            trained.input_scale(),
            cfg.agent_config(),
            stream_rng(99, stream::AGENT),
        )
        .unwrap();
        trainer.online
    };
    let seeds = [11u64, 12, 13, 14, 15];
    let mean_latency = |net: &BranchingNet| {
        let rows = run_comparison(&cfg, &seeds, &[PolicyKind::Learned(net.clone())]).unwrap();
        rows.iter().map(|r| r.avg_latency).sum::<f64>() / rows.len() as f64
    };
    let pre = mean_latency(&trained);
    let raw = mean_latency(&untrained);
    assert!(pre < raw, "pretrained {pre:.4} vs untrained {raw:.4}");
}

#[test]
fn single_slot_training_runs_one_step() {
    let mut cfg = training_config();
    cfg.agent.train_slots = 1;
    cfg.agent.minibatch = 2;
    cfg.agent.pretrain_transitions = 0;
    cfg.agent.pretrain_steps = 0;
    let episode = cfg.episode_config(3, 1);
    let mut env = SyncEnv::new(&episode).unwrap();
    let mut trainer = Trainer::new(
        env.n(),
        cfg.input_scale(),
        cfg.agent_config(),
        stream_rng(3, stream::AGENT),
    )
    .unwrap();
    let records = trainer.run_training(&mut env).unwrap();
    assert_eq!(records.len(), 1);
    assert!(env.is_finished());
    assert!(trainer.train_steps() <= 1);
}

#[test]
fn trained_toy_policy_beats_random_selection() {
    // Five-item world: two domains, one link pair, a service in both domains
    // plus one local-only service. Change pressure concentrates on the last
    // items, so a trained scheduler should spend its single-slot budget
    // better than uniformly random choice.
    let mut cfg = ScenarioConfig::default();
    cfg.topology.domains = 2;
    cfg.topology.edges = Some(vec![[0, 1], [1, 0]]);
    cfg.topology.services.count = 2;
    cfg.topology.services.copies = 1;
    cfg.topology.services.favored_domains = vec![0];
    cfg.topology.services.favored_prob = 0.5;
    cfg.dynamics.change_mean = 4.0;
    cfg.dynamics.change_std = 1.0;
    cfg.dynamics.budget_mean = 1.0;
    cfg.env.seed = 5;
    cfg.env.horizon = 100;
    cfg.env.discount = 0.7;
    cfg.agent.train_slots = 500;
    cfg.agent.pretrain_transitions = 200;
    cfg.agent.pretrain_steps = 400;
    cfg.agent.learning_rate = 1e-3;
    cfg.agent.offset_unit = 0.02;
    cfg.agent.input_scale = Some(0.05);
    cfg.agent.epsilon_end = 0.1;
    cfg.agent.trunk = [48, 24];
    cfg.agent.head_hidden = 12;

    let dir = tempfile::tempdir().unwrap();
    let artifacts = cmd_train(
        &cfg,
        &Overrides { out_dir: Some(dir.path().into()), ..Default::default() },
    )
    .unwrap();
    let net = BranchingNet::load(&artifacts.checkpoint).unwrap();
    let seeds = [1u64, 2, 3, 4, 5];
    let rows = run_comparison(
        &cfg,
        &seeds,
        &[PolicyKind::Learned(net), PolicyKind::AntiEntropy],
    )
    .unwrap();
    let mean_cum = |policy: &str| {
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
        finals.iter().sum::<f64>() / finals.len() as f64
    };
    let learned = mean_cum("learned");
    let anti = mean_cum("anti-entropy");
    assert!(learned >= anti, "learned {learned:.3} vs anti-entropy {anti:.3}");
}

#[test]
fn learned_policy_runs_inside_the_configured_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = training_config();
    cfg.agent.train_slots = 40;
    cfg.agent.pretrain_transitions = 30;
    cfg.agent.pretrain_steps = 30;
    cfg.agent.minibatch = 16;
    cfg.env.horizon = 15;
    cfg.run.seeds = vec![2];
    let overrides = Overrides { out_dir: Some(dir.path().into()), ..Default::default() };
    let artifacts = cmd_train(&cfg, &overrides).unwrap();
    cfg.run.policies = vec![PolicyName::FullSync, PolicyName::Learned, PolicyName::NoSync];
    cfg.run.checkpoint = Some(artifacts.checkpoint);
    let compare = syncsched_core::harness::cmd_compare(&cfg, &overrides).unwrap();
    let text = std::fs::read_to_string(compare).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 15);
    assert!(text.lines().any(|l| l.contains(",learned,")));
}
