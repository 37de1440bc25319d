//! Experiment orchestration: training runs, cross-policy comparisons, and
//! scenario sweeps, each emitting deterministic CSV files.
//!
//! Within one comparison seed, every policy experiences identical environment
//! randomness (truth evolution, budgets, requests) because the environment
//! and the policies draw from separate streams of the seed. Latency
//! reductions are measured against the no-broadcast run of the same seed.

use crate::agent::{generate_history, Trainer};
use crate::baselines::PolicyKind;
use crate::config::{PolicyName, PretrainSource, ScenarioConfig};
use crate::env::{discounted_return, EpisodeConfig, SyncEnv};
use crate::error::{Error, Result};
use crate::nn::BranchingNet;
use crate::seeds::{derive_seed, stream, stream_rng};
use crate::topology::build_topology;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Seed tag for the environment that generates pretraining history.
const PRETRAIN_TAG: u64 = 0x7072_6531;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Replaces the training seed and the comparison seed list.
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
}

impl Overrides {
    fn out_dir(&self, config: &ScenarioConfig) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| config.run.out_dir.clone())
    }

    fn checkpoint(&self, config: &ScenarioConfig) -> Option<PathBuf> {
        self.checkpoint.clone().or_else(|| config.run.checkpoint.clone())
    }

    fn seeds(&self, config: &ScenarioConfig) -> Vec<u64> {
        match self.seed {
            Some(seed) => vec![seed],
            None => config.run.seeds.clone(),
        }
    }

    fn train_seed(&self, config: &ScenarioConfig) -> u64 {
        self.seed.unwrap_or(config.env.seed)
    }
}

/// Paths produced by a training run.
#[derive(Debug, Clone)]
pub struct TrainArtifacts {
    pub checkpoint: PathBuf,
    pub metrics: PathBuf,
}

/// Trains the scheduler (pretraining on generated history first, unless the
/// config disables it) and writes the checkpoint plus per-slot metrics.
pub fn cmd_train(config: &ScenarioConfig, overrides: &Overrides) -> Result<TrainArtifacts> {
    train_inner(config, overrides, true)
}

/// Fully online variant: no pretraining, otherwise identical outputs.
pub fn cmd_online_train(config: &ScenarioConfig, overrides: &Overrides) -> Result<TrainArtifacts> {
    train_inner(config, overrides, false)
}

fn train_inner(
    config: &ScenarioConfig,
    overrides: &Overrides,
    pretrain: bool,
) -> Result<TrainArtifacts> {
    let out_dir = overrides.out_dir(config);
    std::fs::create_dir_all(&out_dir)?;
    let master = overrides.train_seed(config);

    let episode = config.episode_config(master, config.agent.train_slots);
    let mut env = SyncEnv::new(&episode)?;
    let mut trainer = Trainer::new(
        env.n(),
        config.input_scale(),
        config.agent_config(),
        stream_rng(master, stream::AGENT),
    )?;

    if pretrain && config.agent.pretrain_transitions > 0 && config.agent.pretrain_steps > 0 {
        let pretrain_seed = derive_seed(master, PRETRAIN_TAG);
        let pre_episode = config.episode_config(pretrain_seed, config.agent.pretrain_transitions);
        let mut pre_env = SyncEnv::new(&pre_episode)?;
        let policy = match config.agent.pretrain_source {
            PretrainSource::Greedy => PolicyKind::GreedyMinMax,
            PretrainSource::AntiEntropy => PolicyKind::AntiEntropy,
        };
        let mut policy_rng = stream_rng(pretrain_seed, stream::POLICY);
        let history = generate_history(
            &mut pre_env,
            &policy,
            config.agent.pretrain_transitions,
            config.agent.offset_unit,
            &mut policy_rng,
        )?;
        trainer.seed_replay(history);
        trainer.pretrain(config.agent.pretrain_steps)?;
    }

    let records = trainer.run_training(&mut env)?;

    let metrics = out_dir.join("training.csv");
    let mut csv = BufWriter::new(File::create(&metrics)?);
    writeln!(csv, "slot,budget,reward,offset_reward,loss,epsilon")?;
    for r in &records {
        let loss = r.loss.map(|l| l.to_string()).unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.slot, r.budget, r.reward, r.offset_reward, loss, r.epsilon
        )?;
    }
    csv.flush()?;

    let checkpoint = out_dir.join("model.ckpt");
    trainer.online.save(&checkpoint)?;
    Ok(TrainArtifacts { checkpoint, metrics })
}

struct SlotStats {
    budget: u32,
    avg_latency: f64,
}

fn run_policy_episode(
    episode: &EpisodeConfig,
    policy: &PolicyKind,
) -> Result<Vec<SlotStats>> {
    let mut env = SyncEnv::new(episode)?;
    let mut policy_rng = stream_rng(episode.seed, stream::POLICY);
    let mut stats = Vec::with_capacity(episode.horizon as usize);
    for _ in 0..episode.horizon {
        let budget = env.current_budget()?;
        let action = policy.decide(env.staleness(), budget, &mut policy_rng);
        let outcome = if policy.budget_exempt() {
            env.step_unbudgeted(&action)?
        } else {
            env.step(&action)?
        };
        stats.push(SlotStats { budget, avg_latency: outcome.avg_latency_after });
    }
    Ok(stats)
}

fn resolve_policies(
    names: &[PolicyName],
    checkpoint: Option<&Path>,
) -> Result<Vec<PolicyKind>> {
    names
        .iter()
        .map(|name| match name {
            PolicyName::FullSync => Ok(PolicyKind::FullSync),
            PolicyName::NoSync => Ok(PolicyKind::NoSync),
            PolicyName::Greedy => Ok(PolicyKind::GreedyMinMax),
            PolicyName::AntiEntropy => Ok(PolicyKind::AntiEntropy),
            PolicyName::Learned => {
                let path = checkpoint
                    .ok_or_else(|| Error::MissingCheckpoint("learned".into()))?;
                Ok(PolicyKind::Learned(BranchingNet::load(path)?))
            }
        })
        .collect()
}

/// Per-policy per-slot results of one comparison.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub seed: u64,
    pub policy: &'static str,
    pub slot: u32,
    pub budget: u32,
    pub avg_latency: f64,
    /// Latency reduction against the no-broadcast run of the same seed.
    pub reduction: f64,
    pub cum_reduction: f64,
    pub cum_discounted_reduction: f64,
}

/// Runs every configured policy over every seed against identical
/// environment randomness and collects per-slot latencies and reductions.
pub fn run_comparison(
    config: &ScenarioConfig,
    seeds: &[u64],
    policies: &[PolicyKind],
) -> Result<Vec<ComparisonRow>> {
    let discount = config.env.discount;
    let mut rows = Vec::new();
    for &seed in seeds {
        let episode = config.episode_config(seed, config.env.horizon);
        let reference = run_policy_episode(&episode, &PolicyKind::NoSync)?;
        for policy in policies {
            let stats = run_policy_episode(&episode, policy)?;
            let mut cum = 0.0;
            let mut reductions = Vec::with_capacity(stats.len());
            for (slot, stat) in stats.iter().enumerate() {
                let reduction = reference[slot].avg_latency - stat.avg_latency;
                reductions.push(reduction);
                cum += reduction;
                rows.push(ComparisonRow {
                    seed,
                    policy: policy.name(),
                    slot: slot as u32,
                    budget: stat.budget,
                    avg_latency: stat.avg_latency,
                    reduction,
                    cum_reduction: cum,
                    cum_discounted_reduction: discounted_return(&reductions, discount),
                });
            }
        }
    }
    Ok(rows)
}

/// Evaluates all configured policies under identical randomness per seed and
/// writes `compare.csv`.
pub fn cmd_compare(config: &ScenarioConfig, overrides: &Overrides) -> Result<PathBuf> {
    let out_dir = overrides.out_dir(config);
    std::fs::create_dir_all(&out_dir)?;
    let checkpoint = overrides.checkpoint(config);
    let policies = resolve_policies(&config.run.policies, checkpoint.as_deref())?;
    let rows = run_comparison(config, &overrides.seeds(config), &policies)?;
    let path = out_dir.join("compare.csv");
    write_comparison_csv(&path, &rows)?;
    Ok(path)
}

fn write_comparison_csv(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    let mut csv = BufWriter::new(File::create(path)?);
    writeln!(
        csv,
        "seed,policy,slot,budget,avg_latency,reduction,cum_reduction,cum_discounted_reduction"
    )?;
    for r in rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.seed,
            r.policy,
            r.slot,
            r.budget,
            r.avg_latency,
            r.reduction,
            r.cum_reduction,
            r.cum_discounted_reduction
        )?;
    }
    csv.flush()?;
    Ok(())
}

/// Which scenario knob a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Gaussian BIS value standard deviation.
    BisStd,
    /// Mean of the per-slot budget distribution.
    BudgetLambda,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::BisStd => "bis_std",
            SweepAxis::BudgetLambda => "budget_lambda",
        }
    }

    pub fn default_values(&self) -> Vec<f64> {
        match self {
            SweepAxis::BisStd => vec![5.0, 8.0, 11.0],
            SweepAxis::BudgetLambda => vec![1.0, 3.0, 5.0],
        }
    }

    fn apply(&self, config: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut varied = config.clone();
        match self {
            SweepAxis::BisStd => {
                varied.dynamics.value_kind = crate::config::ValueKind::Gaussian;
                varied.dynamics.value_std = value;
            }
            SweepAxis::BudgetLambda => {
                varied.dynamics.budget_mean = value;
            }
        }
        varied
    }
}

/// Aggregated result of one sweep point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis: &'static str,
    pub value: f64,
    pub seed: u64,
    pub policy: &'static str,
    /// Average of the per-slot latencies over the whole episode.
    pub mean_latency: f64,
    pub cum_reduction: f64,
}

/// Repeats the comparison at every axis value.
pub fn run_sweep(
    config: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    seeds: &[u64],
    policies_of: impl Fn(&ScenarioConfig) -> Result<Vec<PolicyKind>>,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &value in values {
        let varied = axis.apply(config, value);
        varied
            .validate()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let policies = policies_of(&varied)?;
        let comparison = run_comparison(&varied, seeds, &policies)?;
        for policy in &policies {
            for &seed in seeds {
                let per_run: Vec<&ComparisonRow> = comparison
                    .iter()
                    .filter(|r| r.policy == policy.name() && r.seed == seed)
                    .collect();
                let slots = per_run.len() as f64;
                let mean_latency =
                    per_run.iter().map(|r| r.avg_latency).sum::<f64>() / slots;
                let cum_reduction = per_run.last().map(|r| r.cum_reduction).unwrap_or(0.0);
                rows.push(SweepRow {
                    axis: axis.name(),
                    value,
                    seed,
                    policy: policy.name(),
                    mean_latency,
                    cum_reduction,
                });
            }
        }
    }
    Ok(rows)
}

/// Repeats the comparison for each axis value and writes `sweep.csv` with
/// slot-averaged latencies.
pub fn cmd_scenario_sweep(
    config: &ScenarioConfig,
    overrides: &Overrides,
    axis: SweepAxis,
    values: &[f64],
) -> Result<PathBuf> {
    let out_dir = overrides.out_dir(config);
    std::fs::create_dir_all(&out_dir)?;
    let checkpoint = overrides.checkpoint(config);
    let rows = run_sweep(config, axis, values, &overrides.seeds(config), |cfg| {
        resolve_policies(&cfg.run.policies, checkpoint.as_deref())
    })?;
    let path = out_dir.join("sweep.csv");
    let mut csv = BufWriter::new(File::create(&path)?);
    writeln!(csv, "axis,value,seed,policy,mean_latency,cum_reduction")?;
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.axis, r.value, r.seed, r.policy, r.mean_latency, r.cum_reduction
        )?;
    }
    csv.flush()?;
    Ok(path)
}

/// Samples (or validates) the configured topology and renders it as a TOML
/// `edges` snippet ready to paste into a config file.
pub fn cmd_gen_topology(config: &ScenarioConfig, overrides: &Overrides) -> Result<String> {
    let seed = overrides.seed.unwrap_or(config.env.seed);
    let mut rng = stream_rng(seed, stream::WORLD);
    let graph = build_topology(config.topology.domains, &config.topology_spec(), &mut rng)?;
    let edges: Vec<String> = graph
        .edges()
        .iter()
        .map(|&(s, d)| format!("[{s}, {d}]"))
        .collect();
    Ok(format!(
        "[topology]\ndomains = {}\nedges = [{}]\n",
        graph.domain_count(),
        edges.join(", ")
    ))
}
