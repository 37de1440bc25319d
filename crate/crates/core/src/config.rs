//! Scenario configuration: a TOML file with nested sections, fully defaulted
//! so an empty file runs the baseline eight-domain scenario. Unknown keys are
//! rejected.

use crate::agent::{AgentConfig, EpsilonSchedule};
use crate::dynamics::{ChangeProfile, DynamicsConfig, RequestZipf, ValueDistribution};
use crate::env::{EpisodeConfig, ServiceSpec};
use crate::topology::TopologySpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("unknown key: {0}")]
    UnknownKey(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Default eight-domain layout: two well-connected hub regions with spurs,
/// giving every domain pair alternative routes; 10 links, 20 directed edges.
pub fn default_edges() -> Vec<[usize; 2]> {
    vec![
        [0, 1], [1, 0], [0, 2], [2, 0], [0, 3], [3, 0], [1, 2], [2, 1],
        [1, 4], [4, 1], [2, 5], [5, 2], [3, 6], [6, 3], [4, 7], [7, 4],
        [5, 7], [7, 5], [6, 7], [7, 6],
    ]
}

/// Baseline set BIS values are drawn from in the uniform mode.
pub fn default_value_set() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 6.0, 8.0, 13.0, 17.0, 20.0, 25.0, 30.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub topology: TopologySection,
    pub dynamics: DynamicsSection,
    pub env: EnvSection,
    pub agent: AgentSection,
    pub run: RunSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            topology: TopologySection::default(),
            dynamics: DynamicsSection::default(),
            env: EnvSection::default(),
            agent: AgentSection::default(),
            run: RunSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologySection {
    pub domains: usize,
    /// Explicit directed edges; both directions of each link.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    /// Undirected degree per domain, sampled into a graph.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_sequence: Option<Vec<usize>>,
    pub services: ServicesSection,
}

impl Default for TopologySection {
    fn default() -> Self {
        Self {
            domains: 8,
            edges: None,
            degree_sequence: None,
            services: ServicesSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServicesSection {
    pub count: usize,
    pub copies: usize,
    pub favored_domains: Vec<usize>,
    pub favored_prob: f64,
}

impl Default for ServicesSection {
    fn default() -> Self {
        Self { count: 10, copies: 2, favored_domains: vec![0, 1, 2, 3], favored_prob: 0.7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    UniformSet,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsSection {
    pub value_kind: ValueKind,
    pub value_set: Vec<f64>,
    pub value_mean: f64,
    pub value_std: f64,
    pub value_clamp_min: f64,
    pub change_mean: f64,
    pub change_std: f64,
    pub change_peak_prob: f64,
    pub budget_mean: f64,
    pub requests_per_domain: usize,
    pub zipf_q: f64,
    pub zipf_beta: f64,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        Self {
            value_kind: ValueKind::UniformSet,
            value_set: default_value_set(),
            value_mean: 10.0,
            value_std: 5.0,
            value_clamp_min: 0.1,
            change_mean: 30.0,
            change_std: 10.0,
            change_peak_prob: 0.5,
            budget_mean: 3.0,
            requests_per_domain: 1,
            zipf_q: 5.0,
            zipf_beta: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvSection {
    /// Evaluation slots per episode.
    pub horizon: u32,
    pub discount: f64,
    pub seed: u64,
    pub synchronized_start: bool,
}

impl Default for EnvSection {
    fn default() -> Self {
        Self { horizon: 500, discount: 0.99, seed: 1, synchronized_start: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PretrainSource {
    Greedy,
    AntiEntropy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentSection {
    pub learning_rate: f64,
    pub minibatch: usize,
    pub replay_capacity: usize,
    pub target_sync: u32,
    pub offset_unit: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of training slots over which epsilon anneals.
    pub epsilon_anneal_frac: f64,
    pub train_slots: u32,
    pub pretrain_transitions: u32,
    pub pretrain_steps: u32,
    pub pretrain_source: PretrainSource,
    pub trunk: [usize; 2],
    pub head_hidden: usize,
    /// Staleness-count scaling applied at the network input; defaults to
    /// one over `train_slots` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_scale: Option<f64>,
}

impl Default for AgentSection {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            minibatch: 32,
            replay_capacity: 10_000,
            target_sync: 20,
            offset_unit: 0.1,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_anneal_frac: 0.4,
            train_slots: 2000,
            pretrain_transitions: 1000,
            pretrain_steps: 1000,
            pretrain_source: PretrainSource::Greedy,
            trunk: [512, 256],
            head_hidden: 128,
            input_scale: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyName {
    FullSync,
    NoSync,
    Greedy,
    AntiEntropy,
    Learned,
}

impl PolicyName {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyName::FullSync => "full-sync",
            PolicyName::NoSync => "no-sync",
            PolicyName::Greedy => "greedy",
            PolicyName::AntiEntropy => "anti-entropy",
            PolicyName::Learned => "learned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub policies: Vec<PolicyName>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            policies: vec![
                PolicyName::FullSync,
                PolicyName::Greedy,
                PolicyName::AntiEntropy,
                PolicyName::NoSync,
            ],
            seeds: vec![1, 2, 3, 4, 5],
            out_dir: PathBuf::from("runs"),
            checkpoint: None,
        }
    }
}

/// Reads and validates a config file. An empty file yields all defaults.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    ScenarioConfig::from_toml_str(&text)
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let message = e.to_string();
            if message.contains("unknown field") {
                ConfigError::UnknownKey(message)
            } else {
                ConfigError::Parse(message)
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.topology;
        if t.domains == 0 {
            return Err(ConfigError::Invalid("topology.domains must be positive".into()));
        }
        if t.edges.is_some() && t.degree_sequence.is_some() {
            return Err(ConfigError::Invalid(
                "give either topology.edges or topology.degree_sequence, not both".into(),
            ));
        }
        if t.services.count == 0 || t.services.copies == 0 {
            return Err(ConfigError::Invalid("services.count and copies must be positive".into()));
        }
        if t.services.copies > t.domains {
            return Err(ConfigError::Invalid("services.copies exceeds the domain count".into()));
        }
        if !(0.0..=1.0).contains(&t.services.favored_prob) {
            return Err(ConfigError::Invalid("services.favored_prob outside [0, 1]".into()));
        }
        let d = &self.dynamics;
        if d.value_kind == ValueKind::UniformSet
            && (d.value_set.is_empty() || d.value_set.iter().any(|&v| v <= 0.0))
        {
            return Err(ConfigError::Invalid(
                "dynamics.value_set must be non-empty and positive".into(),
            ));
        }
        if d.value_kind == ValueKind::Gaussian && (d.value_std <= 0.0 || d.value_clamp_min <= 0.0) {
            return Err(ConfigError::Invalid(
                "gaussian values need value_std > 0 and value_clamp_min > 0".into(),
            ));
        }
        if !(d.change_peak_prob > 0.0 && d.change_peak_prob <= 1.0) {
            return Err(ConfigError::Invalid("dynamics.change_peak_prob outside (0, 1]".into()));
        }
        if d.change_std <= 0.0 || d.budget_mean <= 0.0 || d.zipf_beta <= 0.0 {
            return Err(ConfigError::Invalid(
                "dynamics.change_std, budget_mean, and zipf_beta must be positive".into(),
            ));
        }
        let e = &self.env;
        if e.horizon == 0 {
            return Err(ConfigError::Invalid("env.horizon must be at least 1".into()));
        }
        if !(e.discount > 0.0 && e.discount < 1.0) {
            return Err(ConfigError::Invalid("env.discount outside (0, 1)".into()));
        }
        let a = &self.agent;
        if a.minibatch == 0 || a.replay_capacity == 0 || a.target_sync == 0 || a.train_slots == 0 {
            return Err(ConfigError::Invalid(
                "agent.minibatch, replay_capacity, target_sync, and train_slots must be positive"
                    .into(),
            ));
        }
        if a.learning_rate <= 0.0 || a.offset_unit < 0.0 {
            return Err(ConfigError::Invalid(
                "agent.learning_rate must be positive, offset_unit nonnegative".into(),
            ));
        }
        for eps in [a.epsilon_start, a.epsilon_end] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(ConfigError::Invalid("agent epsilon values outside [0, 1]".into()));
            }
        }
        if !(0.0..=1.0).contains(&a.epsilon_anneal_frac) {
            return Err(ConfigError::Invalid("agent.epsilon_anneal_frac outside [0, 1]".into()));
        }
        if self.run.seeds.is_empty() {
            return Err(ConfigError::Invalid("run.seeds must not be empty".into()));
        }
        Ok(())
    }

    pub fn topology_spec(&self) -> TopologySpec {
        if let Some(degrees) = &self.topology.degree_sequence {
            TopologySpec::DegreeSequence(degrees.clone())
        } else {
            let edges = self
                .topology
                .edges
                .clone()
                .unwrap_or_else(default_edges)
                .into_iter()
                .map(|[s, d]| (s, d))
                .collect();
            TopologySpec::Edges(edges)
        }
    }

    pub fn dynamics_config(&self) -> DynamicsConfig {
        let d = &self.dynamics;
        DynamicsConfig {
            value_distribution: match d.value_kind {
                ValueKind::UniformSet => ValueDistribution::UniformSet(d.value_set.clone()),
                ValueKind::Gaussian => ValueDistribution::Gaussian {
                    mean: d.value_mean,
                    std: d.value_std,
                    clamp_min: d.value_clamp_min,
                },
            },
            change_profile: ChangeProfile {
                mean: d.change_mean,
                std: d.change_std,
                peak_prob: d.change_peak_prob,
            },
            budget_mean: d.budget_mean,
            requests_per_domain: d.requests_per_domain,
            request_zipf: RequestZipf { q: d.zipf_q, beta: d.zipf_beta },
        }
    }

    /// Episode for a given seed and horizon (training and evaluation differ
    /// only in those).
    pub fn episode_config(&self, seed: u64, horizon: u32) -> EpisodeConfig {
        EpisodeConfig {
            domains: self.topology.domains,
            topology: self.topology_spec(),
            services: ServiceSpec {
                count: self.topology.services.count,
                copies: self.topology.services.copies,
                favored_domains: self.topology.services.favored_domains.clone(),
                favored_prob: self.topology.services.favored_prob,
            },
            dynamics: self.dynamics_config(),
            horizon,
            discount: self.env.discount,
            // The world is pinned by the config's base seed so that training
            // and every evaluation seed schedule the same network.
            world_seed: self.env.seed,
            seed,
            synchronized_start: self.env.synchronized_start,
        }
    }

    pub fn agent_config(&self) -> AgentConfig {
        let a = &self.agent;
        let anneal_slots = (a.epsilon_anneal_frac * a.train_slots as f64).round() as u32;
        AgentConfig {
            epsilon: EpsilonSchedule {
                start: a.epsilon_start,
                end: a.epsilon_end,
                anneal_slots,
            },
            minibatch: a.minibatch,
            replay_capacity: a.replay_capacity,
            target_sync: a.target_sync,
            offset_unit: a.offset_unit,
            learning_rate: a.learning_rate,
            discount: self.env.discount,
            trunk: a.trunk,
            head_hidden: a.head_hidden,
        }
    }

    /// Input scaling baked into trained networks; one over the training
    /// horizon unless the config overrides it.
    pub fn input_scale(&self) -> f64 {
        self.agent
            .input_scale
            .unwrap_or(1.0 / self.agent.train_slots as f64)
    }
}
