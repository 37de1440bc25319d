//! Ground-truth evolution: time-varying BIS values, per-slot synchronization
//! budgets, and service request arrivals.

use crate::error::{Error, Result};
use crate::seeds::SimRng;
use crate::topology::ServicePlacement;
use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

/// Distribution new BIS values are drawn from when a change fires.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueDistribution {
    /// Uniform draw from a fixed set of values.
    UniformSet(Vec<f64>),
    /// Gaussian clamped below so delays stay positive.
    Gaussian { mean: f64, std: f64, clamp_min: f64 },
}

impl ValueDistribution {
    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        match self {
            ValueDistribution::UniformSet(values) => values[rng.random_range(0..values.len())],
            ValueDistribution::Gaussian { mean, std, clamp_min } => {
                let normal = Normal::new(*mean, *std).expect("finite gaussian parameters");
                normal.sample(rng).max(*clamp_min)
            }
        }
    }
}

/// Bell-shaped profile of per-index change probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeProfile {
    pub mean: f64,
    pub std: f64,
    /// Probability at the profile peak; every index changes with at most this.
    pub peak_prob: f64,
}

/// Zipf-Mandelbrot request popularity: rank i drawn proportional to (q+i)^-beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequestZipf {
    pub q: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    pub value_distribution: ValueDistribution,
    pub change_profile: ChangeProfile,
    /// Poisson mean of the per-slot synchronization budget.
    pub budget_mean: f64,
    pub requests_per_domain: usize,
    pub request_zipf: RequestZipf,
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        if let ValueDistribution::UniformSet(values) = &self.value_distribution {
            if values.is_empty() || values.iter().any(|&v| v <= 0.0) {
                return Err(Error::InvalidArgument(
                    "value set must be non-empty and positive".into(),
                ));
            }
        }
        if let ValueDistribution::Gaussian { clamp_min, std, .. } = self.value_distribution {
            if clamp_min <= 0.0 || std <= 0.0 {
                return Err(Error::InvalidArgument(
                    "gaussian values need std > 0 and clamp_min > 0".into(),
                ));
            }
        }
        let p = self.change_profile.peak_prob;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument("peak_prob outside (0, 1]".into()));
        }
        if self.change_profile.std <= 0.0 {
            return Err(Error::InvalidArgument("change profile std must be > 0".into()));
        }
        if self.budget_mean <= 0.0 {
            return Err(Error::InvalidArgument("budget mean must be > 0".into()));
        }
        if self.request_zipf.beta <= 0.0 {
            return Err(Error::InvalidArgument("zipf beta must be > 0".into()));
        }
        Ok(())
    }
}

/// Ground-truth BIS values held by the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueNetworkState {
    pub values: Vec<f64>,
    pub slot: u32,
}

impl TrueNetworkState {
    /// Fresh state at slot 0 with every value drawn from the configured
    /// distribution.
    pub fn init(config: &DynamicsConfig, n: usize, rng: &mut SimRng) -> Self {
        let values = (0..n).map(|_| config.value_distribution.sample(rng)).collect();
        Self { values, slot: 0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A user request for one service, submitted to the controller of
/// `origin_domain`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceRequest {
    pub origin_domain: usize,
    pub service_id: usize,
}

/// Per-index change probabilities: the Gaussian density over indices,
/// normalized so the largest entry equals `peak_prob`.
pub fn change_probabilities(config: &DynamicsConfig, n: usize) -> Vec<f64> {
    let ChangeProfile { mean, std, peak_prob } = config.change_profile;
    let density =
        |i: usize| (-((i as f64 - mean) * (i as f64 - mean)) / (2.0 * std * std)).exp();
    let max = (0..n).map(density).fold(0.0_f64, f64::max);
    (0..n).map(|i| peak_prob * density(i) / max).collect()
}

/// Advances ground truth by one slot's worth of change events: each value
/// independently resamples with its own probability, otherwise keeps. New
/// values do not depend on old ones. The slot counter is advanced by the
/// environment, not here.
pub fn advance_bis_values(
    state: &mut TrueNetworkState,
    probabilities: &[f64],
    config: &DynamicsConfig,
    rng: &mut SimRng,
) {
    debug_assert_eq!(state.values.len(), probabilities.len());
    for (value, &p) in state.values.iter_mut().zip(probabilities) {
        if rng.random::<f64>() < p {
            *value = config.value_distribution.sample(rng);
        }
    }
}

/// Draws one slot's synchronization budget.
pub fn sample_budget(mean: f64, rng: &mut SimRng) -> u32 {
    let poisson = Poisson::new(mean).expect("positive poisson mean");
    poisson.sample(rng) as u32
}

/// Draws this slot's requests: `requests_per_domain` per domain, with the
/// service of each request drawn from the Zipf-Mandelbrot popularity law
/// (service id k has popularity rank k + 1).
pub fn sample_requests(
    placement: &ServicePlacement,
    config: &DynamicsConfig,
    domain_count: usize,
    rng: &mut SimRng,
) -> Vec<ServiceRequest> {
    let RequestZipf { q, beta } = config.request_zipf;
    let weights: Vec<f64> = (0..placement.service_count())
        .map(|k| (q + (k + 1) as f64).powf(-beta))
        .collect();
    let dist = WeightedIndex::new(&weights).expect("positive zipf weights");
    let mut requests = Vec::with_capacity(domain_count * config.requests_per_domain);
    for origin_domain in 0..domain_count {
        for _ in 0..config.requests_per_domain {
            requests.push(ServiceRequest {
                origin_domain,
                service_id: dist.sample(rng),
            });
        }
    }
    requests
}
