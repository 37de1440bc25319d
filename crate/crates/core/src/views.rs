//! Controller views, the global staleness vector, and broadcast application.
//!
//! Every domain controller holds a full vector of believed BIS values. Its
//! own-domain entries always read fresh; everything else only moves when a
//! broadcast carries the up-to-date value to all controllers at once. The
//! staleness vector is global: one count per BIS of slots since its last
//! broadcast, held by the central controller and identical everywhere.

use crate::dynamics::TrueNetworkState;
use crate::error::{Error, Result};
use crate::topology::BisRegistry;

/// One controller's (possibly stale) copy of all BIS values.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerView {
    owner: usize,
    believed_values: Vec<f64>,
}

impl ControllerView {
    pub fn new(owner: usize, believed_values: Vec<f64>) -> Self {
        Self { owner, believed_values }
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn believed(&self, index: usize) -> f64 {
        self.believed_values[index]
    }

    pub fn believed_values(&self) -> &[f64] {
        &self.believed_values
    }

    pub fn set_believed(&mut self, index: usize, value: f64) {
        self.believed_values[index] = value;
    }
}

/// Slots elapsed since each BIS was last broadcast; the MDP state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StalenessVector {
    counts: Vec<u32>,
}

impl StalenessVector {
    pub fn zeros(n: usize) -> Self {
        Self { counts: vec![0; n] }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, index: usize) -> u32 {
        self.counts[index]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// One slot passes: every count grows by one.
    pub fn tick(&mut self) {
        for c in &mut self.counts {
            *c += 1;
        }
    }

    /// Marks `index` as broadcast in the current slot.
    pub fn reset(&mut self, index: usize) {
        self.counts[index] = 0;
    }
}

/// Binary broadcast decision over all BISes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionVector {
    bits: Vec<bool>,
}

impl ActionVector {
    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &i in indices {
            bits[i] = true;
        }
        Self { bits }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices set to broadcast, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }
}

/// Refreshes the entries originating in the view owner's domain from ground
/// truth; foreign entries are untouched.
pub fn refresh_own_domain(
    view: &mut ControllerView,
    registry: &BisRegistry,
    truth: &TrueNetworkState,
) {
    for (index, entry) in registry.entries().iter().enumerate() {
        if entry.origin_domain() == view.owner() {
            view.set_believed(index, truth.values[index]);
        }
    }
}

/// Applies one synchronization broadcast.
///
/// Every selected BIS becomes up to date in every controller's view and its
/// staleness count drops to zero; unselected counts are left alone (the
/// per-slot tick lives elsewhere). Own-domain entries are refreshed for every
/// controller regardless of the action. `budget` of `None` marks a
/// budget-exempt caller.
pub fn apply_broadcast(
    views: &mut [ControllerView],
    staleness: &mut StalenessVector,
    action: &ActionVector,
    truth: &TrueNetworkState,
    registry: &BisRegistry,
    budget: Option<u32>,
) -> Result<()> {
    let n = registry.len();
    if action.len() != n || staleness.len() != n || truth.values.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "action {}, staleness {}, truth {} against {} registered items",
            action.len(),
            staleness.len(),
            truth.values.len(),
            n
        )));
    }
    if let Some(budget) = budget {
        let used = action.count_ones();
        if used > budget as usize {
            return Err(Error::BudgetExceeded { used, budget: budget as usize });
        }
    }
    for view in views.iter_mut() {
        refresh_own_domain(view, registry, truth);
    }
    for index in action.indices() {
        for view in views.iter_mut() {
            view.set_believed(index, truth.values[index]);
        }
        staleness.reset(index);
    }
    Ok(())
}
