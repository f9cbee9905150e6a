use alloc::vec::Vec;

/// Matching-edge costs `Y_1 ≤ … ≤ Y_m` of one realization, in selection order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CostProfile(Vec<f64>);

impl CostProfile {
    /// Wraps a sequence that is already nondecreasing.
    pub fn new(costs: Vec<f64>) -> Self {
        debug_assert!(costs.windows(2).all(|w| w[0] <= w[1]), "profile must be nondecreasing");
        CostProfile(costs)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `Y_k`, 1-based.
    pub fn get(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    /// Largest cost, `Y_m`.
    pub fn last(&self) -> Option<f64> {
        self.0.last().copied()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}
