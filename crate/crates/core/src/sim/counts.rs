use std::collections::BTreeMap;

use crate::circuit::QCrankConfig;

/// Histogram of measured basis states.
///
/// Keys are basis indices (qubit `q` is bit `q`). As strings, character `k`
/// is the outcome of qubit `k`, so the address bits come first and the data
/// bits follow.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShotCounts {
    n_qubits: usize,
    counts: BTreeMap<usize, u64>,
}

impl ShotCounts {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_outcomes(n_qubits: usize, outcomes: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::new(n_qubits);
        for o in outcomes {
            c.add(o, 1);
        }
        c
    }

    pub fn add(&mut self, outcome: usize, count: u64) {
        debug_assert!(outcome < 1 << self.n_qubits);
        if count > 0 {
            *self.counts.entry(outcome).or_insert(0) += count;
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    /// Nonzero entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn bitstring(&self, outcome: usize) -> String {
        (0..self.n_qubits)
            .map(|q| if outcome >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn bitstrings(&self) -> BTreeMap<String, u64> {
        self.iter().map(|(k, v)| (self.bitstring(k), v)).collect()
    }

    /// Shot totals per address value.
    pub fn address_totals(&self, cfg: QCrankConfig) -> Vec<u64> {
        let mask = cfg.addresses() - 1;
        let mut out = vec![0; cfg.addresses()];
        for (k, v) in self.iter() {
            out[k & mask] += v;
        }
        out
    }
}
