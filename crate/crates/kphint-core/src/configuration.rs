use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};

/// A subset of a problem's KP index set, held in canonical form:
/// strictly increasing, duplicate-free indices.
///
/// The empty configuration denotes no hints; the full sequence `0..n`
/// denotes the whole candidate set. Two configurations are equal iff
/// their canonical forms are identical, so the type is usable directly
/// as a map key. `Ord` is lexicographic over the canonical sequence,
/// which is also the tie-break order used by the selection strategies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(Vec<u32>);

impl Configuration {
    /// The empty configuration (no KPs injected).
    pub fn empty() -> Self {
        Configuration(Vec::new())
    }

    /// The full configuration `0..n`.
    pub fn full(n: u32) -> Self {
        Configuration((0..n).collect())
    }

    /// The leave-one-out configuration `{0..n} \ {i}`.
    pub fn leave_one_out(n: u32, i: u32) -> CoreResult<Self> {
        if i >= n {
            return Err(CoreError::IndexOutOfRange { index: i, n });
        }
        Ok(Configuration((0..n).filter(|&j| j != i).collect()))
    }

    /// Canonicalize arbitrary indices: sort, deduplicate, and bound-check
    /// against the problem's KP count. Idempotent.
    pub fn canonicalize(indices: &[u32], n: u32) -> CoreResult<Self> {
        for &index in indices {
            if index >= n {
                return Err(CoreError::IndexOutOfRange { index, n });
            }
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(Configuration(sorted))
    }

    /// Build from indices already known to be strictly increasing and in
    /// range. Debug-asserts the canonical-form invariant.
    pub fn from_sorted(indices: Vec<u32>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Configuration(indices)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: u32) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    /// True when this configuration is a subset of `other`.
    pub fn is_subset_of(&self, other: &Configuration) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    /// The configuration with the given indices removed.
    pub fn without(&self, removed: &[u32]) -> Configuration {
        Configuration(
            self.0
                .iter()
                .copied()
                .filter(|i| !removed.contains(i))
                .collect(),
        )
    }

    /// Tie-break ordering shared by every selection strategy:
    /// fewer KPs first, then lexicographically smallest canonical form.
    pub fn selection_order(&self, other: &Configuration) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}
