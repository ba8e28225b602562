//! Equal-key and close-value pair detection, and strength filtering.

use std::cmp::Ordering;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XyzError};
use crate::projection::ProjectionKey;

/// `x_indices × z_indices`: every X-column in the block pairs with every
/// Z-column in it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBlock {
    pub x_indices: Vec<usize>,
    pub z_indices: Vec<usize>,
}

impl PairBlock {
    pub fn len(&self) -> usize {
        self.x_indices.len() * self.z_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Candidate pairs as a union of disjoint Cartesian products.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePairSet {
    blocks: Vec<PairBlock>,
    total_pairs: usize,
}

impl CandidatePairSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, block: PairBlock) {
        if !block.is_empty() {
            self.total_pairs += block.len();
            self.blocks.push(block);
        }
    }

    pub fn blocks(&self) -> &[PairBlock] {
        &self.blocks
    }

    pub fn total_pairs(&self) -> usize {
        self.total_pairs
    }

    pub fn is_empty(&self) -> bool {
        self.total_pairs == 0
    }

    /// Lazily enumerates `(x_index, z_index)` pairs block by block.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.blocks.iter().flat_map(|b| {
            b.x_indices
                .iter()
                .flat_map(move |&j| b.z_indices.iter().map(move |&k| (j, k)))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// Searched against `Y`: large strength means `Y ≈ X_j ∘ X_k`.
    Positive,
    /// Searched against `-Y`: large strength means `Y ≈ -(X_j ∘ X_k)`.
    Negative,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionHit {
    pub j: usize,
    pub k: usize,
    pub strength: f64,
    pub found_at_repetition: usize,
    pub sign: Sign,
}

/// Sorts the `2p` keys once and walks runs of equal keys.
pub fn equal_pairs(x_keys: &[ProjectionKey], z_keys: &[ProjectionKey]) -> CandidatePairSet {
    let mut entries: Vec<(u64, bool, usize)> = Vec::with_capacity(x_keys.len() + z_keys.len());
    entries.extend(x_keys.iter().map(|k| (k.key, false, k.column)));
    entries.extend(z_keys.iter().map(|k| (k.key, true, k.column)));
    entries.sort_unstable();

    let mut out = CandidatePairSet::new();
    let mut start = 0;
    while start < entries.len() {
        let key = entries[start].0;
        let mut end = start + 1;
        while end < entries.len() && entries[end].0 == key {
            end += 1;
        }
        let run = &entries[start..end];
        // Within a run the X entries (false) sort before the Z entries.
        let split = run.partition_point(|e| !e.1);
        if split > 0 && split < run.len() {
            out.push(PairBlock {
                x_indices: run[..split].iter().map(|e| e.2).collect(),
                z_indices: run[split..].iter().map(|e| e.2).collect(),
            });
        }
        start = end;
    }
    out
}

/// All `(j, k)` with `|x_j - z_k| ≤ τ`, via sorting and a sliding window.
/// Each X-index gets one block holding its window of Z-indices.
pub fn close_pairs(x: &[f64], z: &[f64], tau: f64) -> Result<CandidatePairSet> {
    if !(tau >= 0.0) {
        return Err(XyzError::InvalidParameter(format!(
            "closeness threshold must be nonnegative, got {tau}"
        )));
    }
    let by_value = |v: &[f64]| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
        idx
    };
    let xs = by_value(x);
    let zs = by_value(z);
    let mut out = CandidatePairSet::new();
    let mut lo = 0;
    let mut hi = 0;
    for &j in &xs {
        let v = x[j];
        while lo < zs.len() && z[zs[lo]] < v - tau {
            lo += 1;
        }
        hi = hi.max(lo);
        while hi < zs.len() && z[zs[hi]] <= v + tau {
            hi += 1;
        }
        // Guard against rounding in v ± τ.
        let window: Vec<usize> = zs[lo..hi]
            .iter()
            .copied()
            .filter(|&k| (v - z[k]).abs() <= tau)
            .collect();
        if !window.is_empty() {
            out.push(PairBlock {
                x_indices: vec![j],
                z_indices: window,
            });
        }
    }
    Ok(out)
}

/// Pairs already strength-checked during one search, keyed by the unordered
/// pair.
#[derive(Clone, Debug, Default)]
pub struct SeenSet {
    inner: FxHashSet<u64>,
}

impl SeenSet {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    fn key(j: usize, k: usize) -> u64 {
        let (a, b) = if j <= k { (j, k) } else { (k, j) };
        ((a as u64) << 32) | b as u64
    }

    #[inline]
    pub fn contains(&self, j: usize, k: usize) -> bool {
        self.inner.contains(&Self::key(j, k))
    }

    /// Returns `true` when the pair was not present.
    #[inline]
    pub fn insert(&mut self, j: usize, k: usize) -> bool {
        self.inner.insert(Self::key(j, k))
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FilterParams {
    pub min_strength: f64,
    pub repetition: usize,
    pub sign: Sign,
    pub skip_diagonal: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FilterOutcome {
    pub hits: Vec<InteractionHit>,
    pub evaluated: usize,
}

/// Evaluates `strength(j, k)` for candidates not yet in `seen` and keeps
/// those reaching `min_strength`. Every evaluated pair is added to `seen`.
pub fn filter_strong(
    candidates: &CandidatePairSet,
    mut strength: impl FnMut(usize, usize) -> f64,
    params: FilterParams,
    seen: &mut SeenSet,
) -> Result<FilterOutcome> {
    check_threshold(params.min_strength)?;
    let mut out = FilterOutcome::default();
    for (j, k) in candidates.iter() {
        if params.skip_diagonal && j == k {
            continue;
        }
        if !seen.insert(j, k) {
            continue;
        }
        out.evaluated += 1;
        let s = strength(j, k);
        if s >= params.min_strength {
            out.hits.push(InteractionHit {
                j,
                k,
                strength: s,
                found_at_repetition: params.repetition,
                sign: params.sign,
            });
        }
    }
    Ok(out)
}

pub(crate) fn check_threshold(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(XyzError::InvalidParameter(format!(
            "strength threshold must be in (0, 1], got {gamma}"
        )))
    }
}
