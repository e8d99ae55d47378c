//! Tamper simulator: the four attack classes applied to a log store, plus
//! the set-based detection sweep.
//!
//! Modification and replay preserve entry count, so they are detected with
//! per-index metrics. Deletion and injection change the count and are
//! classified structurally through `check_truncation` and root comparison;
//! per-index alignment is ill-defined after reindexing.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tevlog_core::{hash_leaf, recompute_root, DetectionReport, Digest, MerkleTree};

use crate::pipeline::LogStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TamperKind {
    Modification,
    Deletion,
    Injection,
    Replay,
}

/// A deterministic attack description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TamperPlan {
    pub kind: TamperKind,
    pub targets: BTreeSet<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TamperError {
    #[error("plan kind {actual:?} does not match operation {expected:?}")]
    KindMismatch {
        expected: TamperKind,
        actual: TamperKind,
    },
    #[error("plan has no target indices")]
    EmptyPlan,
    #[error("target index {index} out of range for {count} entries")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("replay source must differ from target index {0}")]
    ReplaySelfCopy(u64),
    #[error(
        "entry count changed ({expected} committed, {actual} present); \
         run check_truncation for structural attacks"
    )]
    CountMismatch { expected: u64, actual: u64 },
}

impl TamperPlan {
    pub fn new(kind: TamperKind, targets: BTreeSet<u64>, seed: u64) -> Self {
        TamperPlan { kind, targets, seed }
    }

    /// Uniform sample of `count` distinct targets below `n`.
    pub fn sampled(kind: TamperKind, n: u64, count: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let idx = rand::seq::index::sample(&mut rng, n as usize, count.min(n) as usize);
        TamperPlan {
            kind,
            targets: idx.iter().map(|i| i as u64).collect(),
            seed,
        }
    }

    fn validate(&self, expected: TamperKind, count: u64) -> Result<(), TamperError> {
        if self.kind != expected {
            return Err(TamperError::KindMismatch {
                expected,
                actual: self.kind,
            });
        }
        if self.targets.is_empty() {
            return Err(TamperError::EmptyPlan);
        }
        if let Some(&index) = self.targets.iter().next_back() {
            if index >= count {
                return Err(TamperError::IndexOutOfRange { index, count });
            }
        }
        Ok(())
    }

    /// Replay source for each target, derived from the plan seed and never
    /// equal to the target itself.
    pub fn replay_pairs(&self, count: u64) -> Vec<(u64, u64)> {
        debug_assert!(count >= 2);
        self.targets
            .iter()
            .map(|&i| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ i.wrapping_mul(0x9e37_79b9));
                loop {
                    let j = rng.gen_range(0..count);
                    if j != i {
                        return (i, j);
                    }
                }
            })
            .collect()
    }
}

/// Seeded corruption: flips one bit of one byte and appends a fixed marker,
/// so the result always differs from the original without assuming entry
/// structure.
fn corrupt(entry: &[u8], seed: u64, index: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x51_7c_c1b7));
    let mut out = entry.to_vec();
    if !out.is_empty() {
        let pos = rng.gen_range(0..out.len());
        out[pos] ^= 1 << rng.gen_range(0..8u8);
        if out[pos] == b'\n' {
            // keep entries single-line
            out[pos] ^= 0x01;
        }
    }
    out.extend_from_slice(b"#tampered");
    out
}

/// Overwrites each targeted entry with a seeded corruption.
pub fn apply_modification(store: &LogStore, plan: &TamperPlan) -> Result<LogStore, TamperError> {
    plan.validate(TamperKind::Modification, store.count())?;
    let mut mutated = store.clone();
    for &i in &plan.targets {
        let corrupted = corrupt(store.get(i).expect("validated"), plan.seed, i);
        mutated.entries_mut()[i as usize] = corrupted;
    }
    Ok(mutated)
}

/// Removes the targeted entries; the count shrinks.
pub fn apply_deletion(store: &LogStore, plan: &TamperPlan) -> Result<LogStore, TamperError> {
    plan.validate(TamperKind::Deletion, store.count())?;
    let mut mutated = store.clone();
    for &i in plan.targets.iter().rev() {
        mutated.entries_mut().remove(i as usize);
    }
    Ok(mutated)
}

/// Inserts fabricated entries at the targeted positions; the count grows.
pub fn apply_injection(store: &LogStore, plan: &TamperPlan) -> Result<LogStore, TamperError> {
    plan.validate(TamperKind::Injection, store.count())?;
    let mut mutated = store.clone();
    for (offset, &i) in plan.targets.iter().enumerate() {
        let fabricated = format!(
            "{}|0|device-xxx|motion|0.000|info|fabricated entry {}",
            i, plan.seed
        );
        mutated
            .entries_mut()
            .insert(i as usize + offset, fabricated.into_bytes());
    }
    Ok(mutated)
}

/// Overwrites each target with a byte-copy of a different, valid entry.
pub fn apply_replay(store: &LogStore, plan: &TamperPlan) -> Result<LogStore, TamperError> {
    plan.validate(TamperKind::Replay, store.count())?;
    apply_replay_pairs(store, &plan.replay_pairs(store.count()))
}

/// Replay with explicit (target, source) pairs; `target == source` is
/// rejected.
pub fn apply_replay_pairs(
    store: &LogStore,
    pairs: &[(u64, u64)],
) -> Result<LogStore, TamperError> {
    let count = store.count();
    let mut mutated = store.clone();
    for &(i, j) in pairs {
        if i == j {
            return Err(TamperError::ReplaySelfCopy(i));
        }
        for index in [i, j] {
            if index >= count {
                return Err(TamperError::IndexOutOfRange { index, count });
            }
        }
        mutated.entries_mut()[i as usize] = store.get(j).expect("checked").to_vec();
    }
    Ok(mutated)
}

/// Which indices the detection sweep verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionScope<'a> {
    /// Verify every index (default).
    FullScan,
    /// Fast path: verify only the given indices.
    TargetsOnly(&'a BTreeSet<u64>),
}

/// Verifies the mutated store against the committed tree and anchored root,
/// collecting the set of indices whose verdict is invalid.
///
/// The mutated store must have the same count as the committed tree;
/// structural attacks (deletion/injection) route through `check_truncation`
/// instead. Detection time covers the verification sweep only.
pub fn detect_tampering(
    original_tree: &MerkleTree,
    trusted_root: Digest,
    mutated: &LogStore,
    tampered: &BTreeSet<u64>,
    scope: DetectionScope<'_>,
) -> Result<DetectionReport, TamperError> {
    if mutated.count() != original_tree.leaf_count() {
        return Err(TamperError::CountMismatch {
            expected: original_tree.leaf_count(),
            actual: mutated.count(),
        });
    }
    let algo = original_tree.scheme().algorithm;
    let indices: Vec<u64> = match scope {
        DetectionScope::FullScan => (0..mutated.count()).collect(),
        DetectionScope::TargetsOnly(set) => set.iter().copied().collect(),
    };
    let start = Instant::now();
    let mut detected = BTreeSet::new();
    for i in indices {
        let leaf = hash_leaf(mutated.get(i).expect("count checked"), algo);
        let proof = original_tree.generate_proof(i).expect("count checked");
        if recompute_root(&leaf, &proof) != trusted_root {
            detected.insert(i);
        }
    }
    let detection_time = start.elapsed();
    Ok(DetectionReport::from_sets(
        tampered.clone(),
        detected,
        detection_time,
    ))
}
