//! End-to-end ingestion and verification.
//!
//! Ingestion loops over the entry stream: recompute the chunk byte budget,
//! read one chunk, hash and append its leaves, bring the tree back in sync
//! exactly once, and anchor the new root. Verification hashes a stored
//! entry, folds its proof, and compares the candidate root against the
//! anchored root for the tree's entry count.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use tevlog_core::{
    hash_leaf, recompute_root, ChunkConfig, ChunkerState, Digest, HashAlgorithm, HashScheme,
    MemoryProbe, MerkleError, MerkleTree,
};

use crate::anchor::{AnchorError, AnchorRecord, AnchorStore, Clock};

/// Ordered canonical entry bytes. Entries are single lines; persistence is
/// newline-delimited, adequate at desk scale but not production storage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LogStore {
    entries: Vec<Vec<u8>>,
}

impl LogStore {
    pub fn new() -> Self {
        LogStore::default()
    }

    pub fn from_entries(entries: Vec<Vec<u8>>) -> Self {
        LogStore { entries }
    }

    pub fn push(&mut self, entry: Vec<u8>) {
        debug_assert!(!entry.contains(&b'\n'));
        self.entries.push(entry);
    }

    pub fn count(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn get(&self, index: u64) -> Option<&[u8]> {
        self.entries.get(index as usize).map(Vec::as_slice)
    }

    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut Vec<Vec<u8>> {
        &mut self.entries
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        for entry in &self.entries {
            file.write_all(entry)?;
            file.write_all(b"\n")?;
        }
        file.flush()
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut entries = Vec::new();
        for line in reader.lines() {
            entries.push(line?.into_bytes());
        }
        Ok(LogStore { entries })
    }

    /// Leaf digests of all entries under `algo`.
    pub fn leaf_digests(&self, algo: HashAlgorithm) -> Vec<Digest> {
        self.entries.iter().map(|e| hash_leaf(e, algo)).collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("anchor failure: {0}")]
    Anchor(#[from] AnchorError),
    #[error(transparent)]
    Merkle(#[from] MerkleError),
    #[error("entry index {index} out of range, store holds {count} entries")]
    IndexOutOfRange { index: u64, count: u64 },
}

/// Per-ingestion measurements.
#[derive(Debug, Clone, Default)]
pub struct IngestStats {
    pub entry_count: u64,
    pub batch_count: u64,
    /// One tree rebuild per ingested chunk, by construction.
    pub rebuilds: u64,
    pub hash_ops: u64,
    pub chunk_sizes: Vec<u64>,
    pub wall_time: Duration,
    pub entries_per_second: f64,
}

pub struct IngestOutcome {
    pub store: LogStore,
    pub tree: MerkleTree,
    pub stats: IngestStats,
}

/// Drives chunked ingestion over `entries`, anchoring the root after every
/// `anchor_every`-th chunk (and always after the final one). An anchor write
/// failure aborts the whole ingestion.
pub fn ingest_stream<I>(
    entries: I,
    probe: &mut dyn MemoryProbe,
    cfg: &ChunkConfig,
    algo: HashAlgorithm,
    anchor: &mut AnchorStore,
    clock: &mut dyn Clock,
    anchor_every: u64,
) -> Result<IngestOutcome, PipelineError>
where
    I: IntoIterator<Item = Vec<u8>>,
{
    assert!(anchor_every >= 1);
    let start = Instant::now();
    let mut source = entries.into_iter().peekable();
    let mut chunker = ChunkerState::new(&probe.sample(), cfg);
    let mut store = LogStore::new();
    let mut tree = MerkleTree::build(Vec::new(), HashScheme::plain(algo));
    let mut stats = IngestStats::default();
    let mut pending_anchor = false;

    while source.peek().is_some() {
        let budget = chunker.next_chunk_size(&probe.sample(), cfg);
        stats.chunk_sizes.push(budget);

        // fill one chunk; a chunk always admits at least one entry
        let mut batch: Vec<Vec<u8>> = Vec::new();
        let mut used = 0u64;
        while let Some(next) = source.peek() {
            let size = next.len() as u64;
            if !batch.is_empty() && used + size > budget {
                break;
            }
            used += size;
            batch.push(source.next().expect("peeked"));
        }

        let leaves: Vec<Digest> = batch.iter().map(|e| hash_leaf(e, algo)).collect();
        stats.hash_ops += leaves.len() as u64;
        for entry in batch {
            store.push(entry);
        }
        // rebuild once per batch
        stats.hash_ops += tree.append_leaves(&leaves);
        stats.rebuilds += 1;
        stats.batch_count += 1;

        if stats.batch_count % anchor_every == 0 {
            anchor_root(&tree, algo, anchor, clock)?;
            pending_anchor = false;
        } else {
            pending_anchor = true;
        }
    }

    if pending_anchor || (anchor.is_empty() && !tree.is_empty()) {
        anchor_root(&tree, algo, anchor, clock)?;
    }

    stats.entry_count = store.count();
    stats.wall_time = start.elapsed();
    stats.entries_per_second = if stats.wall_time.is_zero() {
        0.0
    } else {
        stats.entry_count as f64 / stats.wall_time.as_secs_f64()
    };
    Ok(IngestOutcome { store, tree, stats })
}

fn anchor_root(
    tree: &MerkleTree,
    algo: HashAlgorithm,
    anchor: &mut AnchorStore,
    clock: &mut dyn Clock,
) -> Result<(), PipelineError> {
    anchor.append(AnchorRecord {
        sequence: anchor.next_sequence(),
        entry_count: tree.leaf_count(),
        algorithm: algo,
        root: tree.root()?,
        anchored_at: clock.now(),
    })?;
    Ok(())
}

/// Verification outcome for one entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub recomputed_root: Digest,
    pub trusted_root: Digest,
}

/// Verifies the stored entry at `index` against the latest anchored root
/// whose entry count matches the tree. A missing matching anchor is an
/// error, never a silent fallback to a stale root.
pub fn verify_entry(
    store: &LogStore,
    tree: &MerkleTree,
    anchor: &AnchorStore,
    index: u64,
) -> Result<Verdict, PipelineError> {
    let entry = store
        .get(index)
        .ok_or(PipelineError::IndexOutOfRange {
            index,
            count: store.count(),
        })?;
    let trusted_root = anchor.latest_for_count(tree.leaf_count())?.root;
    let leaf = hash_leaf(entry, tree.scheme().algorithm);
    let proof = tree.generate_proof(index)?;
    let recomputed_root = recompute_root(&leaf, &proof);
    Ok(Verdict {
        valid: recomputed_root == trusted_root,
        recomputed_root,
        trusted_root,
    })
}

#[derive(Debug, Clone, Default)]
pub struct BatchTiming {
    pub total: Duration,
    pub per_entry_mean: Duration,
}

/// Sequential `verify_entry` over `indices`; per-index errors are reported
/// in place without aborting the rest of the batch.
pub fn verify_batch(
    store: &LogStore,
    tree: &MerkleTree,
    anchor: &AnchorStore,
    indices: &[u64],
) -> (Vec<Result<Verdict, PipelineError>>, BatchTiming) {
    let start = Instant::now();
    let verdicts: Vec<_> = indices
        .iter()
        .map(|&i| verify_entry(store, tree, anchor, i))
        .collect();
    let total = start.elapsed();
    let per_entry_mean = if indices.is_empty() {
        Duration::ZERO
    } else {
        total / indices.len() as u32
    };
    (verdicts, BatchTiming { total, per_entry_mean })
}

/// Structural comparison of the store's entry count against the latest
/// anchored count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationFinding {
    Consistent,
    /// Entries were removed: fewer present than anchored.
    Truncated { anchored: u64, present: u64 },
    /// More entries present than any anchor covers: injection suspicion.
    Grown { anchored: u64, present: u64 },
}

pub fn check_truncation(
    store: &LogStore,
    anchor: &AnchorStore,
) -> Result<TruncationFinding, PipelineError> {
    let anchored = anchor.latest()?.entry_count;
    let present = store.count();
    Ok(match present.cmp(&anchored) {
        std::cmp::Ordering::Less => TruncationFinding::Truncated { anchored, present },
        std::cmp::Ordering::Greater => TruncationFinding::Grown { anchored, present },
        std::cmp::Ordering::Equal => TruncationFinding::Consistent,
    })
}

/// Verifies every index and returns the set of invalid ones.
pub fn invalid_indices(
    store: &LogStore,
    tree: &MerkleTree,
    anchor: &AnchorStore,
) -> Result<BTreeSet<u64>, PipelineError> {
    let mut invalid = BTreeSet::new();
    for i in 0..store.count() {
        if !verify_entry(store, tree, anchor, i)?.valid {
            invalid.insert(i);
        }
    }
    Ok(invalid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchor::FixedClock;
    use crate::loggen;
    use tevlog_core::{FixedProbe, MemorySnapshot, ProfileEnd, ScriptedProbe};

    const ALGO: HashAlgorithm = HashAlgorithm::Sha256;

    fn fixed_probe() -> FixedProbe {
        FixedProbe(MemorySnapshot::from_pressure(0.45, 8 << 30))
    }

    fn ingest(
        entries: Vec<Vec<u8>>,
        cfg: &ChunkConfig,
        dir: &Path,
        anchor_every: u64,
    ) -> (IngestOutcome, AnchorStore) {
        let mut anchor = AnchorStore::open(&dir.join("anchors.log")).unwrap();
        let mut clock = FixedClock::default();
        let outcome = ingest_stream(
            entries,
            &mut fixed_probe(),
            cfg,
            ALGO,
            &mut anchor,
            &mut clock,
            anchor_every,
        )
        .unwrap();
        (outcome, anchor)
    }

    #[test]
    fn single_chunk_degenerate_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(50, 1, 3);
        let mut cfg = ChunkConfig::default();
        cfg.max_chunk = 1 << 30;
        cfg.initial_chunk = 1 << 30;
        let (outcome, _) = ingest(entries.clone(), &cfg, dir.path(), 1);
        assert_eq!(outcome.stats.rebuilds, 1);
        assert_eq!(outcome.stats.batch_count, 1);
        let leaves: Vec<Digest> = entries.iter().map(|e| hash_leaf(e, ALGO)).collect();
        let reference = MerkleTree::build(leaves, HashScheme::plain(ALGO));
        assert_eq!(outcome.tree.root().unwrap(), reference.root().unwrap());
    }

    #[test]
    fn any_chunking_yields_identical_root() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(1000, 7, 4);
        let mut roots = Vec::new();
        for (i, max) in [512u64, 4096, 65536, 1 << 30].iter().enumerate() {
            let cfg = ChunkConfig {
                target_utilization: 0.5,
                scale_constant: 64 * 1024,
                min_chunk: 256,
                max_chunk: *max,
                initial_chunk: *max,
            };
            let sub = dir.path().join(format!("run{i}"));
            std::fs::create_dir(&sub).unwrap();
            let (outcome, _) = ingest(entries.clone(), &cfg, &sub, 1);
            roots.push(outcome.tree.root().unwrap());
        }
        assert!(roots.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn rebuild_counter_equals_chunk_count() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(2000, 3, 4);
        let (outcome, anchor) = ingest(entries, &ChunkConfig::default(), dir.path(), 1);
        assert!(outcome.stats.batch_count > 1);
        assert_eq!(outcome.stats.rebuilds, outcome.stats.batch_count);
        // one anchor per chunk at the default cadence
        assert_eq!(anchor.records().len() as u64, outcome.stats.batch_count);
        // sequences strictly increase
        for pair in anchor.records().windows(2) {
            assert!(pair[1].sequence > pair[0].sequence);
            assert!(pair[1].entry_count >= pair[0].entry_count);
        }
    }

    #[test]
    fn sparser_anchoring_still_anchors_the_final_root() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(2000, 3, 4);
        let (outcome, anchor) = ingest(entries, &ChunkConfig::default(), dir.path(), 4);
        assert!((anchor.records().len() as u64) < outcome.stats.batch_count);
        assert_eq!(anchor.latest().unwrap().entry_count, outcome.store.count());
        assert_eq!(anchor.latest().unwrap().root, outcome.tree.root().unwrap());
    }

    #[test]
    fn completeness_sweep_after_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(500, 11, 4);
        let (outcome, anchor) = ingest(entries, &ChunkConfig::default(), dir.path(), 1);
        for i in 0..outcome.store.count() {
            assert!(verify_entry(&outcome.store, &outcome.tree, &anchor, i)
                .unwrap()
                .valid);
        }
    }

    #[test]
    fn modified_entry_fails_verification() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(200, 5, 4);
        let (mut outcome, anchor) = ingest(entries, &ChunkConfig::default(), dir.path(), 1);
        outcome.store.entries_mut()[37] = b"9999|1|x|temperature|0.000|info|forged".to_vec();
        let verdict = verify_entry(&outcome.store, &outcome.tree, &anchor, 37).unwrap();
        assert!(!verdict.valid);
        assert!(verify_entry(&outcome.store, &outcome.tree, &anchor, 36).unwrap().valid);
    }

    #[test]
    fn verify_batch_reports_per_index_errors_without_aborting() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(20, 5, 2);
        let (outcome, anchor) = ingest(entries, &ChunkConfig::default(), dir.path(), 1);
        let (verdicts, timing) =
            verify_batch(&outcome.store, &outcome.tree, &anchor, &[3, 3, 99, 7]);
        assert_eq!(verdicts.len(), 4);
        assert!(verdicts[0].as_ref().unwrap().valid);
        assert!(verdicts[1].as_ref().unwrap().valid);
        assert!(matches!(
            verdicts[2],
            Err(PipelineError::IndexOutOfRange { index: 99, .. })
        ));
        assert!(verdicts[3].as_ref().unwrap().valid);
        assert!(timing.total >= timing.per_entry_mean);

        let (empty, timing) = verify_batch(&outcome.store, &outcome.tree, &anchor, &[]);
        assert!(empty.is_empty());
        assert_eq!(timing.per_entry_mean, Duration::ZERO);
    }

    #[test]
    fn truncation_findings() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(100, 5, 2);
        let (mut outcome, anchor) = ingest(entries, &ChunkConfig::default(), dir.path(), 1);
        assert_eq!(
            check_truncation(&outcome.store, &anchor).unwrap(),
            TruncationFinding::Consistent
        );
        let removed: Vec<_> = outcome.store.entries_mut().drain(90..).collect();
        assert_eq!(
            check_truncation(&outcome.store, &anchor).unwrap(),
            TruncationFinding::Truncated {
                anchored: 100,
                present: 90
            }
        );
        outcome.store.entries_mut().extend(removed);
        outcome.store.push(b"100|1|x|motion|1.000|info|extra".to_vec());
        assert_eq!(
            check_truncation(&outcome.store, &anchor).unwrap(),
            TruncationFinding::Grown {
                anchored: 100,
                present: 101
            }
        );
    }

    #[test]
    fn stress_profile_increases_batch_count() {
        let dir = tempfile::tempdir().unwrap();
        let entries = loggen::generate_canonical(4000, 9, 4);
        let baseline_probe = ScriptedProbe::new(vec![0.45], ProfileEnd::Clamp);
        let stressed_probe = ScriptedProbe::new(vec![0.85], ProfileEnd::Clamp);
        let run = |mut probe: ScriptedProbe, name: &str| {
            let sub = dir.path().join(name);
            std::fs::create_dir(&sub).unwrap();
            let mut anchor = AnchorStore::open(&sub.join("anchors.log")).unwrap();
            let mut clock = FixedClock::default();
            ingest_stream(
                entries.clone(),
                &mut probe,
                &ChunkConfig::default(),
                ALGO,
                &mut anchor,
                &mut clock,
                1,
            )
            .unwrap()
            .stats
            .batch_count
        };
        assert!(run(stressed_probe, "stress") > run(baseline_probe, "base"));
    }

    #[test]
    fn store_save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = LogStore::from_entries(loggen::generate_canonical(100, 2, 3));
        let path = dir.path().join("store.log");
        store.save(&path).unwrap();
        assert_eq!(LogStore::load(&path).unwrap(), store);
    }

    #[test]
    fn empty_anchor_lookup_errors() {
        let dir = tempfile::tempdir().unwrap();
        let anchor = AnchorStore::open(&dir.path().join("a.log")).unwrap();
        let store = LogStore::new();
        assert!(matches!(
            check_truncation(&store, &anchor),
            Err(PipelineError::Anchor(AnchorError::Empty))
        ));
    }
}
