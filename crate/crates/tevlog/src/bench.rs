//! Benchmark scenarios behind the `tevlog benchmark` subcommand.
//!
//! Every scenario is deterministic given (seed, scripted probe, injected
//! clock) except the wall-clock timing fields. Scenarios run sequentially to
//! keep timing clean.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tevlog_core::{
    serialize_proof, ChunkConfig, ChunkerState, HashAlgorithm, HashScheme, MemoryProbe,
    MemorySnapshot, MerkleTree, ProfileEnd, ScriptedProbe,
};

use crate::anchor::{AnchorStore, Clock, FixedClock, SystemClock};
use crate::loggen;
use crate::pipeline::{ingest_stream, verify_batch, IngestOutcome, LogStore, PipelineError};
use crate::probe::SystemProbe;
use crate::tamper::{apply_modification, detect_tampering, DetectionScope, TamperKind, TamperPlan};

pub const DEFAULT_SCALES: [u64; 5] = [1000, 5000, 10000, 50000, 100000];
pub const DEFAULT_BATCH_SIZES: [u64; 5] = [10, 50, 100, 500, 1000];
pub const DEFAULT_PROOF_INDICES: [u64; 5] = [0, 2500, 5000, 7500, 9999];
pub const DEFAULT_TAMPER_RATIOS: [f64; 5] = [0.01, 0.05, 0.10, 0.20, 0.50];
pub const DEFAULT_STRESS_PROFILE: [f64; 5] = [0.25, 0.85, 0.85, 0.85, 0.25];
pub const DEFAULT_STRESS_TOTAL: u64 = 20000;
pub const DEFAULT_STRESS_WINDOW: u64 = 2000;

/// Shared knobs for all scenarios.
#[derive(Debug, Clone)]
pub struct BenchParams {
    pub seed: u64,
    pub algorithm: HashAlgorithm,
    pub runs: u32,
    pub scales: Vec<u64>,
    pub chunk_cfg: ChunkConfig,
    pub fixed_chunk: u64,
    pub anchor_every: u64,
    pub device_count: u64,
    /// When set, adaptive runs replay this pressure profile instead of
    /// sampling live system memory.
    pub probe_profile: Option<Vec<f64>>,
    /// When set, anchors carry deterministic timestamps.
    pub fixed_clock: bool,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            seed: 42,
            algorithm: HashAlgorithm::Sha256,
            runs: 5,
            scales: DEFAULT_SCALES.to_vec(),
            chunk_cfg: ChunkConfig::default(),
            fixed_chunk: 16 * 1024,
            anchor_every: 1,
            device_count: 8,
            probe_profile: None,
            fixed_clock: false,
        }
    }
}

impl BenchParams {
    fn probe(&self) -> Box<dyn MemoryProbe> {
        match &self.probe_profile {
            Some(profile) => Box::new(ScriptedProbe::new(profile.clone(), ProfileEnd::Cycle)),
            None => Box::new(SystemProbe),
        }
    }

    fn clock(&self) -> Box<dyn Clock> {
        if self.fixed_clock {
            Box::new(FixedClock::default())
        } else {
            Box::new(SystemClock)
        }
    }

    fn fixed_cfg(&self) -> ChunkConfig {
        ChunkConfig {
            min_chunk: self.fixed_chunk,
            max_chunk: self.fixed_chunk,
            initial_chunk: self.fixed_chunk,
            ..self.chunk_cfg
        }
    }

    /// One full ingestion into a throwaway anchor file.
    pub fn ingest_once(
        &self,
        entries: Vec<Vec<u8>>,
        cfg: &ChunkConfig,
    ) -> Result<IngestOutcome, PipelineError> {
        let dir = tempfile::tempdir().expect("tempdir");
        let mut anchor =
            AnchorStore::open(&dir.path().join("anchors.log")).expect("anchor in tempdir");
        ingest_stream(
            entries,
            self.probe().as_mut(),
            cfg,
            self.algorithm,
            &mut anchor,
            self.clock().as_mut(),
            self.anchor_every,
        )
    }
}

/// Run metadata carried by every result bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub machine: String,
    pub algorithm: String,
    pub seed: u64,
    pub runs: u32,
    pub artifact_version: String,
    pub prng: String,
    pub clock: String,
    pub clock_resolution_ns: u64,
}

impl Metadata {
    pub fn collect(params: &BenchParams) -> Self {
        Metadata {
            machine: machine_descriptor(),
            algorithm: params.algorithm.name().to_string(),
            seed: params.seed,
            runs: params.runs,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            prng: loggen::PRNG_ID.to_string(),
            clock: "monotonic".to_string(),
            clock_resolution_ns: clock_resolution_ns(),
        }
    }
}

fn machine_descriptor() -> String {
    let host = std::fs::read_to_string("/etc/hostname")
        .map(|h| h.trim().to_string())
        .unwrap_or_else(|_| "unknown-host".to_string());
    format!(
        "{}/{}-{}",
        host,
        std::env::consts::ARCH,
        std::env::consts::OS
    )
}

fn clock_resolution_ns() -> u64 {
    let mut best = u64::MAX;
    for _ in 0..64 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min((b - a).as_nanos() as u64);
    }
    best
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestionRow {
    pub mode: String,
    pub log_count: u64,
    pub logs_per_second: f64,
    pub logs_per_second_std: f64,
    pub wall_time_s: f64,
    pub wall_time_s_std: f64,
    pub tree_depth: u64,
}

/// Throughput over `scales x {adaptive, fixed}`, `runs` repetitions each.
pub fn bench_ingestion(params: &BenchParams) -> Result<Vec<IngestionRow>, PipelineError> {
    let mut rows = Vec::new();
    for &scale in &params.scales {
        let entries = loggen::generate_canonical(scale, params.seed, params.device_count);
        for (mode, cfg) in [
            ("adaptive", params.chunk_cfg),
            ("fixed", params.fixed_cfg()),
        ] {
            let mut rates = Vec::new();
            let mut walls = Vec::new();
            let mut depth = 0;
            for _ in 0..params.runs {
                let outcome = params.ingest_once(entries.clone(), &cfg)?;
                rates.push(outcome.stats.entries_per_second);
                walls.push(outcome.stats.wall_time.as_secs_f64());
                depth = outcome.tree.level_count() as u64;
            }
            let (rate_mean, rate_std) = mean_std(&rates);
            let (wall_mean, wall_std) = mean_std(&walls);
            rows.push(IngestionRow {
                mode: mode.to_string(),
                log_count: scale,
                logs_per_second: rate_mean,
                logs_per_second_std: rate_std,
                wall_time_s: wall_mean,
                wall_time_s_std: wall_std,
                tree_depth: depth,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationRow {
    pub batch_size: u64,
    pub total_time_ms: f64,
    pub avg_time_per_entry_ms: f64,
}

/// Sequential batch verification on a 10000-entry tree.
pub fn bench_verification(
    params: &BenchParams,
    batch_sizes: &[u64],
) -> Result<Vec<VerificationRow>, PipelineError> {
    let n = 10000u64;
    let entries = loggen::generate_canonical(n, params.seed, params.device_count);
    let dir = tempfile::tempdir().expect("tempdir");
    let mut anchor = AnchorStore::open(&dir.path().join("anchors.log")).expect("anchor");
    let outcome = ingest_stream(
        entries,
        params.probe().as_mut(),
        &params.chunk_cfg,
        params.algorithm,
        &mut anchor,
        params.clock().as_mut(),
        params.anchor_every,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut rows = Vec::new();
    for &batch_size in batch_sizes {
        let indices: Vec<u64> = (0..batch_size).map(|_| rng.gen_range(0..n)).collect();
        let (verdicts, timing) = verify_batch(&outcome.store, &outcome.tree, &anchor, &indices);
        debug_assert!(verdicts.iter().all(|v| v.as_ref().is_ok_and(|v| v.valid)));
        rows.push(VerificationRow {
            batch_size,
            total_time_ms: timing.total.as_secs_f64() * 1e3,
            avg_time_per_entry_ms: timing.per_entry_mean.as_secs_f64() * 1e3,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProofRow {
    pub index: u64,
    pub gen_time_ms: f64,
    pub proof_size_bytes: u64,
    pub proof_len: u64,
}

/// Proof generation time, serialized size, and sibling count for selected
/// indices in a 10000-entry tree.
pub fn bench_proofs(params: &BenchParams, indices: &[u64]) -> Vec<ProofRow> {
    let n = 10000u64;
    let entries = loggen::generate_canonical(n, params.seed, params.device_count);
    let leaves = LogStore::from_entries(entries).leaf_digests(params.algorithm);
    let tree = MerkleTree::build(leaves, HashScheme::plain(params.algorithm));
    indices
        .iter()
        .map(|&index| {
            let start = Instant::now();
            let proof = tree.generate_proof(index).expect("index within scale");
            let gen_time_ms = start.elapsed().as_secs_f64() * 1e3;
            ProofRow {
                index,
                gen_time_ms,
                proof_size_bytes: serialize_proof(&proof).len() as u64,
                proof_len: proof.siblings.len() as u64,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HashRow {
    pub algorithm: String,
    pub ingestion_rate_logs_per_sec: f64,
    pub verification_time_ms: f64,
    pub digest_bytes: u64,
}

/// Same workload and seed under both hash algorithms.
pub fn bench_hash_compare(params: &BenchParams, n: u64) -> Result<Vec<HashRow>, PipelineError> {
    let entries = loggen::generate_canonical(n, params.seed, params.device_count);
    let mut rows = Vec::new();
    for algorithm in HashAlgorithm::ALL {
        let algo_params = BenchParams {
            algorithm,
            ..params.clone()
        };
        let mut rates = Vec::new();
        for _ in 0..params.runs {
            let outcome = algo_params.ingest_once(entries.clone(), &params.chunk_cfg)?;
            rates.push(outcome.stats.entries_per_second);
        }
        let (rate, _) = mean_std(&rates);

        let dir = tempfile::tempdir().expect("tempdir");
        let mut anchor = AnchorStore::open(&dir.path().join("anchors.log")).expect("anchor");
        let outcome = ingest_stream(
            entries.clone(),
            algo_params.probe().as_mut(),
            &params.chunk_cfg,
            algorithm,
            &mut anchor,
            algo_params.clock().as_mut(),
            params.anchor_every,
        )?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let indices: Vec<u64> = (0..100).map(|_| rng.gen_range(0..n)).collect();
        let (_, timing) = verify_batch(&outcome.store, &outcome.tree, &anchor, &indices);
        rows.push(HashRow {
            algorithm: algorithm.name().to_string(),
            ingestion_rate_logs_per_sec: rate,
            verification_time_ms: timing.per_entry_mean.as_secs_f64() * 1e3,
            digest_bytes: 32,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TamperRow {
    pub tamper_ratio: f64,
    pub tampered: u64,
    pub detected: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub detection_time_seconds: f64,
}

/// Modification plans at each ratio over an `n`-entry log, detected with a
/// full verification sweep.
pub fn bench_tamper(
    params: &BenchParams,
    ratios: &[f64],
    n: u64,
    targets_only: bool,
) -> Vec<TamperRow> {
    let store = LogStore::from_entries(loggen::generate_canonical(
        n,
        params.seed,
        params.device_count,
    ));
    let tree = MerkleTree::build(
        store.leaf_digests(params.algorithm),
        HashScheme::plain(params.algorithm),
    );
    let root = tree.root().expect("non-empty");
    ratios
        .iter()
        .map(|&ratio| {
            let count = ((ratio * n as f64).round() as u64).min(n);
            let (targets, mutated) = if count == 0 {
                (BTreeSet::new(), store.clone())
            } else {
                let plan = TamperPlan::sampled(TamperKind::Modification, n, count, params.seed);
                let mutated = apply_modification(&store, &plan).expect("plan valid");
                (plan.targets, mutated)
            };
            let scope = if targets_only {
                DetectionScope::TargetsOnly(&targets)
            } else {
                DetectionScope::FullScan
            };
            let report =
                detect_tampering(&tree, root, &mutated, &targets, scope).expect("counts match");
            TamperRow {
                tamper_ratio: ratio,
                tampered: report.tampered.len() as u64,
                detected: report.detected.len() as u64,
                precision: report.precision,
                recall: report.recall,
                f1: report.f1,
                detection_time_seconds: report.detection_time.as_secs_f64(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StressRow {
    pub window: u64,
    pub chunk_size_kb: f64,
    pub batch_count: u64,
}

/// Scripted-pressure stress run: the chunk size is recomputed once per
/// ingestion window, then that byte budget drives the window's batches.
pub fn bench_stress(
    params: &BenchParams,
    profile: &[f64],
    total: u64,
    window: u64,
) -> Vec<StressRow> {
    assert!(window >= 1 && !profile.is_empty());
    let entries = loggen::generate_canonical(total, params.seed, params.device_count);
    let cfg = params.chunk_cfg;
    let mut chunker = ChunkerState::with_initial(&cfg);
    let mut tree = MerkleTree::build(Vec::new(), HashScheme::plain(params.algorithm));
    let mut rows = Vec::new();
    for (w, chunk) in entries.chunks(window as usize).enumerate() {
        let pressure = profile[w.min(profile.len() - 1)];
        let snapshot = MemorySnapshot::from_pressure(pressure, 8 << 30);
        let budget = chunker.next_chunk_size(&snapshot, &cfg);

        let mut batch_count = 0u64;
        let mut batch: Vec<_> = Vec::new();
        let mut used = 0u64;
        for entry in chunk {
            let size = entry.len() as u64;
            if !batch.is_empty() && used + size > budget {
                let leaves: Vec<_> = batch
                    .drain(..)
                    .map(|e: &Vec<u8>| tevlog_core::hash_leaf(e, params.algorithm))
                    .collect();
                tree.append_leaves(&leaves);
                batch_count += 1;
                used = 0;
            }
            used += size;
            batch.push(entry);
        }
        if !batch.is_empty() {
            let leaves: Vec<_> = batch
                .drain(..)
                .map(|e: &Vec<u8>| tevlog_core::hash_leaf(e, params.algorithm))
                .collect();
            tree.append_leaves(&leaves);
            batch_count += 1;
        }
        rows.push(StressRow {
            window: w as u64,
            chunk_size_kb: budget as f64 / 1024.0,
            batch_count,
        });
    }
    debug_assert_eq!(tree.leaf_count(), total);
    rows
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemoryRow {
    pub mode: String,
    /// Digest count x 32 bytes over all tree levels.
    pub digest_storage_bytes: u64,
    /// Growth of the process peak RSS during the build, where the platform
    /// exposes it; 0 when an earlier peak already covers the build.
    pub peak_rss_delta_bytes: Option<u64>,
}

/// Tree-storage footprint for adaptive, fixed, and single-shot builds.
pub fn bench_memory(params: &BenchParams, n: u64) -> Result<Vec<MemoryRow>, PipelineError> {
    let entries = loggen::generate_canonical(n, params.seed, params.device_count);
    let mut rows = Vec::new();
    for mode in ["adaptive", "fixed", "single-shot"] {
        let before = peak_rss_bytes();
        let tree = match mode {
            "adaptive" => params.ingest_once(entries.clone(), &params.chunk_cfg)?.tree,
            "fixed" => params.ingest_once(entries.clone(), &params.fixed_cfg())?.tree,
            _ => MerkleTree::build(
                LogStore::from_entries(entries.clone()).leaf_digests(params.algorithm),
                HashScheme::plain(params.algorithm),
            ),
        };
        let digests: u64 = tree.levels().iter().map(|l| l.len() as u64).sum();
        let after = peak_rss_bytes();
        rows.push(MemoryRow {
            mode: mode.to_string(),
            digest_storage_bytes: digests * 32,
            peak_rss_delta_bytes: match (before, after) {
                (Some(b), Some(a)) => Some(a.saturating_sub(b)),
                _ => None,
            },
        });
    }
    Ok(rows)
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    for line in status.lines() {
        if let Some(rest) = line.strip_prefix("VmHWM:") {
            let kb: u64 = rest.trim().trim_end_matches(" kB").trim().parse().ok()?;
            return Some(kb * 1024);
        }
    }
    None
}

/// Everything the `benchmark` subcommand produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchBundle {
    pub metadata: Metadata,
    pub ingestion_adaptive: Vec<IngestionRow>,
    pub ingestion_fixed: Vec<IngestionRow>,
    pub verification: Vec<VerificationRow>,
    pub proofs: Vec<ProofRow>,
    pub hash_compare: Vec<HashRow>,
    pub tamper: Vec<TamperRow>,
    pub stress: Vec<StressRow>,
    pub memory: Vec<MemoryRow>,
}

/// Runs the full scenario matrix.
pub fn run_all(params: &BenchParams) -> Result<BenchBundle, PipelineError> {
    let ingestion = bench_ingestion(params)?;
    let (adaptive, fixed): (Vec<_>, Vec<_>) =
        ingestion.into_iter().partition(|r| r.mode == "adaptive");
    Ok(BenchBundle {
        metadata: Metadata::collect(params),
        ingestion_adaptive: adaptive,
        ingestion_fixed: fixed,
        verification: bench_verification(params, &DEFAULT_BATCH_SIZES)?,
        proofs: bench_proofs(params, &DEFAULT_PROOF_INDICES),
        hash_compare: bench_hash_compare(params, 10000)?,
        tamper: bench_tamper(params, &DEFAULT_TAMPER_RATIOS, 10000, false),
        stress: bench_stress(
            params,
            &DEFAULT_STRESS_PROFILE,
            DEFAULT_STRESS_TOTAL,
            DEFAULT_STRESS_WINDOW,
        ),
        memory: bench_memory(params, 10000)?,
    })
}
