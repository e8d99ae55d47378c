//! Command-line front end.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tevlog::anchor::{AnchorStore, Clock, FixedClock, SystemClock};
use tevlog::bench::{
    self, BenchParams, DEFAULT_STRESS_PROFILE, DEFAULT_STRESS_TOTAL, DEFAULT_STRESS_WINDOW,
    DEFAULT_TAMPER_RATIOS,
};
use tevlog::core::{
    deserialize_proof, hash_leaf, recompute_root, serialize_proof, ChunkConfig, HashAlgorithm,
    HashScheme, MemoryProbe, MerkleTree, ProfileEnd, ScriptedProbe,
};
use tevlog::emit::{self, OutputFormat};
use tevlog::loggen;
use tevlog::pipeline::{ingest_stream, verify_entry, LogStore};
use tevlog::probe::{load_profile, SystemProbe};

#[derive(Parser)]
#[command(name = "tevlog", version, about = "Tamper-evident log toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Deterministic seed for generated logs and sampling.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Hash algorithm: sha256 or blake2b.
    #[arg(long, default_value = "sha256")]
    algo: String,
    /// Initial adaptive chunk size in bytes.
    #[arg(long, default_value_t = 64 * 1024)]
    chunk_init: u64,
    /// Minimum chunk size in bytes.
    #[arg(long, default_value_t = 16 * 1024)]
    chunk_min: u64,
    /// Maximum chunk size in bytes.
    #[arg(long, default_value_t = 64 * 1024)]
    chunk_max: u64,
    /// Anchor the root after every Nth chunk.
    #[arg(long, default_value_t = 1)]
    anchor_every: u64,
    /// Memory pressure profile file (one ratio per line) replayed instead
    /// of live memory sampling.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Use a fixed, stepping anchor clock instead of wall time.
    #[arg(long, default_value_t = false)]
    fixed_clock: bool,
    /// Number of devices in generated logs.
    #[arg(long, default_value_t = 8)]
    devices: u64,
}

impl CommonOpts {
    fn algorithm(&self) -> Result<HashAlgorithm> {
        HashAlgorithm::from_name(&self.algo)
            .with_context(|| format!("unknown algorithm {:?}, expected sha256 or blake2b", self.algo))
    }

    fn chunk_cfg(&self) -> Result<ChunkConfig> {
        let cfg = ChunkConfig {
            initial_chunk: self.chunk_init,
            min_chunk: self.chunk_min,
            max_chunk: self.chunk_max,
            ..ChunkConfig::default()
        };
        cfg.validate().context("invalid chunk configuration")?;
        Ok(cfg)
    }

    fn probe(&self) -> Result<Box<dyn MemoryProbe>> {
        Ok(match &self.profile {
            Some(path) => {
                let pressures = load_profile(path)
                    .with_context(|| format!("reading profile {}", path.display()))?;
                Box::new(ScriptedProbe::new(pressures, ProfileEnd::Cycle))
            }
            None => Box::new(SystemProbe),
        })
    }

    fn probe_profile(&self) -> Result<Option<Vec<f64>>> {
        self.profile
            .as_ref()
            .map(|path| {
                load_profile(path).with_context(|| format!("reading profile {}", path.display()))
            })
            .transpose()
    }

    fn clock(&self) -> Box<dyn Clock> {
        if self.fixed_clock {
            Box::new(FixedClock::default())
        } else {
            Box::new(SystemClock)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full benchmark matrix and emit result files.
    Benchmark {
        #[command(flatten)]
        common: CommonOpts,
        /// Log counts for the ingestion scenario.
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_SCALES)]
        scales: Vec<u64>,
        /// Repetitions per timing measurement.
        #[arg(long, default_value_t = 5)]
        runs: u32,
        /// Output directory for result files.
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
        /// Output format: csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Fixed chunk size in bytes for the non-adaptive baseline.
        #[arg(long, default_value_t = 16 * 1024)]
        fixed_chunk: u64,
    },
    /// Generate logs, ingest them through the chunked pipeline, and persist
    /// the store plus the anchor chain.
    Ingest {
        #[command(flatten)]
        common: CommonOpts,
        /// Number of log entries to generate.
        #[arg(long, default_value_t = 10000)]
        count: u64,
        /// Output directory for store.log and anchors.log.
        #[arg(long, default_value = "ingested")]
        out_dir: PathBuf,
    },
    /// Generate an inclusion proof for one stored entry.
    Prove {
        #[command(flatten)]
        common: CommonOpts,
        /// Newline-delimited canonical log store.
        #[arg(long)]
        store: PathBuf,
        /// Entry index to prove.
        #[arg(long)]
        index: u64,
        /// Proof output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify stored entries against the anchored root.
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Newline-delimited canonical log store.
        #[arg(long)]
        store: PathBuf,
        /// Anchor chain file.
        #[arg(long)]
        anchors: PathBuf,
        /// Index to verify; omitted means verify every entry.
        #[arg(long)]
        index: Option<u64>,
        /// Standalone proof file to check instead of regenerating one.
        #[arg(long)]
        proof: Option<PathBuf>,
    },
    /// Tamper with generated logs at several ratios and report detection
    /// quality.
    TamperTest {
        #[command(flatten)]
        common: CommonOpts,
        /// Log count for the tamper corpus.
        #[arg(long, default_value_t = 10000)]
        count: u64,
        /// Tamper ratios to sweep.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_TAMPER_RATIOS)]
        ratios: Vec<f64>,
        /// Verify only the planned targets instead of a full sweep.
        #[arg(long, default_value_t = false)]
        targets_only: bool,
    },
    /// Replay a scripted memory-pressure profile and report per-window
    /// chunk sizes.
    Stress {
        #[command(flatten)]
        common: CommonOpts,
        /// Total entries across the run.
        #[arg(long, default_value_t = DEFAULT_STRESS_TOTAL)]
        count: u64,
        /// Entries per pressure window.
        #[arg(long, default_value_t = DEFAULT_STRESS_WINDOW)]
        window: u64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Benchmark {
            common,
            scales,
            runs,
            out_dir,
            format,
            fixed_chunk,
        } => {
            let format = OutputFormat::from_name(&format)
                .with_context(|| format!("unknown format {format:?}, expected csv or json"))?;
            let params = BenchParams {
                seed: common.seed,
                algorithm: common.algorithm()?,
                runs,
                scales,
                chunk_cfg: common.chunk_cfg()?,
                fixed_chunk,
                anchor_every: common.anchor_every,
                device_count: common.devices,
                probe_profile: common.probe_profile()?,
                fixed_clock: common.fixed_clock,
            };
            let bundle = bench::run_all(&params)?;
            let written = emit::emit(&bundle, format, &out_dir)?;
            for path in written {
                println!("wrote {}", path.display());
            }
        }
        Command::Ingest {
            common,
            count,
            out_dir,
        } => {
            std::fs::create_dir_all(&out_dir)?;
            let entries = loggen::generate_canonical(count, common.seed, common.devices);
            let mut anchor = AnchorStore::open(&out_dir.join("anchors.log"))?;
            let outcome = ingest_stream(
                entries,
                common.probe()?.as_mut(),
                &common.chunk_cfg()?,
                common.algorithm()?,
                &mut anchor,
                common.clock().as_mut(),
                common.anchor_every,
            )?;
            outcome.store.save(&out_dir.join("store.log"))?;
            let s = &outcome.stats;
            println!(
                "ingested {} entries in {} chunks ({} rebuilds, {} hash ops) \
                 at {:.0} logs/s; root {}",
                s.entry_count,
                s.batch_count,
                s.rebuilds,
                s.hash_ops,
                s.entries_per_second,
                outcome.tree.root()?.to_hex()
            );
        }
        Command::Prove {
            common,
            store,
            index,
            out,
        } => {
            let algo = common.algorithm()?;
            let store = LogStore::load(&store)?;
            let tree = MerkleTree::build(store.leaf_digests(algo), HashScheme::plain(algo));
            let proof = tree.generate_proof(index)?;
            std::fs::write(&out, serialize_proof(&proof))?;
            println!(
                "proof for entry {index} of {}: {} siblings, root {}",
                tree.leaf_count(),
                proof.siblings.len(),
                tree.root()?.to_hex()
            );
        }
        Command::Verify {
            common,
            store,
            anchors,
            index,
            proof,
        } => {
            let algo = common.algorithm()?;
            let store = LogStore::load(&store)?;
            let anchor = AnchorStore::open(&anchors)?;
            if let Some(path) = proof {
                let index = index.context("--proof requires --index")?;
                let proof = deserialize_proof(&std::fs::read(&path)?)?;
                let entry = store
                    .get(index)
                    .with_context(|| format!("no entry at index {index}"))?;
                let recomputed = recompute_root(&hash_leaf(entry, algo), &proof);
                let trusted = anchor.latest_for_count(proof.tree_size)?.root;
                report_verdict(index, recomputed == trusted);
                if recomputed != trusted {
                    bail!("verification failed");
                }
                return Ok(());
            }
            let tree = MerkleTree::build(store.leaf_digests(algo), HashScheme::plain(algo));
            let indices: Vec<u64> = match index {
                Some(i) => vec![i],
                None => (0..store.count()).collect(),
            };
            let mut failures = 0u64;
            for i in indices {
                let verdict = verify_entry(&store, &tree, &anchor, i)?;
                if !verdict.valid {
                    failures += 1;
                }
                report_verdict(i, verdict.valid);
            }
            if failures > 0 {
                bail!("{failures} entries failed verification");
            }
        }
        Command::TamperTest {
            common,
            count,
            ratios,
            targets_only,
        } => {
            let params = BenchParams {
                seed: common.seed,
                algorithm: common.algorithm()?,
                device_count: common.devices,
                ..BenchParams::default()
            };
            let rows = bench::bench_tamper(&params, &ratios, count, targets_only);
            print!("{}", emit::tamper_csv(&rows));
        }
        Command::Stress {
            common,
            count,
            window,
        } => {
            let params = BenchParams {
                seed: common.seed,
                algorithm: common.algorithm()?,
                chunk_cfg: common.chunk_cfg()?,
                device_count: common.devices,
                ..BenchParams::default()
            };
            let profile = common
                .probe_profile()?
                .unwrap_or_else(|| DEFAULT_STRESS_PROFILE.to_vec());
            let rows = bench::bench_stress(&params, &profile, count, window);
            print!("{}", emit::stress_csv(&rows));
        }
    }
    Ok(())
}

fn report_verdict(index: u64, valid: bool) {
    println!("entry {index}: {}", if valid { "valid" } else { "INVALID" });
}
