//! Append-only file-backed trust anchor for committed roots.
//!
//! One record per line:
//!
//! ```text
//! seq=<int> count=<int> algo=<name> root=<64-hex> ts=<rfc3339>
//! ```
//!
//! Records are never rewritten; the file is opened in append mode and each
//! record is flushed before the append call returns. The file itself is
//! assumed integrity-protected (threat-model trust base); this module does
//! not defend it.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};
use tevlog_core::{Digest, HashAlgorithm};

/// Injectable time source so anchor files are reproducible in tests.
pub trait Clock {
    fn now(&mut self) -> DateTime<Utc>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&mut self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Deterministic clock: starts at a fixed instant and advances by a fixed
/// step on every call.
#[derive(Debug, Clone)]
pub struct FixedClock {
    next_ms: i64,
    step_ms: i64,
}

impl FixedClock {
    pub fn new(start_epoch_ms: i64, step_ms: i64) -> Self {
        FixedClock {
            next_ms: start_epoch_ms,
            step_ms,
        }
    }
}

impl Default for FixedClock {
    fn default() -> Self {
        FixedClock::new(1_700_000_000_000, 1)
    }
}

impl Clock for FixedClock {
    fn now(&mut self) -> DateTime<Utc> {
        let t = Utc
            .timestamp_millis_opt(self.next_ms)
            .single()
            .expect("fixed clock in range");
        self.next_ms += self.step_ms;
        t
    }
}

/// One anchored root: (sequence, entry count, algorithm, root, timestamp).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorRecord {
    pub sequence: u64,
    pub entry_count: u64,
    pub algorithm: HashAlgorithm,
    pub root: Digest,
    pub anchored_at: DateTime<Utc>,
}

impl AnchorRecord {
    fn to_line(&self) -> String {
        format!(
            "seq={} count={} algo={} root={} ts={}",
            self.sequence,
            self.entry_count,
            self.algorithm.name(),
            self.root.to_hex(),
            self.anchored_at.to_rfc3339_opts(SecondsFormat::Millis, true)
        )
    }

    fn parse(line: &str, lineno: usize) -> Result<Self, AnchorError> {
        let bad = || AnchorError::Malformed { line: lineno };
        let mut fields = line.split(' ');
        let mut field = |key: &str| -> Result<String, AnchorError> {
            let part = fields.next().ok_or_else(bad)?;
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            if k != key {
                return Err(bad());
            }
            Ok(v.to_string())
        };
        let sequence = field("seq")?.parse().map_err(|_| bad())?;
        let entry_count = field("count")?.parse().map_err(|_| bad())?;
        let algorithm = HashAlgorithm::from_name(&field("algo")?).ok_or_else(bad)?;
        let root = Digest::from_hex(&field("root")?).map_err(|_| bad())?;
        let anchored_at = DateTime::parse_from_rfc3339(&field("ts")?)
            .map_err(|_| bad())?
            .with_timezone(&Utc);
        if fields.next().is_some() {
            return Err(bad());
        }
        Ok(AnchorRecord {
            sequence,
            entry_count,
            algorithm,
            root,
            anchored_at,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AnchorError {
    #[error("anchor io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("anchor file line {line} is malformed")]
    Malformed { line: usize },
    #[error("anchor sequence must strictly increase (last {last}, new {new})")]
    NonMonotonicSequence { last: u64, new: u64 },
    #[error("anchored entry count must be non-decreasing (last {last}, new {new})")]
    ShrinkingCount { last: u64, new: u64 },
    #[error("anchor store is empty")]
    Empty,
    #[error("no anchored root for entry count {0}")]
    NoMatchingCount(u64),
}

/// Append-only anchor store backed by a file, with an in-memory copy of all
/// records for lookups.
#[derive(Debug)]
pub struct AnchorStore {
    path: PathBuf,
    writer: BufWriter<File>,
    records: Vec<AnchorRecord>,
}

impl AnchorStore {
    /// Opens (or creates) the anchor file and loads existing records.
    pub fn open(path: &Path) -> Result<Self, AnchorError> {
        let records = if path.exists() {
            let text = std::fs::read_to_string(path)?;
            text.lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| AnchorRecord::parse(l, i + 1))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            Vec::new()
        };
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(AnchorStore {
            path: path.to_path_buf(),
            writer: BufWriter::new(file),
            records,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends a record, enforcing sequence/count monotonicity, and flushes
    /// it to disk before returning.
    pub fn append(&mut self, record: AnchorRecord) -> Result<(), AnchorError> {
        if let Some(last) = self.records.last() {
            if record.sequence <= last.sequence {
                return Err(AnchorError::NonMonotonicSequence {
                    last: last.sequence,
                    new: record.sequence,
                });
            }
            if record.entry_count < last.entry_count {
                return Err(AnchorError::ShrinkingCount {
                    last: last.entry_count,
                    new: record.entry_count,
                });
            }
        }
        writeln!(self.writer, "{}", record.to_line())?;
        self.writer.flush()?;
        self.records.push(record);
        Ok(())
    }

    pub fn next_sequence(&self) -> u64 {
        self.records.last().map_or(0, |r| r.sequence + 1)
    }

    pub fn records(&self) -> &[AnchorRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Highest-sequence record.
    pub fn latest(&self) -> Result<&AnchorRecord, AnchorError> {
        self.records.last().ok_or(AnchorError::Empty)
    }

    /// Latest record anchored at exactly `entry_count` entries.
    pub fn latest_for_count(&self, entry_count: u64) -> Result<&AnchorRecord, AnchorError> {
        self.records
            .iter()
            .rev()
            .find(|r| r.entry_count == entry_count)
            .ok_or(AnchorError::NoMatchingCount(entry_count))
    }
}
