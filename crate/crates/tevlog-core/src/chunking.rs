//! Resource-aware chunk sizing.
//!
//! The base chunk size is `clamp(floor(avail * target / K), min, max)`,
//! recomputed from a memory snapshot at startup and on reset. Between resets
//! the size evolves multiplicatively: each observation maps memory pressure
//! `P = 1 - avail/total` to an adjustment factor which scales the previous
//! size, clamped to the configured bounds. The multiplicative update is what
//! produces decay under sustained pressure and only partial recovery
//! afterwards.

use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChunkConfigError {
    #[error("target_utilization must be in (0, 1), got {0}")]
    BadTargetUtilization(f64),
    #[error("scale_constant must be positive")]
    BadScaleConstant,
    #[error("chunk bounds must satisfy 0 < min_chunk <= initial_chunk <= max_chunk")]
    BadBounds,
}

/// Chunk-sizing parameters. All sizes are in bytes of batch buffer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkConfig {
    /// Target memory-utilization ratio, in (0, 1).
    pub target_utilization: f64,
    /// Device-specific divisor applied to `avail * target`.
    pub scale_constant: u64,
    pub min_chunk: u64,
    pub max_chunk: u64,
    pub initial_chunk: u64,
}

impl ChunkConfig {
    pub fn validate(&self) -> Result<(), ChunkConfigError> {
        if !(self.target_utilization > 0.0 && self.target_utilization < 1.0) {
            return Err(ChunkConfigError::BadTargetUtilization(self.target_utilization));
        }
        if self.scale_constant == 0 {
            return Err(ChunkConfigError::BadScaleConstant);
        }
        if self.min_chunk == 0
            || self.min_chunk > self.initial_chunk
            || self.initial_chunk > self.max_chunk
        {
            return Err(ChunkConfigError::BadBounds);
        }
        Ok(())
    }
}

impl Default for ChunkConfig {
    /// 16 KiB..64 KiB bounds with a 64 KiB initial size. The scale constant
    /// is chosen so that a typical workstation snapshot lands at the upper
    /// clamp, yielding the 64 KiB starting size.
    fn default() -> Self {
        ChunkConfig {
            target_utilization: 0.5,
            scale_constant: 64 * 1024,
            min_chunk: 16 * 1024,
            max_chunk: 64 * 1024,
            initial_chunk: 64 * 1024,
        }
    }
}

/// One observation of system memory, in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemorySnapshot {
    pub available: u64,
    pub total: u64,
}

impl MemorySnapshot {
    pub fn new(available: u64, total: u64) -> Self {
        debug_assert!(total > 0 && available <= total);
        MemorySnapshot { available, total }
    }

    /// Snapshot whose pressure equals `p` against the given total.
    pub fn from_pressure(p: f64, total: u64) -> Self {
        let p = p.clamp(0.0, 1.0);
        // round to nearest; truncation would nudge the pressure across the
        // strict branch boundaries
        let available = ((1.0 - p) * total as f64 + 0.5) as u64;
        MemorySnapshot { available, total }
    }
}

/// Memory pressure `P = 1 - avail/total`, in [0, 1].
pub fn pressure(snapshot: &MemorySnapshot) -> f64 {
    1.0 - snapshot.available as f64 / snapshot.total as f64
}

/// Piecewise adjustment factor. Boundaries are strict: P = 0.8 takes the
/// 0.9 branch, P = 0.6 and P = 0.3 take the identity branch.
pub fn adjustment_factor(p: f64) -> f64 {
    if p > 0.8 {
        0.8
    } else if p > 0.6 {
        0.9
    } else if p < 0.3 {
        1.1
    } else {
        1.0
    }
}

/// `clamp(floor(avail * target / K), min, max)`.
pub fn base_chunk_size(snapshot: &MemorySnapshot, cfg: &ChunkConfig) -> u64 {
    let raw = (snapshot.available as f64 * cfg.target_utilization
        / cfg.scale_constant as f64) as u64;
    raw.clamp(cfg.min_chunk, cfg.max_chunk)
}

/// Mutable chunk-size state owned by a single ingestion driver.
#[derive(Debug, Clone)]
pub struct ChunkerState {
    current: u64,
    last_pressure: f64,
    window: u64,
    history: Vec<(u64, u64)>,
}

impl ChunkerState {
    /// Initializes from the base formula against a startup snapshot.
    pub fn new(snapshot: &MemorySnapshot, cfg: &ChunkConfig) -> Self {
        ChunkerState {
            current: base_chunk_size(snapshot, cfg),
            last_pressure: pressure(snapshot),
            window: 0,
            history: Vec::new(),
        }
    }

    /// Starts from the configured initial size instead of a live snapshot.
    pub fn with_initial(cfg: &ChunkConfig) -> Self {
        ChunkerState {
            current: cfg.initial_chunk,
            last_pressure: 0.0,
            window: 0,
            history: Vec::new(),
        }
    }

    /// Re-derives the size from the base formula, discarding decay state.
    pub fn reset(&mut self, snapshot: &MemorySnapshot, cfg: &ChunkConfig) {
        self.current = base_chunk_size(snapshot, cfg);
        self.last_pressure = pressure(snapshot);
    }

    /// Multiplicative update: `C <- clamp(floor(A(P) * C_prev), min, max)`.
    pub fn next_chunk_size(&mut self, snapshot: &MemorySnapshot, cfg: &ChunkConfig) -> u64 {
        let p = pressure(snapshot);
        let factor = adjustment_factor(p);
        self.current =
            ((factor * self.current as f64) as u64).clamp(cfg.min_chunk, cfg.max_chunk);
        self.last_pressure = p;
        self.history.push((self.window, self.current));
        self.window += 1;
        self.current
    }

    pub fn current(&self) -> u64 {
        self.current
    }

    pub fn last_pressure(&self) -> f64 {
        self.last_pressure
    }

    /// (window index, chunk size) pairs, one per `next_chunk_size` call.
    pub fn history(&self) -> &[(u64, u64)] {
        &self.history
    }
}

/// Source of memory observations for the ingestion driver.
pub trait MemoryProbe {
    fn sample(&mut self) -> MemorySnapshot;
}

/// What a scripted probe does after its profile is exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileEnd {
    /// Start over from the first entry.
    Cycle,
    /// Keep returning the last entry.
    Clamp,
}

/// Deterministic probe replaying a fixed pressure profile.
#[derive(Debug, Clone)]
pub struct ScriptedProbe {
    pressures: Vec<f64>,
    end: ProfileEnd,
    pos: usize,
    total: u64,
}

impl ScriptedProbe {
    const DEFAULT_TOTAL: u64 = 8 * 1024 * 1024 * 1024;

    pub fn new(pressures: Vec<f64>, end: ProfileEnd) -> Self {
        debug_assert!(!pressures.is_empty());
        ScriptedProbe {
            pressures,
            end,
            pos: 0,
            total: Self::DEFAULT_TOTAL,
        }
    }

    pub fn rewind(&mut self) {
        self.pos = 0;
    }
}

impl MemoryProbe for ScriptedProbe {
    fn sample(&mut self) -> MemorySnapshot {
        let idx = if self.pos < self.pressures.len() {
            self.pos
        } else {
            match self.end {
                ProfileEnd::Cycle => self.pos % self.pressures.len(),
                ProfileEnd::Clamp => self.pressures.len() - 1,
            }
        };
        self.pos += 1;
        MemorySnapshot::from_pressure(self.pressures[idx], self.total)
    }
}

/// Probe returning the same snapshot forever.
#[derive(Debug, Clone, Copy)]
pub struct FixedProbe(pub MemorySnapshot);

impl MemoryProbe for FixedProbe {
    fn sample(&mut self) -> MemorySnapshot {
        self.0
    }
}
