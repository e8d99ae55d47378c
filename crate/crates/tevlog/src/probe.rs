//! Memory probes backed by the host system or a scripted profile file.

use std::fs;
use std::path::Path;

use tevlog_core::{MemoryProbe, MemorySnapshot};

/// Fallback snapshot when `/proc/meminfo` is unavailable: 6 GiB free of 8.
const FALLBACK: MemorySnapshot = MemorySnapshot {
    available: 6 * 1024 * 1024 * 1024,
    total: 8 * 1024 * 1024 * 1024,
};

/// Live system probe; on Linux this reads `MemAvailable`/`MemTotal` from
/// `/proc/meminfo`.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemProbe;

impl SystemProbe {
    fn read_meminfo() -> Option<MemorySnapshot> {
        let text = fs::read_to_string("/proc/meminfo").ok()?;
        let mut total = None;
        let mut available = None;
        for line in text.lines() {
            let mut parts = line.split_whitespace();
            match parts.next()? {
                "MemTotal:" => total = parts.next()?.parse::<u64>().ok(),
                "MemAvailable:" => available = parts.next()?.parse::<u64>().ok(),
                _ => {}
            }
        }
        // meminfo reports KiB
        Some(MemorySnapshot::new(available? * 1024, total? * 1024))
    }
}

impl MemoryProbe for SystemProbe {
    fn sample(&mut self) -> MemorySnapshot {
        Self::read_meminfo().unwrap_or(FALLBACK)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("cannot read profile file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {0}: pressure must be a decimal in [0, 1]")]
    BadLine(usize),
    #[error("profile file is empty")]
    Empty,
}

/// Parses a scripted pressure profile: one decimal ratio in [0, 1] per line.
/// Blank lines and `#` comments are skipped.
pub fn load_profile(path: &Path) -> Result<Vec<f64>, ProfileError> {
    let text = fs::read_to_string(path)?;
    parse_profile(&text)
}

pub fn parse_profile(text: &str) -> Result<Vec<f64>, ProfileError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p: f64 = line.parse().map_err(|_| ProfileError::BadLine(i + 1))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(ProfileError::BadLine(i + 1));
        }
        out.push(p);
    }
    if out.is_empty() {
        return Err(ProfileError::Empty);
    }
    Ok(out)
}
