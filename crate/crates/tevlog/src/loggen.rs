//! Deterministic synthetic IoT log workload and the canonical entry
//! serialization committed to by the Merkle leaves.
//!
//! Canonical form is one line of text with a fixed field order:
//!
//! ```text
//! seq|ts|device|sensor|value|severity|message
//! ```
//!
//! `|`, `\` and newline inside the message are escaped, so the encoding is
//! injective and entries can be stored one per line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// PRNG identifier recorded in benchmark metadata.
pub const PRNG_ID: &str = "chacha8";

/// Base epoch for synthetic timestamps (milliseconds).
const BASE_EPOCH_MS: u64 = 1_700_000_000_000;

const SENSOR_TYPES: [&str; 6] = [
    "temperature",
    "humidity",
    "pressure",
    "motion",
    "voltage",
    "current",
];

const MESSAGES: [&str; 8] = [
    "periodic telemetry report",
    "sensor reading within range",
    "threshold check passed",
    "heartbeat ok",
    "reading spike observed",
    "calibration drift suspected",
    "sensor fault recovered",
    "battery level nominal",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl Severity {
    pub fn name(&self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        match s {
            "info" => Some(Severity::Info),
            "warning" => Some(Severity::Warning),
            "error" => Some(Severity::Error),
            _ => None,
        }
    }
}

/// One synthetic IoT log record; the unit of commitment.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub sequence: u64,
    /// Epoch milliseconds, strictly increasing with `sequence`.
    pub timestamp_ms: u64,
    pub device_id: String,
    pub sensor_type: String,
    /// Reading at milli-unit granularity.
    pub value: f64,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseEntryError {
    #[error("expected 7 fields, got {0}")]
    FieldCount(usize),
    #[error("invalid {0} field")]
    BadField(&'static str),
}

impl LogEntry {
    /// Canonical single-line byte serialization.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        format!(
            "{}|{}|{}|{}|{:.3}|{}|{}",
            self.sequence,
            self.timestamp_ms,
            self.device_id,
            self.sensor_type,
            self.value,
            self.severity.name(),
            escape(&self.message)
        )
        .into_bytes()
    }

    pub fn parse(bytes: &[u8]) -> Result<LogEntry, ParseEntryError> {
        let text = std::str::from_utf8(bytes).map_err(|_| ParseEntryError::BadField("utf8"))?;
        let fields = split_unescaped(text);
        if fields.len() != 7 {
            return Err(ParseEntryError::FieldCount(fields.len()));
        }
        Ok(LogEntry {
            sequence: fields[0]
                .parse()
                .map_err(|_| ParseEntryError::BadField("sequence"))?,
            timestamp_ms: fields[1]
                .parse()
                .map_err(|_| ParseEntryError::BadField("timestamp"))?,
            device_id: fields[2].clone(),
            sensor_type: fields[3].clone(),
            value: fields[4]
                .parse()
                .map_err(|_| ParseEntryError::BadField("value"))?,
            severity: Severity::from_name(&fields[5])
                .ok_or(ParseEntryError::BadField("severity"))?,
            message: unescape(&fields[6]).ok_or(ParseEntryError::BadField("message"))?,
        })
    }
}

fn escape(message: &str) -> String {
    let mut out = String::with_capacity(message.len());
    for c in message.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '|' => out.push_str("\\|"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(field: &str) -> Option<String> {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next()? {
                '\\' => out.push('\\'),
                '|' => out.push('|'),
                'n' => out.push('\n'),
                _ => return None,
            }
        } else {
            out.push(c);
        }
    }
    Some(out)
}

/// Splits on `|` while honoring backslash escapes in the final field.
fn split_unescaped(text: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut escaped = false;
    for c in text.chars() {
        if escaped {
            current.push(c);
            escaped = false;
        } else if c == '\\' {
            current.push(c);
            escaped = true;
        } else if c == '|' {
            fields.push(std::mem::take(&mut current));
        } else {
            current.push(c);
        }
    }
    fields.push(current);
    fields
}

/// Deterministic workload: the same `(n, seed, device_count)` always yields
/// byte-identical entries. Timestamps step by 1..=5 ms, so they are strictly
/// monotone; device ids cycle over `device_count` synthetic devices.
pub fn generate(n: u64, seed: u64, device_count: u64) -> Vec<LogEntry> {
    assert!(device_count >= 1, "device_count must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut timestamp = BASE_EPOCH_MS;
    (0..n)
        .map(|i| {
            timestamp += 1 + rng.gen_range(0..5);
            let severity = match rng.gen_range(0..100) {
                0..=89 => Severity::Info,
                90..=97 => Severity::Warning,
                _ => Severity::Error,
            };
            LogEntry {
                sequence: i,
                timestamp_ms: timestamp,
                device_id: format!("device-{:03}", i % device_count),
                sensor_type: SENSOR_TYPES[rng.gen_range(0..SENSOR_TYPES.len())].to_string(),
                value: rng.gen_range(-50_000..150_000) as f64 / 1000.0,
                severity,
                message: MESSAGES[rng.gen_range(0..MESSAGES.len())].to_string(),
            }
        })
        .collect()
}

/// Canonical bytes for a whole workload, one entry per element.
pub fn generate_canonical(n: u64, seed: u64, device_count: u64) -> Vec<Vec<u8>> {
    generate(n, seed, device_count)
        .iter()
        .map(LogEntry::canonical_bytes)
        .collect()
}
