//! CSV and JSON emitters for benchmark results.
//!
//! CSV headers are fixed per scenario; the JSON bundle carries every row
//! plus the run metadata. Results without a machine descriptor are
//! rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::BenchBundle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("emit io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("json encoding failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("results rejected: metadata must carry a machine descriptor")]
    MissingMachine,
}

fn validate(bundle: &BenchBundle) -> Result<(), EmitError> {
    if bundle.metadata.machine.trim().is_empty() {
        return Err(EmitError::MissingMachine);
    }
    Ok(())
}

pub fn ingestion_csv(rows: &[crate::bench::IngestionRow]) -> String {
    let mut out = String::from("log_count,logs_per_second,logs_per_second_std\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.2},{:.2}",
            r.log_count, r.logs_per_second, r.logs_per_second_std
        );
    }
    out
}

pub fn verification_csv(rows: &[crate::bench::VerificationRow]) -> String {
    let mut out = String::from("batch_size,avg_time_per_entry_ms\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.6}", r.batch_size, r.avg_time_per_entry_ms);
    }
    out
}

pub fn proofs_csv(rows: &[crate::bench::ProofRow]) -> String {
    let mut out = String::from("index,proof_size_bytes,proof_len\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.index, r.proof_size_bytes, r.proof_len);
    }
    out
}

pub fn hash_csv(rows: &[crate::bench::HashRow]) -> String {
    let mut out = String::from("algorithm,ingestion_rate_logs_per_sec,verification_time_ms\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.2},{:.6}",
            r.algorithm, r.ingestion_rate_logs_per_sec, r.verification_time_ms
        );
    }
    out
}

pub fn tamper_csv(rows: &[crate::bench::TamperRow]) -> String {
    let mut out =
        String::from("tamper_ratio,tampered,detected,precision,recall,f1,detection_time_seconds\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6}",
            r.tamper_ratio,
            r.tampered,
            r.detected,
            r.precision,
            r.recall,
            r.f1,
            r.detection_time_seconds
        );
    }
    out
}

pub fn stress_csv(rows: &[crate::bench::StressRow]) -> String {
    let mut out = String::from("window,chunk_size_kb,batch_count\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.2},{}", r.window, r.chunk_size_kb, r.batch_count);
    }
    out
}

/// Writes every scenario's output under `out_dir` and returns the paths.
pub fn emit(
    bundle: &BenchBundle,
    format: OutputFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, EmitError> {
    validate(bundle)?;
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut write = |name: &str, content: String| -> Result<(), EmitError> {
        let path = out_dir.join(name);
        fs::write(&path, content)?;
        written.push(path);
        Ok(())
    };
    match format {
        OutputFormat::Csv => {
            write("ingestion_adaptive.csv", ingestion_csv(&bundle.ingestion_adaptive))?;
            write("ingestion_fixed.csv", ingestion_csv(&bundle.ingestion_fixed))?;
            write("verification_batch.csv", verification_csv(&bundle.verification))?;
            write("proof_results.csv", proofs_csv(&bundle.proofs))?;
            write("hash_algorithms.csv", hash_csv(&bundle.hash_compare))?;
            write("tampering_detection.csv", tamper_csv(&bundle.tamper))?;
            write("controlled_stress.csv", stress_csv(&bundle.stress))?;
            // metadata travels with the CSVs so results stay attributable
            write("metadata.json", serde_json::to_string_pretty(&bundle.metadata)?)?;
        }
        OutputFormat::Json => {
            write("results.json", serde_json::to_string_pretty(bundle)?)?;
        }
    }
    Ok(written)
}
