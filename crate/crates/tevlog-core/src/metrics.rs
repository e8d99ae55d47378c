//! Set-based tamper-detection metrics.
//!
//! True/false positives and false negatives come from set intersections and
//! differences between the tampered and detected index sets, so no index can
//! be counted twice and every metric stays in [0, 1].

use alloc::collections::BTreeSet;
use core::time::Duration;

/// Outcome of a detection sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub tampered: BTreeSet<u64>,
    pub detected: BTreeSet<u64>,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub detection_time: Duration,
}

impl DetectionReport {
    /// Precision and recall fall back to 1.0 when their denominators are
    /// zero (nothing tampered and nothing flagged); F1 is 0 when both are 0.
    pub fn from_sets(
        tampered: BTreeSet<u64>,
        detected: BTreeSet<u64>,
        detection_time: Duration,
    ) -> Self {
        let tp = detected.intersection(&tampered).count() as u64;
        let fp = detected.difference(&tampered).count() as u64;
        let fn_ = tampered.difference(&detected).count() as u64;
        let precision = if tp + fp == 0 {
            1.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            1.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        DetectionReport {
            tampered,
            detected,
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
            detection_time,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.tampered == self.detected
    }
}
