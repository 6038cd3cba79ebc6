use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// At most this many violations are stored; `violation_count` keeps the total.
pub const MAX_STORED_VIOLATIONS: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub seed: u64,
    pub witness: String,
    pub slack: f64,
}

/// Outcome of a randomized law check.
///
/// `violations` is nonempty exactly when `max_slack > tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub law_name: String,
    pub trials: usize,
    pub tolerance: f64,
    pub max_slack: f64,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    /// Trials that could not be evaluated (e.g. an indeterminate solver run).
    pub skipped: usize,
    pub notes: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn new(law_name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            law_name: law_name.into(),
            trials: 0,
            tolerance,
            max_slack: 0.0,
            violation_count: 0,
            violations: Vec::new(),
            skipped: 0,
            notes: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    /// Records one measured slack; positive slack above the tolerance is a violation.
    pub fn record(&mut self, seed: u64, slack: f64, witness: impl FnOnce() -> String) {
        let slack = if slack.is_nan() { f64::INFINITY } else { slack };
        self.max_slack = self.max_slack.max(slack);
        if slack > self.tolerance {
            self.violation_count += 1;
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(Violation {
                    seed,
                    witness: witness(),
                    slack,
                });
            }
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn metric_max(&mut self, key: &str, value: f64) {
        let e = self.metrics.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        *e = e.max(value);
    }

    pub fn metric_min(&mut self, key: &str, value: f64) {
        let e = self.metrics.entry(key.to_string()).or_insert(f64::INFINITY);
        *e = e.min(value);
    }

    pub fn metric_add(&mut self, key: &str, value: f64) {
        *self.metrics.entry(key.to_string()).or_insert(0.0) += value;
    }

    /// Folds another report into this one; its metrics are keyed `law/metric`.
    pub fn absorb(&mut self, other: CheckReport) {
        self.trials += other.trials;
        self.skipped += other.skipped;
        self.max_slack = self.max_slack.max(other.max_slack);
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(v);
            }
        }
        self.notes.extend(other.notes);
        for (k, v) in other.metrics {
            self.metrics.insert(format!("{}/{}", other.law_name, k), v);
        }
    }
}

/// SplitMix64 step; derives independent per-trial seeds from a run seed.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    splitmix64(seed ^ splitmix64(trial as u64))
}
