//! JSON envelope shared by every experiment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::estimators::K_COV;
use crate::kakeya::{MIN_TUBE_FILL, NORM_SLACK};
use crate::verifiers::constants::*;
use crate::verifiers::Outcome;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    /// Fully resolved configuration, defaults included.
    pub config: serde_json::Value,
    pub constants: BTreeMap<String, f64>,
    pub result: serde_json::Value,
    pub verdict: Outcome,
    pub version: String,
}

impl ExperimentReport {
    pub fn new(
        command: impl Into<String>,
        config: serde_json::Value,
        result: serde_json::Value,
        verdict: Outcome,
    ) -> Self {
        Self {
            command: command.into(),
            config,
            constants: frozen_constants(),
            result,
            verdict,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

/// Every numeric constant a verdict can depend on.
pub fn frozen_constants() -> BTreeMap<String, f64> {
    [
        ("bound_tol", BOUND_TOL),
        ("c_lem", C_LEM),
        ("c_split", C_SPLIT),
        ("c_two_lower", C_TWO_LOWER),
        ("c_two_upper", C_TWO_UPPER),
        ("calibration_slack", CALIBRATION_SLACK),
        ("k_cov", K_COV),
        ("min_tube_fill", MIN_TUBE_FILL),
        ("naive_limit", NAIVE_LIMIT as f64),
        ("norm_slack", NORM_SLACK),
        ("series_converge", SERIES_CONVERGE),
        ("series_diverge", SERIES_DIVERGE),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}
