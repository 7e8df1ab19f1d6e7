//! Desk-scale checks of the combinatorial lemmas, series hypotheses and
//! dimension bounds.
//!
//! Every `≲` is made concrete with a constant from [`constants`], fitted once
//! on a seeded corpus and frozen. Bound checks are one-sided: an estimate on
//! the right side of a bound is reported as consistent, never as proven.

pub mod constants;

mod bounds;
mod decompose;
mod series;
mod split;
mod triples;

use serde::{Deserialize, Serialize};

pub use bounds::{
    check_dimension_bound, conjecture_experiment, hyperdyadic_epsilon, witness_params,
    zero_dim_experiment, BoundReport, ConjectureReport, ConjectureRow, HyperdyadicRow,
    ZeroDimReport,
};
pub use decompose::{
    adversarial_covering, decompose_directions, DecompositionReport, DirectionTrace,
};
pub use series::{check_series_condition, ASequence, CSource, SeriesReport, SeriesVerdict};
pub use split::{split_interval, SplitReport};
pub use triples::{
    calibration_config, count_triples, count_triples_naive, fit_c_lem, fit_two_way, two_way_corpus,
    two_way_count, two_way_from_instance, SegmentPair, TripleConfig, TripleCount, TwoWayReport,
};

/// Verdict of a one-sided check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Consistent,
    Violated,
    /// The hypothesis under which the bound is asserted does not hold.
    NotApplicable,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Consistent
        } else {
            Outcome::Violated
        }
    }

    pub fn is_violated(self) -> bool {
        self == Outcome::Violated
    }
}
