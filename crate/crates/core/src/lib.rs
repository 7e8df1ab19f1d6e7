#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructors;
pub mod dimfn;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod kakeya;
pub mod report;
pub mod verifiers;

pub use constructors::{CantorSpec, FurstenbergInstance, FurstenbergParams, Placement};
pub use dimfn::{DimensionFunction, Family};
pub use error::{Error, Result};
pub use estimators::DimensionEstimate;
pub use geometry::{Ball, BallFamily, Direction, GridSet, Point, ScaleSequence, Segment};
pub use report::ExperimentReport;
pub use verifiers::Outcome;
