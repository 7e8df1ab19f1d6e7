use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

/// Furstenberg-set and discrete Kakeya experiments.
///
/// Every run prints a JSON report on stdout. With `--out PATH` the data file
/// (grid or CSV) goes to PATH and the report next to it with a `.json`
/// extension. Exit codes: 0 pass, 1 verdict fail, 2 usage or config error.
#[derive(Parser, Debug)]
#[command(name = "flab", version, about, long_about)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Grid resolution m (cells of side 2^-m); each command has its own default.
    #[arg(long, global = true)]
    pub resolution: Option<u32>,
    /// Output path for the data file; the report goes next to it as `.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON config; explicit flags take precedence over its values.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build sets and direction measures.
    #[command(subcommand)]
    Construct(Construct),
    /// Run estimators on a stored grid.
    #[command(subcommand)]
    Estimate(Estimate),
    /// Directional maximal function and norm scans.
    #[command(subcommand)]
    Kakeya(Kakeya),
    /// Check one inequality or hypothesis and emit a verdict.
    #[command(subcommand)]
    Verify(Verify),
    /// Bundle earlier JSON reports into one.
    Report(ReportArgs),
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    /// Central Cantor set in [0, 1].
    Cantor(CantorArgs),
    /// Cantor direction set with its Frostman measure.
    Directions(DirectionsArgs),
    /// Union of segments with Cantor or gauge fibres.
    Furstenberg(FurstenbergArgs),
    /// Polar image of Cantor × directions.
    CantorTarget(CantorTargetArgs),
}

#[derive(Subcommand, Debug)]
pub enum Estimate {
    /// Box-counting slope.
    Boxdim(BoxdimArgs),
    /// δ-entropy over a range of dyadic scales.
    Entropy(EntropyArgs),
    /// Dyadic gauge content.
    Content(ContentArgs),
}

#[derive(Subcommand, Debug)]
pub enum Kakeya {
    /// Maximal averages over sampled directions.
    Maximal(MaximalArgs),
    /// Norm lower bounds over a range of δ.
    NormScan(NormScanArgs),
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Split a linear set into two separated heavy pieces.
    Split(SplitArgs),
    /// Count ball triples on a seeded configuration.
    Count(CountArgs),
    /// Assign directions to scale buckets of a covering.
    Decompose(DecomposeArgs),
    /// Classify the summability of a scale sequence.
    Series(SeriesArgs),
    /// Box dimension of a witness instance against the lower bound.
    Bound(BoundArgs),
    /// Zero-dimensional fibres over a β-dimensional fan.
    ZeroDim(ZeroDimArgs),
    /// Entropy against content at several scales.
    EntropyLemma(EntropyLemmaArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorArgs {
    /// Contraction ratio, in (0, 1/2).
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 8)]
    pub levels: u32,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionsArgs {
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 6)]
    pub levels: u32,
    /// Gauge for the direction set, e.g. `inverse-log:1`; overrides `--beta`.
    #[arg(long)]
    pub gauge: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FurstenbergArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Fibre gauge; with `--g` replaces `--alpha`/`--beta`.
    #[arg(long)]
    pub h: Option<String>,
    /// Direction gauge.
    #[arg(long)]
    pub g: Option<String>,
    /// `fan` (through the centre) or `random` (seeded offsets).
    #[arg(long, default_value = "fan")]
    pub placement: String,
    /// Direction levels; default ⌊mβ⌋, or m/2 for gauges.
    #[arg(long)]
    pub levels: Option<u32>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorTargetArgs {
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 5)]
    pub levels: u32,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 5)]
    pub direction_levels: u32,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxdimArgs {
    /// gridset v1 file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub j_min: Option<u32>,
    #[arg(long)]
    pub j_max: Option<u32>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Scales δ = 2^-j for j in `a:b`, inclusive.
    #[arg(long, default_value = "2:8")]
    pub deltas: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "power:0.5")]
    pub gauge: String,
    /// Cap box diameters at δ; uncapped when absent.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximalArgs {
    /// Indicator of this grid; the constant 1 when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0 / 16.0)]
    pub delta: f64,
    /// Equally spaced directions in [0, π).
    #[arg(long, default_value_t = 16)]
    pub directions: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormScanArgs {
    /// Dimension of the Cantor direction measure.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Scales δ = 2^-j for j in `a:b`, inclusive.
    #[arg(long, default_value = "4:9")]
    pub deltas: String,
    /// Levels of the direction measure; default resolves the finest δ.
    #[arg(long)]
    pub levels: Option<u32>,
    /// `bush`, `bush-union`, `constant` or `standard` (all of them plus
    /// random tubes).
    #[arg(long, default_value = "bush")]
    pub family: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitArgs {
    /// Linear gridset v1 file; a Cantor set when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 7)]
    pub levels: u32,
    #[arg(long, default_value = "power:0.5")]
    pub gauge: String,
    /// Defaults to the δ-capped content of the input.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountArgs {}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 3.0)]
    pub theta: f64,
    /// `adversarial` (fine and coarse balls) or `uniform` (one level).
    #[arg(long, default_value = "adversarial")]
    pub covering: String,
    #[arg(long, default_value_t = 7)]
    pub fine: u32,
    #[arg(long, default_value_t = 2)]
    pub coarse: u32,
    /// Level of the uniform covering.
    #[arg(long, default_value_t = 3)]
    pub level: u32,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesArgs {
    /// `kakeya`, `combinatorial` or `inverse-power`.
    #[arg(long, default_value = "kakeya")]
    pub family: String,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 3.0)]
    pub theta: f64,
    /// Exponent of the inverse-power family.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 60)]
    pub k_terms: u32,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroDimArgs {
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyLemmaArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// `full`, `cantor3`, `cantor4` or `random` when no input is given.
    #[arg(long, default_value = "cantor3")]
    pub set: String,
    /// Defaults to the natural gauge of the set.
    #[arg(long)]
    pub gauge: Option<String>,
    #[arg(long, default_value = "3:8")]
    pub deltas: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportArgs {
    /// JSON reports to bundle.
    pub inputs: Vec<PathBuf>,
}
