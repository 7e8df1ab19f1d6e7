use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::Common;

/// Shape of `--config` files, and of the `config` block of every report.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub resolution: Option<u32>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: Map<String, Value>,
}

/// Reads a config file, or the `config` block of an earlier report.
pub fn load(path: &Path) -> Result<ConfigFile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut v: Value = serde_json::from_str(&text)
        .with_context(|| format!("invalid JSON in {}", path.display()))?;
    if let Some(inner) = v.get_mut("config").filter(|_| is_report(&text)) {
        v = inner.take();
    }
    serde_json::from_value(v).with_context(|| format!("invalid config {}", path.display()))
}

fn is_report(text: &str) -> bool {
    serde_json::from_str::<flab_core::ExperimentReport>(text).is_ok()
}

fn from_cli(m: &ArgMatches, id: &str) -> bool {
    matches!(m.value_source(id), Some(ValueSource::CommandLine))
}

/// Overlays config values under explicit flags and validates the result.
pub fn resolve<T: Serialize + DeserializeOwned>(
    command: &str,
    leaf: &ArgMatches,
    mut common: Common,
    parsed: T,
) -> Result<(Common, T)> {
    let Some(path) = common.config.clone() else {
        return Ok((common, parsed));
    };
    let file = load(&path)?;
    if let Some(c) = &file.command {
        if c != command {
            bail!("config is for `{c}`, not `{command}`");
        }
    }
    if let (Some(seed), false) = (file.seed, from_cli(leaf, "seed")) {
        common.seed = seed;
    }
    if let (Some(r), false) = (file.resolution, from_cli(leaf, "resolution")) {
        common.resolution = Some(r);
    }
    if let (Some(o), false) = (file.out, from_cli(leaf, "out")) {
        common.out = Some(o);
    }
    let mut merged = match serde_json::to_value(&parsed)? {
        Value::Object(m) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    for (k, v) in file.params {
        if !merged.contains_key(&k) {
            bail!("unknown parameter `{k}` for `{command}`");
        }
        if !from_cli(leaf, &k) {
            merged.insert(k, v);
        }
    }
    let params = serde_json::from_value(Value::Object(merged))
        .with_context(|| format!("invalid parameters for `{command}`"))?;
    Ok((common, params))
}
