mod args;
mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgMatches, CommandFactory, FromArgMatches};
use serde::de::DeserializeOwned;
use serde::Serialize;

use args::{Cli, Command, Common, Construct, Estimate, Kakeya, Verify};
use commands::{Ctx, Run};
use config::ConfigFile;
use flab_core::{ExperimentReport, Outcome};

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("FLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("FLAB_THREADS={v:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

/// Full subcommand path and the matches of its innermost level.
fn leaf(matches: &ArgMatches) -> (String, &ArgMatches) {
    let mut names = Vec::new();
    let mut m = matches;
    while let Some((name, sub)) = m.subcommand() {
        names.push(name);
        m = sub;
    }
    (names.join(" "), m)
}

fn run() -> Result<ExitCode> {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return Ok(ExitCode::from(if e.use_stderr() { 2 } else { 0 }));
        }
    };
    let cli = Cli::from_arg_matches(&matches)?;
    init_threads()?;
    let (name, m) = leaf(&matches);
    let common = Common::from_arg_matches(m)?;
    use commands as c;
    match cli.command {
        Command::Construct(Construct::Cantor(a)) => exec(&name, m, common, a, c::cantor),
        Command::Construct(Construct::Directions(a)) => exec(&name, m, common, a, c::directions),
        Command::Construct(Construct::Furstenberg(a)) => exec(&name, m, common, a, c::furstenberg),
        Command::Construct(Construct::CantorTarget(a)) => {
            exec(&name, m, common, a, c::cantor_target_cmd)
        }
        Command::Estimate(Estimate::Boxdim(a)) => exec(&name, m, common, a, c::boxdim),
        Command::Estimate(Estimate::Entropy(a)) => exec(&name, m, common, a, c::entropy),
        Command::Estimate(Estimate::Content(a)) => exec(&name, m, common, a, c::content),
        Command::Kakeya(Kakeya::Maximal(a)) => exec(&name, m, common, a, c::maximal),
        Command::Kakeya(Kakeya::NormScan(a)) => exec(&name, m, common, a, c::norm_scan),
        Command::Verify(Verify::Split(a)) => exec(&name, m, common, a, c::split),
        Command::Verify(Verify::Count(a)) => exec(&name, m, common, a, c::count),
        Command::Verify(Verify::Decompose(a)) => exec(&name, m, common, a, c::decompose),
        Command::Verify(Verify::Series(a)) => exec(&name, m, common, a, c::series),
        Command::Verify(Verify::Bound(a)) => exec(&name, m, common, a, c::bound),
        Command::Verify(Verify::ZeroDim(a)) => exec(&name, m, common, a, c::zero_dim),
        Command::Verify(Verify::EntropyLemma(a)) => exec(&name, m, common, a, c::entropy_lemma),
        Command::Report(a) => exec(&name, m, common, a, c::bundle),
    }
}

fn exec<T: Serialize + DeserializeOwned>(
    name: &str,
    leaf: &ArgMatches,
    common: Common,
    parsed: T,
    f: fn(&Ctx, &mut T) -> Result<Run>,
) -> Result<ExitCode> {
    let (common, mut params) = config::resolve(name, leaf, common, parsed)?;
    let ctx = Ctx {
        seed: common.seed,
        resolution: common.resolution,
    };
    let run = f(&ctx, &mut params)?;
    let params = match serde_json::to_value(&params)? {
        serde_json::Value::Object(m) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    let resolved = ConfigFile {
        command: Some(name.to_string()),
        seed: Some(common.seed),
        resolution: run.resolution,
        out: common.out.clone(),
        params,
    };
    let report = ExperimentReport::new(
        name,
        serde_json::to_value(&resolved)?,
        run.result,
        run.verdict,
    );
    let json = report.to_json();
    if let Some(out) = &common.out {
        write_outputs(out, &json, run.data.as_ref())?;
    }
    print!("{json}");
    Ok(match report.verdict {
        Outcome::Violated => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    })
}

/// Data goes to `out` (given extension kept, else the command's), the
/// report to `out` with a `.json` extension.
fn write_outputs(out: &Path, report: &str, data: Option<&(&str, String)>) -> Result<()> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let report_path = out.with_extension("json");
    if let Some((ext, body)) = data {
        let data_path: PathBuf = match out.extension() {
            Some(e) if e != "json" => out.to_path_buf(),
            _ => out.with_extension(ext),
        };
        if data_path == report_path {
            bail!("data and report would both be written to {}", out.display());
        }
        std::fs::write(&data_path, body)
            .with_context(|| format!("writing {}", data_path.display()))?;
    }
    std::fs::write(&report_path, report)
        .with_context(|| format!("writing {}", report_path.display()))?;
    Ok(())
}
