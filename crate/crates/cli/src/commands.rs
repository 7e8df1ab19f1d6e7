use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use flab_core::constructors::{
    cantor_set, cantor_target, direction_cantor, direction_cantor_gauge, furstenberg_set,
    random_set,
};
use flab_core::estimators::{
    box_dimension, capped_content, check_entropy_lemma, default_window, dyadic_content,
    grid_entropy,
};
use flab_core::kakeya::{
    maximal_many, resolution_for, verify_norm_bound, GridFunction, TestFamily,
};
use flab_core::verifiers::{
    adversarial_covering, calibration_config, check_dimension_bound, check_series_condition,
    count_triples, decompose_directions, split_interval, witness_params, zero_dim_experiment,
    ASequence, SeriesVerdict,
};
use flab_core::{
    BallFamily, CantorSpec, DimensionFunction, Direction, ExperimentReport, FurstenbergParams,
    GridSet, Outcome, Placement,
};

use crate::args::*;

/// What a command hands back to the driver.
pub struct Run {
    /// Resolution actually used, if the command has one.
    pub resolution: Option<u32>,
    pub result: Value,
    pub verdict: Outcome,
    /// Data file extension and contents.
    pub data: Option<(&'static str, String)>,
}

impl Run {
    fn new(resolution: Option<u32>, result: Value, verdict: Outcome) -> Self {
        Self {
            resolution,
            result,
            verdict,
            data: None,
        }
    }

    fn with_data(mut self, ext: &'static str, body: String) -> Self {
        self.data = Some((ext, body));
        self
    }
}

pub struct Ctx {
    pub seed: u64,
    pub resolution: Option<u32>,
}

impl Ctx {
    fn m(&self, default: u32) -> u32 {
        self.resolution.unwrap_or(default)
    }
}

fn gauge(s: &str) -> Result<DimensionFunction> {
    Ok(s.parse()?)
}

/// `a:b` → `a..=b`.
pub fn scale_range(s: &str) -> Result<Vec<u32>> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("scale range {s:?} is not of the form a:b"))?;
    let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("empty scale range {s:?}");
    }
    Ok((a..=b).collect())
}

fn read_grid(path: &Option<PathBuf>) -> Result<GridSet> {
    let path: &Path = path
        .as_deref()
        .ok_or_else(|| anyhow!("--input is required"))?;
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(GridSet::from_text(&text)?)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn cantor(ctx: &Ctx, a: &mut CantorArgs) -> Result<Run> {
    let m = ctx.m(13);
    let spec = CantorSpec::new(a.ratio, a.levels)?;
    let grid = cantor_set(&spec, m)?;
    let result = json!({
        "count": grid.count(),
        "dimension": spec.dimension(),
        "box_counts": grid.box_counts(),
    });
    Ok(Run::new(Some(m), result, Outcome::NotApplicable).with_data("grid", grid.to_text()))
}

pub fn directions(_: &Ctx, a: &mut DirectionsArgs) -> Result<Run> {
    let (_, mu) = match &a.gauge {
        Some(g) => direction_cantor_gauge(&gauge(g)?, a.levels)?,
        None => direction_cantor(a.beta, a.levels)?,
    };
    let mut csv = String::from("angle,mass\n");
    for (e, w) in &mu.atoms {
        let _ = writeln!(csv, "{},{}", e.angle(), w);
    }
    let result = json!({
        "count": mu.atoms.len(),
        "total_mass": mu.total_mass(),
        "frostman_k": mu.k,
        "modulus": mu.modulus,
    });
    Ok(Run::new(None, result, Outcome::NotApplicable).with_data("csv", csv))
}

fn placement(name: &str, seed: u64) -> Result<Placement> {
    match name {
        "fan" => Ok(Placement::ThroughOriginFan),
        "random" => Ok(Placement::RandomOffset { seed }),
        _ => bail!("unknown placement {name:?}; expected fan or random"),
    }
}

pub fn furstenberg(ctx: &Ctx, a: &mut FurstenbergArgs) -> Result<Run> {
    let m = ctx.m(10);
    let place = placement(&a.placement, ctx.seed)?;
    let params = match (&a.h, &a.g) {
        (Some(h), Some(g)) => {
            let levels = *a.levels.get_or_insert(m / 2);
            FurstenbergParams::gauges(gauge(h)?, gauge(g)?, place, levels, m)
        }
        (None, None) => {
            let levels = *a.levels.get_or_insert((m as f64 * a.beta).floor() as u32);
            FurstenbergParams::alpha_beta(a.alpha, a.beta, place, levels, m)?
        }
        _ => bail!("--h and --g go together"),
    };
    let inst = furstenberg_set(&params)?;
    let result = json!({ "count": inst.grid.count(), "instance": inst.sidecar() });
    Ok(Run::new(Some(m), result, Outcome::NotApplicable).with_data("grid", inst.grid.to_text()))
}

pub fn cantor_target_cmd(ctx: &Ctx, a: &mut CantorTargetArgs) -> Result<Run> {
    let m = ctx.m(10);
    let spec = CantorSpec::new(a.ratio, a.levels)?;
    let (dirs, _) = direction_cantor(a.beta, a.direction_levels)?;
    let grid = cantor_target(&spec, &dirs, m)?;
    let result = json!({ "count": grid.count(), "directions": dirs.len() });
    Ok(Run::new(Some(m), result, Outcome::NotApplicable).with_data("grid", grid.to_text()))
}

pub fn boxdim(_: &Ctx, a: &mut BoxdimArgs) -> Result<Run> {
    let grid = read_grid(&a.input)?;
    let m = grid.resolution();
    let (lo, hi) = default_window(m);
    let window = (*a.j_min.get_or_insert(lo), *a.j_max.get_or_insert(hi));
    let est = box_dimension(&grid, Some(window))?;
    Ok(Run::new(Some(m), to_json(&est), Outcome::NotApplicable).with_data("csv", est.to_csv()))
}

pub fn entropy(_: &Ctx, a: &mut EntropyArgs) -> Result<Run> {
    let grid = read_grid(&a.input)?;
    let mut csv = String::from("delta,entropy\n");
    let mut rows = Vec::new();
    for j in scale_range(&a.deltas)? {
        let delta = (-(j as f64)).exp2();
        let n = grid_entropy(&grid, delta);
        let _ = writeln!(csv, "{delta},{n}");
        rows.push(json!({ "delta": delta, "entropy": n }));
    }
    Ok(Run::new(
        Some(grid.resolution()),
        json!({ "rows": rows }),
        Outcome::NotApplicable,
    )
    .with_data("csv", csv))
}

pub fn content(_: &Ctx, a: &mut ContentArgs) -> Result<Run> {
    let grid = read_grid(&a.input)?;
    let g = gauge(&a.gauge)?;
    let c = match a.delta {
        Some(d) => capped_content(&grid, &g, d)?,
        None => dyadic_content(&grid, &g, grid.resolution())?,
    };
    let mut csv = String::from("level,x,y\n");
    for b in &c.cover {
        let _ = writeln!(csv, "{},{},{}", b.level, b.x, b.y);
    }
    let result = json!({ "value": c.value, "boxes": c.cover.len(), "cover_cost": c.cover_cost() });
    Ok(Run::new(Some(grid.resolution()), result, Outcome::NotApplicable).with_data("csv", csv))
}

pub fn maximal(_: &Ctx, a: &mut MaximalArgs) -> Result<Run> {
    let m = resolution_for(a.delta);
    let f = match &a.input {
        Some(_) => {
            let grid = read_grid(&a.input)?;
            if grid.dim() != 2 || grid.resolution() < m {
                bail!("input must be a planar grid of resolution at least {m}");
            }
            GridFunction::indicator(&grid.downsample(m)?)?
        }
        None => GridFunction::constant(m, 1.0)?,
    };
    if a.directions == 0 {
        bail!("--directions must be positive");
    }
    let mut csv = String::from("angle,maximal\n");
    let mut best = 0.0f64;
    for i in 0..a.directions {
        let e = Direction::new(std::f64::consts::PI * i as f64 / a.directions as f64);
        let v = maximal_many(&[&f], e, a.delta)?[0];
        best = best.max(v);
        let _ = writeln!(csv, "{},{}", e.angle(), v);
    }
    let result = json!({ "delta": a.delta, "max": best });
    Ok(Run::new(Some(m), result, Outcome::NotApplicable).with_data("csv", csv))
}

pub fn norm_scan(ctx: &Ctx, a: &mut NormScanArgs) -> Result<Run> {
    let js = scale_range(&a.deltas)?;
    let finest = *js.last().expect("non-empty range");
    let levels = *a
        .levels
        .get_or_insert((finest as f64 * a.s).ceil().max(1.0) as u32);
    let (_, mu) = direction_cantor(a.s, levels)?;
    let family = match a.family.as_str() {
        "standard" => TestFamily::standard(ctx.seed),
        "bush" => TestFamily::Bush,
        "bush-union" => TestFamily::BushUnion,
        "constant" => TestFamily::Constant,
        other => bail!("unknown family {other:?}"),
    };
    let deltas: Vec<f64> = js.iter().map(|&j| (-(j as f64)).exp2()).collect();
    let rep = verify_norm_bound(&mu, &deltas, &family)?;
    let verdict = Outcome::from_bool(rep.verdict);
    Ok(Run::new(None, to_json(&rep), verdict).with_data("csv", rep.to_csv()))
}

pub fn split(ctx: &Ctx, a: &mut SplitArgs) -> Result<Run> {
    let (grid, m) = match &a.input {
        Some(_) => {
            let g = read_grid(&a.input)?;
            let m = g.resolution();
            (g, m)
        }
        None => {
            let m = ctx.m(13);
            (cantor_set(&CantorSpec::new(a.ratio, a.levels)?, m)?, m)
        }
    };
    let g = gauge(&a.gauge)?;
    let eta = match a.eta {
        Some(e) => e,
        None => *a.eta.insert(capped_content(&grid, &g, a.delta)?.value),
    };
    let rep = split_interval(&grid, &g, eta, a.delta)?;
    Ok(Run::new(Some(m), to_json(&rep), rep.outcome))
}

pub fn count(ctx: &Ctx, _: &mut CountArgs) -> Result<Run> {
    let c = count_triples(&calibration_config(ctx.seed), None)?;
    let mut csv = String::from("direction,minus,plus\n");
    for (i, [l, r]) in c.per_direction.iter().enumerate() {
        let _ = writeln!(csv, "{i},{l},{r}");
    }
    Ok(Run::new(None, to_json(&c), c.outcome).with_data("csv", csv))
}

pub fn decompose(ctx: &Ctx, a: &mut DecomposeArgs) -> Result<Run> {
    let m = ctx.m(10);
    let inst = furstenberg_set(&witness_params(a.alpha, a.beta, m)?)?;
    let cover = match a.covering.as_str() {
        "adversarial" => adversarial_covering(&inst, a.fine, a.coarse)?,
        "uniform" => BallFamily::covering_cells(&inst.grid, a.level)?,
        other => bail!("unknown covering {other:?}; expected adversarial or uniform"),
    };
    let seq = ASequence::kakeya_power(a.alpha, a.beta, a.theta);
    let rep = decompose_directions(&inst, &cover, &DimensionFunction::power(a.alpha), &seq)?;
    let csv = rep.to_csv();
    Ok(Run::new(Some(m), to_json(&rep), rep.outcome).with_data("csv", csv))
}

pub fn series(_: &Ctx, a: &mut SeriesArgs) -> Result<Run> {
    let seq = match a.family.as_str() {
        "kakeya" => ASequence::kakeya_power(a.alpha, a.beta, a.theta),
        "combinatorial" => ASequence::combinatorial_power(a.alpha, a.beta, a.theta),
        "inverse-power" => ASequence::InversePower { c: 1.0, p: a.p },
        other => bail!("unknown family {other:?}"),
    };
    let rep = check_series_condition(&seq, a.k_terms)?;
    let verdict = match rep.verdict {
        SeriesVerdict::ConvergesNumerically => Outcome::Consistent,
        SeriesVerdict::DivergesNumerically => Outcome::Violated,
        SeriesVerdict::Inconclusive => Outcome::NotApplicable,
    };
    Ok(Run::new(None, to_json(&rep), verdict).with_data("csv", rep.to_csv()))
}

pub fn bound(ctx: &Ctx, a: &mut BoundArgs) -> Result<Run> {
    let m = ctx.m(12);
    let inst = furstenberg_set(&witness_params(a.alpha, a.beta, m)?)?;
    let rep = check_dimension_bound(&inst)?;
    let csv = rep.estimate.to_csv();
    Ok(Run::new(Some(m), to_json(&rep), rep.outcome).with_data("csv", csv))
}

pub fn zero_dim(ctx: &Ctx, a: &mut ZeroDimArgs) -> Result<Run> {
    let m = ctx.m(12);
    let rep = zero_dim_experiment(a.theta, a.beta, m)?;
    let csv = rep.estimate.to_csv();
    Ok(Run::new(Some(m), to_json(&rep), rep.outcome).with_data("csv", csv))
}

pub fn entropy_lemma(ctx: &Ctx, a: &mut EntropyLemmaArgs) -> Result<Run> {
    let m = ctx.m(12);
    let third = 2f64.ln() / 3f64.ln();
    let (grid, natural) = match (&a.input, a.set.as_str()) {
        (Some(_), _) => (read_grid(&a.input)?, "power:0.5".to_string()),
        (None, "full") => (GridSet::full(1, m)?, "identity".into()),
        (None, "cantor3") => {
            let levels = (m as f64 * third).floor() as u32;
            (
                cantor_set(&CantorSpec::new(1.0 / 3.0, levels)?, m)?,
                format!("power:{third}"),
            )
        }
        (None, "cantor4") => (
            cantor_set(&CantorSpec::new(0.25, m / 2)?, m)?,
            "power:0.5".into(),
        ),
        (None, "random") => (random_set(100, 1, m, ctx.seed)?, "power:0.5".into()),
        (None, other) => bail!("unknown set {other:?}"),
    };
    let g = gauge(a.gauge.get_or_insert(natural))?;
    let mut csv = String::from("delta,lhs,content,rhs,pass\n");
    let mut rows = Vec::new();
    for j in scale_range(&a.deltas)? {
        let r = check_entropy_lemma(&grid, &g, (-(j as f64)).exp2())?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.delta, r.lhs, r.content, r.rhs, r.pass
        );
        rows.push(r);
    }
    let verdict = Outcome::from_bool(rows.iter().all(|r| r.pass));
    Ok(Run::new(Some(grid.resolution()), json!({ "rows": rows }), verdict).with_data("csv", csv))
}

pub fn bundle(_: &Ctx, a: &mut ReportArgs) -> Result<Run> {
    if a.inputs.is_empty() {
        bail!("no reports to bundle");
    }
    let mut reports = Vec::new();
    for p in &a.inputs {
        let text =
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let r: ExperimentReport = serde_json::from_str(&text)
            .with_context(|| format!("not a report: {}", p.display()))?;
        reports.push(r);
    }
    let verdict = if reports.iter().any(|r| r.verdict.is_violated()) {
        Outcome::Violated
    } else if reports.iter().any(|r| r.verdict == Outcome::Consistent) {
        Outcome::Consistent
    } else {
        Outcome::NotApplicable
    };
    Ok(Run::new(None, json!({ "reports": reports }), verdict))
}
