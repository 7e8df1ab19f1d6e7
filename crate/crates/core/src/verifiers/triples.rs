use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constants::{
    C_LEM, C_TWO_LOWER, C_TWO_UPPER, NAIVE_LIMIT, TWO_WAY_CORPUS, TWO_WAY_OFFSET_SEED,
    TWO_WAY_RESOLUTION, TWO_WAY_SCALES,
};
use super::split::{gauge_inverse, split_interval};
use super::Outcome;
use crate::constructors::{furstenberg_set, FurstenbergInstance, FurstenbergParams, Placement};
use crate::dimfn::DimensionFunction;
use crate::error::{Error, Result};
use crate::estimators::capped_content;
use crate::geometry::{
    dist, partition_by_scale, restrict_to_segment, Ball, BallFamily, Direction, GridSet, Point,
    ScaleSequence, Segment,
};

const GEOM_TOL: f64 = 1e-9;

/// The two colinear pieces `I⁻`, `I⁺` carried by one direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentPair {
    pub direction: Direction,
    pub minus: Segment,
    pub plus: Segment,
}

impl SegmentPair {
    /// Pieces `[t0, t1]` and `[t2, t3]` of the line through `origin`.
    pub fn on_line(direction: Direction, origin: Point, minus: [f64; 2], plus: [f64; 2]) -> Self {
        let u = direction.unit();
        let piece = |[a, b]: [f64; 2]| {
            let t = 0.5 * (a + b);
            Segment::new(
                direction,
                [origin[0] + t * u[0], origin[1] + t * u[1]],
                b - a,
            )
        };
        Self {
            direction,
            minus: piece(minus),
            plus: piece(plus),
        }
    }

    fn range(&self, s: &Segment) -> [f64; 2] {
        let u = self.direction.unit();
        let t = s.center[0] * u[0] + s.center[1] * u[1];
        [t - 0.5 * s.length, t + 0.5 * s.length]
    }

    /// Gap between the pieces along the line.
    pub fn gap(&self) -> f64 {
        let (a, b) = (self.range(&self.minus), self.range(&self.plus));
        (b[0] - a[1]).max(a[0] - b[1])
    }

    fn colinear(&self) -> bool {
        let same = |s: &Segment| s.direction.distance(self.direction) < GEOM_TOL;
        let [c, s] = self.direction.unit();
        let dx = self.plus.center[0] - self.minus.center[0];
        let dy = self.plus.center[1] - self.minus.center[1];
        same(&self.minus) && same(&self.plus) && (-dx * s + dy * c).abs() < GEOM_TOL
    }
}

/// Balls, scales and segment pairs for the line-count lemma at scale `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleConfig {
    pub balls: BallFamily,
    pub scales: ScaleSequence,
    pub k: u32,
    pub directions: Vec<SegmentPair>,
    /// `s_k`.
    pub separation: f64,
}

impl TripleConfig {
    pub fn b_k(&self) -> f64 {
        self.scales.value(self.k)
    }

    pub fn b_prev(&self) -> f64 {
        self.scales.value(self.k - 1)
    }

    /// `J_k^b`.
    pub fn j_k(&self) -> Vec<usize> {
        partition_by_scale(&self.balls, &self.scales)
            .remove(&self.k)
            .unwrap_or_default()
    }

    /// `|Π_k| = M_k · (#J_k)²`.
    pub fn candidates(&self) -> usize {
        let j = self.j_k().len();
        self.directions.len() * j * j
    }

    /// `s_k / 5 > b_{k-1}`.
    pub fn hypothesis_holds(&self) -> bool {
        self.separation / 5.0 > self.b_prev()
    }

    /// Direction separation, colinearity and segment separation.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let bk = self.b_k();
        for (i, p) in self.directions.iter().enumerate() {
            if let Some(q) = self.directions[i + 1..]
                .iter()
                .find(|q| q.direction.distance(p.direction) < bk * (1.0 - GEOM_TOL))
            {
                return Err(Error::Precondition(format!(
                    "directions {:.6} and {:.6} are closer than b_k = {bk}",
                    p.direction.angle(),
                    q.direction.angle()
                )));
            }
            if !p.colinear() {
                return Err(Error::Precondition(format!("pair {i} is not colinear")));
            }
            if p.gap() < self.separation * (1.0 - GEOM_TOL) {
                return Err(Error::Precondition(format!(
                    "pair {i} has gap {} below s_k = {}",
                    p.gap(),
                    self.separation
                )));
            }
        }
        Ok(())
    }

    /// `(b_{k-1}/b_k) · s_k^{-1} · (#J_k)²`, before the constant.
    pub fn bound_core(&self) -> f64 {
        let j = self.j_k().len() as f64;
        self.b_prev() / self.b_k() / self.separation * j * j
    }
}

/// Points of `E ∩ I` as quarter-cell samples along the clipped piece.
struct Trace {
    start: Point,
    unit: Point,
    step: f64,
    inside: Vec<bool>,
}

impl Trace {
    fn new(seg: &Segment, grid: &GridSet) -> Self {
        let sampler = seg.sampler(0.25 * grid.cell_size());
        let inside = sampler
            .iter()
            .map(|(_, p)| grid.cell_of(p).is_some_and(|[x, y]| grid.contains(x, y)))
            .collect();
        Self {
            start: sampler.start,
            unit: sampler.unit,
            step: sampler.step,
            inside,
        }
    }

    fn point(&self, i: usize) -> Point {
        let t = (i as f64 + 0.5) * self.step;
        [
            self.start[0] + t * self.unit[0],
            self.start[1] + t * self.unit[1],
        ]
    }

    /// `I ∩ E ∩ B ≠ ∅`, scanning only samples whose arc length is within `r`
    /// of the centre's projection.
    fn meets(&self, b: &Ball) -> bool {
        if self.inside.is_empty() {
            return false;
        }
        let tc = (b.center[0] - self.start[0]) * self.unit[0]
            + (b.center[1] - self.start[1]) * self.unit[1];
        let last = self.inside.len() as f64 - 1.0;
        let lo = ((tc - b.radius) / self.step - 0.5).floor().clamp(0.0, last) as usize;
        let hi = ((tc + b.radius) / self.step - 0.5).ceil().clamp(0.0, last) as usize;
        (lo..=hi).any(|i| self.inside[i] && dist(self.point(i), b.center) <= b.radius)
    }

    fn meets_naive(&self, b: &Ball) -> bool {
        (0..self.inside.len()).any(|i| self.inside[i] && dist(self.point(i), b.center) <= b.radius)
    }
}

fn touches(seg: &Segment, b: &Ball) -> bool {
    seg.distance_to(b.center) <= b.radius
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleCount {
    pub k: u32,
    pub directions: usize,
    pub j_k: usize,
    /// `#ℒ_k`, or `#𝒯_k` when a set was given.
    pub count: usize,
    /// Naive enumeration, when `|Π_k| ≤ NAIVE_LIMIT`.
    pub naive: Option<usize>,
    pub bound_core: f64,
    pub c_lem: f64,
    /// `count / bound_core`.
    pub ratio: f64,
    /// Balls met by `I⁻` and by `I⁺`, per direction.
    pub per_direction: Vec<[usize; 2]>,
    pub outcome: Outcome,
}

fn side_hits(cfg: &TripleConfig, j: &[usize], grid: Option<&GridSet>, seg: &Segment) -> usize {
    let trace = grid.map(|g| Trace::new(seg, g));
    j.iter()
        .filter(|&&b| {
            let ball = &cfg.balls.balls[b];
            touches(seg, ball) && trace.as_ref().is_none_or(|t| t.meets(ball))
        })
        .count()
}

/// Exhaustive count of `(j₋, j₊, i)` with `I⁻_i` meeting `B_{j₋}` and `I⁺_i`
/// meeting `B_{j₊}`; with a set, both pieces must also meet it inside the
/// ball. The count factorizes over `i` as `#hits⁻ · #hits⁺`.
pub fn count_triples(cfg: &TripleConfig, grid: Option<&GridSet>) -> Result<TripleCount> {
    cfg.validate()?;
    let j = cfg.j_k();
    let per_direction: Vec<[usize; 2]> = cfg
        .directions
        .par_iter()
        .map(|p| {
            [
                side_hits(cfg, &j, grid, &p.minus),
                side_hits(cfg, &j, grid, &p.plus),
            ]
        })
        .collect();
    let count = per_direction.iter().map(|[a, b]| a * b).sum();
    let naive = if cfg.candidates() <= NAIVE_LIMIT {
        Some(count_triples_naive(cfg, grid)?)
    } else {
        None
    };
    let bound_core = cfg.bound_core();
    let ratio = if bound_core > 0.0 {
        count as f64 / bound_core
    } else {
        0.0
    };
    let outcome = if !cfg.hypothesis_holds() {
        Outcome::NotApplicable
    } else {
        Outcome::from_bool(count as f64 <= C_LEM * bound_core)
    };
    Ok(TripleCount {
        k: cfg.k,
        directions: cfg.directions.len(),
        j_k: j.len(),
        count,
        naive,
        bound_core,
        c_lem: C_LEM,
        ratio,
        per_direction,
        outcome,
    })
}

/// Triple-by-triple enumeration over `Π_k`, for cross-checking.
pub fn count_triples_naive(cfg: &TripleConfig, grid: Option<&GridSet>) -> Result<usize> {
    cfg.validate()?;
    let j = cfg.j_k();
    let meets = |seg: &Segment, b: &Ball| {
        touches(seg, b) && grid.is_none_or(|g| Trace::new(seg, g).meets_naive(b))
    };
    let mut count = 0;
    for p in &cfg.directions {
        for &jm in &j {
            for &jp in &j {
                if meets(&p.minus, &cfg.balls.balls[jm]) && meets(&p.plus, &cfg.balls.balls[jp]) {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Seeded configuration satisfying the lemma's hypothesis.
///
/// Scale `k ∈ [5, 7]` on the dyadic ladder, `s_k` just above `5 b_{k-1}`.
/// Every third seed is a bush: consecutive `b_k`-spaced directions through
/// one anchor, with ball clusters at the anchor and at the far end, which is
/// the concentrated case. The rest have up to 64 scattered directions and up
/// to 128 balls in `J_k` (most placed on pieces). Both add a few decoys at
/// other scales.
pub fn calibration_config(seed: u64) -> TripleConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(5..=7u32);
    let scales = ScaleSequence::dyadic(1, 16).expect("valid ladder");
    let (bk, bp) = (scales.value(k), scales.value(k - 1));
    let s = 5.0 * bp * rng.gen_range(1.05..1.6);
    if seed.is_multiple_of(3) {
        return bush(&mut rng, scales, k, s);
    }
    let m_target = rng.gen_range(1..=64usize);
    let mut dirs: Vec<Direction> = Vec::new();
    for _ in 0..4000 {
        if dirs.len() == m_target {
            break;
        }
        let d = Direction::new(rng.gen_range(0.0..std::f64::consts::PI));
        if dirs.iter().all(|e| e.distance(d) >= bk) {
            dirs.push(d);
        }
    }
    let pairs: Vec<SegmentPair> = dirs
        .iter()
        .map(|&d| {
            let origin = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7)];
            let (lm, lp) = (rng.gen_range(0.05..0.3), rng.gen_range(0.05..0.3));
            let half = 0.5 * s;
            SegmentPair::on_line(d, origin, [-half - lm, -half], [half, half + lp])
        })
        .collect();
    let n_balls = rng.gen_range(2..=128usize);
    let mut balls = Vec::with_capacity(n_balls + 8);
    for _ in 0..n_balls {
        let radius = bk + (bp - bk) * (1.0 - rng.gen::<f64>());
        let center = if rng.gen_bool(0.7) {
            let p = &pairs[rng.gen_range(0..pairs.len())];
            let seg = if rng.gen_bool(0.5) { &p.minus } else { &p.plus };
            let (a, b) = seg.endpoints();
            let t: f64 = rng.gen();
            let n = seg.direction.perpendicular().unit();
            let off = rng.gen_range(-1.0..1.0) * radius;
            [
                a[0] + t * (b[0] - a[0]) + off * n[0],
                a[1] + t * (b[1] - a[1]) + off * n[1],
            ]
        } else {
            [rng.gen(), rng.gen()]
        };
        balls.push(Ball { center, radius });
    }
    decoys(&mut rng, bk, bp, &mut balls);
    TripleConfig {
        balls: BallFamily::new(balls).expect("radii in (0, 1]"),
        scales,
        k,
        directions: pairs,
        separation: s,
    }
}

fn decoys(rng: &mut ChaCha8Rng, bk: f64, bp: f64, balls: &mut Vec<Ball>) {
    for _ in 0..rng.gen_range(0..8) {
        let radius = if rng.gen_bool(0.5) {
            bk * 0.5
        } else {
            (bp * 1.5).min(1.0)
        };
        balls.push(Ball {
            center: [rng.gen(), rng.gen()],
            radius,
        });
    }
}

fn bush(rng: &mut ChaCha8Rng, scales: ScaleSequence, k: u32, s: f64) -> TripleConfig {
    let (bk, bp) = (scales.value(k), scales.value(k - 1));
    let anchor = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7)];
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let reach = rng.gen_range(0.0..0.2);
    let far = s + reach;
    // lines within `b_{k-1}/far` of the axis still reach the far cluster
    let spread = ((bp / far) / bk).ceil() as i64 + rng.gen_range(0..3);
    let n = spread.min(31);
    let pairs: Vec<SegmentPair> = (-n..=n)
        .map(|i| {
            let d = Direction::new(theta + 1.0001 * bk * i as f64);
            SegmentPair::on_line(d, anchor, [-0.1, 0.0], [s, s + 2.0 * reach + 0.01])
        })
        .collect();
    let axis = Direction::new(theta).unit();
    let target = [anchor[0] + far * axis[0], anchor[1] + far * axis[1]];
    let mut balls = Vec::new();
    for c in [anchor, target] {
        for _ in 0..rng.gen_range(1..=4) {
            let radius = bk + (bp - bk) * (1.0 - rng.gen::<f64>());
            let jitter = 0.25 * radius;
            balls.push(Ball {
                center: [
                    c[0] + rng.gen_range(-jitter..jitter),
                    c[1] + rng.gen_range(-jitter..jitter),
                ],
                radius,
            });
        }
    }
    for _ in 0..rng.gen_range(0..16) {
        let radius = bk + (bp - bk) * (1.0 - rng.gen::<f64>());
        balls.push(Ball {
            center: [rng.gen(), rng.gen()],
            radius,
        });
    }
    decoys(rng, bk, bp, &mut balls);
    TripleConfig {
        balls: BallFamily::new(balls).expect("radii in (0, 1]"),
        scales,
        k,
        directions: pairs,
        separation: s,
    }
}

/// Largest `count / bound_core` over the given calibration seeds.
pub fn fit_c_lem(seeds: impl IntoIterator<Item = u64>) -> Result<f64> {
    let mut best = 0.0f64;
    for seed in seeds {
        best = best.max(count_triples(&calibration_config(seed), None)?.ratio);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoWayReport {
    pub k: u32,
    pub n_k: usize,
    pub j_k: usize,
    pub a_k: f64,
    pub a_norm: f64,
    /// `r = 1/(16‖a‖₁)`.
    pub r: f64,
    /// `#𝒯_k`.
    pub count: usize,
    /// `(#J_k)² / 𝔥^{-1}(r a_k)`.
    pub upper: f64,
    /// `N_k (a_k / 𝔥(2^{-k}))²`.
    pub lower: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub fiber_contents: Vec<f64>,
    pub outcome: Outcome,
}

/// Counts `#𝒯_k` exactly and compares it with both sides of the two-way
/// argument: `lower ≤ C_TWO_LOWER·#𝒯_k` and `#𝒯_k ≤ C_TWO_UPPER·upper`.
///
/// `fiber_contents[i]` is the `𝔥`-content of `ℓ_{e_i} ∩ E_k`; each must reach
/// `a_k / (2‖a‖₁)`.
pub fn two_way_count(
    cfg: &TripleConfig,
    grid: &GridSet,
    fiber_contents: &[f64],
    a_k: f64,
    a_norm: f64,
    frak_h: &DimensionFunction,
) -> Result<TwoWayReport> {
    if fiber_contents.len() != cfg.directions.len() {
        return Err(Error::InvalidParameter(format!(
            "{} fibre contents for {} directions",
            fiber_contents.len(),
            cfg.directions.len()
        )));
    }
    let eta = a_k / (2.0 * a_norm);
    if let Some((i, c)) = fiber_contents.iter().enumerate().find(|(_, &c)| c < eta) {
        return Err(Error::Precondition(format!(
            "fibre {i} has content {c} below a_k/(2‖a‖₁) = {eta}"
        )));
    }
    let counted = count_triples(cfg, Some(grid))?;
    let r = 1.0 / (16.0 * a_norm);
    let sep = gauge_inverse(frak_h, r * a_k)?;
    let j = counted.j_k as f64;
    let upper = if sep > 0.0 {
        j * j / sep
    } else {
        f64::INFINITY
    };
    let n_k = cfg.directions.len();
    let lower = n_k as f64 * (a_k / frak_h.value(cfg.b_k())).powi(2);
    let count = counted.count;
    let ok = lower <= C_TWO_LOWER * count as f64 && count as f64 <= C_TWO_UPPER * upper;
    Ok(TwoWayReport {
        k: cfg.k,
        n_k,
        j_k: counted.j_k,
        a_k,
        a_norm,
        r,
        count,
        upper,
        lower,
        c_lower: C_TWO_LOWER,
        c_upper: C_TWO_UPPER,
        fiber_contents: fiber_contents.to_vec(),
        outcome: Outcome::from_bool(ok),
    })
}

/// Greedy `sep`-separated subset of directions, in input order.
fn separated_directions(dirs: &[Direction], sep: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, &d) in dirs.iter().enumerate() {
        if kept.iter().all(|&j| dirs[j].distance(d) >= sep) {
            kept.push(i);
        }
    }
    kept
}

/// Full pipeline at dyadic scale `k` on an instance.
///
/// Covers the set by the circumscribed balls of its level-`(k-1)` cells (all
/// in `J_k`), keeps a `2^{-k}`-separated set of directions, takes
/// `a_k = min_e 𝔥`-content of `ℓ_e ∩ E` with `‖a‖₁ = 1/2` (so `η = a_k` and
/// `r = 1/8`), splits each fibre with `δ = 2^{1-k}` and counts.
pub fn two_way_from_instance(
    inst: &FurstenbergInstance,
    k: u32,
    frak_h: &DimensionFunction,
) -> Result<(TwoWayReport, TripleConfig)> {
    if k == 0 || k > inst.resolution() {
        return Err(Error::InvalidParameter(format!(
            "scale k = {k} outside [1, {}]",
            inst.resolution()
        )));
    }
    let balls = BallFamily::covering_cells(&inst.grid, k - 1)?;
    let scales = ScaleSequence::dyadic(1, inst.resolution() + 1)?;
    let bk = scales.value(k);
    let delta = scales.value(k - 1);
    let chosen = separated_directions(&inst.directions, bk);
    let fibers: Vec<(usize, GridSet, f64)> = chosen
        .par_iter()
        .map(|&i| {
            let f = restrict_to_segment(&inst.grid, &inst.segments[i]);
            capped_content(&f, frak_h, delta).map(|c| (i, f, c.value))
        })
        .collect::<Result<_>>()?;
    let a_k = fibers.iter().map(|f| f.2).fold(f64::INFINITY, f64::min);
    if !(a_k > 0.0) {
        return Err(Error::Precondition("a fibre has zero content".into()));
    }
    let a_norm = 0.5;
    let pairs: Vec<(SegmentPair, f64)> = fibers
        .par_iter()
        .map(|(i, f, _)| {
            let rep = split_interval(f, frak_h, a_k, delta)?;
            match (rep.left, rep.right, rep.pass()) {
                (Some(l), Some(r), true) => {
                    let seg = &inst.segments[*i];
                    let s = seg.sampler(1.0);
                    let d = inst.directions[*i];
                    // arc length runs along `s.unit`, which may be `-d.unit()`
                    let u = d.unit();
                    let sign = (s.unit[0] * u[0] + s.unit[1] * u[1]).signum();
                    let map = |[a, b]: [f64; 2]| {
                        let (x, y) = (sign * a, sign * b);
                        [x.min(y), x.max(y)]
                    };
                    let (lm, lp) = (map(l), map(r));
                    let (minus, plus) = if lm[0] <= lp[0] { (lm, lp) } else { (lp, lm) };
                    Ok((
                        SegmentPair::on_line(d, s.start, minus, plus),
                        rep.separation,
                    ))
                }
                _ => Err(Error::Precondition(format!(
                    "fibre {i} did not split: {rep:?}"
                ))),
            }
        })
        .collect::<Result<_>>()?;
    let separation = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let cfg = TripleConfig {
        balls,
        scales,
        k,
        directions: pairs.into_iter().map(|p| p.0).collect(),
        separation,
    };
    let contents: Vec<f64> = fibers.iter().map(|f| f.2).collect();
    let report = two_way_count(&cfg, &inst.grid, &contents, a_k, a_norm, frak_h)?;
    Ok((report, cfg))
}

/// Two-way reports over the calibration corpus, and the number of entries
/// skipped because the splitting hypothesis `𝔥^{-1}(η/8) < δ` fails there.
pub fn two_way_corpus() -> Result<(Vec<TwoWayReport>, usize)> {
    let m = TWO_WAY_RESOLUTION;
    let mut reports = Vec::new();
    let mut skipped = 0;
    for &(alpha, beta) in &TWO_WAY_CORPUS {
        let levels = (m as f64 * beta).floor() as u32;
        for placement in [
            Placement::ThroughOriginFan,
            Placement::RandomOffset {
                seed: TWO_WAY_OFFSET_SEED,
            },
        ] {
            let inst = furstenberg_set(&FurstenbergParams::alpha_beta(
                alpha, beta, placement, levels, m,
            )?)?;
            for k in TWO_WAY_SCALES {
                match two_way_from_instance(&inst, k, &DimensionFunction::power(alpha)) {
                    Ok((r, _)) => reports.push(r),
                    Err(Error::Precondition(_)) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok((reports, skipped))
}

/// Largest `lower/#𝒯_k` and `#𝒯_k/upper` over the given reports.
pub fn fit_two_way(reports: &[TwoWayReport]) -> (f64, f64) {
    reports.iter().fold((0.0f64, 0.0f64), |(lo, up), r| {
        let c = r.count.max(1) as f64;
        (lo.max(r.lower / c), up.max(r.count as f64 / r.upper))
    })
}
