//! Example sets: central Cantor sets, Frostman measures on Cantor direction
//! sets, Furstenberg-type unions of fibred segments and the Cantor target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimfn::DimensionFunction;
use crate::error::{Error, Result};
use crate::geometry::{Direction, GridSet, Point, Segment};

const RESOLVE_SLACK: f64 = 1e-9;

/// Two-branch central Cantor set with constant ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub ratio: f64,
    pub levels: u32,
}

impl CantorSpec {
    pub fn new(ratio: f64, levels: u32) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "Cantor ratio {ratio} not in (0, 1/2)"
            )));
        }
        if levels == 0 {
            return Err(Error::InvalidParameter(
                "Cantor levels must be at least 1".into(),
            ));
        }
        Ok(Self { ratio, levels })
    }

    /// Ratio `2^{-1/α}` with as many levels as resolution `m` resolves.
    pub fn for_dimension(alpha: f64, m: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Cantor dimension {alpha} not in (0, 1)"
            )));
        }
        let levels = ((m as f64 * alpha) + RESOLVE_SLACK).floor().max(1.0) as u32;
        Self::new((-1.0 / alpha).exp2(), levels)
    }

    /// `log 2 / log(1/r)`.
    pub fn dimension(&self) -> f64 {
        std::f64::consts::LN_2 / -self.ratio.ln()
    }

    pub fn ladder(&self) -> Ladder {
        Ladder {
            lengths: (0..=self.levels)
                .map(|k| self.ratio.powi(k as i32))
                .collect(),
        }
    }
}

/// Interval lengths `1 = ℓ_0 > ℓ_1 > … > ℓ_L` of a two-branch construction.
/// Each level keeps the two outer subintervals of length `ℓ_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub lengths: Vec<f64>,
}

impl Ladder {
    /// Variable ratios with `2^k·h(ℓ_k) ≈ 1`; stops when the inverse leaves its
    /// range, when `ℓ_k < min_len`, or after `max_levels`.
    pub fn from_gauge(h: &DimensionFunction, max_levels: u32, min_len: f64) -> Result<Self> {
        let mut lengths = vec![1.0];
        for k in 1..=max_levels {
            let l = match h.inverse((-(k as f64)).exp2(), 1e-12) {
                Ok(l) => l,
                Err(Error::Range { .. }) => break,
                Err(e) => return Err(e),
            };
            let prev = *lengths.last().unwrap();
            let l = l.min(0.5 * prev);
            if l < min_len * (1.0 - RESOLVE_SLACK) {
                break;
            }
            lengths.push(l);
        }
        if lengths.len() < 2 {
            return Err(Error::Resolution(format!(
                "gauge ladder has no level resolved at length {min_len}"
            )));
        }
        Ok(Self { lengths })
    }

    pub fn levels(&self) -> u32 {
        self.lengths.len() as u32 - 1
    }

    pub fn finest(&self) -> f64 {
        *self.lengths.last().unwrap()
    }

    /// The `2^L` closed intervals of the last level, left to right.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let mut starts = vec![0.0];
        for w in self.lengths.windows(2) {
            let (parent, child) = (w[0], w[1]);
            starts = starts
                .iter()
                .flat_map(|&a| [a, a + parent - child])
                .collect();
        }
        let l = self.finest();
        starts.into_iter().map(|a| (a, a + l)).collect()
    }
}

fn rasterize_intervals(intervals: &[(f64, f64)], m: u32) -> Result<GridSet> {
    let mut g = GridSet::new(1, m)?;
    let side = g.side() as f64;
    let last = g.side() as i64 - 1;
    for &(a, b) in intervals {
        let lo = ((a * side + RESOLVE_SLACK).floor() as i64).clamp(0, last);
        let hi = (((b * side - RESOLVE_SLACK).ceil() as i64) - 1).clamp(lo, last);
        for i in lo..=hi {
            g.insert(i as u32, 0);
        }
    }
    Ok(g)
}

/// Cells of `[0,1]` meeting the level-`levels` pre-fractal.
pub fn cantor_set(spec: &CantorSpec, m: u32) -> Result<GridSet> {
    let finest = spec.ratio.powi(spec.levels as i32);
    let cell = (-(m as f64)).exp2();
    if finest < cell * (1.0 - RESOLVE_SLACK) {
        return Err(Error::Resolution(format!(
            "level-{} intervals of length {finest:e} are finer than the cell size {cell:e}",
            spec.levels
        )));
    }
    rasterize_intervals(&spec.ladder().intervals(), m)
}

/// `n` uniform random cells (fewer if some coincide).
pub fn random_set(n: usize, dim: u8, m: u32, seed: u64) -> Result<GridSet> {
    let mut g = GridSet::new(dim, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = g.side();
    for _ in 0..n {
        let x = rng.gen_range(0..side);
        let y = if dim == 1 { 0 } else { rng.gen_range(0..side) };
        g.insert(x, y);
    }
    Ok(g)
}

/// Atomic probability measure on directions with a fitted modulus constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrostmanMeasure {
    pub atoms: Vec<(Direction, f64)>,
    pub modulus: DimensionFunction,
    /// Smallest `K` with `μ(B(x,r)) ≤ K·g(r)` over the sampled `(x, r)`;
    /// radii in radians.
    pub k: f64,
}

impl FrostmanMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    /// `μ(B(x, r))` in the angular metric mod `π` (closed ball).
    pub fn ball_mass(&self, center: Direction, r: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.0.distance(center) <= r)
            .map(|a| a.1)
            .sum()
    }

    /// Worst ratio `μ(B(x,r))/g(r)` over atoms and the angle-grid points as
    /// centres, and radii `2^{-j}`, `j = 0..=j_max`.
    pub fn fit_constant(&self, j_max: u32) -> f64 {
        let n = self.atoms.len();
        let mut angles: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a.0.angle(), a.1)).collect();
        angles.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prefix = vec![0.0; n + 1];
        for (i, a) in angles.iter().enumerate() {
            prefix[i + 1] = prefix[i] + a.1;
        }
        let keys: Vec<f64> = angles.iter().map(|a| a.0).collect();
        let pi = std::f64::consts::PI;
        // mass of atoms with angle in [lo, hi] ⊂ [0, π]
        let arc = |lo: f64, hi: f64| {
            prefix[keys.partition_point(|&k| k <= hi)] - prefix[keys.partition_point(|&k| k < lo)]
        };
        let mass = |x: f64, r: f64| {
            if 2.0 * r >= pi {
                return 1.0f64.min(prefix[n]);
            }
            let (lo, hi) = (x - r, x + r);
            if lo < 0.0 {
                arc(0.0, hi) + arc(lo + pi, pi)
            } else if hi >= pi {
                arc(lo, pi) + arc(0.0, hi - pi)
            } else {
                arc(lo, hi)
            }
        };
        let mut centers: Vec<f64> = keys.clone();
        let grid = 1u32 << j_max.min(16);
        centers.extend((0..grid).map(|i| pi * i as f64 / grid as f64));
        let mut k = 0.0f64;
        for j in 0..=j_max {
            let r = (-(j as f64)).exp2();
            let g = self.modulus.value(r);
            for &x in &centers {
                k = k.max(mass(x, r) / g);
            }
        }
        k
    }
}

/// Equal-weight measure on the `2^levels` level-interval midpoints of a
/// ratio-`2^{-1/β}` Cantor construction, mapped to angles in `[0, π)`.
pub fn direction_cantor(beta: f64, levels: u32) -> Result<(Vec<Direction>, FrostmanMeasure)> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "direction dimension {beta} not in (0, 1]"
        )));
    }
    let ladder = Ladder {
        lengths: (0..=levels).map(|k| (-(k as f64) / beta).exp2()).collect(),
    };
    directions_from_ladder(&ladder, DimensionFunction::power(beta))
}

/// Same construction with lengths `ℓ_k = g^{-1}(2^{-k})`.
pub fn direction_cantor_gauge(
    g: &DimensionFunction,
    levels: u32,
) -> Result<(Vec<Direction>, FrostmanMeasure)> {
    let ladder = Ladder::from_gauge(g, levels, 0.0)?;
    directions_from_ladder(&ladder, g.clone())
}

fn directions_from_ladder(
    ladder: &Ladder,
    modulus: DimensionFunction,
) -> Result<(Vec<Direction>, FrostmanMeasure)> {
    let intervals = ladder.intervals();
    let w = 1.0 / intervals.len() as f64;
    let dirs: Vec<Direction> = intervals
        .iter()
        .map(|&(a, b)| Direction::new(0.5 * (a + b) * std::f64::consts::PI))
        .collect();
    let mut measure = FrostmanMeasure {
        atoms: dirs.iter().map(|&d| (d, w)).collect(),
        modulus,
        k: 0.0,
    };
    // below the atom spacing every atomic measure breaks the modulus bound
    let j_max = (-(ladder.finest() * std::f64::consts::PI).log2())
        .floor()
        .max(0.0) as u32;
    measure.k = measure.fit_constant(j_max);
    Ok((dirs, measure))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum FiberSpec {
    /// Whole segment (`α = 1`).
    Full,
    Cantor {
        spec: CantorSpec,
    },
    /// Variable-ratio Cantor fibre regular for the gauge.
    Gauge {
        h: DimensionFunction,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum DirectionSpec {
    Beta { beta: f64 },
    Gauge { g: DimensionFunction },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Placement {
    /// All segments through the centre of the square.
    ThroughOriginFan,
    /// Centres uniform in `[1/4, 3/4]²`.
    RandomOffset { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FurstenbergParams {
    pub fiber: FiberSpec,
    pub directions: DirectionSpec,
    pub placement: Placement,
    /// Direction levels (`2^levels` segments), capped at `m`.
    pub levels: u32,
    pub m: u32,
}

impl FurstenbergParams {
    /// Cantor fibres of dimension `α` (full segments when `α = 1`) and a
    /// `β`-dimensional Cantor direction set.
    pub fn alpha_beta(
        alpha: f64,
        beta: f64,
        placement: Placement,
        levels: u32,
        m: u32,
    ) -> Result<Self> {
        let fiber = if alpha >= 1.0 {
            FiberSpec::Full
        } else {
            FiberSpec::Cantor {
                spec: CantorSpec::for_dimension(alpha, m)?,
            }
        };
        Ok(Self {
            fiber,
            directions: DirectionSpec::Beta { beta },
            placement,
            levels,
            m,
        })
    }

    pub fn gauges(
        h: DimensionFunction,
        g: DimensionFunction,
        placement: Placement,
        levels: u32,
        m: u32,
    ) -> Self {
        Self {
            fiber: FiberSpec::Gauge { h },
            directions: DirectionSpec::Gauge { g },
            placement,
            levels,
            m,
        }
    }

    /// Nominal fibre dimension when the fibres are constant-ratio Cantor sets.
    pub fn alpha(&self) -> Option<f64> {
        match &self.fiber {
            FiberSpec::Full => Some(1.0),
            FiberSpec::Cantor { spec } => Some(spec.dimension()),
            FiberSpec::Gauge { .. } => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match &self.directions {
            DirectionSpec::Beta { beta } => Some(*beta),
            DirectionSpec::Gauge { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberStats {
    pub angle: f64,
    pub center: Point,
    pub clipped_length: f64,
    /// Occupied arc-length cells of the fibre.
    pub cells: usize,
}

/// A union of segments, one per direction, each carrying a rasterized fibre.
#[derive(Clone, Debug)]
pub struct FurstenbergInstance {
    pub grid: GridSet,
    pub directions: Vec<Direction>,
    pub segments: Vec<Segment>,
    pub params: FurstenbergParams,
    pub measure: FrostmanMeasure,
    pub delta_e: f64,
    pub seed: u64,
    /// Fibre ladder in unit arc length (before scaling to the clipped length).
    pub ladder: Option<Ladder>,
    /// Per-direction 1-D fibre grids in arc-length coordinates from the
    /// clipped start of the segment.
    pub fibers: Vec<GridSet>,
    pub stats: Vec<FiberStats>,
}

/// JSON sidecar written next to the instance grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSidecar {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub fiber: FiberSpec,
    pub directions: DirectionSpec,
    pub placement: Placement,
    pub seed: u64,
    pub levels: u32,
    pub m: u32,
    #[serde(rename = "delta_E")]
    pub delta_e: f64,
    pub frostman_k: f64,
    pub fibers: Vec<FiberStats>,
}

impl FurstenbergInstance {
    pub fn sidecar(&self) -> InstanceSidecar {
        InstanceSidecar {
            alpha: self.params.alpha(),
            beta: self.params.beta(),
            fiber: self.params.fiber.clone(),
            directions: self.params.directions.clone(),
            placement: self.params.placement,
            seed: self.seed,
            levels: self.params.levels,
            m: self.params.m,
            delta_e: self.delta_e,
            frostman_k: self.measure.k,
            fibers: self.stats.clone(),
        }
    }

    pub fn resolution(&self) -> u32 {
        self.grid.resolution()
    }

    /// Every fibre is contained in the restriction of the grid to its segment.
    pub fn check_fibers(&self) -> Result<()> {
        for (i, (seg, fiber)) in self.segments.iter().zip(&self.fibers).enumerate() {
            let restricted = crate::geometry::restrict_to_segment(&self.grid, seg);
            if !fiber.is_subset_of(&restricted) {
                return Err(Error::Precondition(format!(
                    "fibre {i} is not contained in the grid"
                )));
            }
        }
        Ok(())
    }
}

/// Arc-length intervals of a fibre on a segment of clipped length `len`.
fn fiber_intervals(ladder: Option<&Ladder>, len: f64) -> Vec<(f64, f64)> {
    match ladder {
        None => vec![(0.0, len)],
        Some(l) => l
            .intervals()
            .into_iter()
            .map(|(a, b)| (a * len, b * len))
            .collect(),
    }
}

/// Rasterizes one fibre by quarter-cell samples; intervals shorter than a
/// sample step snap to the nearest sample.
fn raster_fiber(
    seg: &Segment,
    ladder: Option<&Ladder>,
    m: u32,
    plane: &mut GridSet,
) -> (GridSet, f64) {
    let mut fiber = GridSet::new(1, m).expect("resolution already validated");
    let h = fiber.cell_size();
    let sampler = seg.sampler(0.25 * h);
    if sampler.count == 0 {
        return (fiber, 0.0);
    }
    let last = sampler.count as i64 - 1;
    for (a, b) in fiber_intervals(ladder, sampler.len) {
        let lo = ((a / sampler.step - 0.5).ceil() as i64).clamp(0, last);
        let hi = ((b / sampler.step - 0.5).floor() as i64).min(last);
        let range = if lo > hi {
            let i = sampler.nearest(0.5 * (a + b));
            i..=i
        } else {
            lo as usize..=hi as usize
        };
        for i in range {
            let t = sampler.param(i);
            if plane.insert_point(sampler.point_at(t)) {
                fiber.insert(((t / h) as u32).min(fiber.side() - 1), 0);
            }
        }
    }
    (fiber, sampler.len)
}

pub fn furstenberg_set(params: &FurstenbergParams) -> Result<FurstenbergInstance> {
    let m = params.m;
    let empty = GridSet::new(2, m)?;
    let cell = empty.cell_size();
    let levels = params.levels.min(m);
    let (directions, measure) = match &params.directions {
        DirectionSpec::Beta { beta } => direction_cantor(*beta, levels)?,
        DirectionSpec::Gauge { g } => direction_cantor_gauge(g, levels)?,
    };
    let ladder = match &params.fiber {
        FiberSpec::Full => None,
        FiberSpec::Cantor { spec } => {
            // fibres are scaled to the clipped length, which is at least 1/2
            cantor_set(spec, m)?;
            Some(spec.ladder())
        }
        FiberSpec::Gauge { h } => Some(Ladder::from_gauge(h, m, cell)?),
    };
    let seed = match params.placement {
        Placement::RandomOffset { seed } => seed,
        Placement::ThroughOriginFan => 0,
    };
    let segments: Vec<Segment> = match params.placement {
        Placement::ThroughOriginFan => directions
            .iter()
            .map(|&d| Segment::unit(d, [0.5, 0.5]))
            .collect(),
        Placement::RandomOffset { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            directions
                .iter()
                .map(|&d| {
                    Segment::unit(d, [rng.gen_range(0.25..=0.75), rng.gen_range(0.25..=0.75)])
                })
                .collect()
        }
    };
    let (grid, mut parts) = segments
        .par_iter()
        .enumerate()
        .fold(
            || (empty.clone(), Vec::new()),
            |(mut plane, mut acc), (i, seg)| {
                let (fiber, len) = raster_fiber(seg, ladder.as_ref(), m, &mut plane);
                acc.push((i, fiber, len));
                (plane, acc)
            },
        )
        .reduce(
            || (empty.clone(), Vec::new()),
            |(mut a, mut va), (b, vb)| {
                a.union_with(&b).expect("same shape");
                va.extend(vb);
                (a, va)
            },
        );
    parts.sort_by_key(|p| p.0);
    let stats = parts
        .iter()
        .map(|(i, f, len)| FiberStats {
            angle: directions[*i].angle(),
            center: segments[*i].center,
            clipped_length: *len,
            cells: f.count(),
        })
        .collect();
    let instance = FurstenbergInstance {
        grid,
        directions,
        segments,
        params: FurstenbergParams {
            levels,
            ..params.clone()
        },
        measure,
        delta_e: 2.0 * cell,
        seed,
        ladder,
        fibers: parts.into_iter().map(|p| p.1).collect(),
        stats,
    };
    instance.check_fibers()?;
    Ok(instance)
}

/// `f(x, y) = (x cos y, x sin y)`.
pub fn polar_point(p: Point) -> Point {
    [p[0] * p[1].cos(), p[0] * p[1].sin()]
}

/// Lipschitz constant of the polar map on `[0,1]²` recorded with its images.
pub const POLAR_LIPSCHITZ: f64 = std::f64::consts::SQRT_2;

/// Image of a planar grid under the polar map, sampled at 4×4 interior points
/// per cell and rasterized at the same resolution.
pub fn polar_map(grid: &GridSet) -> Result<GridSet> {
    if grid.dim() != 2 {
        return Err(Error::InvalidParameter(
            "polar map needs a planar grid".into(),
        ));
    }
    let mut out = GridSet::new(2, grid.resolution())?;
    let h = grid.cell_size();
    for [x, y] in grid.iter() {
        for a in 0..4 {
            for b in 0..4 {
                let p = [
                    (x as f64 + (a as f64 + 0.5) / 4.0) * h,
                    (y as f64 + (b as f64 + 0.5) / 4.0) * h,
                ];
                out.insert_point(polar_point(p));
            }
        }
    }
    Ok(out)
}

/// `C_α × L` with the direction coordinate stored as `angle/π ∈ [0, 1)`.
pub fn product_grid(spec: &CantorSpec, directions: &[Direction], m: u32) -> Result<GridSet> {
    let c = cantor_set(spec, m)?;
    let mut out = GridSet::new(2, m)?;
    let rows: Vec<u32> = directions
        .iter()
        .filter_map(|d| {
            out.cell_of([0.0, d.angle() / std::f64::consts::PI])
                .map(|c| c[1])
        })
        .collect();
    for [x, _] in c.iter() {
        for &y in &rows {
            out.insert(x, y);
        }
    }
    Ok(out)
}

/// Polar image of `C_α × L`.
pub fn cantor_target(spec: &CantorSpec, directions: &[Direction], m: u32) -> Result<GridSet> {
    polar_map(&product_grid(spec, directions, m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::restrict_to_segment;
    use approx::assert_relative_eq;

    fn log3_2() -> f64 {
        2f64.ln() / 3f64.ln()
    }

    #[test]
    fn cantor_first_level() {
        let g = cantor_set(&CantorSpec::new(1.0 / 3.0, 1).unwrap(), 4).unwrap();
        let cells: Vec<u32> = g.iter().map(|c| c[0]).collect();
        // [0, 1/3] meets cells 0..=5 (5/16 < 1/3 < 6/16), [2/3, 1] meets 10..=15
        assert_eq!(cells, vec![0, 1, 2, 3, 4, 5, 10, 11, 12, 13, 14, 15]);
        assert_relative_eq!(
            CantorSpec::new(1.0 / 3.0, 1).unwrap().dimension(),
            log3_2(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn cantor_quarter_ratio_is_exact() {
        for k in 1..=5 {
            let spec = CantorSpec::new(0.25, k).unwrap();
            let iv = spec.ladder().intervals();
            assert_eq!(iv.len(), 1 << k);
            assert!(iv
                .iter()
                .all(|&(a, b)| (b - a - 4f64.powi(-(k as i32))).abs() < 1e-15));
            // every interval is dyadic, so the raster has exactly 2^k·(cells per interval)
            let g = cantor_set(&spec, 2 * k + 1).unwrap();
            assert_eq!(g.count(), (1 << k) * 2);
        }
        assert!(cantor_set(&CantorSpec::new(0.25, 5).unwrap(), 9).is_err());
        assert!(CantorSpec::new(0.5, 3).is_err());
    }

    #[test]
    fn cantor_box_counts_within_band() {
        for (ratio, levels, m) in [
            (1.0 / 3.0, 8, 13),
            ((-1.0f64 / 0.7).exp2(), 8, 12),
            (0.25, 6, 12),
        ] {
            let spec = CantorSpec::new(ratio, levels).unwrap();
            let alpha = spec.dimension();
            let counts = cantor_set(&spec, m).unwrap().box_counts();
            let resolved = (levels as f64 / alpha).floor() as usize;
            for (j, &n) in counts.iter().enumerate().take(resolved.min(m as usize) + 1) {
                let lo = (((j as f64) * alpha).floor() - 1.0).exp2();
                let hi = 4.0 * ((j as f64) * alpha).ceil().exp2();
                assert!(
                    (n as f64) >= lo && (n as f64) <= hi,
                    "ratio {ratio} j {j} N {n} band [{lo}, {hi}]"
                );
            }
        }
    }

    #[test]
    fn direction_cantor_uniform_case() {
        let (dirs, mu) = direction_cantor(1.0, 8).unwrap();
        assert_eq!(dirs.len(), 256);
        let step = std::f64::consts::PI / 256.0;
        for (i, d) in dirs.iter().enumerate() {
            assert_relative_eq!(d.angle(), (i as f64 + 0.5) * step, epsilon = 1e-12);
        }
        assert!(mu.atoms.iter().all(|a| a.1 == 1.0 / 256.0));
        assert_relative_eq!(mu.total_mass(), 1.0, epsilon = 1e-9);
        // uniform mass on an arc of length 2r is 2r/π
        assert!(mu.k > 0.5 && mu.k < 1.0, "K = {}", mu.k);
        let (d1, m1) = direction_cantor(0.7, 1).unwrap();
        assert_eq!(d1.len(), 2);
        assert!(m1.atoms.iter().all(|a| a.1 == 0.5));
    }

    #[test]
    fn direction_cantor_half_frostman_exhaustive() {
        let (_, mu) = direction_cantor(0.5, 8).unwrap();
        let pi = std::f64::consts::PI;
        // unit-interval coordinates: balls of radius 4^{-j} around every
        // dyadic point of level 2j carry mass ≤ 4·2^{-j}
        for j in 0..=8 {
            let r = 4f64.powi(-j);
            let n = 1u32 << (2 * j).min(16);
            for i in 0..=n {
                let x = Direction::new(pi * i as f64 / n as f64);
                assert!(
                    mu.ball_mass(x, pi * r) <= 4.0 * 2f64.powi(-j) + 1e-12,
                    "j {j} i {i}"
                );
            }
        }
        for a in &mu.atoms {
            for j in 0..12 {
                let r = 2f64.powi(-j);
                assert!(mu.ball_mass(a.0, r) <= mu.k * r.sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn fan_of_full_segments() {
        let p = FurstenbergParams::alpha_beta(1.0, 1.0, Placement::ThroughOriginFan, 6, 9).unwrap();
        let inst = furstenberg_set(&p).unwrap();
        assert_eq!(inst.segments.len(), 64);
        assert_eq!(inst.delta_e, 2.0 / 512.0);
        for (seg, f) in inst.segments.iter().zip(&inst.fibers) {
            let len = seg.clipped_length();
            assert!(len >= 0.999);
            assert!(f.count() as f64 >= len * 512.0 - 1.0);
        }
    }

    #[test]
    fn fibers_meet_the_box_count_guarantee() {
        let p = FurstenbergParams::alpha_beta(0.5, 1.0, Placement::RandomOffset { seed: 1 }, 5, 11)
            .unwrap();
        let inst = furstenberg_set(&p).unwrap();
        assert_eq!(inst.directions.len(), 32);
        for (i, f) in inst.fibers.iter().enumerate() {
            let counts = f.box_counts();
            for (j, &n) in counts.iter().enumerate().skip(1) {
                let lo = ((j as f64 * 0.5).floor() - 1.0).exp2();
                assert!(n as f64 >= lo, "fibre {i} j {j}: {n} < {lo}");
            }
            let r = restrict_to_segment(&inst.grid, &inst.segments[i]);
            assert!(f.is_subset_of(&r));
        }
        for s in &inst.segments {
            assert!((0.25..=0.75).contains(&s.center[0]) && (0.25..=0.75).contains(&s.center[1]));
        }
        let again = furstenberg_set(&p).unwrap();
        assert_eq!(again.grid, inst.grid);
    }

    #[test]
    fn gauge_fibers_follow_the_gauge() {
        let h = DimensionFunction::inverse_log(1.0);
        let p = FurstenbergParams::gauges(
            h.clone(),
            DimensionFunction::power(0.6),
            Placement::RandomOffset { seed: 2 },
            4,
            12,
        );
        let inst = furstenberg_set(&p).unwrap();
        let ladder = inst.ladder.as_ref().unwrap();
        assert!(ladder.levels() >= 2);
        for (k, &l) in ladder.lengths.iter().enumerate().skip(1) {
            assert_relative_eq!(h.value(l) * 2f64.powi(k as i32), 1.0, epsilon = 1e-6);
        }
        let json = serde_json::to_value(inst.sidecar()).unwrap();
        assert_eq!(json["fiber"]["h"]["family"], "inverse-log");
        assert_eq!(json["fibers"].as_array().unwrap().len(), 16);
        assert!(json["delta_E"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn polar_examples() {
        assert_eq!(polar_point([1.0, 0.0]), [1.0, 0.0]);
        for y in [0.0, 0.3, 1.0] {
            let p = polar_point([0.0, y]);
            assert_eq!(p[0].abs() + p[1].abs(), 0.0);
        }
        use rand::{Rng, SeedableRng};
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = GridSet::new(2, 7).unwrap();
            for _ in 0..rng.gen_range(1..400) {
                g.insert(rng.gen_range(0..128), rng.gen_range(0..128));
            }
            let img = polar_map(&g).unwrap();
            for (a, b) in img.box_counts().iter().zip(g.box_counts()) {
                assert!(*a <= 9 * b);
            }
        }
    }

    #[test]
    fn target_equals_polar_of_product() {
        let spec = CantorSpec::new(1.0 / 3.0, 6).unwrap();
        let dirs: Vec<Direction> = (0..64)
            .map(|i| Direction::new(std::f64::consts::PI * i as f64 / 64.0))
            .collect();
        let t = cantor_target(&spec, &dirs, 10).unwrap();
        assert_eq!(
            t,
            polar_map(&product_grid(&spec, &dirs, 10).unwrap()).unwrap()
        );
        // one direction: a copy of the Cantor set on the positive x-axis
        let ray = cantor_target(&spec, &[Direction::new(0.0)], 10).unwrap();
        let c = cantor_set(&spec, 10).unwrap();
        assert!(ray.iter().all(|[_, y]| y == 0));
        assert_eq!(
            ray.iter().map(|[x, _]| x).collect::<Vec<_>>(),
            c.iter().map(|[x, _]| x).collect::<Vec<_>>()
        );
    }
}
