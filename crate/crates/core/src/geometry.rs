//! Dyadic grids on `[0,1]^d`, directions, segments, tubes, δ-separated nets and
//! the scale partitions `J_k = { j : b_k < r_j ≤ b_{k-1} }`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Largest supported resolution for planar grids (`4^14` bits = 32 MiB).
pub const MAX_RESOLUTION_2D: u32 = 14;
pub const MAX_RESOLUTION_1D: u32 = 30;

/// Occupied dyadic cells of `[0,1]^dim` at resolution `2^{-m}`.
///
/// Stored as a dense bitmap; iteration order is lexicographic in `(x, y)`.
#[derive(Clone, PartialEq, Eq)]
pub struct GridSet {
    dim: u8,
    m: u32,
    bits: Vec<u64>,
}

impl std::fmt::Debug for GridSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "GridSet(dim={}, m={}, count={})",
            self.dim,
            self.m,
            self.count()
        )
    }
}

impl GridSet {
    pub fn new(dim: u8, m: u32) -> Result<Self> {
        let cap = match dim {
            1 => MAX_RESOLUTION_1D,
            2 => MAX_RESOLUTION_2D,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "ambient dimension {dim} not in {{1, 2}}"
                )))
            }
        };
        if m > cap {
            return Err(Error::Resolution(format!(
                "m = {m} exceeds the supported maximum {cap}"
            )));
        }
        let cells = 1usize << (dim as u32 * m);
        Ok(Self {
            dim,
            m,
            bits: vec![0; cells.div_ceil(64)],
        })
    }

    /// Full grid (every cell occupied).
    pub fn full(dim: u8, m: u32) -> Result<Self> {
        let mut g = Self::new(dim, m)?;
        let cells = 1usize << (dim as u32 * m);
        for i in 0..cells {
            g.set_index(i);
        }
        Ok(g)
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn resolution(&self) -> u32 {
        self.m
    }

    pub fn side(&self) -> u32 {
        1 << self.m
    }

    pub fn cell_size(&self) -> f64 {
        (-(self.m as f64)).exp2()
    }

    fn index(&self, x: u32, y: u32) -> usize {
        if self.dim == 1 {
            x as usize
        } else {
            ((x as usize) << self.m) | y as usize
        }
    }

    fn set_index(&mut self, i: usize) {
        self.bits[i >> 6] |= 1 << (i & 63);
    }

    fn get_index(&self, i: usize) -> bool {
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Marks cell `(x, y)`; `y` is ignored for linear grids.
    pub fn insert(&mut self, x: u32, y: u32) {
        debug_assert!(x < self.side() && (self.dim == 1 || y < self.side()));
        let i = self.index(x, y);
        self.set_index(i);
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x < self.side() && (self.dim == 1 || y < self.side()) && self.get_index(self.index(x, y))
    }

    /// Cell containing `p`, or `None` outside `[0,1]^dim`. The closed upper
    /// boundary belongs to the last cell.
    pub fn cell_of(&self, p: Point) -> Option<[u32; 2]> {
        let side = self.side() as f64;
        let coord = |v: f64| -> Option<u32> {
            if !(0.0..=1.0).contains(&v) {
                return None;
            }
            Some(((v * side) as u32).min(self.side() - 1))
        };
        let x = coord(p[0])?;
        let y = if self.dim == 1 { 0 } else { coord(p[1])? };
        Some([x, y])
    }

    pub fn insert_point(&mut self, p: Point) -> bool {
        match self.cell_of(p) {
            Some([x, y]) => {
                self.insert(x, y);
                true
            }
            None => false,
        }
    }

    pub fn cell_center(&self, x: u32, y: u32) -> Point {
        let h = self.cell_size();
        [
            (x as f64 + 0.5) * h,
            if self.dim == 1 {
                0.0
            } else {
                (y as f64 + 0.5) * h
            },
        ]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Occupied cells in lexicographic `(x, y)` order.
    pub fn iter(&self) -> impl Iterator<Item = [u32; 2]> + '_ {
        let m = self.m;
        let dim = self.dim;
        self.bits.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                let i = (wi << 6) | b;
                Some(if dim == 1 {
                    [i as u32, 0]
                } else {
                    [(i >> m) as u32, (i & ((1 << m) - 1)) as u32]
                })
            })
        })
    }

    /// Cells at the coarser level `j` that contain an occupied cell.
    pub fn downsample(&self, j: u32) -> Result<GridSet> {
        if j > self.m {
            return Err(Error::Resolution(format!(
                "level {j} is finer than the grid resolution {}",
                self.m
            )));
        }
        let mut out = GridSet::new(self.dim, j)?;
        let shift = self.m - j;
        for [x, y] in self.iter() {
            out.insert(x >> shift, y >> shift);
        }
        Ok(out)
    }

    /// `N_j` for every level `j = 0..=m`.
    pub fn box_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.m as usize + 1];
        let mut level = self.clone();
        for j in (0..=self.m).rev() {
            counts[j as usize] = level.count();
            if j > 0 {
                level = level.halve();
            }
        }
        counts
    }

    fn halve(&self) -> GridSet {
        let mut out = GridSet::new(self.dim, self.m - 1).expect("coarser level is valid");
        for [x, y] in self.iter() {
            out.insert(x >> 1, y >> 1);
        }
        out
    }

    pub fn union_with(&mut self, other: &GridSet) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    pub fn intersect_with(&mut self, other: &GridSet) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
        Ok(())
    }

    pub fn is_subset_of(&self, other: &GridSet) -> bool {
        self.dim == other.dim
            && self.m == other.m
            && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    fn check_compatible(&self, other: &GridSet) -> Result<()> {
        if self.dim != other.dim || self.m != other.m {
            return Err(Error::InvalidParameter(format!(
                "grid shapes differ: dim {} m {} vs dim {} m {}",
                self.dim, self.m, other.dim, other.m
            )));
        }
        Ok(())
    }

    /// Serializes to the `gridset v1` text format.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "gridset v1 dim={} m={} count={}\n",
            self.dim,
            self.m,
            self.count()
        );
        for [x, y] in self.iter() {
            if self.dim == 1 {
                let _ = writeln!(s, "{x}");
            } else {
                let _ = writeln!(s, "{x} {y}");
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<GridSet> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty gridset file".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("gridset") || fields.next() != Some("v1") {
            return Err(Error::Parse(format!("bad header: {header}")));
        }
        let mut kv = HashMap::new();
        for f in fields {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field: {f}")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad header value: {f}")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("missing header field {k}")))
        };
        let dim = get("dim")? as u8;
        let m = get("m")? as u32;
        let count = get("count")? as usize;
        let mut g = GridSet::new(dim, m)?;
        let mut seen = 0;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let coords: Vec<u32> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad cell line: {line}")))
                })
                .collect::<Result<_>>()?;
            if coords.len() != dim as usize || coords.iter().any(|&c| c >= g.side()) {
                return Err(Error::Parse(format!("bad cell line: {line}")));
            }
            g.insert(coords[0], coords.get(1).copied().unwrap_or(0));
            seen += 1;
        }
        if seen != count || g.count() != count {
            return Err(Error::Parse(format!(
                "header count {count} does not match {seen} cell lines"
            )));
        }
        Ok(g)
    }
}

/// Undirected direction, stored as an angle in `[0, π)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Direction(f64);

impl Direction {
    pub fn new(angle: f64) -> Self {
        let a = angle.rem_euclid(PI);
        // rem_euclid can round up to exactly π
        Direction(if a >= PI { 0.0 } else { a })
    }

    pub fn angle(self) -> f64 {
        self.0
    }

    pub fn unit(self) -> Point {
        [self.0.cos(), self.0.sin()]
    }

    pub fn perpendicular(self) -> Direction {
        Direction::new(self.0 + PI / 2.0)
    }

    /// Angular distance between undirected directions, in `[0, π/2]`.
    pub fn distance(self, other: Direction) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(PI - d)
    }
}

/// Segment of given length centred at `center`; geometry is clipped to the
/// unit square when sampled, `length` keeps the pre-clip value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub direction: Direction,
    pub center: Point,
    pub length: f64,
}

impl Segment {
    pub fn new(direction: Direction, center: Point, length: f64) -> Self {
        Self {
            direction,
            center,
            length,
        }
    }

    pub fn unit(direction: Direction, center: Point) -> Self {
        Self::new(direction, center, 1.0)
    }

    pub fn endpoints(&self) -> (Point, Point) {
        let [c, s] = self.direction.unit();
        let h = 0.5 * self.length;
        (
            [self.center[0] - h * c, self.center[1] - h * s],
            [self.center[0] + h * c, self.center[1] + h * s],
        )
    }

    /// Portion inside `[0,1]²` (Liang–Barsky), or `None` if it misses.
    pub fn clipped(&self) -> Option<(Point, Point)> {
        let (p0, p1) = self.endpoints();
        let d = [p1[0] - p0[0], p1[1] - p0[1]];
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (p, q) in [
            (-d[0], p0[0]),
            (d[0], 1.0 - p0[0]),
            (-d[1], p0[1]),
            (d[1], 1.0 - p0[1]),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
            }
        }
        if t0 > t1 {
            return None;
        }
        Some((
            [p0[0] + t0 * d[0], p0[1] + t0 * d[1]],
            [p0[0] + t1 * d[0], p0[1] + t1 * d[1]],
        ))
    }

    pub fn clipped_length(&self) -> f64 {
        self.clipped().map_or(0.0, |(a, b)| dist(a, b))
    }

    /// Euclidean distance from `p` to the (unclipped) segment.
    pub fn distance_to(&self, p: Point) -> f64 {
        let [c, s] = self.direction.unit();
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        let over = (u.abs() - 0.5 * self.length).max(0.0);
        over.hypot(v)
    }

    /// Uniform samples along the clipped segment with the given step.
    pub fn sampler(&self, step: f64) -> SegmentSampler {
        match self.clipped() {
            Some((a, b)) => {
                let len = dist(a, b);
                SegmentSampler {
                    start: a,
                    unit: self.direction.unit_towards(a, b),
                    len,
                    step,
                    count: (len / step).ceil() as usize,
                }
            }
            None => SegmentSampler {
                start: [0.0, 0.0],
                unit: [1.0, 0.0],
                len: 0.0,
                step,
                count: 0,
            },
        }
    }
}

impl Direction {
    fn unit_towards(self, a: Point, b: Point) -> Point {
        let len = dist(a, b);
        if len == 0.0 {
            self.unit()
        } else {
            [(b[0] - a[0]) / len, (b[1] - a[1]) / len]
        }
    }
}

/// Midpoint samples `t_i = (i + 1/2)·step` along a clipped segment; `t` is
/// arc length from the clipped start.
#[derive(Clone, Copy, Debug)]
pub struct SegmentSampler {
    pub start: Point,
    pub unit: Point,
    pub len: f64,
    pub step: f64,
    pub count: usize,
}

impl SegmentSampler {
    pub fn param(&self, i: usize) -> f64 {
        ((i as f64 + 0.5) * self.step).min(self.len)
    }

    pub fn point_at(&self, t: f64) -> Point {
        [
            self.start[0] + t * self.unit[0],
            self.start[1] + t * self.unit[1],
        ]
    }

    /// Index of the sample closest to arc length `t`.
    pub fn nearest(&self, t: f64) -> usize {
        ((t / self.step - 0.5).round().max(0.0) as usize).min(self.count.saturating_sub(1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Point)> + '_ {
        (0..self.count).map(move |i| {
            let t = self.param(i);
            (t, self.point_at(t))
        })
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// One-dimensional restriction of `grid` to `segment`: arc-length cells
/// `⌊t/h⌋` of the quarter-cell samples that fall in occupied planar cells.
pub fn restrict_to_segment(grid: &GridSet, segment: &Segment) -> GridSet {
    let m = grid.resolution();
    let mut out = GridSet::new(1, m).expect("planar resolution is valid on the line");
    let h = grid.cell_size();
    let sampler = segment.sampler(0.25 * h);
    for (t, p) in sampler.iter() {
        if let Some([x, y]) = grid.cell_of(p) {
            if grid.contains(x, y) {
                out.insert(((t / h) as u32).min(out.side() - 1), 0);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeSpec {
    pub segment: Segment,
    pub width: f64,
}

impl TubeSpec {
    pub fn new(segment: Segment, width: f64) -> Result<Self> {
        if !(width > 0.0) || width > segment.length {
            return Err(Error::InvalidParameter(format!(
                "tube width {width} must be in (0, length]"
            )));
        }
        Ok(Self { segment, width })
    }
}

/// Closed `y`-interval where `a + b·y ∈ [lo, hi]`, intersected into `(ylo, yhi)`.
fn clamp_linear(a: f64, b: f64, lo: f64, hi: f64, ylo: &mut f64, yhi: &mut f64) {
    if b == 0.0 {
        if a < lo || a > hi {
            *ylo = f64::INFINITY;
            *yhi = f64::NEG_INFINITY;
        }
        return;
    }
    let (p, q) = ((lo - a) / b, (hi - a) / b);
    *ylo = ylo.max(p.min(q));
    *yhi = yhi.min(p.max(q));
}

/// Row range `[r_lo, r_hi]` of cell centres `(r + 1/2)·h` inside `[ylo, yhi]`.
pub(crate) fn rows_between(ylo: f64, yhi: f64, h: f64) -> (i64, i64) {
    (
        (ylo / h - 0.5).ceil() as i64,
        (yhi / h - 0.5).floor() as i64,
    )
}

/// Cells whose centres lie within distance `δ` of the tube's segment.
pub fn cells_in_tube(m: u32, tube: &TubeSpec) -> Result<GridSet> {
    let mut out = GridSet::new(2, m)?;
    let h = out.cell_size();
    if h > tube.width {
        return Err(Error::Resolution(format!(
            "cell size {h} exceeds tube width {}",
            tube.width
        )));
    }
    let seg = tube.segment;
    let delta = tube.width;
    let [c, s] = seg.direction.unit();
    let half = 0.5 * seg.length;
    let (p0, p1) = seg.endpoints();
    let side = out.side() as i64;
    let xmin = p0[0].min(p1[0]) - delta;
    let xmax = p0[0].max(p1[0]) + delta;
    let (c_lo, c_hi) = rows_between(xmin, xmax, h);
    for col in c_lo.max(0)..=c_hi.min(side - 1) {
        let x = (col as f64 + 0.5) * h;
        let dx = x - seg.center[0];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        // rectangle part: u = dx·c + dy·s, v = -dx·s + dy·c with dy = y - cy
        let (mut rlo, mut rhi) = (f64::NEG_INFINITY, f64::INFINITY);
        clamp_linear(
            dx * c - seg.center[1] * s,
            s,
            -half,
            half,
            &mut rlo,
            &mut rhi,
        );
        clamp_linear(
            -dx * s - seg.center[1] * c,
            c,
            -delta,
            delta,
            &mut rlo,
            &mut rhi,
        );
        if rlo <= rhi {
            lo = lo.min(rlo);
            hi = hi.max(rhi);
        }
        for p in [p0, p1] {
            let ddx = x - p[0];
            let r2 = delta * delta - ddx * ddx;
            if r2 >= 0.0 {
                let r = r2.sqrt();
                lo = lo.min(p[1] - r);
                hi = hi.max(p[1] + r);
            }
        }
        if lo > hi {
            continue;
        }
        let (r_lo, r_hi) = rows_between(lo, hi, h);
        for row in r_lo.max(0)..=r_hi.min(side - 1) {
            out.insert(col as u32, row as u32);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ScaleKind {
    Dyadic,
    Hyperdyadic { epsilon: f64 },
}

/// Scale ladder `b_k`, `k ∈ [k_min, k_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSequence {
    pub kind: ScaleKind,
    pub k_min: u32,
    pub k_max: u32,
}

impl ScaleSequence {
    pub fn dyadic(k_min: u32, k_max: u32) -> Result<Self> {
        Self::new(ScaleKind::Dyadic, k_min, k_max)
    }

    pub fn hyperdyadic(epsilon: f64, k_min: u32, k_max: u32) -> Result<Self> {
        Self::new(ScaleKind::Hyperdyadic { epsilon }, k_min, k_max)
    }

    pub fn new(kind: ScaleKind, k_min: u32, k_max: u32) -> Result<Self> {
        if k_min >= k_max {
            return Err(Error::InvalidParameter(format!(
                "empty scale range [{k_min}, {k_max}]"
            )));
        }
        if let ScaleKind::Hyperdyadic { epsilon } = kind {
            if !(epsilon > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "hyperdyadic epsilon must be positive, got {epsilon}"
                )));
            }
        }
        Ok(Self { kind, k_min, k_max })
    }

    /// `b_k`; `2^{-k}` or `2^{-(1+ε)^k}`.
    pub fn value(&self, k: u32) -> f64 {
        match self.kind {
            ScaleKind::Dyadic => 2f64.powi(-(k as i32)),
            ScaleKind::Hyperdyadic { epsilon } => (-(1.0 + epsilon).powi(k as i32)).exp2(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (self.k_min..=self.k_max).map(|k| self.value(k)).collect()
    }

    /// Bucket `k` with `b_k < r ≤ b_{k-1}`; radii above `b_{k_min-1}` go to
    /// `k_min`, radii at or below `b_{k_max}` continue down the ladder.
    pub fn bucket(&self, r: f64) -> u32 {
        let mut k = self.k_min;
        while !(self.value(k) < r) && self.value(k) > 0.0 {
            k += 1;
        }
        k
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
}

impl BallFamily {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        if let Some(b) = balls.iter().find(|b| !(b.radius > 0.0 && b.radius <= 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "ball radius {} outside (0, 1]",
                b.radius
            )));
        }
        Ok(Self { balls })
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Circumscribed balls of the occupied level-`j` cells of `grid`.
    pub fn covering_cells(grid: &GridSet, j: u32) -> Result<Self> {
        let coarse = grid.downsample(j)?;
        let radius = 0.5 * coarse.cell_size() * (grid.dim() as f64).sqrt();
        let balls = coarse
            .iter()
            .map(|[x, y]| Ball {
                center: coarse.cell_center(x, y),
                radius,
            })
            .collect();
        Self::new(balls)
    }

    /// Cells of a planar grid at resolution `m` whose centres lie in some
    /// ball of `indices`.
    pub fn mask(&self, indices: &[usize], m: u32) -> Result<GridSet> {
        let mut out = GridSet::new(2, m)?;
        let h = out.cell_size();
        let side = out.side() as i64;
        for &i in indices {
            let b = self.balls[i];
            let (c_lo, c_hi) = rows_between(b.center[0] - b.radius, b.center[0] + b.radius, h);
            for col in c_lo.max(0)..=c_hi.min(side - 1) {
                let dx = (col as f64 + 0.5) * h - b.center[0];
                let r2 = b.radius * b.radius - dx * dx;
                if r2 < 0.0 {
                    continue;
                }
                let r = r2.sqrt();
                let (r_lo, r_hi) = rows_between(b.center[1] - r, b.center[1] + r, h);
                for row in r_lo.max(0)..=r_hi.min(side - 1) {
                    out.insert(col as u32, row as u32);
                }
            }
        }
        Ok(out)
    }
}

/// `k ↦ J_k^b`; every index lands in exactly one bucket.
pub fn partition_by_scale(balls: &BallFamily, scales: &ScaleSequence) -> BTreeMap<u32, Vec<usize>> {
    let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (j, b) in balls.balls.iter().enumerate() {
        out.entry(scales.bucket(b.radius)).or_default().push(j);
    }
    out
}

/// Greedy maximal δ-separated subset in input order; returns indices.
///
/// Kept points are pairwise at distance `≥ δ` and every input point is within
/// `δ` of a kept one.
pub fn separated_net(points: &[Point], delta: f64) -> Vec<usize> {
    assert!(delta > 0.0, "separation must be positive");
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let key = |p: Point| ((p[0] / delta).floor() as i64, (p[1] / delta).floor() as i64);
    let mut kept = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let (kx, ky) = key(p);
        let clash = (-1..=1).any(|ox| {
            (-1..=1).any(|oy| {
                buckets
                    .get(&(kx + ox, ky + oy))
                    .is_some_and(|v| v.iter().any(|&q| dist(points[q], p) < delta))
            })
        });
        if !clash {
            buckets.entry((kx, ky)).or_default().push(i);
            kept.push(i);
        }
    }
    kept
}

/// Exact maximum cardinality of a δ-separated subset (branch and bound on the
/// conflict graph). Intended for at most a few dozen points.
pub fn max_separated_size(points: &[Point], delta: f64) -> usize {
    let n = points.len();
    assert!(n <= 64, "exact search limited to 64 points");
    let adj: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && dist(points[i], points[j]) < delta)
                .fold(0u64, |acc, j| acc | 1 << j)
        })
        .collect();
    fn search(cand: u64, size: usize, best: &mut usize, adj: &[u64]) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        search(cand & !(1 << v) & !adj[v], size + 1, best, adj);
        search(cand & !(1 << v), size, best, adj);
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0;
    search(all, 0, &mut best, &adj);
    best
}
