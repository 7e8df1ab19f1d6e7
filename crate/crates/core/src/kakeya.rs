//! Discrete Kakeya maximal operator, the reference constant `C(δ)` and
//! Rayleigh-quotient lower bounds for `‖𝒦_δ‖²_{L² → L²(μ)}`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructors::FrostmanMeasure;
use crate::dimfn::{DimensionFunction, Family};
use crate::error::{Error, Result};
use crate::estimators::ols;
use crate::geometry::{cells_in_tube, Direction, GridSet, Segment, TubeSpec, MAX_RESOLUTION_2D};

/// Slack on the calibrated bound in [`verify_norm_bound`].
pub const NORM_SLACK: f64 = 1.5;

/// Translates whose in-square cell count is below this fraction of the
/// nominal `2δ/h²` are not part of the lattice.
pub const MIN_TUBE_FILL: f64 = 0.6;

/// Nonnegative function on the cells of `[0,1]²`, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    m: u32,
    /// `(x << m | y, value)`, sorted by index, values > 0.
    entries: Vec<(u32, f64)>,
}

impl GridFunction {
    pub fn zero(m: u32) -> Result<Self> {
        check_resolution(m)?;
        Ok(Self {
            m,
            entries: Vec::new(),
        })
    }

    pub fn constant(m: u32, c: f64) -> Result<Self> {
        check_resolution(m)?;
        check_value(c)?;
        let n = 1u32 << (2 * m);
        Ok(Self {
            m,
            entries: if c > 0.0 {
                (0..n).map(|i| (i, c)).collect()
            } else {
                Vec::new()
            },
        })
    }

    pub fn indicator(grid: &GridSet) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::InvalidParameter(
                "grid functions live on planar grids".into(),
            ));
        }
        let m = grid.resolution();
        Ok(Self {
            m,
            entries: grid.iter().map(|[x, y]| ((x << m) | y, 1.0)).collect(),
        })
    }

    /// Row-major by `x` then `y`, length `4^m`.
    pub fn from_dense(m: u32, values: &[f64]) -> Result<Self> {
        check_resolution(m)?;
        if values.len() != 1 << (2 * m) {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                1u64 << (2 * m),
                values.len()
            )));
        }
        let mut entries = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            check_value(v)?;
            if v > 0.0 {
                entries.push((i as u32, v));
            }
        }
        Ok(Self { m, entries })
    }

    pub fn resolution(&self) -> u32 {
        self.m
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn value(&self, x: u32, y: u32) -> f64 {
        let i = (x << self.m) | y;
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn max_value(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    /// `Σ f² · 4^{-m}`.
    pub fn l2_squared(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>() * (-2.0 * self.m as f64).exp2()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        check_value(c)?;
        if c == 0.0 {
            return Self::zero(self.m);
        }
        Ok(Self {
            m: self.m,
            entries: self.entries.iter().map(|&(i, v)| (i, c * v)).collect(),
        })
    }

    pub fn sum(&self, other: &GridFunction) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::InvalidParameter(
                "grid functions at different resolutions".into(),
            ));
        }
        let mut acc: HashMap<u32, f64> = self.entries.iter().copied().collect();
        for &(i, v) in &other.entries {
            *acc.entry(i).or_default() += v;
        }
        let mut entries: Vec<(u32, f64)> = acc.into_iter().collect();
        entries.sort_unstable_by_key(|e| e.0);
        Ok(Self { m: self.m, entries })
    }
}

fn check_resolution(m: u32) -> Result<()> {
    if m > MAX_RESOLUTION_2D {
        return Err(Error::Resolution(format!(
            "m = {m} exceeds {MAX_RESOLUTION_2D}"
        )));
    }
    Ok(())
}

fn check_value(v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "grid function value {v} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Grid resolution used for scale `δ`: cells of side at most `δ/2`.
pub fn resolution_for(delta: f64) -> u32 {
    ((1.0 / delta).log2() - 1e-9).ceil().max(0.0) as u32 + 1
}

/// Bucket layout of the rotated frame for one `(δ, m)`.
struct Lattice {
    m: u32,
    h: f64,
    /// Half tube length in u-buckets.
    half_u: usize,
    du: f64,
    dv: f64,
    ku: i64,
    kv: i64,
    nbu: usize,
    nbv: usize,
    min_count: f64,
}

impl Lattice {
    fn new(delta: f64, m: u32) -> Self {
        let h = (-(m as f64)).exp2();
        let n = (1.0 / delta - 1e-9).ceil() as usize;
        let du = 0.5 / n as f64;
        let dv = 0.5 * delta;
        let reach = std::f64::consts::FRAC_1_SQRT_2 + h;
        let ku = (reach / du).ceil() as i64 + 1;
        let kv = (reach / dv).ceil() as i64 + 1;
        Self {
            m,
            h,
            half_u: n,
            du,
            dv,
            ku,
            kv,
            nbu: 2 * ku as usize,
            nbv: 2 * kv as usize,
            min_count: MIN_TUBE_FILL * 2.0 * delta / (h * h),
        }
    }

    /// Bucket of every cell, in index order.
    fn fill_buckets(&self, e: Direction, out: &mut Vec<u32>) {
        let [c, s] = e.unit();
        let side = 1u32 << self.m;
        let (iu_scale, iv_scale) = (1.0 / self.du, 1.0 / self.dv);
        // offsets keep the bucket coordinates positive so truncation floors
        let (ou, ov) = (self.ku as f64, self.kv as f64);
        out.clear();
        out.reserve((side as usize) * (side as usize));
        let step_u = self.h * s * iu_scale;
        let step_v = self.h * c * iv_scale;
        for x in 0..side {
            let px = (x as f64 + 0.5) * self.h - 0.5;
            let py0 = 0.5 * self.h - 0.5;
            let u0 = (px * c + py0 * s) * iu_scale + ou;
            let v0 = (-px * s + py0 * c) * iv_scale + ov;
            for y in 0..side {
                let iu = (u0 + y as f64 * step_u) as usize;
                let iv = (v0 + y as f64 * step_v) as usize;
                out.push((iv * self.nbu + iu) as u32);
            }
        }
    }
}

/// Reusable per-thread buffers for [`maximal_on`].
struct Workspace {
    buckets: Vec<u32>,
    cnt: Vec<f64>,
    nums: Vec<Vec<f64>>,
    win_c: Vec<f64>,
    win_f: Vec<Vec<f64>>,
    pre_c: Vec<f64>,
    pre_f: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(lat: &Lattice, members: usize) -> Self {
        let size = lat.nbu * lat.nbv;
        Self {
            buckets: Vec::new(),
            cnt: vec![0.0; size],
            nums: vec![vec![0.0; size]; members],
            win_c: vec![0.0; lat.nbu],
            win_f: vec![vec![0.0; lat.nbu]; members],
            pre_c: vec![0.0; lat.nbu + 1],
            pre_f: vec![vec![0.0; lat.nbu + 1]; members],
        }
    }
}

/// `maximal(f_k, e, δ)` for several functions in one pass.
///
/// Tubes are `1 × 2δ` rectangles `|u - u₀| ≤ 1/2`, `|v - v₀| ≤ δ` in the frame
/// rotated to `e` about the centre of the square; `(u₀, v₀)` runs over a
/// lattice of spacing about `δ/2` anchored at the centre. Averages divide by
/// the number of cells of the square in the tube.
pub fn maximal_many(fs: &[&GridFunction], e: Direction, delta: f64) -> Result<Vec<f64>> {
    let Some(first) = fs.first() else {
        return Ok(Vec::new());
    };
    let m = first.m;
    if fs.iter().any(|f| f.m != m) {
        return Err(Error::InvalidParameter(
            "grid functions at different resolutions".into(),
        ));
    }
    let h = (-(m as f64)).exp2();
    if h > delta {
        return Err(Error::Resolution(format!(
            "cell size {h} exceeds δ = {delta}"
        )));
    }
    let lat = Lattice::new(delta, m);
    let mut ws = Workspace::new(&lat, fs.len());
    Ok(maximal_on(&lat, e, fs, &mut ws))
}

fn maximal_on(lat: &Lattice, e: Direction, fs: &[&GridFunction], ws: &mut Workspace) -> Vec<f64> {
    lat.fill_buckets(e, &mut ws.buckets);
    let Workspace {
        buckets,
        cnt,
        nums,
        win_c,
        win_f,
        pre_c,
        pre_f,
    } = ws;
    cnt.fill(0.0);
    for &b in buckets.iter() {
        cnt[b as usize] += 1.0;
    }
    for (num, f) in nums.iter_mut().zip(fs) {
        num.fill(0.0);
        for &(i, v) in &f.entries {
            num[buckets[i as usize] as usize] += v;
        }
    }
    let (nbu, nbv) = (lat.nbu, lat.nbv);
    let w = 2 * lat.half_u;
    // best average per member as (numerator, count)
    let mut best = vec![(0.0f64, 1.0f64); fs.len()];
    win_c.fill(0.0);
    win_f.iter_mut().for_each(|v| v.fill(0.0));
    // v-window of 4 buckets = 2δ; sliding sums across rows
    for top in 0..nbv + 3 {
        if top < nbv {
            let row = &cnt[top * nbu..(top + 1) * nbu];
            win_c.iter_mut().zip(row).for_each(|(a, b)| *a += b);
            for (wf, num) in win_f.iter_mut().zip(nums.iter()) {
                wf.iter_mut()
                    .zip(&num[top * nbu..(top + 1) * nbu])
                    .for_each(|(a, b)| *a += b);
            }
        }
        if top >= 4 && top - 4 < nbv {
            let r = top - 4;
            win_c
                .iter_mut()
                .zip(&cnt[r * nbu..(r + 1) * nbu])
                .for_each(|(a, b)| *a -= b);
            for (wf, num) in win_f.iter_mut().zip(nums.iter()) {
                wf.iter_mut()
                    .zip(&num[r * nbu..(r + 1) * nbu])
                    .for_each(|(a, b)| *a -= b);
            }
        }
        for iu in 0..nbu {
            pre_c[iu + 1] = pre_c[iu] + win_c[iu];
        }
        if pre_c[nbu] < lat.min_count {
            continue;
        }
        for (pf, wf) in pre_f.iter_mut().zip(win_f.iter()) {
            for iu in 0..nbu {
                pf[iu + 1] = pf[iu] + wf[iu];
            }
        }
        // u-windows [a, a + w) that meet the occupied buckets of this row
        let first = win_c.iter().position(|&c| c > 0.0).unwrap_or(0) as i64;
        let last = win_c.iter().rposition(|&c| c > 0.0).unwrap_or(0) as i64;
        for a in (first + 1 - w as i64)..=last {
            let lo = a.max(0) as usize;
            let hi = ((a + w as i64) as usize).min(nbu);
            // counts are sums of ones, exact in f64
            let count = pre_c[hi] - pre_c[lo];
            if count < lat.min_count {
                continue;
            }
            for ((bn, bc), pf) in best.iter_mut().zip(pre_f.iter()) {
                let num = pf[hi] - pf[lo];
                if num * *bc > *bn * count {
                    *bn = num;
                    *bc = count;
                }
            }
        }
    }
    best.into_iter().map(|(n, c)| n / c).collect()
}

/// `sup_x |T_e^δ(x)|^{-1} ∫_{T_e^δ(x)} f` over the translate lattice.
pub fn maximal(f: &GridFunction, e: Direction, delta: f64) -> Result<f64> {
    Ok(maximal_many(&[f], e, delta)?[0])
}

/// Profile `φ` in `C(δ) = ∫_δ^1 φ(u)/u² du`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Phi {
    Exponent { s: f64 },
    Gauge { g: DimensionFunction },
}

impl Phi {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            Phi::Exponent { s } => Some(*s),
            Phi::Gauge { g } => match g.family {
                Family::Power { alpha } => Some(alpha),
                _ => None,
            },
        }
    }

    fn value(&self, u: f64) -> f64 {
        match self {
            Phi::Exponent { s } => u.powf(*s),
            Phi::Gauge { g } => g.value(u),
        }
    }
}

impl From<&DimensionFunction> for Phi {
    fn from(g: &DimensionFunction) -> Self {
        Phi::Gauge { g: g.clone() }
    }
}

const SIMPSON_TOL: f64 = 1e-11;

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    step(f, a, b, fa, fm, fb, whole, SIMPSON_TOL * scale, 48)
}

/// `C(δ) = ∫_δ^1 φ(u)/u² du`; closed forms for pure powers, adaptive Simpson
/// in `t = ln(1/u)` otherwise (split at table knots).
pub fn cdelta(phi: &Phi, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain {
            value: delta,
            x_max: 1.0,
        });
    }
    if let Some(s) = phi.exponent() {
        return Ok(if (s - 1.0).abs() < 1e-15 {
            -delta.ln()
        } else {
            (delta.powf(s - 1.0) - 1.0) / (1.0 - s)
        });
    }
    let t_max = -delta.ln();
    let mut cuts = vec![0.0];
    if let Phi::Gauge { g } = phi {
        if let Family::Table { x, .. } = &g.family {
            cuts.extend(x.iter().map(|&k| -k.ln()).filter(|&t| t > 0.0 && t < t_max));
        }
    }
    cuts.push(t_max);
    cuts.sort_by(f64::total_cmp);
    // φ(e^{-t}) e^{t}; evaluate inside each piece so steps are one-sided
    let integrand = |t: f64| phi.value((-t).exp()) * t.exp();
    Ok(cuts
        .windows(2)
        .map(|w| {
            let eps = 1e-13 * (1.0 + w[1]);
            simpson(&integrand, w[0] + eps, w[1] - eps)
        })
        .sum())
}

/// Test-function families for the norm search.
#[derive(Clone, Debug)]
pub enum TestFamily {
    Constant,
    /// Sum of indicators of δ-tubes through the centre, one per atom of μ.
    Bush,
    /// Indicator of the union of the bush tubes.
    BushUnion,
    RandomTubes {
        n: usize,
        seed: u64,
    },
    RandomFields {
        n: usize,
        seed: u64,
    },
    FurstenbergIndicator {
        grid: GridSet,
    },
    Union(Vec<TestFamily>),
}

impl TestFamily {
    /// Bush, union, constant and a few random tubes.
    pub fn standard(seed: u64) -> Self {
        TestFamily::Union(vec![
            TestFamily::Constant,
            TestFamily::Bush,
            TestFamily::BushUnion,
            TestFamily::RandomTubes { n: 4, seed },
        ])
    }

    fn members(
        &self,
        mu: &FrostmanMeasure,
        delta: f64,
        m: u32,
        out: &mut Vec<(String, GridFunction)>,
    ) -> Result<()> {
        let tube = |e: Direction, c: [f64; 2]| -> Result<GridSet> {
            cells_in_tube(m, &TubeSpec::new(Segment::unit(e, c), delta)?)
        };
        match self {
            TestFamily::Constant => out.push(("constant".into(), GridFunction::constant(m, 1.0)?)),
            TestFamily::Bush | TestFamily::BushUnion => {
                let side = 1usize << m;
                let mut dense = vec![0.0f64; side * side];
                for (e, _) in &mu.atoms {
                    for [x, y] in tube(*e, [0.5, 0.5])?.iter() {
                        dense[(x as usize) << m | y as usize] += 1.0;
                    }
                }
                if matches!(self, TestFamily::BushUnion) {
                    dense.iter_mut().for_each(|v| *v = v.min(1.0));
                    out.push(("bush-union".into(), GridFunction::from_dense(m, &dense)?));
                } else {
                    out.push(("bush".into(), GridFunction::from_dense(m, &dense)?));
                }
            }
            TestFamily::RandomTubes { n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for i in 0..*n {
                    let e = mu.atoms[rng.gen_range(0..mu.atoms.len())].0;
                    let c = [rng.gen_range(0.25..0.75), rng.gen_range(0.25..0.75)];
                    out.push((
                        format!("random-tube-{i}"),
                        GridFunction::indicator(&tube(e, c)?)?,
                    ));
                }
            }
            TestFamily::RandomFields { n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for i in 0..*n {
                    let dense: Vec<f64> =
                        (0..1usize << (2 * m)).map(|_| rng.gen::<f64>()).collect();
                    out.push((
                        format!("random-field-{i}"),
                        GridFunction::from_dense(m, &dense)?,
                    ));
                }
            }
            TestFamily::FurstenbergIndicator { grid } => {
                if grid.resolution() < m {
                    return Err(Error::Resolution(format!(
                        "instance resolution {} is coarser than the scale's resolution {m}",
                        grid.resolution()
                    )));
                }
                out.push((
                    "furstenberg".into(),
                    GridFunction::indicator(&grid.downsample(m)?)?,
                ));
            }
            TestFamily::Union(parts) => {
                for p in parts {
                    p.members(mu, delta, m, out)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub delta: f64,
    pub estimate: f64,
    pub witness: String,
    pub c_delta: f64,
    pub ratio: f64,
    /// Quotient of every member, in family order.
    pub quotients: Vec<(String, f64)>,
    /// A random field beat every structured member.
    pub random_beats_structured: bool,
}

/// Largest Rayleigh quotient `Σ_e μ(e)·maximal(f,e,δ)² / ‖f‖₂²` over the family.
pub fn norm_lower_bound(
    mu: &FrostmanMeasure,
    delta: f64,
    family: &TestFamily,
) -> Result<NormEstimate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain {
            value: delta,
            x_max: 1.0,
        });
    }
    let m = resolution_for(delta);
    check_resolution(m)?;
    let mut members = Vec::new();
    family.members(mu, delta, m, &mut members)?;
    members.retain(|(_, f)| !f.entries.is_empty());
    if members.is_empty() || mu.atoms.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let fs: Vec<&GridFunction> = members.iter().map(|p| &p.1).collect();
    let lat = Lattice::new(delta, m);
    let per_atom = mu
        .atoms
        .par_iter()
        .map_init(
            || Workspace::new(&lat, fs.len()),
            |ws, &(e, w)| {
                let best = maximal_on(&lat, e, &fs, ws);
                best.into_iter().map(|v| w * v * v).collect::<Vec<f64>>()
            },
        )
        .collect::<Vec<_>>();
    // summed in atom order so the result does not depend on work stealing
    let sums = per_atom.iter().fold(vec![0.0; fs.len()], |mut acc, row| {
        acc.iter_mut().zip(row).for_each(|(a, v)| *a += v);
        acc
    });
    let quotients: Vec<(String, f64)> = members
        .iter()
        .zip(&sums)
        .map(|((id, f), s)| (id.clone(), s / f.l2_squared()))
        .collect();
    let (witness, estimate) = quotients
        .iter()
        .fold(None::<&(String, f64)>, |acc, q| match acc {
            Some(b) if b.1 >= q.1 => Some(b),
            _ => Some(q),
        })
        .cloned()
        .unwrap();
    let structured = quotients
        .iter()
        .filter(|q| !q.0.starts_with("random-field"))
        .map(|q| q.1)
        .fold(0.0, f64::max);
    let random_beats_structured = quotients
        .iter()
        .any(|q| q.0.starts_with("random-field") && q.1 > structured);
    let c_delta = cdelta(&Phi::from(&mu.modulus), delta)?;
    Ok(NormEstimate {
        delta,
        estimate,
        witness,
        c_delta,
        ratio: estimate / c_delta,
        quotients,
        random_beats_structured,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBoundReport {
    pub rows: Vec<NormEstimate>,
    pub c_fit: f64,
    pub slack: f64,
    pub pass: Vec<bool>,
    /// OLS slope of `log₂ estimate` against `-log₂ δ`.
    pub power_exponent: Option<f64>,
    /// OLS of `estimate` against `ln(1/δ)`: slope and `R²`.
    pub log_slope: Option<f64>,
    pub log_r2: Option<f64>,
    pub verdict: bool,
}

impl NormBoundReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("delta,estimate,c_delta,ratio,witness_id\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.delta, r.estimate, r.c_delta, r.ratio, r.witness
            ));
        }
        s
    }
}

fn r_squared(xs: &[f64], ys: &[f64], slope: f64, intercept: f64) -> f64 {
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let tss: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    if tss == 0.0 {
        1.0
    } else {
        1.0 - rss / tss
    }
}

/// Checks `estimate(δ) ≤ slack·C_fit·C(δ)` with `C_fit` calibrated at the
/// coarsest `δ`; `φ` is the modulus of `μ`.
pub fn verify_norm_bound(
    mu: &FrostmanMeasure,
    deltas: &[f64],
    family: &TestFamily,
) -> Result<NormBoundReport> {
    if deltas.is_empty() {
        return Err(Error::InvalidParameter("empty δ list".into()));
    }
    let mut ds = deltas.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    let rows: Vec<NormEstimate> = ds
        .iter()
        .map(|&d| norm_lower_bound(mu, d, family))
        .collect::<Result<_>>()?;
    let c_fit = rows[0].ratio;
    let pass: Vec<bool> = rows
        .iter()
        .map(|r| r.estimate <= NORM_SLACK * c_fit * r.c_delta * (1.0 + 1e-12))
        .collect();
    let (mut power_exponent, mut log_slope, mut log_r2) = (None, None, None);
    if rows.len() >= 3 {
        let xs: Vec<f64> = rows.iter().map(|r| -r.delta.log2()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.estimate.log2()).collect();
        power_exponent = ols(&xs, &ys).ok().map(|f| f.0);
        let lx: Vec<f64> = rows.iter().map(|r| -r.delta.ln()).collect();
        let ly: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
        if let Ok((b, _, a)) = ols(&lx, &ly) {
            log_slope = Some(b);
            log_r2 = Some(r_squared(&lx, &ly, b, a));
        }
    }
    let verdict = pass.iter().all(|&p| p);
    Ok(NormBoundReport {
        rows,
        c_fit,
        slack: NORM_SLACK,
        pass,
        power_exponent,
        log_slope,
        log_r2,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::direction_cantor;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::PI;

    fn random_function(seed: u64, m: u32, density: f64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dense: Vec<f64> = (0..1usize << (2 * m))
            .map(|_| {
                if rng.gen::<f64>() < density {
                    rng.gen::<f64>() * 3.0
                } else {
                    0.0
                }
            })
            .collect();
        GridFunction::from_dense(m, &dense).unwrap()
    }

    #[test]
    fn constant_has_unit_maximal() {
        for &delta in &[0.25, 0.125, 1.0 / 16.0, 1.0 / 64.0] {
            let m = resolution_for(delta);
            let one = GridFunction::constant(m, 1.0).unwrap();
            for i in 0..24 {
                let e = Direction::new(PI * i as f64 / 24.0 + 0.013);
                assert_relative_eq!(maximal(&one, e, delta).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
        let one = GridFunction::constant(6, 1.0).unwrap();
        assert_relative_eq!(
            maximal(&one.scaled(2.5).unwrap(), Direction::new(0.4), 0.1).unwrap(),
            2.5,
            epsilon = 1e-12
        );
        assert!(maximal(&one, Direction::new(0.0), 0.01).is_err());
    }

    #[test]
    fn single_tube_indicator() {
        for &delta in &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
            let m = resolution_for(delta);
            for &a in &[0.0, 0.4, PI / 4.0, 2.0] {
                let e = Direction::new(a);
                let t = cells_in_tube(
                    m,
                    &TubeSpec::new(Segment::unit(e, [0.5, 0.5]), delta).unwrap(),
                )
                .unwrap();
                let f = GridFunction::indicator(&t).unwrap();
                assert!(maximal(&f, e, delta).unwrap() >= 0.9);
                let perp = maximal(&f, e.perpendicular(), delta).unwrap();
                assert!(perp <= 4.0 * delta, "δ {delta} angle {a}: {perp}");
            }
        }
    }

    #[test]
    fn cdelta_closed_forms() {
        assert_relative_eq!(
            cdelta(&Phi::Exponent { s: 1.0 }, (-1.0f64).exp()).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            cdelta(&Phi::Exponent { s: 0.5 }, 0.25).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert!(cdelta(&Phi::Exponent { s: 0.5 }, 1.0).is_err());
        assert!(cdelta(&Phi::Exponent { s: 0.5 }, 0.0).is_err());
        // the quadrature path must reproduce the closed forms
        for s in [0.25, 0.5, 0.75, 1.0] {
            for delta in [0.3, 0.01, 2f64.powi(-12)] {
                let g = DimensionFunction::power_log(s, 0.0, 1.0);
                let quad = cdelta(&Phi::Gauge { g }, delta).unwrap();
                let closed = cdelta(&Phi::Exponent { s }, delta).unwrap();
                assert_relative_eq!(quad, closed, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn cdelta_table_matches_midpoint_oracle() {
        let g = DimensionFunction::table(&[
            (2f64.powi(-8), 0.05),
            (2f64.powi(-5), 0.1),
            (0.1, 0.3),
            (0.5, 0.6),
            (0.9, 1.0),
        ])
        .unwrap();
        let delta = 2f64.powi(-6);
        let quad = cdelta(&Phi::Gauge { g: g.clone() }, delta).unwrap();
        // midpoint rule in u with 10^6 panels per piece between knots
        let mut cuts = vec![delta, 2f64.powi(-5), 0.1, 0.5, 0.9, 1.0];
        cuts.dedup();
        let mut oracle = 0.0;
        for w in cuts.windows(2) {
            let n = 1_000_000;
            let step = (w[1] - w[0]) / n as f64;
            for i in 0..n {
                let u = w[0] + (i as f64 + 0.5) * step;
                oracle += g.value(u) / (u * u) * step;
            }
        }
        assert_relative_eq!(quad, oracle, max_relative = 1e-6);
    }

    #[test]
    fn norm_of_constant_is_one() {
        let (_, mu) = direction_cantor(1.0, 5).unwrap();
        let est = norm_lower_bound(&mu, 1.0 / 16.0, &TestFamily::Constant).unwrap();
        assert_relative_eq!(est.estimate, 1.0, epsilon = 1e-9);
        assert_eq!(est.witness, "constant");
        assert!(matches!(
            norm_lower_bound(&mu, 0.1, &TestFamily::Union(vec![])),
            Err(Error::EmptyFamily)
        ));
    }

    #[test]
    fn enlarging_the_family_never_decreases() {
        let (_, mu) = direction_cantor(0.5, 5).unwrap();
        let small = TestFamily::Union(vec![TestFamily::RandomTubes { n: 2, seed: 1 }]);
        let big = TestFamily::Union(vec![
            TestFamily::RandomTubes { n: 2, seed: 1 },
            TestFamily::Bush,
            TestFamily::RandomFields { n: 1, seed: 3 },
        ]);
        let a = norm_lower_bound(&mu, 1.0 / 16.0, &small).unwrap();
        let b = norm_lower_bound(&mu, 1.0 / 16.0, &big).unwrap();
        assert!(b.estimate >= a.estimate);
        assert_eq!(b.quotients.len(), 4);
    }

    #[test]
    fn single_delta_calibrates_trivially() {
        let (_, mu) = direction_cantor(0.5, 4).unwrap();
        let r = verify_norm_bound(&mu, &[0.125], &TestFamily::Bush).unwrap();
        assert!(r.verdict);
        assert_relative_eq!(
            r.c_fit,
            r.rows[0].estimate / r.rows[0].c_delta,
            epsilon = 1e-15
        );
        assert!(r
            .to_csv()
            .starts_with("delta,estimate,c_delta,ratio,witness_id\n0.125,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn maximal_bounded_monotone_subadditive(seed in 0u64..1000, a in 0.0f64..PI, k in 2u32..4) {
            let delta = 2f64.powi(-(k as i32));
            let m = resolution_for(delta);
            let f = random_function(seed, m, 0.4);
            let g = random_function(seed + 7919, m, 0.4);
            let e = Direction::new(a);
            let mf = maximal(&f, e, delta).unwrap();
            let mg = maximal(&g, e, delta).unwrap();
            let fg = f.sum(&g).unwrap();
            let mfg = maximal(&fg, e, delta).unwrap();
            prop_assert!(mf <= f.max_value() + 1e-12);
            prop_assert!(mfg <= mf + mg + 1e-12);
            prop_assert!(mfg + 1e-12 >= mf.max(mg));
            let c = 0.37;
            prop_assert!((maximal(&f.scaled(c).unwrap(), e, delta).unwrap() - c * mf).abs() < 1e-12);
        }
    }
}
