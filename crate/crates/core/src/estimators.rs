//! Box-counting dimension, δ-entropy and dyadic Hausdorff content.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimfn::DimensionFunction;
use crate::error::{Error, Result};
use crate::geometry::{dist, max_separated_size, separated_net, GridSet, Point};

/// Dyadic-cover vs. δ-ball comparability constant.
pub const K_COV: f64 = 4.0;

/// Inputs at or below this size get an exact entropy.
pub const EXACT_ENTROPY_LIMIT: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub stderr: f64,
    pub window: [u32; 2],
    pub counts: Vec<(u32, usize)>,
}

impl DimensionEstimate {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scale_j,count\n");
        for (j, n) in &self.counts {
            s.push_str(&format!("{j},{n}\n"));
        }
        s
    }
}

/// Ordinary least squares `y = a + b·x`; returns `(b, stderr(b), a)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 3 || n != ys.len() {
        return Err(Error::DegenerateWindow(format!("{n} points")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateWindow("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - a - b * x).powi(2))
        .sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok((b, stderr, a))
}

pub fn box_count(grid: &GridSet, j: u32) -> Result<usize> {
    Ok(grid.downsample(j)?.count())
}

/// Default regression window `[4, m - 2]`.
pub fn default_window(m: u32) -> (u32, u32) {
    (4, m.saturating_sub(2))
}

/// OLS slope of `log₂ N_j` against `j` over the window (inclusive).
pub fn box_dimension(grid: &GridSet, window: Option<(u32, u32)>) -> Result<DimensionEstimate> {
    let (lo, hi) = window.unwrap_or_else(|| default_window(grid.resolution()));
    if hi > grid.resolution() || lo >= hi || hi - lo + 1 < 4 {
        return Err(Error::DegenerateWindow(format!(
            "window [{lo}, {hi}] at resolution {} needs at least 4 resolved scales",
            grid.resolution()
        )));
    }
    let all = grid.box_counts();
    let counts: Vec<(u32, usize)> = (lo..=hi).map(|j| (j, all[j as usize])).collect();
    if counts.iter().any(|c| c.1 == 0) {
        return Err(Error::DegenerateWindow("empty grid".into()));
    }
    let xs: Vec<f64> = counts.iter().map(|c| c.0 as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (c.1 as f64).log2()).collect();
    let (slope, stderr, _) = ols(&xs, &ys)?;
    Ok(DimensionEstimate {
        slope,
        stderr,
        window: [lo, hi],
        counts,
    })
}

/// Size of a maximal δ-separated subset; exact for small inputs.
pub fn entropy(points: &[Point], delta: f64) -> usize {
    if points.len() <= EXACT_ENTROPY_LIMIT {
        max_separated_size(points, delta)
    } else {
        separated_net(points, delta).len()
    }
}

pub fn cell_centers(grid: &GridSet) -> Vec<Point> {
    grid.iter().map(|[x, y]| grid.cell_center(x, y)).collect()
}

pub fn grid_entropy(grid: &GridSet, delta: f64) -> usize {
    entropy(&cell_centers(grid), delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicBox {
    pub level: u32,
    pub x: u32,
    pub y: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentValue {
    pub value: f64,
    pub gauge: DimensionFunction,
    pub cover: Vec<DyadicBox>,
    pub dim: u8,
}

impl ContentValue {
    pub fn box_diameter(&self, level: u32) -> f64 {
        (-(level as f64)).exp2() * (self.dim as f64).sqrt()
    }

    /// `Σ g(diam Q)` over the stored cover.
    pub fn cover_cost(&self) -> f64 {
        self.cover
            .iter()
            .map(|b| self.gauge.value(self.box_diameter(b.level)))
            .sum()
    }

    /// JSON report `{value, gauge, cover_size}`.
    pub fn report(&self) -> serde_json::Value {
        serde_json::json!({ "value": self.value, "gauge": self.gauge, "cover_size": self.cover.len() })
    }
}

/// Occupancy at every level `0..=m`.
pub struct Pyramid {
    levels: Vec<GridSet>,
}

impl Pyramid {
    pub fn new(grid: &GridSet) -> Self {
        let mut levels = vec![grid.clone()];
        for j in (0..grid.resolution()).rev() {
            let next = levels.last().unwrap().downsample(j).expect("coarser level");
            levels.push(next);
        }
        levels.reverse();
        Self { levels }
    }

    pub fn level(&self, j: u32) -> &GridSet {
        &self.levels[j as usize]
    }
}

struct ContentDp<'a> {
    pyr: &'a Pyramid,
    cost: Vec<f64>,
    min_level: u32,
    max_level: u32,
    dim: u8,
}

impl ContentDp<'_> {
    fn children(&self, b: DyadicBox) -> impl Iterator<Item = DyadicBox> + '_ {
        let level = b.level + 1;
        let ny = if self.dim == 1 { 1 } else { 2 };
        let occ = self.pyr.level(level);
        (0..2u32)
            .flat_map(move |a| {
                (0..ny).map(move |c| DyadicBox {
                    level,
                    x: 2 * b.x + a,
                    y: if ny == 1 { 0 } else { 2 * b.y + c },
                })
            })
            .filter(move |q| occ.contains(q.x, q.y))
    }

    /// Minimum cost of the occupied part of `b`; appends the realizing boxes.
    fn solve(&self, b: DyadicBox, cover: &mut Vec<DyadicBox>) -> f64 {
        let own = if b.level >= self.min_level {
            self.cost[b.level as usize]
        } else {
            f64::INFINITY
        };
        if b.level >= self.max_level {
            cover.push(b);
            return own;
        }
        let mark = cover.len();
        let kids: Vec<DyadicBox> = self.children(b).collect();
        let sum = if b.level < 3 {
            let parts: Vec<(f64, Vec<DyadicBox>)> = kids
                .par_iter()
                .map(|&q| {
                    let mut c = Vec::new();
                    let v = self.solve(q, &mut c);
                    (v, c)
                })
                .collect();
            let mut s = 0.0;
            for (v, c) in parts {
                s += v;
                cover.extend(c);
            }
            s
        } else {
            kids.iter().map(|&q| self.solve(q, cover)).sum()
        };
        if own <= sum {
            cover.truncate(mark);
            cover.push(b);
            own
        } else {
            sum
        }
    }
}

/// Minimum of `Σ g(diam Q)` over covers by dyadic boxes of depth ≤ `max_depth`.
pub fn dyadic_content(
    grid: &GridSet,
    g: &DimensionFunction,
    max_depth: u32,
) -> Result<ContentValue> {
    dyadic_content_window(grid, g, 0, max_depth)
}

/// Same minimum with box levels restricted to `[min_level, max_level]`.
pub fn dyadic_content_window(
    grid: &GridSet,
    g: &DimensionFunction,
    min_level: u32,
    max_level: u32,
) -> Result<ContentValue> {
    dyadic_content_with(&Pyramid::new(grid), grid.dim(), g, min_level, max_level)
}

/// Windowed content on a precomputed pyramid.
pub fn dyadic_content_with(
    pyr: &Pyramid,
    dim: u8,
    g: &DimensionFunction,
    min_level: u32,
    max_level: u32,
) -> Result<ContentValue> {
    let m = pyr.levels.len() as u32 - 1;
    if max_level > m || min_level > max_level {
        return Err(Error::Resolution(format!(
            "content window [{min_level}, {max_level}] outside [0, {m}]"
        )));
    }
    let cost: Vec<f64> = (0..=m)
        .map(|j| g.value((-(j as f64)).exp2() * (dim as f64).sqrt()))
        .collect();
    let dp = ContentDp {
        pyr,
        cost,
        min_level,
        max_level,
        dim,
    };
    let mut cover = Vec::new();
    let root = DyadicBox {
        level: 0,
        x: 0,
        y: 0,
    };
    let value = if pyr.level(0).is_empty() {
        0.0
    } else {
        dp.solve(root, &mut cover)
    };
    Ok(ContentValue {
        value,
        gauge: g.clone(),
        cover,
        dim,
    })
}

/// Diameter-capped content: boxes of diameter at most `delta`.
pub fn capped_content(grid: &GridSet, g: &DimensionFunction, delta: f64) -> Result<ContentValue> {
    let min_level = min_level_for(delta, grid.dim());
    if min_level > grid.resolution() {
        return Err(Error::Resolution(format!(
            "cap {delta} is finer than the grid cells"
        )));
    }
    dyadic_content_window(grid, g, min_level, grid.resolution())
}

/// Smallest level whose boxes have diameter `≤ delta`.
pub fn min_level_for(delta: f64, dim: u8) -> u32 {
    let d = (dim as f64).sqrt();
    let mut j = 0;
    while (-(j as f64)).exp2() * d > delta * (1.0 + 1e-12) {
        j += 1;
    }
    j
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyLemmaReport {
    pub delta: f64,
    pub lhs: usize,
    pub content: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `entropy(A, δ) ≥ content(A)/(K_cov·g(4δ))`.
pub fn check_entropy_lemma(
    grid: &GridSet,
    g: &DimensionFunction,
    delta: f64,
) -> Result<EntropyLemmaReport> {
    if delta < grid.cell_size() {
        return Err(Error::Precondition(format!(
            "δ = {delta} is below the cell size {}",
            grid.cell_size()
        )));
    }
    let content = dyadic_content(grid, g, grid.resolution())?.value;
    let lhs = grid_entropy(grid, delta);
    let rhs = content / (K_COV * g.value(4.0 * delta));
    Ok(EntropyLemmaReport {
        delta,
        lhs,
        content,
        rhs,
        pass: lhs as f64 >= rhs,
    })
}

/// Pairwise minimum distance, for diagnostics.
pub fn min_pairwise_distance(points: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            best = best.min(dist(p, q));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{cantor_set, CantorSpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn middle_thirds(levels: u32, m: u32) -> GridSet {
        cantor_set(&CantorSpec::new(1.0 / 3.0, levels).unwrap(), m).unwrap()
    }

    fn random_grid(rng: &mut ChaCha8Rng, m: u32, n: usize) -> GridSet {
        let side = 1u32 << m;
        let mut g = GridSet::new(2, m).unwrap();
        for _ in 0..n {
            g.insert(rng.gen_range(0..side), rng.gen_range(0..side));
        }
        g
    }

    #[test]
    fn box_count_examples() {
        let full = GridSet::full(2, 8).unwrap();
        assert_eq!(box_count(&full, 4).unwrap(), 256);
        let mut single = GridSet::new(2, 8).unwrap();
        single.insert(77, 201);
        for j in 0..=8 {
            assert_eq!(box_count(&single, j).unwrap(), 1);
        }
        assert!(box_count(&single, 9).is_err());
        let est = box_dimension(&middle_thirds(8, 13), Some((4, 12))).unwrap();
        assert!((est.slope - 2f64.ln() / 3f64.ln()).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn box_dimension_examples() {
        let mut seg = GridSet::new(2, 10).unwrap();
        for x in 0..1024 {
            seg.insert(x, 300);
        }
        assert!((box_dimension(&seg, None).unwrap().slope - 1.0).abs() < 0.02);
        let full = GridSet::full(2, 10).unwrap();
        let est = box_dimension(&full, None).unwrap();
        assert!((est.slope - 2.0).abs() < 0.02);
        assert_eq!(est.window, [4, 8]);
        assert!(est.to_csv().starts_with("scale_j,count\n4,256\n"));
        // product of two middle-thirds sets
        let c = middle_thirds(7, 12);
        let mut prod = GridSet::new(2, 12).unwrap();
        let xs: Vec<u32> = c.iter().map(|p| p[0]).collect();
        for &x in &xs {
            for &y in &xs {
                prod.insert(x, y);
            }
        }
        let est = box_dimension(&prod, Some((4, 11))).unwrap();
        assert!(
            (est.slope - 2.0 * 2f64.ln() / 3f64.ln()).abs() < 0.08,
            "{est:?}"
        );
        assert!(box_dimension(&full, Some((4, 6))).is_err());
        assert!(box_dimension(&GridSet::new(2, 10).unwrap(), None).is_err());
    }

    #[test]
    fn ols_recovers_a_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let (b, se, a) = ols(&xs, &ys).unwrap();
        assert_relative_eq!(b, -0.5, epsilon = 1e-12);
        assert_relative_eq!(a, 3.0, epsilon = 1e-12);
        assert!(se < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[[0.0, 0.0], [1.0, 0.0]], 0.5), 2);
        for j in 1..8 {
            let mut g = GridSet::new(1, j).unwrap();
            for x in 0..(1 << j) {
                g.insert(x, 0);
            }
            assert_eq!(grid_entropy(&g, 2f64.powi(-(j as i32))), 1 << j);
        }
        // level-6 ratio-1/4 Cantor endpoints, 16-point sub-sample
        let spec = CantorSpec::new(0.25, 6).unwrap();
        let pts: Vec<Point> = spec
            .ladder()
            .intervals()
            .iter()
            .step_by(4)
            .map(|iv| [iv.0, 0.0])
            .collect();
        assert_eq!(pts.len(), 16);
        let delta = 4f64.powi(-4);
        let exact = max_separated_size(&pts, delta);
        let greedy = separated_net(&pts, delta).len();
        assert_eq!(entropy(&pts, delta), exact);
        assert!(greedy <= exact && 2 * greedy >= exact);
    }

    #[test]
    fn content_examples() {
        let mut line = GridSet::new(1, 10).unwrap();
        for x in 0..1024 {
            line.insert(x, 0);
        }
        let c = dyadic_content(&line, &DimensionFunction::identity(), 10).unwrap();
        assert_relative_eq!(c.value, 1.0, epsilon = 1e-12);
        for alpha in [0.3, 0.7, 1.5] {
            let mut g = GridSet::new(2, 9).unwrap();
            g.insert(100, 3);
            let c = dyadic_content(&g, &DimensionFunction::power(alpha), 9).unwrap();
            assert_relative_eq!(c.value, (2f64.sqrt() / 512.0).powf(alpha), epsilon = 1e-12);
            assert_eq!(
                c.cover,
                vec![DyadicBox {
                    level: 9,
                    x: 100,
                    y: 3
                }]
            );
        }
        let cantor = middle_thirds(8, 13);
        let c = dyadic_content(&cantor, &DimensionFunction::power(0.6309), 13).unwrap();
        assert!((0.2..=1.2).contains(&c.value), "{}", c.value);
        assert_relative_eq!(c.value, c.cover_cost(), max_relative = 1e-9);
        assert_eq!(c.report()["cover_size"], c.cover.len());
        let empty = GridSet::new(2, 5).unwrap();
        assert_eq!(
            dyadic_content(&empty, &DimensionFunction::power(1.0), 5)
                .unwrap()
                .value,
            0.0
        );
    }

    /// Exhaustive minimum over all dyadic covers on a tiny grid.
    fn brute_content(g: &GridSet, gauge: &DimensionFunction, lo: u32, hi: u32) -> f64 {
        fn go(
            g: &GridSet,
            gauge: &DimensionFunction,
            lo: u32,
            hi: u32,
            level: u32,
            x: u32,
            y: u32,
        ) -> f64 {
            let shift = g.resolution() - level;
            let occupied = g.iter().any(|[a, b]| a >> shift == x && b >> shift == y);
            if !occupied {
                return 0.0;
            }
            let own = if level >= lo {
                gauge.value((-(level as f64)).exp2() * 2f64.sqrt())
            } else {
                f64::INFINITY
            };
            if level == hi {
                return own;
            }
            let kids: f64 = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| go(g, gauge, lo, hi, level + 1, 2 * x + a, 2 * y + b))
                .sum();
            own.min(kids)
        }
        go(g, gauge, lo, hi, 0, 0, 0)
    }

    #[test]
    fn content_matches_exhaustive_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(1..40);
            let g = random_grid(&mut rng, 4, n);
            let gauge = DimensionFunction::power(rng.gen_range(0.2..2.0));
            let (lo, hi) = (rng.gen_range(0..3), rng.gen_range(3..=4));
            let v = dyadic_content_window(&g, &gauge, lo, hi).unwrap().value;
            assert_relative_eq!(v, brute_content(&g, &gauge, lo, hi), max_relative = 1e-12);
        }
    }

    #[test]
    fn content_monotone_and_subadditive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (na, nb) = (rng.gen_range(1..200), rng.gen_range(1..200));
            let a = random_grid(&mut rng, 6, na);
            let b = random_grid(&mut rng, 6, nb);
            let mut u = a.clone();
            u.union_with(&b).unwrap();
            let gauge = DimensionFunction::power(rng.gen_range(0.3..1.8));
            let ca = dyadic_content(&a, &gauge, 6).unwrap().value;
            let cb = dyadic_content(&b, &gauge, 6).unwrap().value;
            let cu = dyadic_content(&u, &gauge, 6).unwrap().value;
            assert!(ca <= cu * (1.0 + 1e-12) && cb <= cu * (1.0 + 1e-12));
            assert!(cu <= (ca + cb) * (1.0 + 1e-12));
            assert!(cu <= gauge.value(2f64.sqrt()) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn capped_content_uses_small_boxes() {
        let full = GridSet::full(1, 8).unwrap();
        let c = capped_content(&full, &DimensionFunction::power(0.5), 0.25).unwrap();
        assert!(c.cover.iter().all(|b| b.level >= 2));
        assert_relative_eq!(c.value, 4.0 * 0.5, epsilon = 1e-12);
        assert_eq!(min_level_for(0.25, 2), 3);
    }

    #[test]
    fn entropy_lemma_examples() {
        let mut three = GridSet::new(2, 10).unwrap();
        for p in [[0.1, 0.1], [0.5, 0.9], [0.9, 0.3]] {
            three.insert_point(p);
        }
        let r = check_entropy_lemma(&three, &DimensionFunction::identity(), 0.1).unwrap();
        assert!(r.pass && r.lhs == 3);
        assert!(r.content <= 3.0 * 2f64.sqrt() / 1024.0 + 1e-15);

        let line = GridSet::full(1, 10).unwrap();
        let delta = 2f64.powi(-5);
        let r = check_entropy_lemma(&line, &DimensionFunction::identity(), delta).unwrap();
        assert_eq!(r.lhs, 32);
        assert_relative_eq!(r.rhs, 1.0 / (K_COV * 4.0 * delta), epsilon = 1e-12);
        assert!(r.pass);

        let cantor = middle_thirds(8, 13);
        let g = DimensionFunction::power(2f64.ln() / 3f64.ln());
        for j in 3..9 {
            let r = check_entropy_lemma(&cantor, &g, 2f64.powi(-j)).unwrap();
            assert!(r.pass, "{r:?}");
        }
        assert!(check_entropy_lemma(&cantor, &g, 1e-6).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn box_count_nesting(seed in 0u64..10_000, n in 1usize..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_grid(&mut rng, 7, n);
            let c = g.box_counts();
            for j in 0..7 {
                prop_assert!(c[j] <= c[j + 1] && c[j + 1] <= 4 * c[j]);
            }
        }

        #[test]
        fn entropy_is_antitone(seed in 0u64..10_000, n in 1usize..300, d in 0.01f64..0.3, f in 1.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_grid(&mut rng, 7, n);
            prop_assert!(grid_entropy(&g, d * f) <= grid_entropy(&g, d));
        }
    }
}
