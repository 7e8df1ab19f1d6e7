//! Dimension functions (gauges) and the asymptotic relations between them.
//!
//! Every limit statement (the order `g ≺ h`, doubling, zero-dimensionality) is
//! decided from the trend on the geometric grid `x = 2^{-j}`. The verdicts are
//! sampled heuristics with explicit thresholds and `Inconclusive` is returned
//! whenever the rule does not fire.
//!
//! Values are computed in log space, so grids far below `f64::MIN_POSITIVE`
//! (e.g. `j = 4096`) are still usable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finest scale exponent used by the decision rules of [`compare`].
pub const DECISION_DEPTH: u32 = 4096;
/// Threshold below which the gap counts as having reached zero.
pub const ORDER_THRESHOLD: f64 = 1e-3;
/// Maximal spread `C/c` of the gap for an `Equivalent` verdict.
pub const EQUIVALENCE_BAND: f64 = 10.0;
/// Lower end of the bisection bracket used by [`DimensionFunction::inverse`].
pub const INVERSE_FLOOR_EXP: i32 = 60;

/// Parametric family of a gauge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum Family {
    /// `x ↦ x^α`
    Power { alpha: f64 },
    /// `x ↦ C·x^α·log^θ(1/x)`
    PowerLog { alpha: f64, theta: f64, c: f64 },
    /// `x ↦ 1/log^θ(1/x)`
    InverseLog { theta: f64 },
    /// Right-continuous step interpolant of sample pairs; zero left of the
    /// first knot.
    Table { x: Vec<f64>, y: Vec<f64> },
}

/// A dimension function `h` restricted to `(0, x_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionFunction {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
}

fn default_x_max() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Doubling {
    Yes { c: f64 },
    Inconclusive,
}

/// Result of comparing `g` against `h` (in that order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    /// `g ≺ h`: `h/g → 0`.
    Smaller,
    /// `h ≺ g`.
    Larger,
    Equivalent,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl DimensionFunction {
    pub fn power(alpha: f64) -> Self {
        Self::from_family(Family::Power { alpha })
    }

    pub fn power_log(alpha: f64, theta: f64, c: f64) -> Self {
        Self::from_family(Family::PowerLog { alpha, theta, c })
    }

    pub fn inverse_log(theta: f64) -> Self {
        Self::from_family(Family::InverseLog { theta })
    }

    pub fn identity() -> Self {
        Self::power(1.0)
    }

    /// Table-backed gauge from `(x, h(x))` pairs, in any order.
    pub fn table(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("empty table".into()));
        }
        let mut sorted = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted
            .iter()
            .any(|&(x, y)| !(x > 0.0) || !(y >= 0.0) || !y.is_finite())
        {
            return Err(Error::InvalidParameter(
                "table needs x > 0 and finite y >= 0".into(),
            ));
        }
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate table abscissa".into()));
        }
        let (x, y) = sorted.into_iter().unzip();
        Ok(Self::from_family(Family::Table { x, y }))
    }

    pub fn from_family(family: Family) -> Self {
        Self { family, x_max: 1.0 }
    }

    pub fn with_x_max(mut self, x_max: f64) -> Self {
        self.x_max = x_max;
        self
    }

    /// Checked evaluation on `(0, x_max]`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x > self.x_max {
            return Err(Error::Domain {
                value: x,
                x_max: self.x_max,
            });
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation; callers guarantee `x > 0`.
    pub fn value(&self, x: f64) -> f64 {
        match &self.family {
            Family::Table { x: xs, y: ys } => table_lookup(xs, ys, x),
            _ => self.ln_value_t(-x.ln()).exp(),
        }
    }

    /// `ln h(x)` where `t = ln(1/x)`.
    pub fn ln_value_t(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { alpha } => -alpha * t,
            Family::PowerLog { alpha, theta, c } => {
                if t <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                c.ln() - alpha * t + theta * t.ln()
            }
            Family::InverseLog { theta } => {
                if t <= 0.0 {
                    return f64::INFINITY;
                }
                -theta * t.ln()
            }
            Family::Table { x, y } => {
                // (-t).exp() underflows for t > ~745; the table cannot
                // resolve such scales anyway.
                table_lookup(x, y, (-t).exp()).ln()
            }
        }
    }

    /// `ln h(2^{-j})`.
    pub fn ln_at_scale(&self, j: f64) -> f64 {
        self.ln_value_t(j * std::f64::consts::LN_2)
    }

    /// Checks the non-decreasing invariant on `x = 2^{-j}`, `j ∈ js`.
    pub fn is_nondecreasing_on(&self, js: std::ops::RangeInclusive<u32>) -> bool {
        let vals: Vec<f64> = js.map(|j| self.ln_at_scale(j as f64)).collect();
        // j ascending means x descending
        vals.windows(2)
            .all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0))
    }

    /// Smallest `C` with `h(λx) ≤ C·h(x)` over `x = 2^{-j}` for `samples`
    /// consecutive `j`, starting at the first `j` with `λ·2^{-j} < x_max`.
    ///
    /// Returns `Inconclusive` if the ratio keeps growing through the finest
    /// half of the samples.
    pub fn is_doubling(&self, lambda: f64, samples: usize) -> Result<Doubling> {
        if !(lambda > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must exceed 1, got {lambda}"
            )));
        }
        let ln_lambda = lambda.ln();
        let ln2 = std::f64::consts::LN_2;
        let mut j = 1u32;
        while ln_lambda - (j as f64) * ln2 >= self.x_max.ln() {
            j += 1;
        }
        let mut ratios = Vec::with_capacity(samples);
        for jj in j..j + samples as u32 {
            let t = jj as f64 * ln2;
            let base = self.ln_value_t(t);
            if base == f64::NEG_INFINITY {
                // outside the support of a table
                break;
            }
            let r = (self.ln_value_t(t - ln_lambda) - base).exp();
            if !r.is_finite() {
                return Ok(Doubling::Inconclusive);
            }
            ratios.push(r);
        }
        if ratios.len() < 2 {
            return Ok(Doubling::Inconclusive);
        }
        let tail = &ratios[ratios.len() / 2..];
        let growing = tail.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-9))
            && tail[tail.len() - 1] >= 1.5 * tail[0];
        if growing {
            return Ok(Doubling::Inconclusive);
        }
        let c = ratios.iter().cloned().fold(1.0_f64, f64::max);
        Ok(Doubling::Yes { c })
    }

    /// Smallest `x` in `[2^{-60}, x_max]` with `h(x) ≈ y` (relative `tol`).
    ///
    /// For table gauges the step may jump over `y`; the jump location is
    /// returned in that case.
    pub fn inverse(&self, y: f64, tol: f64) -> Result<f64> {
        let ln2 = std::f64::consts::LN_2;
        let t_hi = INVERSE_FLOOR_EXP as f64 * ln2;
        let t_lo = -self.x_max.ln();
        if let Family::Table { x, y: ys } = &self.family {
            if x.windows(2).any(|w| !(w[1] > w[0])) || ys.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Unsupported(
                    "table is not strictly increasing".into(),
                ));
            }
        } else {
            let mut prev = f64::NEG_INFINITY;
            for j in (1..=INVERSE_FLOOR_EXP).rev() {
                let v = self.ln_at_scale(j as f64);
                if (j as f64) * ln2 < t_lo {
                    break;
                }
                if !(v > prev) {
                    return Err(Error::Unsupported(format!(
                        "gauge is not strictly increasing on the sample grid (at 2^-{j})"
                    )));
                }
                prev = v;
            }
            if !(self.ln_value_t(t_lo) > prev) {
                return Err(Error::Unsupported(
                    "gauge is not increasing up to x_max".into(),
                ));
            }
        }
        let lo = self.ln_value_t(t_hi).exp();
        let hi = self.ln_value_t(t_lo).exp();
        if !(y >= lo && y <= hi) {
            return Err(Error::Range { value: y, lo, hi });
        }
        let ln_y = y.ln();
        // Bisection in t = ln(1/x); h decreases in t.
        let (mut a, mut b) = (t_lo, t_hi);
        for _ in 0..300 {
            let mid = 0.5 * (a + b);
            let v = self.ln_value_t(mid);
            if (v.exp() - y).abs() <= tol * y && !matches!(self.family, Family::Table { .. }) {
                return Ok((-mid).exp());
            }
            if v >= ln_y {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok((-a).exp())
    }
}

fn table_lookup(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    // relative slack so that exp(-j ln 2) lands on a knot at 2^{-j}
    match xs.partition_point(|&k| k <= x * (1.0 + 1e-12)) {
        0 => 0.0,
        i => ys[i - 1],
    }
}

/// Sampled grid of scale exponents `j ∈ [j_min, j_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub j_min: u32,
    pub j_max: u32,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self {
            j_min: 1,
            j_max: DECISION_DEPTH,
        }
    }
}

/// `Δ(x) = h(x)/g(x)`.
pub fn gap(g: &DimensionFunction, h: &DimensionFunction, x: f64) -> Result<f64> {
    let gx = g.evaluate(x)?;
    if gx == 0.0 {
        return Err(Error::DivisionByZero(format!("g({x}) = 0")));
    }
    Ok(h.evaluate(x)? / gx)
}

/// Decides the order between `g` and `h` from `ln Δ_j = ln h(2^{-j}) - ln g(2^{-j})`.
///
/// `Smaller` (g ≺ h) when `Δ_j` is non-increasing over the finer half of the
/// grid and ends below [`ORDER_THRESHOLD`]; `Larger` symmetrically; `Equivalent`
/// when all `Δ_j` lie in a band of ratio at most [`EQUIVALENCE_BAND`].
pub fn compare(g: &DimensionFunction, h: &DimensionFunction, grid: SampleGrid) -> Order {
    let ln_gap: Vec<f64> = (grid.j_min..=grid.j_max)
        .map(|j| h.ln_at_scale(j as f64) - g.ln_at_scale(j as f64))
        .collect();
    if ln_gap.len() < 2 || ln_gap.iter().any(|v| !v.is_finite()) {
        return Order::Inconclusive;
    }
    let threshold = ORDER_THRESHOLD.ln();
    let tail = &ln_gap[ln_gap.len() / 2..];
    let last = ln_gap[ln_gap.len() - 1];
    let eps = 1e-12;
    if last < threshold
        && tail
            .windows(2)
            .all(|w| w[1] <= w[0] + eps * w[0].abs().max(1.0))
    {
        return Order::Smaller;
    }
    if -last < threshold
        && tail
            .windows(2)
            .all(|w| w[1] >= w[0] - eps * w[0].abs().max(1.0))
    {
        return Order::Larger;
    }
    let (lo, hi) = ln_gap
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi - lo <= EQUIVALENCE_BAND.ln() {
        return Order::Equivalent;
    }
    Order::Inconclusive
}

/// The α-grid used by [`is_zero_dimensional`].
pub const ZERO_DIM_ALPHAS: [f64; 3] = [0.5, 0.1, 0.01];

/// `Yes` iff `h ≺ x^α` for every α in `alphas`; `No` as soon as some
/// comparison is decided the other way or as equivalent.
pub fn is_zero_dimensional(h: &DimensionFunction, alphas: &[f64], grid: SampleGrid) -> Verdict {
    let mut all = true;
    for &a in alphas {
        match compare(h, &DimensionFunction::power(a), grid) {
            Order::Smaller => {}
            Order::Larger | Order::Equivalent => return Verdict::No,
            Order::Inconclusive => all = false,
        }
    }
    if all {
        Verdict::Yes
    } else {
        Verdict::Inconclusive
    }
}

/// Compact form used on command lines: `identity`, `power:α`,
/// `inverse-log:θ`, `power-log:α,θ,C`.
impl std::str::FromStr for DimensionFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {a:?} in gauge {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match (name.trim(), nums.as_slice()) {
            ("identity", []) => Ok(Self::identity()),
            ("power", &[a]) => Ok(Self::power(a)),
            ("inverse-log", &[t]) => Ok(Self::inverse_log(t)),
            ("power-log", &[a, t, c]) => Ok(Self::power_log(a, t, c)),
            _ => Err(Error::Parse(format!(
                "unknown gauge {s:?}; expected identity, power:α, inverse-log:θ or power-log:α,θ,C"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn evaluate_examples() {
        assert_relative_eq!(
            DimensionFunction::power(0.5).evaluate(0.25).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            DimensionFunction::power(1.0).evaluate(0.3).unwrap(),
            0.3,
            epsilon = 1e-15
        );
        let x = (-2.0f64).exp();
        assert_relative_eq!(
            DimensionFunction::inverse_log(1.0).evaluate(x).unwrap(),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn evaluate_domain_errors() {
        let h = DimensionFunction::power(0.5);
        assert!(matches!(h.evaluate(0.0), Err(Error::Domain { .. })));
        assert!(matches!(h.evaluate(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(
            h.with_x_max(0.5).evaluate(0.6),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn builtins_vanish_at_zero() {
        for h in [
            DimensionFunction::power(0.3),
            DimensionFunction::inverse_log(1.0),
            DimensionFunction::power_log(0.5, 2.0, 1.0),
        ] {
            // logarithmic families decay too slowly for the proxy to fire at
            // j = 40, so they are probed at the decision depth
            let depth = match h.family {
                Family::Power { .. } => 40.0,
                _ => DECISION_DEPTH as f64,
            };
            let fine = h.ln_at_scale(depth);
            let coarse = h.ln_at_scale(1.0);
            assert!(fine < coarse + 1e-3f64.ln(), "{h:?}");
        }
        assert!(DimensionFunction::power(0.7).is_nondecreasing_on(1..=40));
        assert!(DimensionFunction::inverse_log(2.0).is_nondecreasing_on(1..=40));
    }

    #[test]
    fn doubling_power() {
        match DimensionFunction::power(0.7).is_doubling(2.0, 39).unwrap() {
            Doubling::Yes { c } => assert_relative_eq!(c, 2f64.powf(0.7), epsilon = 1e-12),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn doubling_inverse_log() {
        // oracle: max over j = 2..40 of log(1/x)/log(1/(2x)) = j/(j-1)
        let oracle = (2..=40)
            .map(|j| j as f64 / (j as f64 - 1.0))
            .fold(0.0, f64::max);
        assert_eq!(oracle, 2.0);
        match DimensionFunction::inverse_log(1.0)
            .is_doubling(2.0, 39)
            .unwrap()
        {
            Doubling::Yes { c } => {
                assert_relative_eq!(c, oracle, epsilon = 1e-12);
                assert!(c >= 1.0);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn doubling_table_fails() {
        let pairs: Vec<(f64, f64)> = (1..=20)
            .map(|j| (2f64.powi(-j), 2f64.powi(-j * j)))
            .collect();
        // oracle ratios 2^{2j-1} grow without bound
        let ratios: Vec<f64> = (2..=20).map(|j| 2f64.powi(2 * j - 1)).collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]));
        let h = DimensionFunction::table(&pairs).unwrap();
        assert_eq!(h.is_doubling(2.0, 20).unwrap(), Doubling::Inconclusive);
    }

    #[test]
    fn compare_examples() {
        let g = DimensionFunction::power(0.5);
        let grid = SampleGrid::default();
        assert_eq!(
            compare(&g, &DimensionFunction::power(0.7), grid),
            Order::Smaller
        );
        assert_eq!(
            compare(&g, &DimensionFunction::power_log(0.5, 0.0, 3.0), grid),
            Order::Equivalent
        );
        // Δ_j = 2^{-0.1 j}·j·ln 2: peaks near j = 14 then decays; below 1e-3
        // well before j = 4096.
        let tab: Vec<f64> = (1..=4096)
            .map(|j| 2f64.powf(-0.1 * j as f64) * j as f64 * std::f64::consts::LN_2)
            .collect();
        assert!(tab[39] > ORDER_THRESHOLD && tab[4095] < ORDER_THRESHOLD);
        assert_eq!(
            compare(
                &DimensionFunction::inverse_log(1.0),
                &DimensionFunction::power(0.1),
                grid
            ),
            Order::Smaller
        );
    }

    #[test]
    fn gap_examples() {
        let x = 0.125;
        assert_relative_eq!(
            gap(
                &DimensionFunction::power(1.0),
                &DimensionFunction::power(2.0),
                x
            )
            .unwrap(),
            0.125
        );
        let h = DimensionFunction::inverse_log(1.0);
        assert_relative_eq!(gap(&h, &h, 0.01).unwrap(), 1.0);
        let v = gap(
            &DimensionFunction::power(0.5),
            &DimensionFunction::power_log(0.5, 1.0, 1.0),
            2f64.powi(-8),
        )
        .unwrap();
        assert_relative_eq!(v, 8.0 * std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn gap_division_by_zero() {
        let g = DimensionFunction::table(&[(0.5, 1.0)]).unwrap();
        assert!(matches!(
            gap(&g, &DimensionFunction::power(1.0), 0.25),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_relative_eq!(
            DimensionFunction::power(2.0).inverse(0.25, 1e-12).unwrap(),
            0.5,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            DimensionFunction::power(1.0).inverse(0.3, 1e-12).unwrap(),
            0.3,
            epsilon = 1e-10
        );
        let x = DimensionFunction::inverse_log(1.0)
            .inverse(0.5, 1e-10)
            .unwrap();
        assert_relative_eq!(x, (-2.0f64).exp(), max_relative = 1e-8);
    }

    #[test]
    fn inverse_errors() {
        let h = DimensionFunction::power(1.0);
        assert!(matches!(h.inverse(2.0, 1e-9), Err(Error::Range { .. })));
        let t = DimensionFunction::table(&[(0.1, 0.5), (0.2, 0.3)]).unwrap();
        assert!(matches!(t.inverse(0.4, 1e-9), Err(Error::Unsupported(_))));
    }

    #[test]
    fn zero_dimensional_examples() {
        let grid = SampleGrid::default();
        assert_eq!(
            is_zero_dimensional(&DimensionFunction::inverse_log(1.0), &ZERO_DIM_ALPHAS, grid),
            Verdict::Yes
        );
        assert_eq!(
            is_zero_dimensional(&DimensionFunction::power(0.3), &ZERO_DIM_ALPHAS, grid),
            Verdict::No
        );
        assert_eq!(
            is_zero_dimensional(
                &DimensionFunction::power_log(0.2, 3.0, 1.0),
                &ZERO_DIM_ALPHAS,
                grid
            ),
            Verdict::No
        );
    }

    #[test]
    fn serde_shape() {
        let h = DimensionFunction::power_log(0.5, 1.0, 2.0);
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(
            s,
            r#"{"family":"power-log","params":{"alpha":0.5,"theta":1.0,"c":2.0},"x_max":1.0}"#
        );
        let back: DimensionFunction =
            serde_json::from_str(r#"{"family":"power","params":{"alpha":0.5}}"#).unwrap();
        assert_eq!(back, DimensionFunction::power(0.5));
    }

    fn arb_gauge() -> impl Strategy<Value = DimensionFunction> {
        prop_oneof![
            (0.05f64..2.0).prop_map(DimensionFunction::power),
            (0.2f64..3.0).prop_map(DimensionFunction::inverse_log),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn power_doubling_is_exact(alpha in 0.01f64..3.0, j in 1u32..60) {
            let h = DimensionFunction::power(alpha);
            let x = 2f64.powi(-(j as i32));
            let r = h.value(2.0 * x) / h.value(x);
            prop_assert!((r - 2f64.powf(alpha)).abs() <= 1e-12 * r);
        }

        #[test]
        fn inverse_undoes_evaluate(h in arb_gauge(), e in 1.0f64..50.0) {
            let x = 2f64.powf(-e);
            let y = h.value(x);
            let back = h.inverse(y, 1e-10).unwrap();
            prop_assert!((h.value(back) - y).abs() <= 1e-9 * y);
        }

        #[test]
        fn compare_is_antisymmetric(a in 0.05f64..1.5, b in 0.05f64..1.5, th in 0.0f64..4.0) {
            let g = DimensionFunction::power(a);
            let h = DimensionFunction::power_log(b, th, 1.0);
            let grid = SampleGrid::default();
            match compare(&g, &h, grid) {
                Order::Smaller => prop_assert_eq!(compare(&h, &g, grid), Order::Larger),
                Order::Larger => prop_assert_eq!(compare(&h, &g, grid), Order::Smaller),
                _ => {}
            }
        }

        #[test]
        fn gap_is_reciprocal(a in 0.05f64..2.0, th in 0.1f64..3.0, x in 1e-6f64..0.9) {
            let g = DimensionFunction::power(a);
            let h = DimensionFunction::inverse_log(th);
            let p = gap(&g, &h, x).unwrap() * gap(&h, &g, x).unwrap();
            prop_assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parses_compact_gauges() {
        assert_eq!(
            "power:0.5".parse::<DimensionFunction>().unwrap(),
            DimensionFunction::power(0.5)
        );
        assert_eq!(
            "identity".parse::<DimensionFunction>().unwrap(),
            DimensionFunction::identity()
        );
        assert_eq!(
            "power-log:1, 3, 1".parse::<DimensionFunction>().unwrap(),
            DimensionFunction::power_log(1.0, 3.0, 1.0)
        );
        assert!("inverse-log".parse::<DimensionFunction>().is_err());
        assert!("cubic:2".parse::<DimensionFunction>().is_err());
    }
}
