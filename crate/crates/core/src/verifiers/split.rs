use serde::{Deserialize, Serialize};

use super::constants::C_SPLIT;
use super::Outcome;
use crate::dimfn::DimensionFunction;
use crate::error::{Error, Result};
use crate::estimators::capped_content;
use crate::geometry::GridSet;

/// Tolerance for gauge inversion in the separation requirement.
const INVERSE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub eta: f64,
    pub delta: f64,
    /// `δ`-capped dyadic content of the whole input.
    pub content: f64,
    /// Per-side floor `η / C_SPLIT`.
    pub threshold: f64,
    /// `𝔥^{-1}(η/8)`.
    pub required_separation: f64,
    /// Arc-length span of the occupied cells of `I⁻` and `I⁺`.
    pub left: Option<[f64; 2]>,
    pub right: Option<[f64; 2]>,
    pub left_content: f64,
    pub right_content: f64,
    pub separation: f64,
    pub outcome: Outcome,
}

impl SplitReport {
    pub fn pass(&self) -> bool {
        self.outcome == Outcome::Consistent
    }
}

/// `𝔥^{-1}(y)`, reading values below the invertible range as `0`.
pub(crate) fn gauge_inverse(g: &DimensionFunction, y: f64) -> Result<f64> {
    match g.inverse(y, INVERSE_TOL) {
        Err(Error::Range { value, lo, .. }) if value < lo => Ok(0.0),
        other => other,
    }
}

fn subset(cells: &[u32], m: u32) -> GridSet {
    let mut g = GridSet::new(1, m).expect("resolution of an existing grid");
    for &x in cells {
        g.insert(x, 0);
    }
    g
}

/// Smallest `n ≥ 1` with `content(first n cells) ≥ thr`, by bisection
/// (content is monotone under inclusion).
fn shortest(
    cells: &[u32],
    m: u32,
    g: &DimensionFunction,
    delta: f64,
    thr: f64,
) -> Result<Option<(usize, f64)>> {
    let content = |n: usize| capped_content(&subset(&cells[..n], m), g, delta).map(|c| c.value);
    let total = content(cells.len())?;
    if total < thr {
        return Ok(None);
    }
    let (mut lo, mut hi, mut best) = (0usize, cells.len(), total);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let c = content(mid)?;
        if c >= thr {
            hi = mid;
            best = c;
        } else {
            lo = mid;
        }
    }
    Ok(Some((hi, best)))
}

/// Splits a linear set into a leftmost and a rightmost piece, each of
/// `δ`-capped content `≥ η/8`, separated by `≥ 𝔥^{-1}(η/8)`.
///
/// The cut points are the cell boundaries. The left piece is the shortest
/// admissible prefix and the right piece the shortest admissible suffix, so
/// their gap is the largest any admissible pair can have: failure here means
/// no pair exists.
pub fn split_interval(
    mass: &GridSet,
    g: &DimensionFunction,
    eta: f64,
    delta: f64,
) -> Result<SplitReport> {
    if mass.dim() != 1 {
        return Err(Error::InvalidParameter(
            "split_interval needs a linear set".into(),
        ));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "η must be positive, got {eta}"
        )));
    }
    let m = mass.resolution();
    let content = capped_content(mass, g, delta)?.value;
    if content < eta {
        return Err(Error::Precondition(format!(
            "content {content} is below η = {eta}"
        )));
    }
    let required = gauge_inverse(g, eta / 8.0)?;
    if !(required < delta) {
        return Err(Error::Precondition(format!(
            "𝔥^-1(η/8) = {required} is not below δ = {delta}"
        )));
    }
    let threshold = eta / C_SPLIT;
    let cells: Vec<u32> = mass.iter().map(|[x, _]| x).collect();
    let mut reversed = cells.clone();
    reversed.reverse();
    let h = mass.cell_size();
    let left = shortest(&cells, m, g, delta, threshold)?;
    let right = shortest(&reversed, m, g, delta, threshold)?;
    let mut report = SplitReport {
        eta,
        delta,
        content,
        threshold,
        required_separation: required,
        left: None,
        right: None,
        left_content: 0.0,
        right_content: 0.0,
        separation: 0.0,
        outcome: Outcome::Violated,
    };
    if let (Some((nl, cl)), Some((nr, cr))) = (left, right) {
        let l = [cells[0] as f64 * h, (cells[nl - 1] + 1) as f64 * h];
        let r = [reversed[nr - 1] as f64 * h, (reversed[0] + 1) as f64 * h];
        let separation = r[0] - l[1];
        report.left = Some(l);
        report.right = Some(r);
        report.left_content = cl;
        report.right_content = cr;
        report.separation = separation;
        report.outcome = Outcome::from_bool(nl + nr <= cells.len() && separation >= required);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{cantor_set, CantorSpec};
    use crate::estimators::dyadic_content;

    #[test]
    fn full_interval_identity() {
        let full = GridSet::full(1, 10).unwrap();
        let r = split_interval(&full, &DimensionFunction::identity(), 0.5, 0.25).unwrap();
        assert!(r.pass());
        let (l, rt) = (r.left.unwrap(), r.right.unwrap());
        assert!(l[0] >= 0.0 && l[1] <= 0.375);
        assert!(rt[0] >= 0.625 && rt[1] <= 1.0);
        assert!(r.separation >= 1.0 / 16.0);
        assert!((l[1] - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn two_atoms_are_the_split() {
        let mut g = GridSet::new(1, 8).unwrap();
        g.insert(0, 0);
        g.insert(255, 0);
        let gauge = DimensionFunction::power(0.5);
        let eta = dyadic_content(&g, &gauge, 8).unwrap().value;
        let r = split_interval(&g, &gauge, eta, 0.5).unwrap();
        assert!(r.pass());
        let h = g.cell_size();
        assert_eq!(r.left.unwrap(), [0.0, h]);
        assert_eq!(r.right.unwrap(), [1.0 - h, 1.0]);
    }

    #[test]
    fn content_below_eta_is_a_precondition_error() {
        let mut g = GridSet::new(1, 8).unwrap();
        g.insert(3, 0);
        let err = split_interval(&g, &DimensionFunction::identity(), 0.5, 0.25).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn separation_not_below_delta_is_a_precondition_error() {
        let full = GridSet::full(1, 8).unwrap();
        // 𝔥^{-1}(1/8) = 1/8 for the identity
        let err = split_interval(&full, &DimensionFunction::identity(), 1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn cantor_split_meets_both_requirements() {
        let c = cantor_set(&CantorSpec::new(1.0 / 3.0, 7).unwrap(), 13).unwrap();
        let gauge = DimensionFunction::power((2f64).ln() / 3f64.ln());
        let eta = dyadic_content(&c, &gauge, 13).unwrap().value;
        let r = split_interval(&c, &gauge, eta, 0.25).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.left_content >= eta / 8.0 && r.right_content >= eta / 8.0);
        assert!(r.separation >= r.required_separation);
    }

    #[test]
    fn tiny_inverse_reads_as_zero() {
        let g = DimensionFunction::inverse_log(1.0);
        assert_eq!(gauge_inverse(&g, 1e-4).unwrap(), 0.0);
        let x = gauge_inverse(&g, 0.25).unwrap();
        assert!((x - (-4f64).exp()).abs() < 1e-9);
    }
}
