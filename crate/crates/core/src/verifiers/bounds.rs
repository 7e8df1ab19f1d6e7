use serde::{Deserialize, Serialize};

use super::constants::BOUND_TOL;
use super::Outcome;
use crate::constructors::{furstenberg_set, FurstenbergInstance, FurstenbergParams, Placement};
use crate::dimfn::DimensionFunction;
use crate::error::{Error, Result};
use crate::estimators::{box_count, box_dimension, dyadic_content, DimensionEstimate};
use crate::geometry::ScaleSequence;

/// Fan of `2^⌊mβ⌋` segments with `α`-dimensional Cantor fibres.
pub fn witness_params(alpha: f64, beta: f64, m: u32) -> Result<FurstenbergParams> {
    let levels = (m as f64 * beta).floor() as u32;
    FurstenbergParams::alpha_beta(alpha, beta, Placement::ThroughOriginFan, levels, m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub alpha: f64,
    pub beta: f64,
    /// `max(α + β/2, 2α + β - 1)`.
    pub bound: f64,
    pub tol: f64,
    pub estimate: DimensionEstimate,
    /// `slope - bound`.
    pub margin: f64,
    pub outcome: Outcome,
}

/// Box-dimension slope of the instance against `max(α+β/2, 2α+β-1) - tol`.
pub fn check_dimension_bound(inst: &FurstenbergInstance) -> Result<BoundReport> {
    let (alpha, beta) = match (inst.params.alpha(), inst.params.beta()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Precondition(
                "instance does not carry α and β".into(),
            ))
        }
    };
    let bound = f64::max(alpha + beta / 2.0, 2.0 * alpha + beta - 1.0);
    let estimate = box_dimension(&inst.grid, None)?;
    let margin = estimate.slope - bound;
    Ok(BoundReport {
        alpha,
        beta,
        bound,
        tol: BOUND_TOL,
        outcome: Outcome::from_bool(estimate.slope >= bound - BOUND_TOL),
        margin,
        estimate,
    })
}

/// Midpoint of `0 < ε < (β - 2s)/(1 + 2s - β)`; `1` when the right side is
/// unbounded.
pub fn hyperdyadic_epsilon(beta: f64, s: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("β = {beta} not in (0, 1]")));
    }
    if !(s >= 0.0) {
        return Err(Error::InvalidParameter(format!("s = {s} is negative")));
    }
    if s >= beta / 2.0 {
        return Err(Error::Domain {
            value: s,
            x_max: beta / 2.0,
        });
    }
    let q = 1.0 + 2.0 * s - beta;
    if q <= 0.0 {
        return Ok(1.0);
    }
    let eps = (beta - 2.0 * s) / (2.0 * q);
    assert!(1.0 / (1.0 + eps) - q > 0.0, "ε = {eps} fails positivity");
    Ok(eps)
}

/// One hyperdyadic bucket of the single-level coverings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperdyadicRow {
    pub k: u32,
    pub b_k: f64,
    /// Levels `j` whose cell balls (radius `2^{-j}/√2`) fall in bucket `k`.
    pub levels: Vec<u32>,
    pub balls: usize,
    /// `Σ_j N_j r_j^s` over those levels.
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroDimReport {
    pub theta: f64,
    pub beta: f64,
    pub m: u32,
    pub threshold: f64,
    pub estimate: DimensionEstimate,
    /// Target exponent of the trace, `β/4`.
    pub s: f64,
    pub epsilon: f64,
    pub trace: Vec<HyperdyadicRow>,
    pub outcome: Outcome,
}

/// Zero-dimensional fibres (`𝔥 = 1/log^θ(1/x)`) over a `β`-dimensional fan;
/// passes iff the box-dimension slope is at least `β/2 - 0.1`.
pub fn zero_dim_experiment(theta: f64, beta: f64, m: u32) -> Result<ZeroDimReport> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "θ = {theta} must be positive"
        )));
    }
    let levels = (m as f64 * beta).floor() as u32;
    let params = FurstenbergParams::gauges(
        DimensionFunction::inverse_log(theta),
        DimensionFunction::power(beta),
        Placement::ThroughOriginFan,
        levels,
        m,
    );
    let inst = furstenberg_set(&params)?;
    let estimate = box_dimension(&inst.grid, None)?;
    let threshold = beta / 2.0 - BOUND_TOL;
    let s = beta / 4.0;
    let epsilon = hyperdyadic_epsilon(beta, s)?;
    let trace = hyperdyadic_trace(&inst, epsilon, s)?;
    Ok(ZeroDimReport {
        theta,
        beta,
        m,
        threshold,
        outcome: Outcome::from_bool(estimate.slope >= threshold),
        estimate,
        s,
        epsilon,
        trace,
    })
}

fn hyperdyadic_trace(inst: &FurstenbergInstance, eps: f64, s: f64) -> Result<Vec<HyperdyadicRow>> {
    let m = inst.resolution();
    let cell = inst.grid.cell_size();
    let mut k_max = 1;
    while (1.0 + eps).powi(k_max as i32 - 1) < m as f64 {
        k_max += 1;
    }
    let scales = ScaleSequence::hyperdyadic(eps, 1, k_max.max(2))?;
    let mut rows: Vec<HyperdyadicRow> = (1..=k_max)
        .map(|k| HyperdyadicRow {
            k,
            b_k: scales.value(k),
            levels: Vec::new(),
            balls: 0,
            weighted: 0.0,
        })
        .collect();
    for j in 0..=m {
        let r = (-(j as f64)).exp2() * std::f64::consts::FRAC_1_SQRT_2;
        if r < cell {
            break;
        }
        let k = scales.bucket(r);
        if let Some(row) = rows.iter_mut().find(|row| row.k == k) {
            let n = box_count(&inst.grid, j)?;
            row.levels.push(j);
            row.balls += n;
            row.weighted += n as f64 * r.powf(s);
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub j: u32,
    pub boxes: usize,
    /// `N_j / log(1/d_j)`, `d_j` the level-`j` box diameter.
    pub cost_log: f64,
    /// `N_j / log^{3/2}(1/d_j)`.
    pub cost_log32: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub m: u32,
    pub rows: Vec<ConjectureRow>,
    pub content_log: f64,
    pub content_log32: f64,
}

/// Exploratory: `𝔥 = 𝔤 = 1/log(1/x)`; uniform-cover costs and dyadic
/// contents under `1/log` and `1/log^{3/2}`. No verdict.
pub fn conjecture_experiment(m: u32) -> Result<ConjectureReport> {
    let g = DimensionFunction::inverse_log(1.0);
    let params =
        FurstenbergParams::gauges(g.clone(), g.clone(), Placement::ThroughOriginFan, m / 2, m);
    let inst = furstenberg_set(&params)?;
    let g32 = DimensionFunction::inverse_log(1.5);
    let rows = (1..=m)
        .map(|j| {
            let boxes = box_count(&inst.grid, j)?;
            let d = (-(j as f64)).exp2() * std::f64::consts::SQRT_2;
            Ok(ConjectureRow {
                j,
                boxes,
                cost_log: boxes as f64 * g.value(d),
                cost_log32: boxes as f64 * g32.value(d),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConjectureReport {
        m,
        rows,
        content_log: dyadic_content(&inst.grid, &g, m)?.value,
        content_log32: dyadic_content(&inst.grid, &g32, m)?.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_examples() {
        assert!((hyperdyadic_epsilon(1.0, 0.25).unwrap() - 0.5).abs() < 1e-15);
        assert!((hyperdyadic_epsilon(0.5, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            hyperdyadic_epsilon(1.0, 0.5),
            Err(Error::Domain { .. })
        ));
        // 1 + 2s - β = 0
        assert_eq!(hyperdyadic_epsilon(1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn epsilon_positivity_by_substitution() {
        for bi in 1..=20 {
            let beta = bi as f64 / 20.0;
            for si in 0..20 {
                let s = beta / 2.0 * si as f64 / 20.0;
                let eps = hyperdyadic_epsilon(beta, s).unwrap();
                assert!(eps > 0.0);
                assert!(
                    1.0 / (1.0 + eps) - (1.0 + 2.0 * s - beta) > 0.0,
                    "{beta} {s}"
                );
            }
        }
    }

    #[test]
    fn full_fibres_fill_the_square() {
        let inst = furstenberg_set(&witness_params(1.0, 1.0, 9).unwrap()).unwrap();
        let r = check_dimension_bound(&inst).unwrap();
        assert_eq!(r.bound, 2.0);
        assert_eq!(r.outcome, Outcome::Consistent, "{}", r.estimate.slope);
    }

    #[test]
    fn gauge_instance_has_no_alpha() {
        let p = FurstenbergParams::gauges(
            DimensionFunction::inverse_log(1.0),
            DimensionFunction::power(0.5),
            Placement::ThroughOriginFan,
            4,
            8,
        );
        let inst = furstenberg_set(&p).unwrap();
        assert!(matches!(
            check_dimension_bound(&inst),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_dim_slope_grows_with_beta() {
        let lo = zero_dim_experiment(1.0, 0.4, 10).unwrap();
        let hi = zero_dim_experiment(1.0, 0.8, 10).unwrap();
        assert!(hi.estimate.slope >= lo.estimate.slope);
        assert!(!hi.trace.is_empty());
        assert!(hi.trace.iter().any(|r| r.balls > 0));
    }

    #[test]
    fn conjecture_costs_are_ordered() {
        let r = conjecture_experiment(8).unwrap();
        // log(1/d) > 1 from j = 2 on
        for row in r.rows.iter().filter(|row| row.j >= 2) {
            assert!(row.cost_log32 <= row.cost_log);
        }
        assert!(r.content_log > 0.0);
    }
}
