use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::ASequence;
use super::Outcome;
use crate::constructors::FurstenbergInstance;
use crate::dimfn::DimensionFunction;
use crate::error::{Error, Result};
use crate::estimators::capped_content;
use crate::geometry::{
    partition_by_scale, restrict_to_segment, BallFamily, GridSet, ScaleSequence,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionTrace {
    pub index: usize,
    pub angle: f64,
    /// `(k, content of ℓ_e ∩ E_k)` for every non-empty bucket.
    pub contents: Vec<(u32, f64)>,
    /// Buckets whose threshold the direction reaches.
    pub members: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub delta: f64,
    pub a_norm: f64,
    /// `(k, a_k, a_k/(2‖a‖₁))` for every non-empty bucket.
    pub thresholds: Vec<(u32, f64, f64)>,
    /// `L_k` as direction indices.
    pub l_k: BTreeMap<u32, Vec<usize>>,
    /// Directions in no `L_k`.
    pub missing: Vec<usize>,
    pub traces: Vec<DirectionTrace>,
    pub outcome: Outcome,
}

impl DecompositionReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,a_k,threshold,members\n");
        for &(k, a, t) in &self.thresholds {
            let n = self.l_k.get(&k).map_or(0, Vec::len);
            s.push_str(&format!("{k},{a:e},{t:e},{n}\n"));
        }
        s
    }
}

fn covering_gap(grid: &GridSet, covered: &GridSet) -> Option<Error> {
    let mut count = 0;
    let mut first = None;
    for [x, y] in grid.iter() {
        if !covered.contains(x, y) {
            count += 1;
            first.get_or_insert([x, y]);
        }
    }
    first.map(|first| Error::CoveringGap { count, first })
}

/// Assigns each direction to every `L_k = {e : ℋ^𝔥_δ(ℓ_e ∩ E_k) ≥ a_k/(2‖a‖₁)}`.
///
/// Radii are bucketed on the dyadic ladder, `E_k` is the part of the set
/// whose cell centres lie in a ball of `J_k`, and contents are capped at
/// `δ = δ_E`. The check passes iff every direction lands in some `L_k`.
pub fn decompose_directions(
    inst: &FurstenbergInstance,
    covering: &BallFamily,
    frak_h: &DimensionFunction,
    a: &ASequence,
) -> Result<DecompositionReport> {
    let m = inst.resolution();
    let all: Vec<usize> = (0..covering.len()).collect();
    if let Some(e) = covering_gap(&inst.grid, &covering.mask(&all, m)?) {
        return Err(e);
    }
    let (a_norm, _) = a.norm()?;
    let delta = inst.delta_e;
    let scales = ScaleSequence::dyadic(1, m + 1)?;
    let buckets = partition_by_scale(covering, &scales);
    let parts: Vec<(u32, GridSet, f64, f64)> = buckets
        .par_iter()
        .map(|(&k, idx)| {
            let mut e_k = covering.mask(idx, m)?;
            e_k.intersect_with(&inst.grid)?;
            let a_k = a.term(k)?;
            Ok((k, e_k, a_k, a_k / (2.0 * a_norm)))
        })
        .collect::<Result<_>>()?;
    let traces: Vec<DirectionTrace> = inst
        .segments
        .par_iter()
        .enumerate()
        .map(|(i, seg)| {
            let mut contents = Vec::with_capacity(parts.len());
            let mut members = Vec::new();
            for (k, e_k, _, thr) in &parts {
                let fiber = restrict_to_segment(e_k, seg);
                let c = capped_content(&fiber, frak_h, delta)?.value;
                contents.push((*k, c));
                if c >= *thr {
                    members.push(*k);
                }
            }
            Ok(DirectionTrace {
                index: i,
                angle: inst.directions[i].angle(),
                contents,
                members,
            })
        })
        .collect::<Result<_>>()?;
    let mut l_k: BTreeMap<u32, Vec<usize>> = parts.iter().map(|p| (p.0, Vec::new())).collect();
    let mut missing = Vec::new();
    for t in &traces {
        if t.members.is_empty() {
            missing.push(t.index);
        }
        for k in &t.members {
            l_k.get_mut(k).expect("bucket exists").push(t.index);
        }
    }
    Ok(DecompositionReport {
        delta,
        a_norm,
        thresholds: parts.iter().map(|p| (p.0, p.2, p.3)).collect(),
        l_k,
        outcome: Outcome::from_bool(missing.is_empty()),
        missing,
        traces,
    })
}

/// Fine balls (level `fine`) on the fibres of the first half of the
/// directions, coarse balls (level `coarse`) on the rest of the set.
pub fn adversarial_covering(
    inst: &FurstenbergInstance,
    fine: u32,
    coarse: u32,
) -> Result<BallFamily> {
    let m = inst.resolution();
    let mut fine_cells = GridSet::new(2, m)?;
    let h = inst.grid.cell_size();
    for seg in &inst.segments[..inst.segments.len() / 2] {
        for (_, p) in seg.sampler(0.25 * h).iter() {
            if let Some([x, y]) = inst.grid.cell_of(p) {
                if inst.grid.contains(x, y) {
                    fine_cells.insert(x, y);
                }
            }
        }
    }
    let mut rest = GridSet::new(2, m)?;
    for [x, y] in inst.grid.iter() {
        if !fine_cells.contains(x, y) {
            rest.insert(x, y);
        }
    }
    let mut balls = BallFamily::covering_cells(&fine_cells, fine)?.balls;
    balls.extend(BallFamily::covering_cells(&rest, coarse)?.balls);
    BallFamily::new(balls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{furstenberg_set, FurstenbergParams, Placement};
    use crate::geometry::Ball;
    use crate::verifiers::series::CSource;

    fn instance() -> FurstenbergInstance {
        let p = FurstenbergParams::alpha_beta(0.5, 1.0, Placement::ThroughOriginFan, 6, 8).unwrap();
        furstenberg_set(&p).unwrap()
    }

    fn recipe() -> ASequence {
        ASequence::Kakeya {
            frak_h: DimensionFunction::power(0.5),
            c: CSource::Power { exponent: 0.0 },
            h: DimensionFunction::power_log(1.0, 3.0, 1.0),
        }
    }

    #[test]
    fn single_scale_puts_everything_in_one_bucket() {
        let inst = instance();
        let cover = BallFamily::covering_cells(&inst.grid, 3).unwrap();
        let r =
            decompose_directions(&inst, &cover, &DimensionFunction::power(0.5), &recipe()).unwrap();
        assert_eq!(r.outcome, Outcome::Consistent);
        assert_eq!(r.l_k.len(), 1);
        let (&k, members) = r.l_k.iter().next().unwrap();
        assert_eq!(k, 4);
        assert_eq!(members.len(), inst.directions.len());
    }

    #[test]
    fn adversarial_covering_still_covers_every_direction() {
        let inst = instance();
        let cover = adversarial_covering(&inst, 7, 2).unwrap();
        let r =
            decompose_directions(&inst, &cover, &DimensionFunction::power(0.5), &recipe()).unwrap();
        assert!(r.l_k.len() >= 2);
        assert_eq!(r.outcome, Outcome::Consistent, "missing {:?}", r.missing);
        let union: std::collections::BTreeSet<usize> = r.l_k.values().flatten().copied().collect();
        assert_eq!(union.len(), inst.directions.len());
    }

    #[test]
    fn gap_in_the_covering_is_an_error() {
        let inst = instance();
        let cover = BallFamily::new(vec![Ball {
            center: [0.0, 0.0],
            radius: 0.1,
        }])
        .unwrap();
        let err = decompose_directions(&inst, &cover, &DimensionFunction::power(0.5), &recipe());
        assert!(matches!(err, Err(Error::CoveringGap { .. })));
    }
}
