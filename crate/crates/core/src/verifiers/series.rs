use serde::{Deserialize, Serialize};

use super::constants::{SERIES_CONVERGE, SERIES_DIVERGE};
use crate::dimfn::DimensionFunction;
use crate::error::{Error, Result};
use crate::kakeya::{cdelta, Phi};

use std::f64::consts::LN_2;

/// Terms summed explicitly before the tail estimate in [`ASequence::norm`].
pub const NORM_TERMS: u32 = 512;

/// Source of `C(δ)` in the Kakeya series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum CSource {
    /// `C(δ)` from the Frostman profile.
    Maximal { phi: Phi },
    /// `C(δ) = δ^exponent`.
    Power { exponent: f64 },
}

impl CSource {
    fn ln_at_scale(&self, k: u32) -> Result<f64> {
        match self {
            CSource::Maximal { phi } => Ok(cdelta(phi, (-(k as f64)).exp2())?.ln()),
            CSource::Power { exponent } => Ok(-exponent * k as f64 * LN_2),
        }
    }
}

/// A non-negative sequence `a_k`, `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ASequence {
    /// `values[i] = a_{k_min + i}`, zero elsewhere.
    Explicit { k_min: u32, values: Vec<f64> },
    /// `√(𝔥²(2^{-k}) C(2^{-k}) / h(2^{-k}))`.
    Kakeya {
        frak_h: DimensionFunction,
        c: CSource,
        h: DimensionFunction,
    },
    /// `(𝔥(2^{-k}) √𝔤(2^{-k}) / h(2^{-k}))^{2α/(2α+1)}`.
    Combinatorial {
        frak_h: DimensionFunction,
        frak_g: DimensionFunction,
        h: DimensionFunction,
        alpha: f64,
    },
    /// `c · k^{-p}`.
    InversePower { c: f64, p: f64 },
}

impl ASequence {
    pub fn label(&self) -> &'static str {
        match self {
            ASequence::Explicit { .. } => "explicit",
            ASequence::Kakeya { .. } => "kakeya",
            ASequence::Combinatorial { .. } => "combinatorial",
            ASequence::InversePower { .. } => "inverse-power",
        }
    }

    /// Power gauges `𝔥 = x^α`, `C(δ) = δ^{β-1}`, `h = x^{2α+β-1} log^θ(1/x)`.
    /// Terms are `(k ln 2)^{-θ/2}`.
    pub fn kakeya_power(alpha: f64, beta: f64, theta: f64) -> Self {
        ASequence::Kakeya {
            frak_h: DimensionFunction::power(alpha),
            c: CSource::Power {
                exponent: beta - 1.0,
            },
            h: DimensionFunction::power_log(2.0 * alpha + beta - 1.0, theta, 1.0),
        }
    }

    /// Power gauges `𝔥 = x^α`, `𝔤 = x^β`, `h = x^{α+β/2} log^θ(1/x)`.
    pub fn combinatorial_power(alpha: f64, beta: f64, theta: f64) -> Self {
        ASequence::Combinatorial {
            frak_h: DimensionFunction::power(alpha),
            frak_g: DimensionFunction::power(beta),
            h: DimensionFunction::power_log(beta / 2.0 + alpha, theta, 1.0),
            alpha,
        }
    }

    /// `ln a_k`; `-∞` for zero terms.
    pub fn ln_term(&self, k: u32) -> Result<f64> {
        let kf = k as f64;
        Ok(match self {
            ASequence::Explicit { k_min, values } => {
                match k.checked_sub(*k_min).and_then(|i| values.get(i as usize)) {
                    Some(&v) => v.ln(),
                    None => f64::NEG_INFINITY,
                }
            }
            ASequence::Kakeya { frak_h, c, h } => {
                0.5 * (2.0 * frak_h.ln_at_scale(kf) + c.ln_at_scale(k)? - h.ln_at_scale(kf))
            }
            ASequence::Combinatorial {
                frak_h,
                frak_g,
                h,
                alpha,
            } => {
                let ln_delta =
                    frak_h.ln_at_scale(kf) + 0.5 * frak_g.ln_at_scale(kf) - h.ln_at_scale(kf);
                2.0 * alpha / (2.0 * alpha + 1.0) * ln_delta
            }
            ASequence::InversePower { c, p } => c.ln() - p * kf.ln(),
        })
    }

    pub fn term(&self, k: u32) -> Result<f64> {
        Ok(self.ln_term(k)?.exp())
    }

    /// `‖a‖₁` as the first [`NORM_TERMS`] terms plus a power-law tail.
    ///
    /// The tail integrates `a_N (x/N)^{-p}` from `N + 1/2`, with `p` the local
    /// exponent at `N`; a sequence whose local exponent is not above 1 is
    /// rejected as not summable.
    pub fn norm(&self) -> Result<(f64, f64)> {
        if let ASequence::Explicit { values, .. } = self {
            return Ok((values.iter().sum(), 0.0));
        }
        let mut sum = 0.0;
        for k in 1..=NORM_TERMS {
            sum += self.term(k)?;
        }
        let n = NORM_TERMS as f64;
        let (l0, l1) = (self.ln_term(NORM_TERMS - 1)?, self.ln_term(NORM_TERMS)?);
        if l1 == f64::NEG_INFINITY {
            return Ok((sum, 0.0));
        }
        let p = -(l1 - l0) / (n / (n - 1.0)).ln();
        if !(p > SERIES_CONVERGE) {
            return Err(Error::Precondition(format!(
                "a_k decays like k^-{p:.4}; not summable"
            )));
        }
        let tail = (l1 + p * n.ln() + (1.0 - p) * (n + 0.5).ln()).exp() / (p - 1.0);
        Ok((sum + tail, tail))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesVerdict {
    ConvergesNumerically,
    DivergesNumerically,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub theorem: String,
    pub k_terms: u32,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// `-d ln a_k / d ln k` between the last two terms.
    pub term_exponent: f64,
    /// `(K-1)(a_{K-1}/a_K - 1)`.
    pub raabe: f64,
    /// `ln(K-1)·(raabe - 1)`, consulted when `raabe` is within the band.
    pub bertrand: Option<f64>,
    pub verdict: SeriesVerdict,
}

impl SeriesReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,term,partial_sum\n");
        for (i, (t, p)) in self.terms.iter().zip(&self.partial_sums).enumerate() {
            s.push_str(&format!("{},{t:e},{p:e}\n", i + 1));
        }
        s
    }
}

fn classify(stat: f64) -> Option<SeriesVerdict> {
    if stat > SERIES_CONVERGE {
        Some(SeriesVerdict::ConvergesNumerically)
    } else if stat < SERIES_DIVERGE {
        Some(SeriesVerdict::DivergesNumerically)
    } else {
        None
    }
}

/// Partial sums of `a_1..a_K` and a tail-trend verdict.
///
/// The trend is a ratio test on the last two terms, refined so polynomial
/// decay is read correctly: Raabe's statistic `K(a_K/a_{K+1} - 1)` against
/// the band `[0.99, 1.01]`, then Bertrand's `ln K·(Raabe - 1)` inside it.
/// Plain `a_{K+1}/a_K` tends to 1 for every polynomial rate.
pub fn check_series_condition(seq: &ASequence, k_terms: u32) -> Result<SeriesReport> {
    if k_terms < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 terms, got {k_terms}"
        )));
    }
    let lns: Vec<f64> = (1..=k_terms)
        .map(|k| seq.ln_term(k))
        .collect::<Result<_>>()?;
    let terms: Vec<f64> = lns.iter().map(|l| l.exp()).collect();
    let mut partial_sums = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t;
        partial_sums.push(acc);
    }
    let kf = k_terms as f64;
    let (l0, l1) = (lns[lns.len() - 2], lns[lns.len() - 1]);
    let (term_exponent, raabe, bertrand, verdict) = if l1 == f64::NEG_INFINITY {
        (
            f64::INFINITY,
            f64::INFINITY,
            None,
            SeriesVerdict::ConvergesNumerically,
        )
    } else {
        let p = -(l1 - l0) / (kf / (kf - 1.0)).ln();
        let raabe = (kf - 1.0) * (l0 - l1).exp_m1();
        match classify(raabe) {
            Some(v) => (p, raabe, None, v),
            None => {
                let b = (kf - 1.0).ln() * (raabe - 1.0);
                (
                    p,
                    raabe,
                    Some(b),
                    classify(b).unwrap_or(SeriesVerdict::Inconclusive),
                )
            }
        }
    };
    Ok(SeriesReport {
        theorem: seq.label().into(),
        k_terms,
        terms,
        partial_sums,
        term_exponent,
        raabe,
        bertrand,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kakeya_theta3_converges_with_exponent_three_halves() {
        let r = check_series_condition(&ASequence::kakeya_power(0.5, 1.0, 3.0), 60).unwrap();
        assert_eq!(r.verdict, SeriesVerdict::ConvergesNumerically);
        assert!((r.term_exponent - 1.5).abs() < 1e-6);
        // terms are (k ln 2)^{-3/2}
        let t5 = (5.0 * LN_2).powf(-1.5);
        assert!((r.terms[4] - t5).abs() < 1e-12 * t5);
    }

    #[test]
    fn kakeya_theta2_is_harmonic_and_diverges() {
        let r = check_series_condition(&ASequence::kakeya_power(0.5, 1.0, 2.0), 60).unwrap();
        assert!((r.term_exponent - 1.0).abs() < 1e-6);
        assert_eq!(r.verdict, SeriesVerdict::DivergesNumerically);
    }

    #[test]
    fn kakeya_exponent_holds_for_other_parameters() {
        for &(a, b, th) in &[(0.7, 0.6, 3.0), (0.4, 0.9, 4.0), (0.9, 0.2, 2.5)] {
            let r = check_series_condition(&ASequence::kakeya_power(a, b, th), 60).unwrap();
            assert!((r.term_exponent - th / 2.0).abs() < 1e-6, "{a} {b} {th}");
        }
    }

    #[test]
    fn combinatorial_family_converges() {
        let (alpha, beta, theta) = (0.5, 0.6, 2.5);
        let seq = ASequence::combinatorial_power(alpha, beta, theta);
        let r = check_series_condition(&seq, 60).unwrap();
        assert_eq!(r.verdict, SeriesVerdict::ConvergesNumerically);
        let expected = theta * 2.0 * alpha / (2.0 * alpha + 1.0);
        assert!((r.term_exponent - expected).abs() < 1e-6);
    }

    #[test]
    fn geometric_and_growing_sequences() {
        let geo = ASequence::Explicit {
            k_min: 1,
            values: (1..=40).map(|k| 0.5f64.powi(k)).collect(),
        };
        assert_eq!(
            check_series_condition(&geo, 40).unwrap().verdict,
            SeriesVerdict::ConvergesNumerically
        );
        let grow = ASequence::InversePower { c: 1.0, p: -0.5 };
        assert_eq!(
            check_series_condition(&grow, 40).unwrap().verdict,
            SeriesVerdict::DivergesNumerically
        );
    }

    #[test]
    fn norm_matches_zeta() {
        // Σ k^{-2} = π²/6
        let (n, tail) = ASequence::InversePower { c: 1.0, p: 2.0 }.norm().unwrap();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((n - zeta2).abs() < 1e-6, "{n}");
        assert!(tail > 0.0);
        assert!(ASequence::InversePower { c: 1.0, p: 1.0 }.norm().is_err());
    }

    #[test]
    fn maximal_source_matches_cdelta() {
        let phi = Phi::Exponent { s: 0.5 };
        let seq = ASequence::Kakeya {
            frak_h: DimensionFunction::power(0.5),
            c: CSource::Maximal { phi: phi.clone() },
            h: DimensionFunction::power(0.5),
        };
        let k = 7;
        let d = (-(k as f64)).exp2();
        let expected = (d * cdelta(&phi, d).unwrap() / d.sqrt()).sqrt();
        assert!((seq.term(k).unwrap() - expected).abs() < 1e-12);
    }
}
