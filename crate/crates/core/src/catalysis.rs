//! Catalytic convertibility.
//!
//! Under PPT operations a maximally entangled catalyst `Φ_C` lets `Φ_K` reach
//! `λ` for large enough `C` exactly when `S½(λ) < log K`; the search for the
//! smallest such `C` runs the ordinary decision ladder on
//! `Φ_{KC} → λ ⊗ U_C`. The LOCC conditions involve strict inequalities over a
//! continuum of orders and are only screened on a grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{decide, Decision, Rule, TransformQuery, S_HALF_EQ_TOL};
use crate::spectra::{f_value, renyi_entropy, s_half, tensor, Order, SchmidtVector};

/// Differences smaller than this are too close to call.
pub const SCREEN_TOL: f64 = 1e-12;

/// True iff `Φ_K ⊗ Φ_C → λ ⊗ Φ_C` under PPT for some finite `C`.
pub fn ppt_maxent_catalysis_possible(k: usize, lambda: &SchmidtVector) -> bool {
    if lambda.is_uniform(k) {
        return true;
    }
    s_half(lambda) < (k as f64).log2() - S_HALF_EQ_TOL
}

/// `lim_{C→∞} T(KC; λ ⊗ U_C) = 2^{S½(λ)}/K`.
pub fn catalysis_limit(k: usize, lambda: &SchmidtVector) -> f64 {
    lambda.s_half_pow() / k as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanEntry {
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "T1", skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// `Feasible`, `Infeasible`, `Boundary` or `Inconclusive`.
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalystScan {
    pub possible: bool,
    #[serde(rename = "minimal_C")]
    pub minimal_c: Option<usize>,
    pub limit_value: f64,
    pub budget: usize,
    /// Catalyst ranks where no verdict could be reached.
    pub inconclusive_at: Vec<usize>,
    pub scan: Vec<ScanEntry>,
}

/// Scans `C = 1, …, c_max` and returns the first `C` with a Feasible verdict
/// for `Φ_{KC} → λ ⊗ U_C`. Ranks where the SDP exceeds its dimension guard
/// are recorded as inconclusive and the scan moves on.
pub fn minimal_catalyst_rank(
    k: usize,
    lambda: &SchmidtVector,
    c_max: usize,
) -> Result<CatalystScan> {
    if c_max == 0 {
        return Err(Error::Domain("catalyst budget must be at least 1".into()));
    }
    if k < 2 {
        return Err(Error::Domain(format!("K must be at least 2, got {k}")));
    }
    let lambda = lambda.strip_zeros();
    let possible = ppt_maxent_catalysis_possible(k, &lambda);
    let mut report = CatalystScan {
        possible,
        minimal_c: None,
        limit_value: catalysis_limit(k, &lambda),
        budget: c_max,
        inconclusive_at: Vec::new(),
        scan: Vec::new(),
    };
    if !possible {
        return Ok(report);
    }
    for c in 1..=c_max {
        let target = tensor(&lambda, &SchmidtVector::uniform(c)?);
        let kc = k * c;
        let t1 = if target.len() > kc {
            Some(crate::closed_form::t1_value(&target, kc)?)
        } else {
            None
        };
        match decide(&TransformQuery::ppt(kc, target)) {
            Ok(v) => {
                let feasible = v.decision == Decision::Feasible;
                report.scan.push(ScanEntry {
                    c,
                    t1,
                    t: v.t,
                    verdict: format!("{:?}", v.decision),
                    rule: Some(v.rule),
                });
                if feasible {
                    report.minimal_c = Some(c);
                    break;
                }
            }
            Err(Error::DimensionGuard { .. }) => {
                report.inconclusive_at.push(c);
                report.scan.push(ScanEntry {
                    c,
                    t1,
                    t: None,
                    verdict: "Inconclusive".into(),
                    rule: None,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Orders at which the screens compare entropies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TGrid {
    /// Orders in `(0, ∞]` for the Rényi comparison.
    pub renyi: Vec<Order>,
    /// Orders in `(−∞, 0]` for the `f_t` comparison.
    pub f: Vec<f64>,
}

impl Default for TGrid {
    /// 64 geometric points on `[10⁻³, 32]` plus `1/2`, `1`, `∞`; for `f_t`, `0`
    /// and the negatives of the first 63 geometric points.
    fn default() -> Self {
        let geo: Vec<f64> = (0..64)
            .map(|i| 1e-3 * (32.0f64 / 1e-3).powf(i as f64 / 63.0))
            .collect();
        let mut renyi: Vec<Order> = geo.iter().copied().map(Order::Finite).collect();
        renyi.extend([Order::HALF, Order::Finite(1.0), Order::Infinity]);
        let mut f = vec![0.0];
        f.extend(geo[..63].iter().map(|t| -t));
        TGrid { renyi, f }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome")]
pub enum ScreenOutcome {
    /// Every sampled condition held. A grid check, never a proof.
    Pass { points: usize },
    /// A sampled condition failed strictly.
    Fail { condition: String, t: String },
    /// A sampled comparison was within [`SCREEN_TOL`] of equality.
    Inconclusive { condition: String, t: String },
}

fn padded(a: &SchmidtVector, n: usize) -> SchmidtVector {
    let mut c = a.coeffs().to_vec();
    c.resize(n, 0.0);
    SchmidtVector::new(c).expect("padding keeps a valid vector")
}

/// Compares `lhs > rhs`, treating `−∞` on the right as a trivial pass.
fn strict(lhs: f64, rhs: f64) -> Option<bool> {
    if rhs == f64::NEG_INFINITY && lhs > rhs {
        return Some(true);
    }
    if lhs == f64::NEG_INFINITY {
        return Some(false);
    }
    let diff = lhs - rhs;
    if diff.abs() <= SCREEN_TOL * lhs.abs().max(rhs.abs()).max(1.0) {
        None
    } else {
        Some(diff > 0.0)
    }
}

/// Grid screen of the LOCC catalysis conditions for `λ → μ`:
/// `S_t(λ) > S_t(μ)` for `t > 0` and `f_t(λ) > f_t(μ)` for `t ≤ 0`.
pub fn locc_catalysis_screen(
    lambda: &SchmidtVector,
    mu: &SchmidtVector,
    grid: &TGrid,
) -> Result<ScreenOutcome> {
    if lambda.same_spectrum(mu) {
        return Err(Error::Precondition("λ and μ have the same spectrum".into()));
    }
    let n = lambda.len().max(mu.len());
    let (l, m) = (padded(lambda, n), padded(mu, n));
    if l.has_zeros() && m.has_zeros() {
        return Err(Error::Precondition(
            "λ and μ both have vanishing components".into(),
        ));
    }
    let mut points = 0;
    for &t in &grid.renyi {
        if t.value() <= 0.0 {
            continue;
        }
        points += 1;
        let (a, b) = (renyi_entropy(&l, t)?, renyi_entropy(&m, t)?);
        match strict(a, b) {
            Some(true) => {}
            Some(false) => {
                return Ok(ScreenOutcome::Fail {
                    condition: "S_t(λ) > S_t(μ)".into(),
                    t: t.to_string(),
                })
            }
            None => {
                return Ok(ScreenOutcome::Inconclusive {
                    condition: "S_t(λ) > S_t(μ)".into(),
                    t: t.to_string(),
                })
            }
        }
    }
    for &t in &grid.f {
        if t > 0.0 {
            continue;
        }
        points += 1;
        match strict(f_value(&l, t), f_value(&m, t)) {
            Some(true) => {}
            Some(false) => {
                return Ok(ScreenOutcome::Fail {
                    condition: "f_t(λ) > f_t(μ)".into(),
                    t: t.to_string(),
                })
            }
            None => {
                return Ok(ScreenOutcome::Inconclusive {
                    condition: "f_t(λ) > f_t(μ)".into(),
                    t: t.to_string(),
                })
            }
        }
    }
    Ok(ScreenOutcome::Pass { points })
}

/// Screen for the conjectured PPT catalysis condition `S_t(λ) > S_t(μ)` for
/// all `t ≥ 1/2`. Checks `∞` and `1/2` first, then the grid. Conjectural: a
/// pass is evidence, not a decision.
pub fn ppt_catalysis_conjecture_screen(
    lambda: &SchmidtVector,
    mu: &SchmidtVector,
    grid: &TGrid,
) -> Result<ScreenOutcome> {
    if lambda.same_spectrum(mu) {
        return Err(Error::Precondition("λ and μ have the same spectrum".into()));
    }
    let mut orders = vec![Order::Infinity, Order::HALF];
    orders.extend(grid.renyi.iter().copied().filter(|t| t.value() >= 0.5));
    for &t in &orders {
        let (a, b) = (renyi_entropy(lambda, t)?, renyi_entropy(mu, t)?);
        if strict(a, b) != Some(true) {
            return Ok(ScreenOutcome::Fail {
                condition: "S_t(λ) > S_t(μ)".into(),
                t: t.to_string(),
            });
        }
    }
    Ok(ScreenOutcome::Pass {
        points: orders.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> SchmidtVector {
        s.parse().unwrap()
    }

    #[test]
    fn catalysis_possible_examples() {
        assert!(ppt_maxent_catalysis_possible(2, &v("0.05,0.05,0.9")));
        assert!(ppt_maxent_catalysis_possible(
            3,
            &SchmidtVector::uniform(3).unwrap()
        ));
        assert!(!ppt_maxent_catalysis_possible(
            5,
            &v("1/20,1/20,1/20,4/20,4/20,9/20")
        ));
    }

    #[test]
    fn borderline_has_no_catalyst() {
        let scan = minimal_catalyst_rank(5, &v("1/20,1/20,1/20,4/20,4/20,9/20"), 8).unwrap();
        assert!(!scan.possible);
        assert_eq!(scan.minimal_c, None);
        assert!(scan.scan.is_empty());
    }

    #[test]
    fn direct_target_needs_no_catalyst() {
        let scan = minimal_catalyst_rank(2, &v("0.02,0.02,0.96"), 4).unwrap();
        assert_eq!(scan.minimal_c, Some(1));
    }

    #[test]
    fn budget_must_be_positive() {
        assert!(minimal_catalyst_rank(2, &v("0.02,0.02,0.96"), 0).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = TGrid::default();
        assert_eq!(g.renyi.len(), 67);
        assert_eq!(g.f.len(), 64);
        assert!((g.renyi[63].value() - 32.0).abs() < 1e-12);
        assert!(g.f.iter().all(|&t| t <= 0.0));
    }

    #[test]
    fn locc_screen_cases() {
        let grid = TGrid::default();
        assert!(locc_catalysis_screen(&v("0.3,0.7"), &v("0.7,0.3"), &grid).is_err());
        let out = locc_catalysis_screen(&v("0.5,0.5"), &v("0.6,0.4"), &grid).unwrap();
        assert!(matches!(out, ScreenOutcome::Pass { .. }));
        // rank cannot grow: f_t(λ) = −∞ once λ is padded with a zero
        let out = locc_catalysis_screen(&v("0.5,0.5"), &v("0.4,0.3,0.3"), &grid).unwrap();
        assert!(matches!(out, ScreenOutcome::Fail { .. }));
        assert!(locc_catalysis_screen(&v("0,0.5,0.5"), &v("0,0.1,0.9"), &grid).is_err());
    }

    #[test]
    fn locc_screen_zero_in_target() {
        // μ has a zero where λ does not: f_0(μ) = −∞ and that condition holds
        let grid = TGrid {
            renyi: vec![],
            f: vec![0.0],
        };
        let out = locc_catalysis_screen(&v("0.3,0.3,0.4"), &v("0,0.5,0.5"), &grid).unwrap();
        assert_eq!(out, ScreenOutcome::Pass { points: 1 });
    }

    #[test]
    fn ppt_screen_cases() {
        let grid = TGrid::default();
        let out = ppt_catalysis_conjecture_screen(
            &SchmidtVector::uniform(2).unwrap(),
            &v("0.05,0.05,0.9"),
            &grid,
        )
        .unwrap();
        assert!(matches!(out, ScreenOutcome::Pass { .. }));
        let out = ppt_catalysis_conjecture_screen(&v("0.2,0.8"), &v("0.3,0.3,0.4"), &grid).unwrap();
        assert_eq!(
            out,
            ScreenOutcome::Fail {
                condition: "S_t(λ) > S_t(μ)".into(),
                t: "inf".into()
            }
        );
        assert!(ppt_catalysis_conjecture_screen(&v("0.2,0.8"), &v("0.8,0.2"), &grid).is_err());
    }
}
