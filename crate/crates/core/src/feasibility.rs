//! Decision engine for `source → target` under LOCC or PPT operations.
//!
//! LOCC queries are settled by majorization. PPT queries from a maximally
//! entangled source walk a ladder of exact tests, cheapest first, and fall
//! back to solving the SDP for `T(K; λ)`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::closed_form::{c_star, t1_value};
use crate::error::{Error, Result};
use crate::ppt_sdp::{build_reduced, solve, SdpCertificate};
use crate::spectra::{majorizes, renyi_entropy, s_half, Order, SchmidtVector};

/// `|T − 1|` at or below this is reported as [`Decision::Boundary`].
pub const BOUNDARY_TOL: f64 = 1e-6;
/// `S½(λ) = log K` is treated as equality within this distance.
pub const S_HALF_EQ_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    MaxEnt(usize),
    Pure(SchmidtVector),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OpClass {
    #[serde(rename = "LOCC")]
    Locc,
    #[serde(rename = "PPT")]
    Ppt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformQuery {
    pub source: Source,
    pub target: SchmidtVector,
    pub op_class: OpClass,
}

impl TransformQuery {
    pub fn ppt(k: usize, target: SchmidtVector) -> Self {
        TransformQuery {
            source: Source::MaxEnt(k),
            target,
            op_class: OpClass::Ppt,
        }
    }

    pub fn locc(source: SchmidtVector, target: SchmidtVector) -> Self {
        TransformQuery {
            source: Source::Pure(source),
            target,
            op_class: OpClass::Locc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Decision {
    Feasible,
    Infeasible,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Nielsen,
    RankFastPath,
    MonotoneS12,
    Borderline,
    Rank3Exact,
    CstarD,
    T1LowerBound,
    SdpT,
}

impl Rule {
    /// PPT rules in evaluation order.
    pub const PPT_LADDER: [Rule; 7] = [
        Rule::RankFastPath,
        Rule::MonotoneS12,
        Rule::Borderline,
        Rule::Rank3Exact,
        Rule::CstarD,
        Rule::T1LowerBound,
        Rule::SdpT,
    ];
}

/// One evaluated rule and what it found.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub rule: Rule,
    pub decisive: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub rule: Rule,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SdpCertificate>,
    pub trace: Vec<TraceEntry>,
}

fn classify(t: f64) -> Decision {
    if (t - 1.0).abs() <= BOUNDARY_TOL {
        Decision::Boundary
    } else if t < 1.0 {
        Decision::Feasible
    } else {
        Decision::Infeasible
    }
}

/// Outcome of a single rule: decisive or not, with a note for the trace.
struct RuleResult {
    decision: Option<Decision>,
    t: Option<f64>,
    certificate: Option<SdpCertificate>,
    note: String,
}

impl RuleResult {
    fn pass(note: String) -> Self {
        RuleResult {
            decision: None,
            t: None,
            certificate: None,
            note,
        }
    }

    fn decide(decision: Decision, t: Option<f64>, note: String) -> Self {
        RuleResult {
            decision: Some(decision),
            t,
            certificate: None,
            note,
        }
    }
}

/// Maximally entangled source rank of a PPT query.
fn ppt_source_rank(source: &Source) -> Result<usize> {
    let k = match source {
        Source::MaxEnt(k) => *k,
        Source::Pure(v) => {
            let r = v.rank();
            if !v.is_uniform(r) {
                return Err(Error::Unsupported(
                    "PPT convertibility from a source that is not maximally entangled has no \
                     known exact criterion; only maximally entangled sources are supported"
                        .into(),
                ));
            }
            r
        }
    };
    if k < 2 {
        return Err(Error::Domain(format!(
            "source rank K must be at least 2, got {k}"
        )));
    }
    Ok(k)
}

fn direct_criterion(l: &[f64]) -> f64 {
    let (a, b, c) = (l[0], l[1], l[2]);
    2.0 * ((c * b).sqrt() + (c * a).sqrt()) + 4.0 * (a * b).sqrt()
}

/// `2(√(λ₃λ₂) + √(λ₃λ₁)) + 4√(λ₁λ₂)` for an ascending rank-3 vector: the
/// exact criterion (`≤ 1`) for reaching it from one EPR pair.
pub fn rank3_criterion(lambda: &SchmidtVector) -> Result<f64> {
    let l = lambda.strip_zeros();
    if l.len() != 3 {
        return Err(Error::Domain(format!(
            "expected Schmidt rank 3, got {}",
            l.len()
        )));
    }
    Ok(direct_criterion(l.coeffs()))
}

fn evaluate(rule: Rule, k: usize, target: &SchmidtVector) -> Result<Option<RuleResult>> {
    let lam = target.strip_zeros();
    let d = lam.len();
    let log_k = (k as f64).log2();
    Ok(Some(match rule {
        Rule::RankFastPath => {
            if d <= k {
                RuleResult::decide(
                    Decision::Feasible,
                    None,
                    format!("Schmidt rank {d} ≤ K = {k}: reachable by LOCC, hence by PPT"),
                )
            } else {
                RuleResult::pass(format!("Schmidt rank {d} > K = {k}"))
            }
        }
        Rule::MonotoneS12 => {
            let sh = s_half(&lam);
            if sh > log_k + S_HALF_EQ_TOL {
                RuleResult::decide(
                    Decision::Infeasible,
                    None,
                    format!("S½ = {sh:.10} > log K = {log_k:.10}"),
                )
            } else {
                RuleResult::pass(format!("S½ = {sh:.10} ≤ log K = {log_k:.10}"))
            }
        }
        Rule::Borderline => {
            let sh = s_half(&lam);
            if (sh - log_k).abs() <= S_HALF_EQ_TOL {
                let uniform = lam.is_uniform(k);
                RuleResult::decide(
                    if uniform {
                        Decision::Feasible
                    } else {
                        Decision::Infeasible
                    },
                    None,
                    format!(
                        "S½ = {sh:.10} equals log K = {log_k:.10}; target {} U_{k}",
                        if uniform { "is" } else { "is not" }
                    ),
                )
            } else {
                RuleResult::pass(format!("S½ = {sh:.10} differs from log K = {log_k:.10}"))
            }
        }
        Rule::Rank3Exact => {
            if k != 2 || d != 3 {
                return Ok(None);
            }
            let lhs = direct_criterion(lam.coeffs());
            let t = t1_value(&lam, 2)?;
            let decision = if (t - 1.0).abs() <= BOUNDARY_TOL {
                Decision::Boundary
            } else if lhs <= 1.0 {
                Decision::Feasible
            } else {
                Decision::Infeasible
            };
            RuleResult::decide(
                decision,
                Some(t),
                format!("rank-3 criterion 2(√λ₃λ₂ + √λ₃λ₁) + 4√λ₁λ₂ = {lhs:.10} vs 1, T = {t:.10}"),
            )
        }
        Rule::CstarD => {
            if d <= k {
                return Ok(None);
            }
            let c = c_star(&lam, k)?;
            if c == d {
                let t = (lam.s_half_pow() - 1.0) / (k as f64 - 1.0);
                RuleResult::decide(
                    classify(t),
                    Some(t),
                    format!("c* = d = {d}: T = (2^S½ − 1)/(K − 1) = {t:.10}"),
                )
            } else {
                RuleResult::pass(format!("c* = {c} < d = {d}"))
            }
        }
        Rule::T1LowerBound => {
            if d <= k {
                return Ok(None);
            }
            let t1 = t1_value(&lam, k)?;
            if t1 > 1.0 + BOUNDARY_TOL {
                RuleResult::decide(Decision::Infeasible, None, format!("T ≥ T₁ = {t1:.10} > 1"))
            } else {
                RuleResult::pass(format!("T₁ = {t1:.10} ≤ 1"))
            }
        }
        Rule::SdpT => {
            let cert = solve(&build_reduced(&lam, k)?)?;
            if !cert.is_optimal() {
                return Err(Error::Solver(format!(
                    "SDP stopped with status {:?} after {} iterations (gap {:e})",
                    cert.status, cert.iterations, cert.gap
                )));
            }
            let t = cert.primal_value;
            let note = format!(
                "SDP: primal {:.12}, dual {:.12}, gap {:.3e}, {} iterations",
                cert.primal_value, cert.dual_value, cert.gap, cert.iterations
            );
            let mut r = RuleResult::decide(classify(t), Some(t), note);
            r.certificate = Some(cert);
            r
        }
        Rule::Nielsen => return Ok(None),
    }))
}

fn decide_locc(source: &Source, target: &SchmidtVector) -> Result<Verdict> {
    let src = match source {
        Source::MaxEnt(k) => SchmidtVector::uniform(*k)?,
        Source::Pure(v) => v.clone(),
    };
    let ok = majorizes(&src, target);
    Ok(Verdict {
        decision: if ok {
            Decision::Feasible
        } else {
            Decision::Infeasible
        },
        rule: Rule::Nielsen,
        t: None,
        certificate: None,
        trace: vec![TraceEntry {
            rule: Rule::Nielsen,
            decisive: true,
            note: format!(
                "source {} majorized by target",
                if ok { "is" } else { "is not" }
            ),
        }],
    })
}

/// Runs the ladder and stops at the first decisive rule.
pub fn decide(query: &TransformQuery) -> Result<Verdict> {
    if query.op_class == OpClass::Locc {
        return decide_locc(&query.source, &query.target);
    }
    let k = ppt_source_rank(&query.source)?;
    let mut trace = Vec::new();
    for rule in Rule::PPT_LADDER {
        let Some(r) = evaluate(rule, k, &query.target)? else {
            continue;
        };
        trace.push(TraceEntry {
            rule,
            decisive: r.decision.is_some(),
            note: r.note,
        });
        if let Some(decision) = r.decision {
            return Ok(Verdict {
                decision,
                rule,
                t: r.t,
                certificate: r.certificate,
                trace,
            });
        }
    }
    unreachable!("the SDP rule always decides")
}

/// Evaluates every applicable PPT rule independently and returns each
/// decisive verdict, in ladder order. Used to check that rules agree.
pub fn decide_all(query: &TransformQuery) -> Result<Vec<Verdict>> {
    if query.op_class == OpClass::Locc {
        return Ok(vec![decide_locc(&query.source, &query.target)?]);
    }
    let k = ppt_source_rank(&query.source)?;
    let mut out = Vec::new();
    for rule in Rule::PPT_LADDER {
        if let Some(r) = evaluate(rule, k, &query.target)? {
            if let Some(decision) = r.decision {
                out.push(Verdict {
                    decision,
                    rule,
                    t: r.t,
                    certificate: r.certificate,
                    trace: vec![TraceEntry {
                        rule,
                        decisive: true,
                        note: r.note,
                    }],
                });
            }
        }
    }
    Ok(out)
}

fn rule_gloss(rule: Rule) -> &'static str {
    match rule {
        Rule::Nielsen => "LOCC convertibility holds iff the source is majorized by the target",
        Rule::RankFastPath => "a target of Schmidt rank at most K is reachable from Φ_K by LOCC",
        Rule::MonotoneS12 => "S½ cannot increase under PPT operations",
        Rule::Borderline => "with S½ = log K only U_K itself is reachable",
        Rule::Rank3Exact => "exact criterion for rank-3 targets from one EPR pair",
        Rule::CstarD => "when c* = d the SDP value has a closed form",
        Rule::T1LowerBound => "T₁ bounds T from below",
        Rule::SdpT => "feasible iff T(K; λ) ≤ 1",
    }
}

/// Human-readable account of a verdict.
pub fn explain(verdict: &Verdict) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "decision: {:?} (rule {:?})",
        verdict.decision, verdict.rule
    );
    let _ = writeln!(out, "  {}", rule_gloss(verdict.rule));
    if let Some(t) = verdict.t {
        let _ = writeln!(out, "T = {t:.12}");
    }
    if let Some(c) = &verdict.certificate {
        let _ = writeln!(
            out,
            "certificate: primal {:.12}, dual {:.12}, gap {:.3e}, status {:?}",
            c.primal_value, c.dual_value, c.gap, c.status
        );
    }
    let _ = writeln!(out, "trace:");
    for e in &verdict.trace {
        let _ = writeln!(
            out,
            "  {:<13} {}  {}",
            format!("{:?}", e.rule),
            if e.decisive { "decisive" } else { "passed  " },
            e.note
        );
    }
    out
}

/// Necessary conditions for `Φ_K → λ` under PPT: `S½`, `S₁` and `S∞` of the
/// target do not exceed `log K`.
pub fn monotones_respected(k: usize, target: &SchmidtVector, tol: f64) -> bool {
    let log_k = (k as f64).log2();
    [Order::HALF, Order::Finite(1.0), Order::Infinity]
        .into_iter()
        .all(|t| renyi_entropy(target, t).is_ok_and(|s| s <= log_k + tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> SchmidtVector {
        s.parse().unwrap()
    }

    #[test]
    fn example_one_borderline() {
        let verdict = decide(&TransformQuery::ppt(5, v("1/20,1/20,1/20,4/20,4/20,9/20"))).unwrap();
        assert_eq!(verdict.decision, Decision::Infeasible);
        assert_eq!(verdict.rule, Rule::Borderline);
        let text = explain(&verdict);
        assert!(text.contains("S½") && text.contains("log K"));
    }

    #[test]
    fn rank3_examples() {
        let verdict = decide(&TransformQuery::ppt(2, v("0.05,0.05,0.9"))).unwrap();
        assert_eq!(
            (verdict.decision, verdict.rule),
            (Decision::Infeasible, Rule::Rank3Exact)
        );
        assert!((rank3_criterion(&v("0.05,0.05,0.9")).unwrap() - 1.048_528).abs() < 1e-6);

        let verdict = decide(&TransformQuery::ppt(2, v("0.02,0.02,0.96"))).unwrap();
        assert_eq!(
            (verdict.decision, verdict.rule),
            (Decision::Feasible, Rule::Rank3Exact)
        );
        assert!((rank3_criterion(&v("0.02,0.02,0.96")).unwrap() - 0.634_256_26).abs() < 1e-8);
    }

    #[test]
    fn locc_nielsen() {
        let q = TransformQuery::locc(v("1/2,1/2"), v("3/4,1/4"));
        let verdict = decide(&q).unwrap();
        assert_eq!(
            (verdict.decision, verdict.rule),
            (Decision::Feasible, Rule::Nielsen)
        );
        let q = TransformQuery::locc(v("3/4,1/4"), v("1/2,1/2"));
        assert_eq!(decide(&q).unwrap().decision, Decision::Infeasible);
    }

    #[test]
    fn rank_fast_path() {
        let verdict = decide(&TransformQuery::ppt(3, v("0.1,0.2,0.7"))).unwrap();
        assert_eq!(verdict.rule, Rule::RankFastPath);
        assert!(explain(&verdict).contains("LOCC"));
        assert!(verdict.t.is_none());
    }

    #[test]
    fn sdp_path_reports_certificate() {
        // rank 4 from Φ_3 with c* < d and T₁ ≤ 1
        let target = v("0.01,0.01,0.01,0.97");
        let verdict = decide(&TransformQuery::ppt(3, target)).unwrap();
        assert_eq!(verdict.rule, Rule::SdpT);
        assert_eq!(verdict.decision, Decision::Feasible);
        let text = explain(&verdict);
        assert!(text.contains("gap") && text.contains("primal") && text.contains("dual"));
    }

    #[test]
    fn rank_can_increase() {
        let target = v("0.01,0.01,0.01,0.97");
        assert!(target.rank() > 3);
        assert_eq!(
            decide(&TransformQuery::ppt(3, target)).unwrap().decision,
            Decision::Feasible
        );
    }

    #[test]
    fn general_source_is_unsupported() {
        let q = TransformQuery {
            source: Source::Pure(v("0.3,0.7")),
            target: v("0.1,0.9"),
            op_class: OpClass::Ppt,
        };
        assert!(matches!(decide(&q), Err(Error::Unsupported(_))));
        // a uniform pure source is a maximally entangled one
        let q = TransformQuery {
            source: Source::Pure(v("0.5,0.5")),
            target: v("0.02,0.02,0.96"),
            op_class: OpClass::Ppt,
        };
        assert_eq!(decide(&q).unwrap().decision, Decision::Feasible);
    }

    #[test]
    fn uniform_target_is_boundary_free() {
        let verdict = decide(&TransformQuery::ppt(4, SchmidtVector::uniform(4).unwrap())).unwrap();
        assert_eq!(verdict.decision, Decision::Feasible);
    }

    #[test]
    fn classify_band() {
        assert_eq!(classify(1.0 + 5e-7), Decision::Boundary);
        assert_eq!(classify(1.0 - 2e-6), Decision::Feasible);
        assert_eq!(classify(1.0 + 2e-6), Decision::Infeasible);
    }

    #[test]
    fn verdict_json_shape() {
        let verdict = decide(&TransformQuery::ppt(2, v("0.02,0.02,0.96"))).unwrap();
        let j = serde_json::to_value(&verdict).unwrap();
        assert_eq!(j["decision"], "Feasible");
        assert_eq!(j["rule"], "Rank3Exact");
        assert!(j["T"].is_f64());
        assert!(j.get("certificate").is_none());
    }
}
