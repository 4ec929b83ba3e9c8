use crate::dynamics::Trace;
use crate::error::{Error, Result};
use crate::strategies::{check_safety, Aggressiveness};
use crate::value::Value;

use super::{BoundParams, BoundReport, Relation};

/// `(α, β)` measured on a trace: `α` is the smallest finite `α̂` over
/// non-lazy steps capped at 1 (1 when every update is unbounded), `β` the
/// smallest feasible safety constant.
pub fn measure(trace: &Trace) -> Result<(Value, Value)> {
    let updates: Vec<&Aggressiveness> = trace.steps.iter().filter_map(|s| s.aggressiveness.as_ref()).collect();
    if updates.is_empty() {
        return Err(Error::NotQualifying("the trace has no aggressive update".into()));
    }
    let alpha = updates.iter().filter_map(|a| a.finite()).min().cloned().unwrap_or_else(Value::one).min_of(Value::one());
    if !alpha.is_positive() {
        return Err(Error::NotQualifying("measured aggressiveness is zero".into()));
    }
    let safety = check_safety(trace);
    let beta = safety.min_beta.ok_or_else(|| {
        let (t, i) = safety.worst.unwrap_or((0, 0));
        Error::NotQualifying(format!("no finite safety constant: bidder {} at t={t}", i + 1))
    })?;
    Ok((alpha, beta))
}

fn params(trace: &Trace, opt: &Value) -> BoundParams {
    BoundParams { n: trace.n(), m: trace.m(), steps: trace.len(), opt: Some(opt.clone()), ..Default::default() }
}

fn require_round_robin(trace: &Trace) -> Result<()> {
    if !trace.schedule.is_round_robin() {
        return Err(Error::NotQualifying("the bound needs a round-robin schedule".into()));
    }
    Ok(())
}

/// First step after which every bidder has made a non-lazy update.
fn all_updated(trace: &Trace) -> Option<usize> {
    let mut seen = vec![false; trace.n()];
    let mut left = trace.n();
    for s in &trace.steps {
        if !s.lazy && !seen[s.bidder] {
            seen[s.bidder] = true;
            left -= 1;
            if left == 0 {
                return Some(s.t);
            }
        }
    }
    None
}

/// Pointwise welfare bound at every qualifying step: from `t = n` for eager
/// traces, and from the step after which every bidder has updated for lazy
/// ones.
pub fn check_pointwise(trace: &Trace, opt: &Value) -> Result<BoundReport> {
    require_round_robin(trace)?;
    let n = trace.n();
    let (alpha, beta) = measure(trace)?;
    let one = Value::one();
    let (name, factor, start) = if trace.lazy {
        let start = all_updated(trace)
            .ok_or_else(|| Error::NotQualifying("some bidder never made an aggressive update".into()))?;
        let f = &alpha / ((&one + &alpha * Value::from_int(2) + &beta) * &beta);
        ("pointwise-lazy", f, start)
    } else {
        if trace.len() < n {
            return Err(Error::NotQualifying(format!("trace has {} steps, fewer than n = {n}", trace.len())));
        }
        ("pointwise", &alpha / ((&one + &alpha + &beta) * &beta), n)
    };
    let bound = &factor * opt;
    let mut report = BoundReport::new(
        name,
        BoundParams { alpha: Some(alpha), beta: Some(beta), factor: Some(factor), ..params(trace, opt) },
    );
    for t in start..=trace.len() {
        let sw = trace.sw(t).clone();
        if opt.is_positive() {
            report.observe_ratio(&sw / opt);
        }
        report.check("welfare", Some(t), sw, Relation::Ge, bound.clone());
    }
    Ok(report)
}

/// The four per-window lemmas behind the pointwise bound.
pub fn check_lemmas(trace: &Trace, opt: &Value) -> Result<BoundReport> {
    require_round_robin(trace)?;
    let n = trace.n();
    let (alpha, beta) = measure(trace)?;
    let one = Value::one();
    let start = if trace.lazy {
        let first = all_updated(trace)
            .ok_or_else(|| Error::NotQualifying("some bidder never made an aggressive update".into()))?;
        first.max(n)
    } else {
        n
    };
    let mut report = BoundReport::new(
        if trace.lazy { "lemmas-lazy" } else { "lemmas" },
        BoundParams { alpha: Some(alpha.clone()), beta: Some(beta.clone()), ..params(trace, opt) },
    );
    let alpha_opt = &alpha * opt;
    let low_coeff = if trace.lazy { &alpha * Value::from_int(2) + &one } else { &alpha + &one };
    let ratio = &alpha / &beta;
    for t in start..=trace.len() {
        let dw = trace.dw(t).clone();
        let dw_prev = trace.dw(t - n);
        let declared: Value = if trace.lazy {
            trace
                .last_update(t)
                .into_iter()
                .flatten()
                .map(|s| trace.step(s).outcome.declared_utility[trace.step(s).bidder].clone())
                .sum()
        } else {
            (t - n + 1..=t).map(|s| trace.step(s).outcome.declared_utility[trace.step(s).bidder].clone()).sum()
        };
        report.check("aux", Some(t), declared, Relation::Le, dw.clone());
        report.check("initial-low", Some(t), &low_coeff * &dw + &alpha * dw_prev, Relation::Ge, alpha_opt.clone());
        report.check("initial-high", Some(t), dw, Relation::Ge, &ratio * dw_prev);
    }
    for t in 0..=trace.len() {
        report.check("declared-vs-actual", Some(t), trace.dw(t).clone(), Relation::Le, &beta * trace.sw(t));
    }
    Ok(report)
}

/// Average welfare over the first `T` steps.
pub fn check_average(trace: &Trace, opt: &Value) -> Result<BoundReport> {
    require_round_robin(trace)?;
    let (n, big_t) = (trace.n(), trace.len());
    if big_t < n {
        return Err(Error::NotQualifying(format!("trace has {big_t} steps, fewer than n = {n}")));
    }
    let mean = (1..=big_t).map(|t| trace.sw(t).clone()).sum::<Value>() / Value::from_usize(big_t);
    let mut report = BoundReport::new("average", params(trace, opt));
    if big_t == n {
        report.note("T = n: the horizon factor 1 - n/T vanishes and the bound is 0");
        report.params.factor = Some(Value::zero());
        report.check("average-welfare", None, mean, Relation::Ge, Value::zero());
        return Ok(report);
    }
    if trace.lazy {
        return Err(Error::NotQualifying("the average bound is stated for eager updates".into()));
    }
    let (alpha, beta) = measure(trace)?;
    let one = Value::one();
    let horizon = &one - Value::from_usize(n) / Value::from_usize(big_t);
    let factor = &alpha / ((&alpha * Value::from_int(2) + &one) * &beta) * horizon;
    if opt.is_positive() {
        report.observe_ratio(&mean / opt);
    }
    let bound = &factor * opt;
    report.params.alpha = Some(alpha);
    report.params.beta = Some(beta);
    report.params.factor = Some(factor);
    report.check("average-welfare", None, mean, Relation::Ge, bound);
    Ok(report)
}

/// `Σ_{i∈N'} u_i^D(b^{t_i}) ≤ DW(b^T)` with `t_i` the last update of bidder
/// `i`; holds for any schedule.
pub fn check_aux_variant(trace: &Trace) -> BoundReport {
    let big_t = trace.len();
    let declared: Value = trace
        .last_update(big_t)
        .into_iter()
        .flatten()
        .map(|s| trace.step(s).outcome.declared_utility[trace.step(s).bidder].clone())
        .sum();
    let mut report = BoundReport::new(
        "aux-variant",
        BoundParams { n: trace.n(), m: trace.m(), steps: big_t, ..Default::default() },
    );
    report.check("aux-variant", Some(big_t), declared, Relation::Le, trace.dw(big_t).clone());
    report
}

/// Per-profile safety: feasible iff some finite `β` works.
pub fn check_safety_report(trace: &Trace) -> BoundReport {
    let safety = check_safety(trace);
    let mut report = BoundReport::new(
        "safety",
        BoundParams { n: trace.n(), m: trace.m(), steps: trace.len(), beta: safety.min_beta.clone(), ..Default::default() },
    );
    for t in 0..=trace.len() {
        let out = trace.outcome(t);
        for (i, (u, ud)) in out.utility.iter().zip(&out.declared_utility).enumerate() {
            if u.is_negative() {
                report.check(&format!("utility-nonnegative/bidder-{}", i + 1), Some(t), u.clone(), Relation::Ge, Value::zero());
            } else if u.is_zero() && ud.is_positive() {
                report.check(&format!("declared-needs-utility/bidder-{}", i + 1), Some(t), ud.clone(), Relation::Le, Value::zero());
            } else if let Some(beta) = &safety.min_beta {
                report.check("declared-vs-utility", Some(t), ud.clone(), Relation::Le, beta * u);
            }
        }
    }
    if let (Some((t, i)), Some(b)) = (safety.worst, &safety.min_beta) {
        report.note(format!("smallest safety constant {b} attained by bidder {} at t={t}", i + 1));
    }
    report
}
