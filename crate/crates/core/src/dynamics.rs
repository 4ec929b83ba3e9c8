//! The dynamics engine: activation schedules, eager and lazy stepping, trace
//! recording, trace files and fixed-point detection.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::items::{ItemList, ItemSet};
use crate::mechanism::{allocate, AuctionRules, BidProfile, Instance, Outcome, TieBreak};
use crate::strategies::{best_response_gap, measure_aggressiveness, overbid_flags, Aggressiveness, OverbidFlags, Strategy, UpdateContext};
use crate::valuations::{Valuation, ValuationSpec};
use crate::value::Value;

/// Who moves at each step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ScheduleRepr", into = "ScheduleRepr")]
pub enum Schedule {
    /// Bidder `((t − 1) mod n) + 1` at step `t`.
    RoundRobin,
    /// Uniform choice per step from a seeded generator.
    UniformRandom { seed: u64 },
    /// A fixed 1-based bidder list, repeated.
    Scripted { order: Vec<usize> },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ScheduleRepr {
    RoundRobin {},
    UniformRandom { seed: u64 },
    Scripted { order: Vec<usize> },
}

impl From<ScheduleRepr> for Schedule {
    fn from(r: ScheduleRepr) -> Self {
        match r {
            ScheduleRepr::RoundRobin {} => Schedule::RoundRobin,
            ScheduleRepr::UniformRandom { seed } => Schedule::UniformRandom { seed },
            ScheduleRepr::Scripted { order } => Schedule::Scripted { order },
        }
    }
}

impl From<Schedule> for ScheduleRepr {
    fn from(s: Schedule) -> Self {
        match s {
            Schedule::RoundRobin => ScheduleRepr::RoundRobin {},
            Schedule::UniformRandom { seed } => ScheduleRepr::UniformRandom { seed },
            Schedule::Scripted { order } => ScheduleRepr::Scripted { order },
        }
    }
}

impl Schedule {
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Schedule::Scripted { order } = self {
            if order.is_empty() {
                return Err(Error::InvalidParam("scripted schedule is empty".into()));
            }
            if let Some(b) = order.iter().find(|&&b| b == 0 || b > n) {
                return Err(Error::InvalidParam(format!("scripted schedule names bidder {b} of {n}")));
            }
        }
        Ok(())
    }

    pub fn is_round_robin(&self) -> bool {
        matches!(self, Schedule::RoundRobin)
    }
}

struct Activations<'a> {
    schedule: &'a Schedule,
    n: usize,
    rng: Option<ChaCha8Rng>,
}

impl<'a> Activations<'a> {
    fn new(schedule: &'a Schedule, n: usize) -> Self {
        let rng = match schedule {
            Schedule::UniformRandom { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        };
        Activations { schedule, n, rng }
    }

    /// 0-based bidder for step `t >= 1`.
    fn bidder(&mut self, t: usize) -> usize {
        match self.schedule {
            Schedule::RoundRobin => (t - 1) % self.n,
            Schedule::UniformRandom { .. } => self.rng.as_mut().expect("seeded").gen_range(0..self.n),
            Schedule::Scripted { order } => order[(t - 1) % order.len()] - 1,
        }
    }
}

/// Everything a run needs besides the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub steps: usize,
    pub lazy: bool,
    pub stop_on_fixed_point: bool,
    pub rules: AuctionRules,
    pub strategies: Vec<Strategy>,
    pub schedule: Schedule,
    pub initial: BidProfile,
}

impl RunConfig {
    /// Every bidder uses `strategy`; `T = 10n`, eager, round-robin,
    /// ascending ties, zero initial bids.
    pub fn new(instance: &Instance, strategy: Strategy) -> Self {
        let (n, m) = (instance.n(), instance.m());
        RunConfig {
            steps: 10 * n,
            lazy: false,
            stop_on_fixed_point: false,
            rules: AuctionRules::ascending(n, m),
            strategies: vec![strategy; n],
            schedule: Schedule::RoundRobin,
            initial: BidProfile::zeros(n, m),
        }
    }

    /// Rules actually used: lazy runs never allocate zero bids.
    pub fn effective_rules(&self) -> AuctionRules {
        let mut rules = self.rules.clone();
        if self.lazy {
            rules.allocate_zero_bids = false;
        }
        rules
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let (n, m) = (instance.n(), instance.m());
        if self.steps == 0 {
            return Err(Error::InvalidParam("step budget must be at least 1".into()));
        }
        if self.strategies.len() != n {
            return Err(Error::Dimension(format!("{} strategies for {n} bidders", self.strategies.len())));
        }
        for s in &self.strategies {
            s.validate(m)?;
        }
        if self.initial.n() != n || self.initial.m() != m {
            return Err(Error::Dimension(format!(
                "initial bids are {}×{}, instance is {n}×{m}",
                self.initial.n(),
                self.initial.m()
            )));
        }
        if self.rules.tie_break.bidders() != n || self.rules.tie_break.items() != m {
            return Err(Error::Dimension("tie-break does not match the instance".into()));
        }
        self.schedule.validate(n)
    }
}

/// One recorded step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub t: usize,
    pub bidder: usize,
    /// The bidder was already best-responding and kept its row.
    pub lazy: bool,
    pub before: Vec<Value>,
    pub after: Vec<Value>,
    pub demand_set: Option<ItemSet>,
    /// `U*` against the pre-step opposing bids.
    pub best_utility: Value,
    /// `None` on lazy steps.
    pub aggressiveness: Option<Aggressiveness>,
    pub flags: OverbidFlags,
    pub bids: BidProfile,
    pub outcome: Outcome,
    /// `max_{t' <= t} max_i b_{i,j}^{t'}` per item.
    pub running_max: Vec<Value>,
}

/// A full run: `b^0` and one record per step.
#[derive(Clone, Debug)]
pub struct Trace {
    pub instance: Instance,
    pub rules: AuctionRules,
    pub lazy: bool,
    pub schedule: Schedule,
    pub strategies: Vec<Strategy>,
    pub initial: BidProfile,
    pub initial_outcome: Outcome,
    pub steps: Vec<Step>,
}

impl Trace {
    /// Number of steps `T`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn m(&self) -> usize {
        self.instance.m()
    }

    /// `b^t`.
    pub fn bids(&self, t: usize) -> &BidProfile {
        if t == 0 {
            &self.initial
        } else {
            &self.steps[t - 1].bids
        }
    }

    pub fn outcome(&self, t: usize) -> &Outcome {
        if t == 0 {
            &self.initial_outcome
        } else {
            &self.steps[t - 1].outcome
        }
    }

    pub fn sw(&self, t: usize) -> &Value {
        &self.outcome(t).social_welfare
    }

    pub fn dw(&self, t: usize) -> &Value {
        &self.outcome(t).declared_welfare
    }

    pub fn running_max(&self, t: usize) -> Vec<Value> {
        if t == 0 {
            initial_max(&self.initial)
        } else {
            self.steps[t - 1].running_max.clone()
        }
    }

    /// Step record of step `t >= 1`.
    pub fn step(&self, t: usize) -> &Step {
        &self.steps[t - 1]
    }

    /// Last step `<= t` at which each bidder was activated.
    pub fn last_activation(&self, t: usize) -> Vec<Option<usize>> {
        let mut last = vec![None; self.n()];
        for s in &self.steps[..t] {
            last[s.bidder] = Some(s.t);
        }
        last
    }

    /// Last non-lazy step `<= t` of each bidder (`t_i`); `None` outside `N'`.
    pub fn last_update(&self, t: usize) -> Vec<Option<usize>> {
        let mut last = vec![None; self.n()];
        for s in self.steps[..t].iter().filter(|s| !s.lazy) {
            last[s.bidder] = Some(s.t);
        }
        last
    }

    /// Smallest finite measured aggressiveness over non-lazy steps.
    pub fn min_aggressiveness(&self) -> Option<Value> {
        self.steps.iter().filter_map(|s| s.aggressiveness.as_ref().and_then(|a| a.finite().cloned())).min()
    }
}

fn initial_max(bids: &BidProfile) -> Vec<Value> {
    (0..bids.m()).map(|j| bids.item_max(j)).collect()
}

/// Runs the dynamics for up to `config.steps` steps.
pub fn run(instance: &Instance, config: &RunConfig) -> Result<Trace> {
    config.validate(instance)?;
    let rules = config.effective_rules();
    let n = instance.n();
    let mut bids = config.initial.clone();
    let initial_outcome = allocate(instance, &bids, &rules)?;
    let mut running_max = initial_max(&bids);
    let mut activations = vec![0usize; n];
    let mut schedule = Activations::new(&config.schedule, n);
    let mut steps = Vec::with_capacity(config.steps);
    let mut outcome = initial_outcome.clone();
    for t in 1..=config.steps {
        let i = schedule.bidder(t);
        let before = bids.row(i).to_vec();
        let (current, best, set) = best_response_gap(instance, &bids, &rules, i)?;
        let step = if config.lazy && current == best {
            let flags = overbid_flags(instance.valuation(i), &before, &outcome.allocation[i])?;
            Step {
                t,
                bidder: i,
                lazy: true,
                after: before.clone(),
                before,
                demand_set: Some(set),
                best_utility: best,
                aggressiveness: None,
                flags,
                bids: bids.clone(),
                outcome: outcome.clone(),
                running_max: running_max.clone(),
            }
        } else {
            let ctx = UpdateContext { instance, bids: &bids, rules: &rules, bidder: i, activation: activations[i] };
            let report = config.strategies[i].update(&ctx)?;
            activations[i] += 1;
            bids.set_row(i, report.row.clone())?;
            outcome = allocate(instance, &bids, &rules)?;
            for (j, x) in report.row.iter().enumerate() {
                if *x > running_max[j] {
                    running_max[j] = x.clone();
                }
            }
            Step {
                t,
                bidder: i,
                lazy: false,
                before,
                after: report.row,
                demand_set: report.demand_set,
                best_utility: report.best_utility,
                aggressiveness: Some(report.aggressiveness),
                flags: report.flags,
                bids: bids.clone(),
                outcome: outcome.clone(),
                running_max: running_max.clone(),
            }
        };
        steps.push(step);
        if config.stop_on_fixed_point && is_pne(instance, &bids, &rules)?.is_pne {
            break;
        }
    }
    Ok(Trace {
        instance: instance.clone(),
        rules,
        lazy: config.lazy,
        schedule: config.schedule.clone(),
        strategies: config.strategies.clone(),
        initial: config.initial.clone(),
        initial_outcome,
        steps,
    })
}

/// Result of a pure Nash equilibrium check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PneCheck {
    pub is_pne: bool,
    /// First bidder that can improve, a demand set, and the gain.
    pub witness: Option<(usize, ItemSet, Value)>,
}

/// Whether every bidder's utility equals its best-response utility.
pub fn is_pne(instance: &Instance, bids: &BidProfile, rules: &AuctionRules) -> Result<PneCheck> {
    for i in 0..instance.n() {
        let (current, best, set) = best_response_gap(instance, bids, rules, i)?;
        if current < best {
            return Ok(PneCheck { is_pne: false, witness: Some((i, set, best - current)) });
        }
    }
    Ok(PneCheck { is_pne: true, witness: None })
}

/// Summary of a clean replay.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub steps: usize,
    pub lazy_steps: usize,
}

/// Replays every step: bid bookkeeping, outcomes, `u^D >= 0`, measured
/// aggressiveness, lazy decisions and running maxima.
pub fn validate_trace(trace: &Trace) -> Result<ValidationReport> {
    let inst = &trace.instance;
    let rules = &trace.rules;
    let corrupt = |step: usize, detail: String| Error::TraceCorrupted { step, detail };
    let check_outcome = |t: usize, bids: &BidProfile, recorded: &Outcome| -> Result<()> {
        let fresh = allocate(inst, bids, rules).map_err(|e| corrupt(t, e.to_string()))?;
        if fresh != *recorded {
            return Err(corrupt(t, "recorded outcome differs from the replayed auction".into()));
        }
        if let Some((i, _)) = fresh.declared_utility.iter().enumerate().find(|(_, u)| u.is_negative()) {
            return Err(corrupt(t, format!("negative declared utility of bidder {}", i + 1)));
        }
        Ok(())
    };
    check_outcome(0, &trace.initial, &trace.initial_outcome)?;
    let mut bids = trace.initial.clone();
    let mut running_max = initial_max(&bids);
    let mut lazy_steps = 0;
    for (idx, s) in trace.steps.iter().enumerate() {
        let t = idx + 1;
        if s.t != t || s.bidder >= trace.n() {
            return Err(corrupt(t, "step index or bidder out of sequence".into()));
        }
        if s.before != bids.row(s.bidder) {
            return Err(corrupt(t, "recorded row before the step differs from the replay".into()));
        }
        let (current, best, _) =
            best_response_gap(inst, &bids, rules, s.bidder).map_err(|e| corrupt(t, e.to_string()))?;
        if best != s.best_utility {
            return Err(corrupt(t, "recorded best-response utility differs".into()));
        }
        if s.lazy {
            lazy_steps += 1;
            if !trace.lazy || current != best || s.after != s.before {
                return Err(corrupt(t, "lazy step where the bidder was not best-responding".into()));
            }
        } else {
            if trace.lazy && current == best {
                return Err(corrupt(t, "eager step of a best-responding bidder in a lazy run".into()));
            }
            let alpha = measure_aggressiveness(inst, &bids, &s.after, rules, s.bidder)
                .map_err(|e| corrupt(t, e.to_string()))?;
            if s.aggressiveness.as_ref() != Some(&alpha) {
                return Err(corrupt(t, "recorded aggressiveness differs".into()));
            }
        }
        bids.set_row(s.bidder, s.after.clone()).map_err(|e| corrupt(t, e.to_string()))?;
        if bids != s.bids {
            return Err(corrupt(t, "recorded bid profile differs from the replay".into()));
        }
        check_outcome(t, &bids, &s.outcome)?;
        for (j, x) in s.after.iter().enumerate() {
            if *x > running_max[j] {
                running_max[j] = x.clone();
            }
        }
        if running_max != s.running_max {
            return Err(corrupt(t, "running maxima differ".into()));
        }
    }
    Ok(ValidationReport { steps: trace.len(), lazy_steps })
}

// ---- trace files ----

const FORMAT: &str = "auction-lab-trace/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeRecord {
    /// 1-based winners; `null` for unsold items.
    winner: Vec<Option<usize>>,
    price: Vec<Value>,
    utility: Vec<Value>,
    declared_utility: Vec<Value>,
    sw: Value,
    dw: Value,
}

impl OutcomeRecord {
    fn from_outcome(o: &Outcome) -> Self {
        OutcomeRecord {
            winner: o.winner.iter().map(|w| w.map(|i| i + 1)).collect(),
            price: o.price.clone(),
            utility: o.utility.clone(),
            declared_utility: o.declared_utility.clone(),
            sw: o.social_welfare.clone(),
            dw: o.declared_welfare.clone(),
        }
    }

    fn into_outcome(self, n: usize, line: usize) -> Result<Outcome> {
        let m = self.winner.len();
        let mut allocation = vec![ItemSet::empty(m); n];
        let mut winner = Vec::with_capacity(m);
        for (j, w) in self.winner.into_iter().enumerate() {
            match w {
                Some(i) if i == 0 || i > n => {
                    return Err(Error::TraceCorrupted { step: line, detail: format!("winner {i} out of range") })
                }
                Some(i) => {
                    allocation[i - 1].insert(j);
                    winner.push(Some(i - 1));
                }
                None => winner.push(None),
            }
        }
        Ok(Outcome {
            winner,
            price: self.price,
            allocation,
            utility: self.utility,
            declared_utility: self.declared_utility,
            social_welfare: self.sw,
            declared_welfare: self.dw,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderLine {
    format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scenario: Option<String>,
    items: usize,
    valuations: Vec<ValuationSpec>,
    /// 1-based bidder priority per item.
    tie_break: Vec<Vec<usize>>,
    allocate_zero_bids: bool,
    lazy: bool,
    schedule: Schedule,
    strategies: Vec<Strategy>,
    initial_bids: BidProfile,
    initial_outcome: OutcomeRecord,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepLine {
    t: usize,
    bidder: usize,
    lazy: bool,
    before: Vec<Value>,
    row: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    demand_set: Option<ItemList>,
    best_utility: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Aggressiveness>,
    flags: OverbidFlags,
    bids: BidProfile,
    outcome: OutcomeRecord,
    running_max: Vec<Value>,
}

/// Writes the trace as JSON lines: a header, then one line per step.
pub fn write_jsonl<W: Write>(trace: &Trace, scenario: Option<&str>, mut out: W) -> Result<()> {
    let header = HeaderLine {
        format: FORMAT.into(),
        scenario: scenario.map(str::to_owned),
        items: trace.m(),
        valuations: trace.instance.valuations().iter().map(Valuation::to_spec).collect(),
        tie_break: trace.rules.tie_break.orders().iter().map(|o| o.iter().map(|i| i + 1).collect()).collect(),
        allocate_zero_bids: trace.rules.allocate_zero_bids,
        lazy: trace.lazy,
        schedule: trace.schedule.clone(),
        strategies: trace.strategies.clone(),
        initial_bids: trace.initial.clone(),
        initial_outcome: OutcomeRecord::from_outcome(&trace.initial_outcome),
    };
    serde_json::to_writer(&mut out, &header).map_err(json_io)?;
    out.write_all(b"\n")?;
    for s in &trace.steps {
        let line = StepLine {
            t: s.t,
            bidder: s.bidder + 1,
            lazy: s.lazy,
            before: s.before.clone(),
            row: s.after.clone(),
            demand_set: s.demand_set.as_ref().map(ItemList::from),
            best_utility: s.best_utility.clone(),
            alpha: s.aggressiveness.clone(),
            flags: s.flags.clone(),
            bids: s.bids.clone(),
            outcome: OutcomeRecord::from_outcome(&s.outcome),
            running_max: s.running_max.clone(),
        };
        serde_json::to_writer(&mut out, &line).map_err(json_io)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn json_io(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Reads a trace written by [`write_jsonl`]. Structural problems are
/// reported as corruption at the offending line (header = step 0).
pub fn read_jsonl<R: BufRead>(input: R) -> Result<(Trace, Option<String>)> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let bad = |step: usize, detail: String| Error::TraceCorrupted { step, detail };
    let (_, first) = lines.next().ok_or_else(|| bad(0, "empty trace file".into()))?;
    let header: HeaderLine = serde_json::from_str(&first?).map_err(|e| bad(0, format!("header: {e}")))?;
    if header.format != FORMAT {
        return Err(bad(0, format!("unknown format {:?}", header.format)));
    }
    let vals = header.valuations.iter().map(Valuation::from_spec).collect::<Result<Vec<_>>>()?;
    let instance = Instance::new(header.items, vals).map_err(|e| bad(0, e.to_string()))?;
    let n = instance.n();
    let orders = header
        .tie_break
        .iter()
        .map(|o| o.iter().map(|&i| i.checked_sub(1).ok_or_else(|| bad(0, "tie-break names bidder 0".into()))).collect())
        .collect::<Result<Vec<Vec<usize>>>>()?;
    let tie_break = TieBreak::from_orders(n, orders).map_err(|e| bad(0, e.to_string()))?;
    let rules = AuctionRules { tie_break, allocate_zero_bids: header.allocate_zero_bids };
    let initial = BidProfile::from_rows(header.initial_bids.rows().to_vec()).map_err(|e| bad(0, e.to_string()))?;
    let initial_outcome = header.initial_outcome.into_outcome(n, 0)?;
    let mut steps = Vec::new();
    for (count, (_, line)) in lines.enumerate() {
        let t = count + 1;
        let s: StepLine = serde_json::from_str(&line?).map_err(|e| bad(t, e.to_string()))?;
        if s.bidder == 0 || s.bidder > n {
            return Err(bad(t, format!("bidder {} out of range", s.bidder)));
        }
        let demand_set = match s.demand_set {
            Some(list) => Some(
                ItemSet::from_one_based(header.items, &list.0)
                    .map_err(|j| bad(t, format!("demand set names item {j}")))?,
            ),
            None => None,
        };
        steps.push(Step {
            t: s.t,
            bidder: s.bidder - 1,
            lazy: s.lazy,
            before: s.before,
            after: s.row,
            demand_set,
            best_utility: s.best_utility,
            aggressiveness: s.alpha,
            flags: s.flags,
            bids: s.bids,
            outcome: s.outcome.into_outcome(n, t)?,
            running_max: s.running_max,
        });
    }
    let trace = Trace {
        instance,
        rules,
        lazy: header.lazy,
        schedule: header.schedule,
        strategies: header.strategies,
        initial,
        initial_outcome,
        steps,
    };
    Ok((trace, header.scenario))
}

/// CSV summary with columns `t, bidder, sw, dw, alpha, lazy`; row `t = 0`
/// describes `b^0`.
pub fn write_csv<W: Write>(trace: &Trace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["t", "bidder", "sw", "dw", "alpha", "lazy"]).map_err(csv_err)?;
    w.write_record(["0", "", &trace.sw(0).to_string(), &trace.dw(0).to_string(), "", ""]).map_err(csv_err)?;
    for s in &trace.steps {
        let alpha = s.aggressiveness.as_ref().map(ToString::to_string).unwrap_or_default();
        w.write_record([
            s.t.to_string(),
            (s.bidder + 1).to_string(),
            s.outcome.social_welfare.to_string(),
            s.outcome.declared_welfare.to_string(),
            alpha,
            s.lazy.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
