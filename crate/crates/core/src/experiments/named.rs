use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{is_pne, run, RunConfig, Schedule, Trace};
use crate::error::{Error, Result};
use crate::items::{ItemList, ItemSet};
use crate::mechanism::{AuctionRules, BidProfile, Instance, TieBreak};
use crate::strategies::{best_response_gap, Strategy};
use crate::valuations::{generate, xos_clause, GeneratorKind, GeneratorParams, Valuation};
use crate::value::{q, Value};

use super::bounds::{check_lemmas, check_pointwise};
use super::hard::{check_hard_instance, check_no_pne_lemmas};
use super::opt::compute_opt;
use super::{BoundParams, BoundReport, Relation};

const NAMES: [&str; 10] = [
    "gross-underbidding",
    "gross-overbidding",
    "tightness-xos",
    "adversarial-cycle",
    "mph3",
    "hard-instance-k2",
    "hard-instance-k4",
    "hard-instance-k8",
    "no-pne-lemmas",
    "lazy-xos",
];

pub fn experiment_names() -> &'static [&'static str] {
    &NAMES
}

/// `key=value` overrides for a named experiment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentParams(BTreeMap<String, String>);

impl ExperimentParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    /// Parses one `key=value` pair.
    pub fn insert_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::InvalidParam(format!("parameter {pair:?} is not of the form key=value")))?;
        self.0.insert(k.trim().to_string(), v.trim().to_string());
        Ok(())
    }

    fn only(&self, known: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidParam(format!("unknown parameter {k:?}; expected one of {known:?}"))),
            None => Ok(()),
        }
    }

    fn value(&self, key: &str, default: Value) -> Result<Value> {
        match self.0.get(key) {
            Some(s) => s.parse().map_err(|_| Error::InvalidParam(format!("{key}={s} is not a rational"))),
            None => Ok(default),
        }
    }

    fn int<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.0.get(key) {
            Some(s) => s.parse().map_err(|_| Error::InvalidParam(format!("{key}={s} is not a nonnegative integer"))),
            None => Ok(default),
        }
    }
}

/// A report plus the trace it was computed from, when there is one.
#[derive(Clone, Debug)]
pub struct NamedRun {
    pub name: String,
    pub report: BoundReport,
    pub trace: Option<Trace>,
}

/// `n` valuations from the generator, bidder `i` seeded with `64·seed + i`.
pub fn random_instance(params: &GeneratorParams, n: usize, seed: u64) -> Result<Instance> {
    let vals = (0..n)
        .map(|i| generate(params, seed.wrapping_mul(64).wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(params.items, vals)
}

pub fn run_named_experiment(name: &str, params: &ExperimentParams) -> Result<NamedRun> {
    let (report, trace) = match name {
        "gross-underbidding" => gross_underbidding(params)?,
        "gross-overbidding" => gross_overbidding(params)?,
        "tightness-xos" => tightness(params)?,
        "adversarial-cycle" => adversarial_cycle(params)?,
        "mph3" => mph3(params)?,
        "hard-instance-k2" | "hard-instance-k4" | "hard-instance-k8" => {
            params.only(&["samples", "seed"])?;
            let k = name["hard-instance-k".len()..].parse().expect("names are fixed");
            (check_hard_instance(k, params.int("samples", 1000)?, params.int("seed", 0)?)?, None)
        }
        "no-pne-lemmas" => {
            params.only(&["k", "samples", "seed"])?;
            (check_no_pne_lemmas(params.int("k", 8)?, params.int("samples", 200)?, params.int("seed", 0)?)?, None)
        }
        "lazy-xos" => lazy_xos(params)?,
        other => return Err(Error::UnknownExperiment(other.to_string())),
    };
    Ok(NamedRun { name: name.to_string(), report, trace })
}

fn positive(key: &str, v: &Value) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("{key} must be positive, got {v}")))
    }
}

fn base_params(trace: &Trace, opt: &Value) -> BoundParams {
    BoundParams { n: trace.n(), m: trace.m(), steps: trace.len(), opt: Some(opt.clone()), ..Default::default() }
}

/// Every recorded step leaves the active bidder at its best-response utility.
fn check_best_responses(report: &mut BoundReport, trace: &Trace) {
    for s in &trace.steps {
        report.check("best-response", Some(s.t), s.outcome.utility[s.bidder].clone(), Relation::Eq, s.best_utility.clone());
    }
}

fn single_item(n: usize, c: &Value) -> Result<Instance> {
    let mut vals = vec![Valuation::additive(vec![c.clone()])?];
    for _ in 1..n {
        vals.push(Valuation::additive(vec![Value::one()])?);
    }
    Instance::new(1, vals)
}

fn single_item_params(params: &ExperimentParams, extra: &[&str]) -> Result<(usize, Value, Value)> {
    let mut known = vec!["n", "c", "eps"];
    known.extend_from_slice(extra);
    params.only(&known)?;
    let n: usize = params.int("n", 3)?;
    if n < 2 {
        return Err(Error::InvalidParam("n must be at least 2".into()));
    }
    let c = params.value("c", Value::from_int(10))?;
    let eps = params.value("eps", q(1, 100))?;
    positive("eps", &eps)?;
    if c <= Value::one() {
        return Err(Error::InvalidParam("c must exceed 1".into()));
    }
    Ok((n, c, eps))
}

fn gross_underbidding(params: &ExperimentParams) -> Result<(BoundReport, Option<Trace>)> {
    let (n, c, eps) = single_item_params(params, &["rounds"])?;
    let rounds: usize = params.int("rounds", 3)?;
    let instance = single_item(n, &c)?;
    let mut config = RunConfig::new(&instance, Strategy::Hold);
    config.steps = n * rounds;
    config.strategies = (0..n)
        .map(|i| Strategy::scripted((0..rounds).map(|a| vec![&eps * Value::from_usize(a * n + i + 1)]).collect()))
        .collect();
    let trace = run(&instance, &config)?;
    let opt = c.clone();
    let mut report = BoundReport::new("gross-underbidding", base_params(&trace, &opt));
    check_best_responses(&mut report, &trace);
    for r in 1..=rounds {
        let t = r * n;
        report.observe_ratio(trace.sw(t) / &opt);
        report.check("round-end-welfare", Some(t), trace.sw(t).clone(), Relation::Eq, Value::one());
    }
    let alpha = trace.min_aggressiveness().unwrap_or_default();
    report.params.alpha = Some(alpha.clone());
    report.note(format!("each step raises the winning bid by {eps}; smallest measured aggressiveness {alpha}"));
    Ok((report, Some(trace)))
}

fn gross_overbidding(params: &ExperimentParams) -> Result<(BoundReport, Option<Trace>)> {
    let (n, c, eps) = single_item_params(params, &[])?;
    let instance = single_item(n, &c)?;
    let mut config = RunConfig::new(&instance, Strategy::XosUpdate);
    config.stop_on_fixed_point = true;
    config.strategies = (0..n)
        .map(|i| {
            let bid = if i + 1 == n { &c + &eps } else { &eps * Value::from_usize(i + 1) };
            Strategy::Scripted { rows: vec![vec![bid]], then: Box::new(Strategy::XosUpdate) }
        })
        .collect();
    let trace = run(&instance, &config)?;
    let opt = c.clone();
    let mut report = BoundReport::new("gross-overbidding", base_params(&trace, &opt));
    check_best_responses(&mut report, &trace);
    let big_t = trace.len();
    report.check("stops-after-first-round", None, Value::from_usize(big_t), Relation::Eq, Value::from_usize(n));
    let pne = is_pne(&trace.instance, trace.bids(big_t), &trace.rules)?;
    report.check("terminal-profile-is-pne", Some(big_t), Value::from(pne.is_pne as i64), Relation::Eq, Value::one());
    report.check("final-welfare", Some(big_t), trace.sw(big_t).clone(), Relation::Eq, Value::one());
    report.observe_ratio(trace.sw(big_t) / &opt);
    let last = trace.step(big_t);
    report.check(
        "last-bidder-overbids-grand-bundle",
        Some(big_t),
        Value::from(last.flags.grand as i64),
        Relation::Eq,
        Value::zero(),
    );
    Ok((report, Some(trace)))
}

/// The three-bidder unit-demand instance on which one round of XOS updates
/// ends at a third of the optimum.
fn tightness_instance(eps: &Value) -> Result<Instance> {
    let one = Value::one();
    let rows = vec![
        vec![one.clone(), Value::zero(), Value::zero()],
        vec![&one + eps, &one + eps * Value::from_int(2), &one + eps * Value::from_int(3)],
        vec![Value::zero(), Value::zero(), one],
    ];
    Instance::new(3, rows.into_iter().map(Valuation::unit_demand).collect::<Result<Vec<_>>>()?)
}

/// Instance and run configuration of the tightness example.
pub fn tightness_setup(eps: &Value) -> Result<(Instance, RunConfig)> {
    let instance = tightness_instance(eps)?;
    let mut config = RunConfig::new(&instance, Strategy::XosUpdate);
    config.steps = 3;
    config.rules.allocate_zero_bids = false;
    let mut initial = BidProfile::zeros(3, 3);
    initial.set_row(1, vec![Value::one() + eps, Value::zero(), Value::zero()])?;
    config.initial = initial;
    Ok((instance, config))
}

fn tightness(params: &ExperimentParams) -> Result<(BoundReport, Option<Trace>)> {
    params.only(&["eps"])?;
    let eps = params.value("eps", q(1, 1000))?;
    positive("eps", &eps)?;
    let (instance, config) = tightness_setup(&eps)?;
    let trace = run(&instance, &config)?;
    let opt = compute_opt(&instance)?.value;
    let mut report = BoundReport::new("tightness-xos", base_params(&trace, &opt));
    let one = Value::one();
    report.check("first-update-keeps-bids", Some(1), Value::from((trace.bids(1) == trace.bids(0)) as i64), Relation::Eq, one.clone());
    report.check("last-update-keeps-bids", Some(3), Value::from((trace.bids(3) == trace.bids(2)) as i64), Relation::Eq, one.clone());
    report.check("final-welfare", Some(3), trace.sw(3).clone(), Relation::Eq, &one + &eps * Value::from_int(3));
    report.check("final-declared-welfare", Some(3), trace.dw(3).clone(), Relation::Eq, &one + &eps * Value::from_int(3));
    report.check("optimum", None, opt.clone(), Relation::Eq, Value::from_int(3) + &eps * Value::from_int(2));
    report.observe_ratio(trace.sw(3) / &opt);
    report.absorb(check_pointwise(&trace, &opt)?);
    Ok((report, Some(trace)))
}

fn adversarial_cycle(params: &ExperimentParams) -> Result<(BoundReport, Option<Trace>)> {
    params.only(&["n", "eps", "steps"])?;
    let n: usize = params.int("n", 6)?;
    if n < 3 {
        return Err(Error::InvalidParam("n must be at least 3".into()));
    }
    let eps = params.value("eps", q(1, 100))?;
    positive("eps", &eps)?;
    let steps: usize = params.int("steps", 100)?;
    let m = n - 1;
    let top = Value::one() + &eps;
    let mut vals = vec![Valuation::unit_demand(vec![top.clone(); m])?];
    for i in 1..n {
        let mut w = vec![Value::zero(); m];
        w[i - 1] = Value::one();
        vals.push(Valuation::unit_demand(w)?);
    }
    let instance = Instance::new(m, vals)?;
    let mut config = RunConfig::new(&instance, Strategy::XosUpdate);
    config.steps = steps;
    config.strategies[0] = Strategy::PotentialProcedure { demand_script: (1..=m).map(|j| ItemList(vec![j])).collect() };
    config.schedule = Schedule::Scripted { order: (2..=n).flat_map(|i| [1, i]).collect() };
    let trace = run(&instance, &config)?;
    let opt = compute_opt(&instance)?.value;
    let mut report = BoundReport::new("adversarial-cycle", base_params(&trace, &opt));
    // Item j to bidder j + 1.
    let matching: Value = (1..n).map(|i| instance.valuation(i).value(&ItemSet::from_items(m, [i - 1]))).sum();
    report.check("matching-welfare", None, matching, Relation::Eq, Value::from_usize(m));
    report.check("optimum-at-least-matching", None, opt.clone(), Relation::Ge, Value::from_usize(m));
    check_best_responses(&mut report, &trace);
    let advertised = &top / Value::from_usize(m);
    for t in 1..=trace.len() {
        report.check("welfare", Some(t), trace.sw(t).clone(), Relation::Eq, top.clone());
        report.check("ratio", Some(t), trace.sw(t) / &opt, Relation::Le, advertised.clone());
        report.observe_ratio(trace.sw(t) / &opt);
    }
    report.note(format!("exact optimum {opt}: bidder 1 may replace one unit bidder"));
    Ok((report, Some(trace)))
}

/// Instance, priorities and scripted rows of the MPH-3 example with `k`
/// bundle bidders. Bundle bidders start from the rows of an even round.
pub fn mph3_setup(k: usize, cycles: usize) -> Result<(Instance, RunConfig)> {
    let m = k + 4;
    let n = 2 * k + 4;
    let (a, b, c, d) = (k, k + 1, k + 2, k + 3);
    let bundles = |i: usize| -> [[usize; 3]; 2] {
        if i + 1 < k {
            [[i, a, b], [i, c, d]]
        } else {
            [[i, a, c], [i, b, d]]
        }
    };
    let mut vals = Vec::with_capacity(n);
    for i in 0..k {
        let clauses = bundles(i)
            .iter()
            .map(|s| vec![(ItemSet::from_items(m, s.iter().copied()), Value::from_int(3))])
            .collect();
        vals.push(Valuation::mph(m, 3, clauses)?);
    }
    for j in 0..m {
        let mut w = vec![Value::zero(); m];
        w[j] = Value::one();
        vals.push(Valuation::unit_demand(w)?);
    }
    let instance = Instance::new(m, vals)?;

    let singles: Vec<usize> = (k..n).collect();
    let orders = (0..m)
        .map(|j| {
            let mut order: Vec<usize> = if j == b || j == d {
                // bidders 1..k-1 before bidder k, higher index first
                (0..k - 1).rev().chain([k - 1]).collect()
            } else {
                (0..k).rev().collect()
            };
            order.extend(&singles);
            order
        })
        .collect();
    let mut config = RunConfig::new(&instance, Strategy::Hold);
    config.rules = AuctionRules::new(TieBreak::from_orders(n, orders)?);
    config.steps = cycles * n;
    let row = |set: &[usize; 3]| -> Vec<Value> {
        let mut r = vec![Value::zero(); m];
        for &j in set {
            r[j] = Value::one();
        }
        r
    };
    let mut initial = BidProfile::zeros(n, m);
    for i in 0..k {
        initial.set_row(i, row(&bundles(i)[1]))?;
        // odd cycles buy the first bundle, even cycles the second
        let rows = (0..cycles).map(|r| row(&bundles(i)[r % 2])).collect();
        config.strategies[i] = Strategy::scripted(rows);
    }
    for j in 0..m {
        let mut r = vec![Value::zero(); m];
        r[j] = Value::one();
        initial.set_row(k + j, r)?;
    }
    config.initial = initial;
    Ok((instance, config))
}

fn mph3(params: &ExperimentParams) -> Result<(BoundReport, Option<Trace>)> {
    params.only(&["k", "cycles"])?;
    let k: usize = params.int("k", 5)?;
    if k < 2 {
        return Err(Error::InvalidParam("k must be at least 2".into()));
    }
    let cycles: usize = params.int("cycles", 3)?;
    let (instance, config) = mph3_setup(k, cycles)?;
    let trace = run(&instance, &config)?;
    let opt = compute_opt(&instance)?.value;
    let mut report = BoundReport::new("mph3", base_params(&trace, &opt));
    report.check("optimum", None, opt.clone(), Relation::Eq, Value::from_usize(k + 4));
    check_best_responses(&mut report, &trace);
    for s in &trace.steps {
        report.check("welfare", Some(s.t), s.outcome.social_welfare.clone(), Relation::Eq, Value::from_int(3));
        report.observe_ratio(&s.outcome.social_welfare / &opt);
    }
    report.note("bundle bidders replay the scripted rows of the construction under its stated priorities");
    Ok((report, Some(trace)))
}

/// Random XOS instance and lazy XOS-update configuration with random
/// initial rows.
pub fn lazy_xos_setup(seed: u64, n: usize, m: usize) -> Result<(Instance, RunConfig)> {
    let gen = GeneratorParams::new(GeneratorKind::Xos, m);
    let instance = random_instance(&gen, n, seed)?;
    let mut config = RunConfig::new(&instance, Strategy::XosUpdate);
    config.lazy = true;
    // Random fractions of a supporting clause: never overbidding, rarely a
    // best response.
    // Redrawn until no bidder is best-responding at b^0.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let rules = config.effective_rules();
    let mut draw = |i: usize| -> Result<Vec<Value>> {
        let set = ItemSet::from_mask(m, rng.gen_range(0..1u64 << m));
        let clause = xos_clause(instance.valuation(i), &set)?;
        Ok(clause.iter().map(|c| c * Value::new(rng.gen_range(0..=1000), 1000)).collect())
    };
    let mut bids = BidProfile::from_rows((0..n).map(&mut draw).collect::<Result<Vec<_>>>()?)?;
    for _ in 0..100 {
        let mut settled = true;
        for i in 0..n {
            let (current, best, _) = best_response_gap(&instance, &bids, &rules, i)?;
            if current == best {
                settled = false;
                bids.set_row(i, draw(i)?)?;
            }
        }
        if settled {
            break;
        }
    }
    config.initial = bids;
    Ok((instance, config))
}

fn lazy_xos(params: &ExperimentParams) -> Result<(BoundReport, Option<Trace>)> {
    params.only(&["seed", "n", "m"])?;
    let seed: u64 = params.int("seed", 0)?;
    let n: usize = params.int("n", 4)?;
    let m: usize = params.int("m", 6)?;
    // A bidder who best-responds at every activation never updates, and the
    // bound then has no qualifying step; such seeds are skipped.
    for s in seed..seed.saturating_add(100) {
        let (instance, config) = lazy_xos_setup(s, n, m)?;
        let trace = run(&instance, &config)?;
        let opt = compute_opt(&instance)?.value;
        let pointwise = match check_pointwise(&trace, &opt) {
            Ok(r) => r,
            Err(Error::NotQualifying(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut report = BoundReport::new("lazy-xos", base_params(&trace, &opt));
        if s != seed {
            report.note(format!("seeds {seed}..{} skipped: some bidder never updated", s - 1));
        }
        let lazy_steps = trace.steps.iter().filter(|st| st.lazy).count();
        report.note(format!("seed {s}: {lazy_steps} of {} steps were lazy", trace.len()));
        report.absorb(pointwise);
        report.absorb(check_lemmas(&trace, &opt)?);
        return Ok((report, Some(trace)));
    }
    Err(Error::NotQualifying(format!("no qualifying lazy trace for seeds {seed}..{}", seed.saturating_add(99))))
}
