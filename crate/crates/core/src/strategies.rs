//! Bid-update rules and the checkers for aggressiveness, safety and
//! no-overbidding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::Trace;
use crate::error::{Error, Result};
use crate::items::{ItemList, ItemSet};
use crate::mechanism::{allocate, AuctionRules, BidProfile, Instance};
use crate::valuations::{additive_underapprox, demand_sets, xos_clause, DemandMode, DemandQuery, SetFunction};
use crate::valuations::Valuation;
use crate::value::Value;

/// Largest item count for the exhaustive strong no-overbidding check.
pub const MAX_STRONG_ITEMS: usize = 16;

/// How a bidder rebids when activated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "StrategyRepr", into = "StrategyRepr")]
pub enum Strategy {
    /// Supporting clause of the smallest-mask demand set.
    XosUpdate,
    /// Additive under-approximation of the residual utility on an
    /// inclusion-minimal demand set, added to the current prices.
    SubadditiveNoOverbid,
    /// As above, scaled so the bids sum to the residual utility of the set.
    SubadditiveAggressive,
    /// XOS update whose demand set is taken from a script (cycled by
    /// activation count) when one is given.
    PotentialProcedure { demand_script: Vec<ItemList> },
    /// Bids `p_j + U*/|D|` on the smallest-mask demand set `D`.
    SurplusSplit,
    /// Fixed rows for the first activations, then `then`.
    Scripted { rows: Vec<Vec<Value>>, then: Box<Strategy> },
    /// Never changes the bid.
    Hold,
}

/// File form: every variant is a struct so unknown fields are rejected.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum StrategyRepr {
    XosUpdate {},
    SubadditiveNoOverbid {},
    SubadditiveAggressive {},
    PotentialProcedure {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        demand_script: Vec<ItemList>,
    },
    SurplusSplit {},
    Scripted {
        rows: Vec<Vec<Value>>,
        #[serde(default = "hold")]
        then: Box<Strategy>,
    },
    Hold {},
}

impl From<StrategyRepr> for Strategy {
    fn from(r: StrategyRepr) -> Self {
        match r {
            StrategyRepr::XosUpdate {} => Strategy::XosUpdate,
            StrategyRepr::SubadditiveNoOverbid {} => Strategy::SubadditiveNoOverbid,
            StrategyRepr::SubadditiveAggressive {} => Strategy::SubadditiveAggressive,
            StrategyRepr::PotentialProcedure { demand_script } => Strategy::PotentialProcedure { demand_script },
            StrategyRepr::SurplusSplit {} => Strategy::SurplusSplit,
            StrategyRepr::Scripted { rows, then } => Strategy::Scripted { rows, then },
            StrategyRepr::Hold {} => Strategy::Hold,
        }
    }
}

impl From<Strategy> for StrategyRepr {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::XosUpdate => StrategyRepr::XosUpdate {},
            Strategy::SubadditiveNoOverbid => StrategyRepr::SubadditiveNoOverbid {},
            Strategy::SubadditiveAggressive => StrategyRepr::SubadditiveAggressive {},
            Strategy::PotentialProcedure { demand_script } => StrategyRepr::PotentialProcedure { demand_script },
            Strategy::SurplusSplit => StrategyRepr::SurplusSplit {},
            Strategy::Scripted { rows, then } => StrategyRepr::Scripted { rows, then },
            Strategy::Hold => StrategyRepr::Hold {},
        }
    }
}

fn hold() -> Box<Strategy> {
    Box::new(Strategy::Hold)
}

impl Strategy {
    pub fn scripted(rows: Vec<Vec<Value>>) -> Strategy {
        Strategy::Scripted { rows, then: hold() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::XosUpdate => "xos_update",
            Strategy::SubadditiveNoOverbid => "subadditive_no_overbid",
            Strategy::SubadditiveAggressive => "subadditive_aggressive",
            Strategy::PotentialProcedure { .. } => "potential_procedure",
            Strategy::SurplusSplit => "surplus_split",
            Strategy::Scripted { .. } => "scripted",
            Strategy::Hold => "hold",
        }
    }

    /// Checks scripts against the item count.
    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            Strategy::Scripted { rows, then } => {
                for (c, row) in rows.iter().enumerate() {
                    if row.len() != m {
                        return Err(Error::Dimension(format!(
                            "scripted row {} has {} entries, expected {m}",
                            c + 1,
                            row.len()
                        )));
                    }
                    if let Some(x) = row.iter().find(|x| x.is_negative()) {
                        return Err(Error::Precondition(format!("scripted row {} has negative bid {x}", c + 1)));
                    }
                }
                then.validate(m)
            }
            Strategy::PotentialProcedure { demand_script } => {
                for list in demand_script {
                    ItemSet::from_one_based(m, &list.0)
                        .map_err(|j| Error::Dimension(format!("demand script names item {j} of {m}")))?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Computes the new row of bidder `ctx.bidder`.
    pub fn update(&self, ctx: &UpdateContext<'_>) -> Result<UpdateReport> {
        match self {
            Strategy::XosUpdate => xos_update(ctx),
            Strategy::SubadditiveNoOverbid => subadd_update(ctx, false),
            Strategy::SubadditiveAggressive => subadd_update(ctx, true),
            Strategy::PotentialProcedure { demand_script } => potential_update(ctx, demand_script),
            Strategy::SurplusSplit => surplus_split_update(ctx),
            Strategy::Scripted { rows, then } => match rows.get(ctx.activation) {
                Some(row) => report(ctx, row.clone(), None, None),
                None => then.update(&UpdateContext { activation: ctx.activation - rows.len(), ..*ctx }),
            },
            Strategy::Hold => report(ctx, ctx.bids.row(ctx.bidder).to_vec(), None, None),
        }
    }
}

/// Everything an update may look at.
#[derive(Clone, Copy, Debug)]
pub struct UpdateContext<'a> {
    pub instance: &'a Instance,
    pub bids: &'a BidProfile,
    pub rules: &'a AuctionRules,
    pub bidder: usize,
    /// Number of earlier activations of this bidder.
    pub activation: usize,
}

impl<'a> UpdateContext<'a> {
    pub fn new(instance: &'a Instance, bids: &'a BidProfile, rules: &'a AuctionRules, bidder: usize) -> Self {
        UpdateContext { instance, bids, rules, bidder, activation: 0 }
    }

    fn valuation(&self) -> &'a Valuation {
        self.instance.valuation(self.bidder)
    }
}

/// Measured aggressiveness `u_i^D(new) / U*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Aggressiveness {
    Finite(Value),
    /// `U* = 0`: every update is aggressive for every `α`.
    Unbounded,
}

impl Aggressiveness {
    pub fn ratio(declared: &Value, best: &Value) -> Aggressiveness {
        if best.is_zero() {
            Aggressiveness::Unbounded
        } else {
            Aggressiveness::Finite(declared / best)
        }
    }

    pub fn finite(&self) -> Option<&Value> {
        match self {
            Aggressiveness::Finite(v) => Some(v),
            Aggressiveness::Unbounded => None,
        }
    }

    /// Whether the update is `alpha`-aggressive.
    pub fn at_least(&self, alpha: &Value) -> bool {
        self.finite().is_none_or(|a| a >= alpha)
    }
}

impl fmt::Display for Aggressiveness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aggressiveness::Finite(v) => write!(f, "{v}"),
            Aggressiveness::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for Aggressiveness {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "unbounded" {
            return Ok(Aggressiveness::Unbounded);
        }
        s.parse().map(Aggressiveness::Finite).map_err(|e: crate::value::ParseValueError| e.0)
    }
}

impl Serialize for Aggressiveness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Aggressiveness {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// No-overbidding flags of a bid row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverbidFlags {
    /// `None` when the item count exceeds [`MAX_STRONG_ITEMS`].
    pub strong: Option<bool>,
    pub weak: bool,
    pub grand: bool,
}

/// Result of one update.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateReport {
    pub row: Vec<Value>,
    /// Demand set the strategy bought, if it chose one.
    pub demand_set: Option<ItemSet>,
    /// `U*` against the pre-update opposing bids.
    pub best_utility: Value,
    pub aggressiveness: Aggressiveness,
    pub declared_utility: Value,
    pub flags: OverbidFlags,
    /// `Σa / f(D)` of the under-approximation, for the subadditive updates.
    pub underapprox_ratio: Option<Value>,
}

fn best_demand(v: &Valuation, prices: &[Value]) -> Result<(ItemSet, Value)> {
    let d = demand_sets(v, &DemandQuery { prices: prices.to_vec(), mode: DemandMode::InclusionMinimal })?;
    Ok((d.set().clone(), d.utility))
}

fn report(
    ctx: &UpdateContext<'_>,
    row: Vec<Value>,
    demand_set: Option<ItemSet>,
    underapprox_ratio: Option<Value>,
) -> Result<UpdateReport> {
    let v = ctx.valuation();
    let prices = ctx.bids.opposing_max(ctx.bidder);
    let (_, best) = best_demand(v, &prices)?;
    let bids = ctx.bids.with_row(ctx.bidder, row.clone())?;
    let outcome = allocate(ctx.instance, &bids, ctx.rules)?;
    let declared = outcome.declared_utility[ctx.bidder].clone();
    let flags = overbid_flags(v, &row, &outcome.allocation[ctx.bidder])?;
    Ok(UpdateReport {
        aggressiveness: Aggressiveness::ratio(&declared, &best),
        row,
        demand_set,
        best_utility: best,
        declared_utility: declared,
        flags,
        underapprox_ratio,
    })
}

/// Strong (when enumerable), weak on `won`, and grand-bundle flags.
pub fn overbid_flags(v: &Valuation, row: &[Value], won: &ItemSet) -> Result<OverbidFlags> {
    let strong = if v.items() <= MAX_STRONG_ITEMS {
        Some(check_no_overbidding(v, row, &OverbidMode::Strong)?.holds)
    } else {
        None
    };
    Ok(OverbidFlags {
        strong,
        weak: check_no_overbidding(v, row, &OverbidMode::Weak(won.clone()))?.holds,
        grand: check_no_overbidding(v, row, &OverbidMode::Grand)?.holds,
    })
}

fn xos_update(ctx: &UpdateContext<'_>) -> Result<UpdateReport> {
    let v = ctx.valuation();
    let (set, _) = best_demand(v, &ctx.bids.opposing_max(ctx.bidder))?;
    let row = xos_clause(v, &set)?;
    report(ctx, row, Some(set), None)
}

fn potential_update(ctx: &UpdateContext<'_>, script: &[ItemList]) -> Result<UpdateReport> {
    if script.is_empty() {
        return xos_update(ctx);
    }
    let v = ctx.valuation();
    let m = v.items();
    let list = &script[ctx.activation % script.len()];
    let set = ItemSet::from_one_based(m, &list.0)
        .map_err(|j| Error::Dimension(format!("demand script names item {j} of {m}")))?;
    let prices = ctx.bids.opposing_max(ctx.bidder);
    let (_, best) = best_demand(v, &prices)?;
    let got = crate::mechanism::residual_utility(v, &prices, &set);
    if got != best {
        return Err(Error::Precondition(format!(
            "scripted set {set} of bidder {} has utility {got}, best is {best}",
            ctx.bidder + 1
        )));
    }
    let row = xos_clause(v, &set)?;
    report(ctx, row, Some(set), None)
}

fn subadd_update(ctx: &UpdateContext<'_>, aggressive: bool) -> Result<UpdateReport> {
    let v = ctx.valuation();
    let prices = ctx.bids.opposing_max(ctx.bidder);
    let (set, _) = best_demand(v, &prices)?;
    let mut row = vec![Value::zero(); v.items()];
    if set.is_empty() {
        return report(ctx, row, Some(set), None);
    }
    let f = SetFunction::residual(v, &prices, &set)?;
    let under = additive_underapprox(&f)?;
    let gamma = if aggressive { f.full() / &under.total } else { Value::one() };
    for (pos, &j) in f.items.iter().enumerate() {
        row[j] = &gamma * &under.weights[pos] + &prices[j];
    }
    report(ctx, row, Some(set), Some(under.ratio))
}

fn surplus_split_update(ctx: &UpdateContext<'_>) -> Result<UpdateReport> {
    let v = ctx.valuation();
    let prices = ctx.bids.opposing_max(ctx.bidder);
    let (set, best) = best_demand(v, &prices)?;
    let mut row = vec![Value::zero(); v.items()];
    if !set.is_empty() {
        let share = &best / Value::from_usize(set.len());
        for j in set.iter() {
            row[j] = &prices[j] + &share;
        }
    }
    report(ctx, row, Some(set), None)
}

/// `u_i^D(b_{-i}, new_row) / U*` with `U*` taken against `old_bids`.
pub fn measure_aggressiveness(
    instance: &Instance,
    old_bids: &BidProfile,
    new_row: &[Value],
    rules: &AuctionRules,
    i: usize,
) -> Result<Aggressiveness> {
    let (_, best) = best_demand(instance.valuation(i), &old_bids.opposing_max(i))?;
    let bids = old_bids.with_row(i, new_row.to_vec())?;
    let declared = allocate(instance, &bids, rules)?.declared_utility[i].clone();
    Ok(Aggressiveness::ratio(&declared, &best))
}

/// Which sets a no-overbidding check covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OverbidMode {
    /// Every subset.
    Strong,
    /// One set, usually the won set.
    Weak(ItemSet),
    /// The grand bundle.
    Grand,
}

/// Outcome of a no-overbidding check; `witness` is a violated set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverbidCheck {
    pub holds: bool,
    pub witness: Option<ItemSet>,
}

/// Checks `Σ_{j∈S} row_j <= v(S)` over the sets selected by `mode`. The strong
/// witness is the violated set with the smallest mask.
pub fn check_no_overbidding(v: &Valuation, row: &[Value], mode: &OverbidMode) -> Result<OverbidCheck> {
    let m = v.items();
    if row.len() != m {
        return Err(Error::Dimension(format!("bid row has {} entries, valuation has {m} items", row.len())));
    }
    let single = |set: ItemSet| {
        let sum: Value = set.iter().map(|j| &row[j]).sum();
        if sum > v.value(&set) {
            OverbidCheck { holds: false, witness: Some(set) }
        } else {
            OverbidCheck { holds: true, witness: None }
        }
    };
    match mode {
        OverbidMode::Grand => Ok(single(ItemSet::full(m))),
        OverbidMode::Weak(set) => {
            if set.universe() != m {
                return Err(Error::Dimension("weak no-overbidding set has the wrong universe".into()));
            }
            Ok(single(set.clone()))
        }
        OverbidMode::Strong => {
            if m > MAX_STRONG_ITEMS {
                return Err(Error::SizeGuard { what: "strong no-overbidding (items)", size: m, limit: MAX_STRONG_ITEMS });
            }
            let table = v.value_table()?;
            let mut sums = vec![Value::zero(); table.len()];
            for mask in 1..table.len() {
                let low = mask.trailing_zeros() as usize;
                sums[mask] = &sums[mask & (mask - 1)] + &row[low];
                if sums[mask] > table[mask] {
                    return Ok(OverbidCheck { holds: false, witness: Some(ItemSet::from_mask(m, mask as u64)) });
                }
            }
            Ok(OverbidCheck { holds: true, witness: None })
        }
    }
}

/// Safety over every profile of a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SafetyReport {
    /// Whether some finite `β` works.
    pub feasible: bool,
    /// Smallest feasible `β` (at least 1), when feasible.
    pub min_beta: Option<Value>,
    /// `(t, bidder)` attaining `min_beta`, or the first infeasible pair.
    pub worst: Option<(usize, usize)>,
}

impl SafetyReport {
    pub fn allows(&self, beta: &Value) -> bool {
        self.min_beta.as_ref().is_some_and(|b| b <= beta)
    }
}

/// Ratio `u_i^D / u_i` for every profile `b^0..b^T` and bidder. A pair with
/// both zero counts as ratio 1; `u_i < 0`, or `u_i = 0 < u_i^D`, is infeasible.
pub fn check_safety(trace: &Trace) -> SafetyReport {
    let mut beta = Value::one();
    let mut worst = None;
    for t in 0..=trace.len() {
        let outcome = trace.outcome(t);
        for (i, (u, ud)) in outcome.utility.iter().zip(&outcome.declared_utility).enumerate() {
            if u.is_negative() || (u.is_zero() && ud.is_positive()) {
                return SafetyReport { feasible: false, min_beta: None, worst: Some((t, i)) };
            }
            if u.is_positive() {
                let r = ud / u;
                if r > beta {
                    beta = r;
                    worst = Some((t, i));
                }
            }
        }
    }
    SafetyReport { feasible: true, min_beta: Some(beta), worst }
}

/// Whether bidder `i` is best-responding: returns `(current, U*, demand set)`.
pub fn best_response_gap(
    instance: &Instance,
    bids: &BidProfile,
    rules: &AuctionRules,
    i: usize,
) -> Result<(Value, Value, ItemSet)> {
    let (set, best) = best_demand(instance.valuation(i), &bids.opposing_max(i))?;
    let current = allocate(instance, bids, rules)?.utility[i].clone();
    Ok((current, best, set))
}
