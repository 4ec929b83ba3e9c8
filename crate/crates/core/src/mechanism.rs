//! Simultaneous second-price item auctions.
//!
//! Every item is sold separately to its highest bidder at the highest
//! competing bid. Ties go to the bidder ranked first in the item's priority
//! order. Bidders are 0-based in code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::valuations::Valuation;
use crate::value::Value;

/// A game: `n` bidders with valuations over the same `m` items.
#[derive(Clone, Debug)]
pub struct Instance {
    m: usize,
    valuations: Vec<Valuation>,
}

impl Instance {
    pub fn new(m: usize, valuations: Vec<Valuation>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension("an instance needs at least one item".into()));
        }
        if valuations.is_empty() {
            return Err(Error::Dimension("an instance needs at least one bidder".into()));
        }
        for (i, v) in valuations.iter().enumerate() {
            if v.items() != m {
                return Err(Error::Dimension(format!(
                    "valuation of bidder {} is over {} items, instance has {m}",
                    i + 1,
                    v.items()
                )));
            }
        }
        Ok(Instance { m, valuations })
    }

    pub fn n(&self) -> usize {
        self.valuations.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn valuation(&self, i: usize) -> &Valuation {
        &self.valuations[i]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    /// The same game with every valuation multiplied by `factor`.
    pub fn scaled(&self, factor: &Value) -> Result<Instance> {
        let vals = self.valuations.iter().map(|v| v.scaled(factor)).collect::<Result<Vec<_>>>()?;
        Instance::new(self.m, vals)
    }
}

/// Per-item priority orders over bidders, first entry preferred.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieBreak {
    orders: Vec<Vec<usize>>,
    rank: Vec<Vec<usize>>,
}

impl TieBreak {
    /// Lower bidder index preferred on every item.
    pub fn ascending(n: usize, m: usize) -> Self {
        let order: Vec<usize> = (0..n).collect();
        Self::build(vec![order; m])
    }

    /// Explicit orders, one permutation of `0..n` per item.
    pub fn from_orders(n: usize, orders: Vec<Vec<usize>>) -> Result<Self> {
        for (j, order) in orders.iter().enumerate() {
            let mut seen = vec![false; n];
            if order.len() != n {
                return Err(Error::Dimension(format!(
                    "priority order of item {} lists {} bidders, expected {n}",
                    j + 1,
                    order.len()
                )));
            }
            for &i in order {
                if i >= n || seen[i] {
                    return Err(Error::Dimension(format!(
                        "priority order of item {} is not a permutation of the bidders",
                        j + 1
                    )));
                }
                seen[i] = true;
            }
        }
        Ok(Self::build(orders))
    }

    fn build(orders: Vec<Vec<usize>>) -> Self {
        let rank = orders
            .iter()
            .map(|order| {
                let mut r = vec![0; order.len()];
                for (pos, &i) in order.iter().enumerate() {
                    r[i] = pos;
                }
                r
            })
            .collect();
        TieBreak { orders, rank }
    }

    pub fn items(&self) -> usize {
        self.orders.len()
    }

    pub fn bidders(&self) -> usize {
        self.orders.first().map_or(0, Vec::len)
    }

    pub fn order(&self, j: usize) -> &[usize] {
        &self.orders[j]
    }

    pub fn orders(&self) -> &[Vec<usize>] {
        &self.orders
    }

    /// Whether bidder `a` beats bidder `b` on item `j` at equal bids.
    pub fn prefers(&self, j: usize, a: usize, b: usize) -> bool {
        self.rank[j][a] < self.rank[j][b]
    }

    pub fn is_ascending(&self) -> bool {
        self.orders.iter().all(|o| o.iter().enumerate().all(|(p, &i)| p == i))
    }
}

/// Tie-break plus the zero-bid allocation switch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuctionRules {
    pub tie_break: TieBreak,
    /// When off, an item whose highest bid is zero stays unsold.
    pub allocate_zero_bids: bool,
}

impl AuctionRules {
    pub fn new(tie_break: TieBreak) -> Self {
        AuctionRules { tie_break, allocate_zero_bids: true }
    }

    pub fn ascending(n: usize, m: usize) -> Self {
        Self::new(TieBreak::ascending(n, m))
    }
}

/// The `n × m` matrix of nonnegative bids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BidProfile {
    rows: Vec<Vec<Value>>,
}

impl BidProfile {
    pub fn zeros(n: usize, m: usize) -> Self {
        BidProfile { rows: vec![vec![Value::zero(); m]; n] }
    }

    /// Validates shape and signs.
    pub fn from_rows(rows: Vec<Vec<Value>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            check_row(row, m, i)?;
        }
        Ok(BidProfile { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Value {
        &self.rows[i][j]
    }

    pub fn set_row(&mut self, i: usize, row: Vec<Value>) -> Result<()> {
        check_row(&row, self.m(), i)?;
        self.rows[i] = row;
        Ok(())
    }

    /// A copy with row `i` replaced.
    pub fn with_row(&self, i: usize, row: Vec<Value>) -> Result<Self> {
        let mut b = self.clone();
        b.set_row(i, row)?;
        Ok(b)
    }

    /// `max_{k != i} b[k][j]` for every item: the prices bidder `i` faces.
    pub fn opposing_max(&self, i: usize) -> Vec<Value> {
        (0..self.m())
            .map(|j| {
                self.rows
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i)
                    .map(|(_, r)| &r[j])
                    .max()
                    .cloned()
                    .unwrap_or_default()
            })
            .collect()
    }

    /// Highest bid on item `j`.
    pub fn item_max(&self, j: usize) -> Value {
        self.rows.iter().map(|r| &r[j]).max().cloned().unwrap_or_default()
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: &Value) -> BidProfile {
        BidProfile { rows: self.rows.iter().map(|r| r.iter().map(|x| x * factor).collect()).collect() }
    }
}

fn check_row(row: &[Value], m: usize, i: usize) -> Result<()> {
    if row.len() != m {
        return Err(Error::Dimension(format!(
            "bid row of bidder {} has {} entries, expected {m}",
            i + 1,
            row.len()
        )));
    }
    if let Some((j, x)) = row.iter().enumerate().find(|(_, x)| x.is_negative()) {
        return Err(Error::NegativeBid { bidder: i + 1, item: j + 1, value: x.clone() });
    }
    Ok(())
}

/// Result of running the auctions on one bid profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// Winning bidder per item; `None` only for unsold zero-bid items.
    pub winner: Vec<Option<usize>>,
    /// Second price per item.
    pub price: Vec<Value>,
    /// Items won by each bidder.
    #[serde(skip)]
    pub allocation: Vec<ItemSet>,
    pub utility: Vec<Value>,
    pub declared_utility: Vec<Value>,
    pub social_welfare: Value,
    pub declared_welfare: Value,
}

/// Runs every item auction and evaluates utilities and welfare.
pub fn allocate(instance: &Instance, bids: &BidProfile, rules: &AuctionRules) -> Result<Outcome> {
    let (n, m) = (instance.n(), instance.m());
    if bids.n() != n || bids.m() != m {
        return Err(Error::Dimension(format!(
            "bid profile is {}×{}, instance is {n}×{m}",
            bids.n(),
            bids.m()
        )));
    }
    if rules.tie_break.items() != m || rules.tie_break.bidders() != n {
        return Err(Error::Dimension("tie-break does not match the instance".into()));
    }
    let tie = &rules.tie_break;
    let mut winner = Vec::with_capacity(m);
    let mut price = Vec::with_capacity(m);
    let mut allocation = vec![ItemSet::empty(m); n];
    let mut declared_utility = vec![Value::zero(); n];
    let mut declared_welfare = Value::zero();
    for j in 0..m {
        let mut best = tie.order(j)[0];
        for &i in &tie.order(j)[1..] {
            if bids.get(i, j) > bids.get(best, j) {
                best = i;
            }
        }
        let top = bids.get(best, j).clone();
        let p = (0..n).filter(|&i| i != best).map(|i| bids.get(i, j)).max().cloned().unwrap_or_default();
        declared_welfare += &top;
        if top.is_zero() && !rules.allocate_zero_bids {
            winner.push(None);
            price.push(Value::zero());
            continue;
        }
        declared_utility[best] += &top - &p;
        allocation[best].insert(j);
        winner.push(Some(best));
        price.push(p);
    }
    let mut utility = Vec::with_capacity(n);
    let mut social_welfare = Value::zero();
    for (i, set) in allocation.iter().enumerate() {
        let value = instance.valuation(i).value(set);
        let paid: Value = set.iter().map(|j| &price[j]).sum();
        social_welfare += &value;
        utility.push(value - paid);
    }
    Ok(Outcome { winner, price, allocation, utility, declared_utility, social_welfare, declared_welfare })
}

/// `Σ_j max_i b[i][j]`.
pub fn declared_welfare(bids: &BidProfile) -> Value {
    (0..bids.m()).map(|j| bids.item_max(j)).sum()
}

/// `Σ_i v_i(S_i)` for the allocation in `outcome`.
pub fn social_welfare(instance: &Instance, outcome: &Outcome) -> Value {
    outcome.allocation.iter().enumerate().map(|(i, s)| instance.valuation(i).value(s)).sum()
}

/// Winning bids minus second prices over the items bidder `i` wins.
pub fn declared_utility(instance: &Instance, bids: &BidProfile, rules: &AuctionRules, i: usize) -> Result<Value> {
    Ok(allocate(instance, bids, rules)?.declared_utility[i].clone())
}

/// `v_i(S_i) − Σ_{j∈S_i} p_j`; negative under overbidding.
pub fn utility(instance: &Instance, bids: &BidProfile, rules: &AuctionRules, i: usize) -> Result<Value> {
    Ok(allocate(instance, bids, rules)?.utility[i].clone())
}

/// `v(S) − Σ_{j∈S} prices[j]`: the payoff of buying exactly `S`.
pub fn residual_utility(valuation: &Valuation, prices: &[Value], set: &ItemSet) -> Value {
    valuation.value(set) - set.iter().map(|j| &prices[j]).sum::<Value>()
}
