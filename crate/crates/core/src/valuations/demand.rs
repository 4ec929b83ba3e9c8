//! Demand oracles: utility-maximizing bundles at given prices.

use crate::error::{Error, Result};
use crate::gf2;
use crate::items::ItemSet;
use crate::value::Value;

use super::{Valuation, ValuationKind};

/// Largest item count for exhaustive demand queries.
pub const MAX_DEMAND_ITEMS: usize = 20;

/// Which maximizers to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemandMode {
    /// One maximizer: the one with the smallest item bitmask.
    AnyMax,
    /// A maximizer with no strictly smaller maximizing subset; ties by
    /// smallest bitmask.
    InclusionMinimal,
    /// Every maximizer, in bitmask order.
    All,
}

/// Prices per item and a selection mode.
#[derive(Clone, Debug)]
pub struct DemandQuery {
    pub prices: Vec<Value>,
    pub mode: DemandMode,
}

/// Demand sets and the maximum utility `max_S v(S) − p(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demand {
    pub sets: Vec<ItemSet>,
    pub utility: Value,
}

impl Demand {
    /// The first (smallest-mask) demand set.
    pub fn set(&self) -> &ItemSet {
        &self.sets[0]
    }
}

/// Answers a demand query.
///
/// The smallest-mask maximizer is always inclusion-minimal, since every
/// proper subset has a smaller mask; `AnyMax` and `InclusionMinimal` therefore
/// coincide. Subspace valuations use the structured oracle for the first two
/// modes; everything else is exhaustive over `2^m` bundles.
pub fn demand_sets(v: &Valuation, query: &DemandQuery) -> Result<Demand> {
    let m = v.items();
    if query.prices.len() != m {
        return Err(Error::Dimension(format!("{} prices for {m} items", query.prices.len())));
    }
    if let Some(x) = query.prices.iter().find(|x| x.is_negative()) {
        return Err(Error::Precondition(format!("negative price {x}")));
    }
    if let (ValuationKind::Subspace { rho, family }, DemandMode::AnyMax | DemandMode::InclusionMinimal) =
        (v.kind(), query.mode)
    {
        let (set, utility) = gf2::v2_demand_set(family, rho, &query.prices)?;
        return Ok(Demand { sets: vec![set], utility });
    }
    if m > MAX_DEMAND_ITEMS {
        return Err(Error::SizeGuard { what: "exhaustive demand (items)", size: m, limit: MAX_DEMAND_ITEMS });
    }
    let table = v.value_table()?;
    let (best_mask, best) = scan(table, &query.prices, |_, _| {});
    let sets = match query.mode {
        DemandMode::AnyMax | DemandMode::InclusionMinimal => vec![ItemSet::from_mask(m, best_mask)],
        DemandMode::All => {
            let mut all = Vec::new();
            scan(table, &query.prices, |mask, u| {
                if *u == best {
                    all.push(mask);
                }
            });
            all.sort_unstable();
            all.into_iter().map(|mask| ItemSet::from_mask(m, mask)).collect()
        }
    };
    Ok(Demand { sets, utility: best })
}

/// `max_S v(S) − p(S)`.
pub fn best_utility(v: &Valuation, prices: &[Value]) -> Result<Value> {
    Ok(demand_sets(v, &DemandQuery { prices: prices.to_vec(), mode: DemandMode::AnyMax })?.utility)
}

/// Visits every bundle in Gray-code order, keeping the price sum updated by
/// one addition per step. Returns the smallest-mask maximizer.
fn scan(table: &[Value], prices: &[Value], mut visit: impl FnMut(u64, &Value)) -> (u64, Value) {
    let size = table.len() as u64;
    let mut best_mask = 0u64;
    let mut best = Value::zero();
    visit(0, &best);
    let mut cost = Value::zero();
    for idx in 1..size {
        let gray = idx ^ (idx >> 1);
        let bit = idx.trailing_zeros() as usize;
        if gray >> bit & 1 == 1 {
            cost += &prices[bit];
        } else {
            cost -= &prices[bit];
        }
        let u = &table[gray as usize] - &cost;
        visit(gray, &u);
        if u > best || (u == best && gray < best_mask) {
            best = u;
            best_mask = gray;
        }
    }
    (best_mask, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::residual_utility;
    use crate::value::q;

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::from_int(x)).collect()
    }

    #[test]
    fn budgeted_minimal_demand() {
        let v = Valuation::budgeted_additive(ints(&[1, 1, 1]), Value::from_int(2)).unwrap();
        let q0 = DemandQuery { prices: ints(&[0, 0, 0]), mode: DemandMode::InclusionMinimal };
        let d = demand_sets(&v, &q0).unwrap();
        assert_eq!(d.set().to_one_based(), vec![1, 2]);
        let all = demand_sets(&v, &DemandQuery { mode: DemandMode::All, ..q0 }).unwrap();
        let lists: Vec<Vec<usize>> = all.sets.iter().map(ItemSet::to_one_based).collect();
        assert_eq!(lists, vec![vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]]);
    }

    #[test]
    fn expensive_items_give_empty_demand() {
        let v = Valuation::unit_demand(ints(&[1, 1])).unwrap();
        let d = demand_sets(&v, &DemandQuery { prices: vec![q(3, 2); 2], mode: DemandMode::AnyMax }).unwrap();
        assert!(d.set().is_empty());
        assert!(d.utility.is_zero());
    }

    #[test]
    fn scan_matches_direct_enumeration() {
        let v = Valuation::xos(4, vec![vec![q(1, 2), q(3, 4), Value::one(), q(1, 8)], ints(&[1, 0, 1, 1])]).unwrap();
        let prices = vec![q(1, 3), q(1, 5), q(2, 3), Value::zero()];
        let d = demand_sets(&v, &DemandQuery { prices: prices.clone(), mode: DemandMode::AnyMax }).unwrap();
        let best = (0..16u64).map(|mask| residual_utility(&v, &prices, &ItemSet::from_mask(4, mask))).max().unwrap();
        assert_eq!(d.utility, best);
        assert_eq!(residual_utility(&v, &prices, d.set()), best);
    }
}
