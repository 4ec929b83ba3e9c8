//! Valuation families and their oracles.
//!
//! A [`Valuation`] is immutable. For up to [`MAX_TABLE_ITEMS`] items the full
//! value table is computed on first exhaustive use and cached.

mod demand;
mod generate;
mod xos;

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, SubspaceFamily};
use crate::items::ItemSet;
use crate::value::Value;

pub use demand::{best_utility, demand_sets, Demand, DemandMode, DemandQuery, MAX_DEMAND_ITEMS};
pub use generate::{generate, GeneratorKind, GeneratorParams};
pub use xos::{
    additive_underapprox, check_class, xos_clause, ClassCheck, SetFunction, Underapprox, ValuationClass,
    MAX_UNDERAPPROX_ITEMS,
};

/// Largest item count with an explicit value table.
pub const MAX_TABLE_ITEMS: usize = 20;

/// The kind-specific data of a valuation.
#[derive(Clone, Debug)]
pub enum ValuationKind {
    /// `v(S) = Σ_{j∈S} w_j`.
    Additive(Vec<Value>),
    /// `v(S) = max_{j∈S} w_j`.
    UnitDemand(Vec<Value>),
    /// `v(S) = max_ℓ Σ_{j∈S} c_ℓj`.
    Xos(Vec<Vec<Value>>),
    /// `v(S) = min(B, Σ_{j∈S} w_j)`.
    BudgetedAdditive { weights: Vec<Value>, budget: Value },
    /// Total weight of ground elements covered by the items in `S`.
    Coverage { ground: Vec<Value>, covers: Vec<Vec<usize>> },
    /// Explicit `2^m` table indexed by item bitmask.
    Table(Arc<Vec<Value>>),
    /// `v(S) = max_ℓ Σ_{(T,w)∈ℓ, T⊆S} w`.
    Mph { rank: usize, clauses: Vec<Vec<(ItemSet, Value)>> },
    /// Minimum number of GF(2) cover sets needed to cover `S`.
    SetCover { k: usize },
    /// Subspace-family valuation of the hard instance, scaled by `rho`.
    Subspace { rho: Value, family: Arc<SubspaceFamily> },
}

impl ValuationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ValuationKind::Additive(_) => "additive",
            ValuationKind::UnitDemand(_) => "unit_demand",
            ValuationKind::Xos(_) => "xos",
            ValuationKind::BudgetedAdditive { .. } => "budgeted_additive",
            ValuationKind::Coverage { .. } => "coverage",
            ValuationKind::Table(_) => "table",
            ValuationKind::Mph { .. } => "mph",
            ValuationKind::SetCover { .. } => "set_cover",
            ValuationKind::Subspace { .. } => "subspace",
        }
    }
}

/// A valuation over `m` items.
#[derive(Clone, Debug)]
pub struct Valuation {
    m: usize,
    kind: ValuationKind,
    table: OnceLock<Arc<Vec<Value>>>,
}

fn check_nonnegative(what: &str, values: &[Value]) -> Result<()> {
    if let Some(x) = values.iter().find(|x| x.is_negative()) {
        return Err(Error::InvalidParam(format!("{what} contains negative entry {x}")));
    }
    Ok(())
}

impl Valuation {
    fn build(m: usize, kind: ValuationKind) -> Self {
        Valuation { m, kind, table: OnceLock::new() }
    }

    pub fn additive(weights: Vec<Value>) -> Result<Self> {
        check_nonnegative("additive weights", &weights)?;
        Ok(Self::build(weights.len(), ValuationKind::Additive(weights)))
    }

    pub fn unit_demand(weights: Vec<Value>) -> Result<Self> {
        check_nonnegative("unit-demand weights", &weights)?;
        Ok(Self::build(weights.len(), ValuationKind::UnitDemand(weights)))
    }

    pub fn xos(m: usize, clauses: Vec<Vec<Value>>) -> Result<Self> {
        for c in &clauses {
            if c.len() != m {
                return Err(Error::Dimension(format!("XOS clause has {} weights, expected {m}", c.len())));
            }
            check_nonnegative("XOS clause", c)?;
        }
        Ok(Self::build(m, ValuationKind::Xos(clauses)))
    }

    pub fn budgeted_additive(weights: Vec<Value>, budget: Value) -> Result<Self> {
        check_nonnegative("budgeted weights", &weights)?;
        if budget.is_negative() {
            return Err(Error::InvalidParam(format!("negative budget {budget}")));
        }
        Ok(Self::build(weights.len(), ValuationKind::BudgetedAdditive { weights, budget }))
    }

    /// `covers[j]` lists the ground elements (0-based) covered by item `j`.
    pub fn coverage(ground: Vec<Value>, covers: Vec<Vec<usize>>) -> Result<Self> {
        check_nonnegative("ground weights", &ground)?;
        for c in &covers {
            if let Some(e) = c.iter().find(|&&e| e >= ground.len()) {
                return Err(Error::InvalidParam(format!("ground element {} out of range", e + 1)));
            }
        }
        Ok(Self::build(covers.len(), ValuationKind::Coverage { ground, covers }))
    }

    /// A table of `2^m` values indexed by item bitmask.
    pub fn table(values: Vec<Value>) -> Result<Self> {
        let m = values.len().trailing_zeros() as usize;
        if values.len() != 1 << m || m == 0 {
            return Err(Error::InvalidParam(format!("table length {} is not 2^m with m >= 1", values.len())));
        }
        if m > MAX_TABLE_ITEMS {
            return Err(Error::SizeGuard { what: "explicit table (items)", size: m, limit: MAX_TABLE_ITEMS });
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidParam("table must assign 0 to the empty set".into()));
        }
        check_nonnegative("table", &values)?;
        let values = Arc::new(values);
        let v = Self::build(m, ValuationKind::Table(values.clone()));
        let _ = v.table.set(values);
        Ok(v)
    }

    pub fn mph(m: usize, rank: usize, clauses: Vec<Vec<(ItemSet, Value)>>) -> Result<Self> {
        for c in &clauses {
            for (t, w) in c {
                if t.universe() != m {
                    return Err(Error::Dimension("hyperedge over the wrong item count".into()));
                }
                if t.len() > rank {
                    return Err(Error::InvalidParam(format!("hyperedge {t} exceeds rank {rank}")));
                }
                if w.is_negative() {
                    return Err(Error::InvalidParam(format!("negative hyperedge weight {w}")));
                }
            }
        }
        Ok(Self::build(m, ValuationKind::Mph { rank, clauses }))
    }

    /// Bidder 1 of the hard instance.
    pub fn set_cover(k: usize) -> Self {
        Self::build(gf2::item_count(k), ValuationKind::SetCover { k })
    }

    /// Bidder 2 of the hard instance.
    pub fn subspace(rho: Value, family: Arc<SubspaceFamily>) -> Self {
        Self::build(family.m(), ValuationKind::Subspace { rho, family })
    }

    /// Number of items.
    pub fn items(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> &ValuationKind {
        &self.kind
    }

    /// `v(S)`.
    pub fn value(&self, set: &ItemSet) -> Value {
        if let Some(t) = self.table.get() {
            return t[set.to_mask().expect("tabulated valuations have few items") as usize].clone();
        }
        self.evaluate(set)
    }

    /// `v(S)` for the set with bitmask `mask`.
    pub fn value_mask(&self, mask: u64) -> Value {
        if let Some(t) = self.table.get() {
            return t[mask as usize].clone();
        }
        self.evaluate(&ItemSet::from_mask(self.m, mask))
    }

    fn evaluate(&self, set: &ItemSet) -> Value {
        match &self.kind {
            ValuationKind::Additive(w) => set.iter().map(|j| &w[j]).sum(),
            ValuationKind::UnitDemand(w) => set.iter().map(|j| &w[j]).max().cloned().unwrap_or_default(),
            ValuationKind::Xos(clauses) => clauses
                .iter()
                .map(|c| set.iter().map(|j| &c[j]).sum::<Value>())
                .max()
                .unwrap_or_default(),
            ValuationKind::BudgetedAdditive { weights, budget } => {
                set.iter().map(|j| &weights[j]).sum::<Value>().min_of(budget.clone())
            }
            ValuationKind::Coverage { ground, covers } => {
                let mut hit = vec![false; ground.len()];
                for j in set.iter() {
                    for &e in &covers[j] {
                        hit[e] = true;
                    }
                }
                hit.iter().zip(ground).filter(|(h, _)| **h).map(|(_, w)| w).sum()
            }
            ValuationKind::Table(t) => t[set.to_mask().expect("table valuations have few items") as usize].clone(),
            ValuationKind::Mph { clauses, .. } => clauses
                .iter()
                .map(|c| c.iter().filter(|(t, _)| t.is_subset(set)).map(|(_, w)| w).sum::<Value>())
                .max()
                .unwrap_or_default(),
            ValuationKind::SetCover { k } => {
                Value::from_usize(gf2::v1_exact(*k, set).expect("set-cover valuations are built for k <= 8"))
            }
            ValuationKind::Subspace { rho, family } => gf2::v2_value(family, rho, set),
        }
    }

    /// The cached value table, built on first use. Requires `m <= 20`.
    pub fn value_table(&self) -> Result<&[Value]> {
        if self.m > MAX_TABLE_ITEMS {
            return Err(Error::SizeGuard { what: "value table (items)", size: self.m, limit: MAX_TABLE_ITEMS });
        }
        Ok(self.table.get_or_init(|| Arc::new(self.build_table())))
    }

    fn build_table(&self) -> Vec<Value> {
        let size = 1usize << self.m;
        let sums = |w: &[Value]| -> Vec<Value> {
            let mut s = vec![Value::zero(); size];
            for mask in 1..size {
                let low = mask.trailing_zeros() as usize;
                s[mask] = &s[mask & (mask - 1)] + &w[low];
            }
            s
        };
        match &self.kind {
            ValuationKind::Additive(w) => sums(w),
            ValuationKind::BudgetedAdditive { weights, budget } => {
                sums(weights).into_iter().map(|x| x.min_of(budget.clone())).collect()
            }
            ValuationKind::Xos(clauses) => {
                let mut best = vec![Value::zero(); size];
                for c in clauses {
                    for (b, x) in best.iter_mut().zip(sums(c)) {
                        if x > *b {
                            *b = x;
                        }
                    }
                }
                best
            }
            ValuationKind::UnitDemand(w) => {
                let mut t = vec![Value::zero(); size];
                for mask in 1..size {
                    let low = mask.trailing_zeros() as usize;
                    t[mask] = t[mask & (mask - 1)].clone().max_of(w[low].clone());
                }
                t
            }
            ValuationKind::Table(t) => t.as_ref().clone(),
            _ => (0..size as u64).map(|mask| self.evaluate(&ItemSet::from_mask(self.m, mask))).collect(),
        }
    }

    /// The same valuation multiplied by a positive `factor`.
    pub fn scaled(&self, factor: &Value) -> Result<Valuation> {
        if !factor.is_positive() {
            return Err(Error::InvalidParam(format!("scale factor {factor} is not positive")));
        }
        let sc = |w: &[Value]| w.iter().map(|x| x * factor).collect::<Vec<_>>();
        Ok(match &self.kind {
            ValuationKind::Additive(w) => Valuation::additive(sc(w))?,
            ValuationKind::UnitDemand(w) => Valuation::unit_demand(sc(w))?,
            ValuationKind::Xos(cs) => Valuation::xos(self.m, cs.iter().map(|c| sc(c)).collect())?,
            ValuationKind::BudgetedAdditive { weights, budget } => {
                Valuation::budgeted_additive(sc(weights), budget * factor)?
            }
            ValuationKind::Coverage { ground, covers } => Valuation::coverage(sc(ground), covers.clone())?,
            ValuationKind::Table(t) => Valuation::table(sc(t))?,
            ValuationKind::Mph { rank, clauses } => Valuation::mph(
                self.m,
                *rank,
                clauses.iter().map(|c| c.iter().map(|(t, w)| (t.clone(), w * factor)).collect()).collect(),
            )?,
            ValuationKind::Subspace { rho, family } => Valuation::subspace(rho * factor, family.clone()),
            ValuationKind::SetCover { .. } => Valuation::table(sc(self.value_table()?))?,
        })
    }

    /// Serializable description.
    pub fn to_spec(&self) -> ValuationSpec {
        match &self.kind {
            ValuationKind::Additive(w) => ValuationSpec::Additive { weights: w.clone() },
            ValuationKind::UnitDemand(w) => ValuationSpec::UnitDemand { weights: w.clone() },
            ValuationKind::Xos(cs) => ValuationSpec::Xos { items: Some(self.m), clauses: cs.clone() },
            ValuationKind::BudgetedAdditive { weights, budget } => {
                ValuationSpec::BudgetedAdditive { weights: weights.clone(), budget: budget.clone() }
            }
            ValuationKind::Coverage { ground, covers } => ValuationSpec::Coverage {
                ground: ground.clone(),
                covers: covers.iter().map(|c| c.iter().map(|e| e + 1).collect()).collect(),
            },
            ValuationKind::Table(t) => ValuationSpec::Table { values: t.as_ref().clone() },
            ValuationKind::Mph { rank, clauses } => ValuationSpec::Mph {
                items: self.m,
                rank: *rank,
                clauses: clauses
                    .iter()
                    .map(|c| {
                        c.iter().map(|(t, w)| Hyperedge { items: t.to_one_based(), weight: w.clone() }).collect()
                    })
                    .collect(),
            },
            ValuationKind::SetCover { k } => ValuationSpec::SetCover { k: *k },
            ValuationKind::Subspace { family, .. } => ValuationSpec::Subspace { k: family.k },
        }
    }

    /// Builds a valuation from its description.
    pub fn from_spec(spec: &ValuationSpec) -> Result<Valuation> {
        match spec {
            ValuationSpec::Additive { weights } => Valuation::additive(weights.clone()),
            ValuationSpec::UnitDemand { weights } => Valuation::unit_demand(weights.clone()),
            ValuationSpec::Xos { items, clauses } => {
                let m = items.or_else(|| clauses.first().map(Vec::len)).ok_or_else(|| {
                    Error::InvalidParam("an XOS valuation without clauses needs an item count".into())
                })?;
                Valuation::xos(m, clauses.clone())
            }
            ValuationSpec::BudgetedAdditive { weights, budget } => {
                Valuation::budgeted_additive(weights.clone(), budget.clone())
            }
            ValuationSpec::Coverage { ground, covers } => {
                let mut zero_based = Vec::with_capacity(covers.len());
                for c in covers {
                    let mut row = Vec::with_capacity(c.len());
                    for &e in c {
                        if e == 0 || e > ground.len() {
                            return Err(Error::InvalidParam(format!("ground element {e} out of range")));
                        }
                        row.push(e - 1);
                    }
                    zero_based.push(row);
                }
                Valuation::coverage(ground.clone(), zero_based)
            }
            ValuationSpec::Table { values } => Valuation::table(values.clone()),
            ValuationSpec::Mph { items, rank, clauses } => {
                let mut built = Vec::with_capacity(clauses.len());
                for c in clauses {
                    let mut edges = Vec::with_capacity(c.len());
                    for h in c {
                        let t = ItemSet::from_one_based(*items, &h.items)
                            .map_err(|j| Error::InvalidParam(format!("hyperedge item {j} out of range")))?;
                        edges.push((t, h.weight.clone()));
                    }
                    built.push(edges);
                }
                Valuation::mph(*items, *rank, built)
            }
            ValuationSpec::SetCover { k } => gf2::build_hard_instance(*k)?.v1(),
            ValuationSpec::Subspace { k } => gf2::build_hard_instance(*k)?.v2(),
        }
    }
}

/// One weighted hyperedge of an MPH clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperedge {
    pub items: Vec<usize>,
    pub weight: Value,
}

/// File form of a valuation: a kind tag plus rational arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValuationSpec {
    Additive {
        weights: Vec<Value>,
    },
    UnitDemand {
        weights: Vec<Value>,
    },
    Xos {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        items: Option<usize>,
        clauses: Vec<Vec<Value>>,
    },
    BudgetedAdditive {
        weights: Vec<Value>,
        budget: Value,
    },
    Coverage {
        ground: Vec<Value>,
        /// 1-based ground elements per item.
        covers: Vec<Vec<usize>>,
    },
    Table {
        values: Vec<Value>,
    },
    Mph {
        items: usize,
        rank: usize,
        clauses: Vec<Vec<Hyperedge>>,
    },
    SetCover {
        k: usize,
    },
    Subspace {
        k: usize,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::q;

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::from_int(x)).collect()
    }

    #[test]
    fn kind_formulas() {
        let full = ItemSet::full(3);
        assert_eq!(Valuation::budgeted_additive(ints(&[1, 1, 1]), Value::from_int(2)).unwrap().value(&full), Value::from_int(2));
        assert_eq!(Valuation::unit_demand(ints(&[1, 3, 2])).unwrap().value(&full), Value::from_int(3));
        let xos = Valuation::xos(2, vec![ints(&[2, 0]), ints(&[1, 1])]).unwrap();
        assert_eq!(xos.value(&ItemSet::from_items(2, [1])), Value::one());
        let cov = Valuation::coverage(ints(&[1, 2, 4]), vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(cov.value(&ItemSet::full(2)), Value::from_int(7));
        for v in [xos, cov] {
            assert!(v.value(&ItemSet::empty(2)).is_zero());
        }
    }

    #[test]
    fn tables_agree_with_direct_evaluation() {
        let vals = vec![
            Valuation::xos(4, vec![vec![q(1, 2), q(1, 3), Value::zero(), Value::one()], ints(&[1, 0, 2, 0])]).unwrap(),
            Valuation::budgeted_additive(ints(&[3, 1, 4, 1]), Value::from_int(5)).unwrap(),
            Valuation::unit_demand(ints(&[3, 1, 4, 1])).unwrap(),
            Valuation::coverage(ints(&[1, 1, 1]), vec![vec![0], vec![0, 1], vec![2], vec![]]).unwrap(),
        ];
        for v in vals {
            let fresh = Valuation::from_spec(&v.to_spec()).unwrap();
            let table = v.value_table().unwrap();
            for mask in 0..16u64 {
                assert_eq!(table[mask as usize], fresh.evaluate(&ItemSet::from_mask(4, mask)));
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let mph = Valuation::mph(3, 2, vec![vec![(ItemSet::from_items(3, [0, 1]), Value::from_int(3))]]).unwrap();
        let json = serde_json::to_string(&mph.to_spec()).unwrap();
        let back: ValuationSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mph.to_spec());
        assert!(serde_json::from_str::<ValuationSpec>(r#"{"kind":"additive","weights":["1"],"x":1}"#).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(Valuation::additive(vec![q(-1, 2)]).is_err());
        assert!(Valuation::table(ints(&[1, 1])).is_err());
        assert!(Valuation::mph(3, 1, vec![vec![(ItemSet::from_items(3, [0, 1]), Value::one())]]).is_err());
    }
}
