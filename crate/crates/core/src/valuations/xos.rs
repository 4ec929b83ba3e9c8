//! Supporting clauses, class checks and the additive under-approximation.

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::lp;
use crate::value::Value;

use super::{Valuation, ValuationKind, MAX_TABLE_ITEMS};

/// Largest set handled by the subset-constrained linear programs.
pub const MAX_UNDERAPPROX_ITEMS: usize = 12;
/// Largest item count for exhaustive class checks.
pub const MAX_CLASS_ITEMS: usize = 16;

/// An additive clause `a` with `a(S) = v(S)` and `a(T) <= v(T)` for all `T`,
/// zero outside `S`. Ties between clauses go to the first one.
pub fn xos_clause(v: &Valuation, set: &ItemSet) -> Result<Vec<Value>> {
    let m = v.items();
    let mut a = vec![Value::zero(); m];
    match v.kind() {
        ValuationKind::Additive(w) => {
            for j in set.iter() {
                a[j] = w[j].clone();
            }
        }
        ValuationKind::UnitDemand(w) => {
            let mut best: Option<usize> = None;
            for j in set.iter() {
                if best.is_none_or(|b| w[j] > w[b]) {
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                a[j] = w[j].clone();
            }
        }
        ValuationKind::Xos(clauses) => {
            let mut best: Option<(usize, Value)> = None;
            for (l, c) in clauses.iter().enumerate() {
                let s: Value = set.iter().map(|j| &c[j]).sum();
                if best.as_ref().is_none_or(|(_, b)| s > *b) {
                    best = Some((l, s));
                }
            }
            if let Some((l, _)) = best {
                for j in set.iter() {
                    a[j] = clauses[l][j].clone();
                }
            }
        }
        ValuationKind::BudgetedAdditive { weights, budget } => {
            let mut left = budget.clone();
            for j in set.iter() {
                let take = weights[j].clone().min_of(left.clone());
                left -= &take;
                a[j] = take;
            }
        }
        ValuationKind::Coverage { ground, covers } => {
            let mut taken = vec![false; ground.len()];
            for j in set.iter() {
                for &e in &covers[j] {
                    if !taken[e] {
                        taken[e] = true;
                        a[j] += &ground[e];
                    }
                }
            }
        }
        ValuationKind::Table(_) | ValuationKind::Mph { .. } => {
            let f = SetFunction::restrict(v, set)?;
            let sol = solve_packing(&f)?;
            if sol.objective != f.full() {
                return Err(Error::NotXos(v.kind().name()));
            }
            for (pos, &j) in f.items.iter().enumerate() {
                a[j] = sol.x[pos].clone();
            }
        }
        ValuationKind::SetCover { .. } | ValuationKind::Subspace { .. } => {
            return Err(Error::NotXos(v.kind().name()));
        }
    }
    Ok(a)
}

impl Valuation {
    /// The XOS form with one supporting clause per nonempty bundle
    /// (duplicates removed). Requires `m <= 12`.
    pub fn to_xos(&self) -> Result<Valuation> {
        let m = self.items();
        if m > MAX_UNDERAPPROX_ITEMS {
            return Err(Error::SizeGuard { what: "XOS conversion (items)", size: m, limit: MAX_UNDERAPPROX_ITEMS });
        }
        let mut clauses: Vec<Vec<Value>> = Vec::new();
        for mask in 1..(1u64 << m) {
            let c = xos_clause(self, &ItemSet::from_mask(m, mask))?;
            if !clauses.contains(&c) {
                clauses.push(c);
            }
        }
        Valuation::xos(m, clauses)
    }
}

/// Properties checked by [`check_class`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValuationClass {
    Monotone,
    Subadditive,
    /// Monotone and every bundle has a supporting additive clause.
    XosConsistent,
}

/// Verdict of a class check with a violating pair on failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCheck {
    pub holds: bool,
    pub witness: Option<(ItemSet, ItemSet)>,
}

impl ClassCheck {
    fn pass() -> Self {
        ClassCheck { holds: true, witness: None }
    }

    fn fail(s: u64, t: u64, m: usize) -> Self {
        ClassCheck { holds: false, witness: Some((ItemSet::from_mask(m, s), ItemSet::from_mask(m, t))) }
    }
}

/// Exhaustive check of a defining inequality.
///
/// Monotone: witness `(S, S ∪ {j})`. Subadditive: witness `(S, T)` with
/// `v(S ∪ T) > v(S) + v(T)`; for monotone valuations disjoint pairs suffice.
/// XOS-consistent: witness `(S, T)` where the supporting clause of `S`
/// overshoots `v(T)`, or `(S, S)` when no clause reaches `v(S)`.
pub fn check_class(v: &Valuation, class: ValuationClass) -> Result<ClassCheck> {
    let m = v.items();
    if m > MAX_CLASS_ITEMS {
        return Err(Error::SizeGuard { what: "class check (items)", size: m, limit: MAX_CLASS_ITEMS });
    }
    let t = v.value_table()?;
    let full = (1u64 << m) - 1;
    let monotone = || -> ClassCheck {
        for s in 0..=full {
            for j in 0..m {
                let up = s | 1 << j;
                if up != s && t[s as usize] > t[up as usize] {
                    return ClassCheck::fail(s, up, m);
                }
            }
        }
        ClassCheck::pass()
    };
    match class {
        ValuationClass::Monotone => Ok(monotone()),
        ValuationClass::Subadditive => {
            let disjoint_only = monotone().holds;
            for s in 1..=full {
                let rest = if disjoint_only { full & !s } else { full };
                // Enumerate subsets of `rest` in increasing order.
                let mut u = 0u64;
                loop {
                    u = (u.wrapping_sub(rest)) & rest;
                    if u == 0 {
                        break;
                    }
                    if t[(s | u) as usize] > &t[s as usize] + &t[u as usize] {
                        return Ok(ClassCheck::fail(s, u, m));
                    }
                }
            }
            Ok(ClassCheck::pass())
        }
        ValuationClass::XosConsistent => {
            let mono = monotone();
            if !mono.holds {
                return Ok(mono);
            }
            for s in 1..=full {
                let set = ItemSet::from_mask(m, s);
                let a = match xos_clause(v, &set) {
                    Ok(a) => a,
                    Err(Error::NotXos(_)) if m <= MAX_UNDERAPPROX_ITEMS => {
                        let f = SetFunction::restrict(v, &set)?;
                        let sol = solve_packing(&f)?;
                        if sol.objective != f.full() {
                            return Ok(ClassCheck::fail(s, s, m));
                        }
                        let mut a = vec![Value::zero(); m];
                        for (pos, &j) in f.items.iter().enumerate() {
                            a[j] = sol.x[pos].clone();
                        }
                        a
                    }
                    Err(e) => return Err(e),
                };
                let mut sub = s;
                loop {
                    let sum: Value = (0..m).filter(|&j| sub >> j & 1 == 1).map(|j| &a[j]).sum();
                    if sub == s && sum != t[s as usize] {
                        return Ok(ClassCheck::fail(s, s, m));
                    }
                    if sum > t[sub as usize] {
                        return Ok(ClassCheck::fail(s, sub, m));
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & s;
                }
            }
            Ok(ClassCheck::pass())
        }
    }
}

/// A set function on the subsets of `items`, indexed by local bitmask
/// (bit `p` marks `items[p]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunction {
    pub items: Vec<usize>,
    pub values: Vec<Value>,
}

impl SetFunction {
    /// Checks the table length.
    pub fn new(items: Vec<usize>, values: Vec<Value>) -> Result<Self> {
        if items.len() > MAX_UNDERAPPROX_ITEMS {
            return Err(Error::SizeGuard {
                what: "set function (items)",
                size: items.len(),
                limit: MAX_UNDERAPPROX_ITEMS,
            });
        }
        if values.len() != 1 << items.len() {
            return Err(Error::Dimension(format!("{} values for {} items", values.len(), items.len())));
        }
        Ok(SetFunction { items, values })
    }

    /// `v` restricted to subsets of `set`.
    pub fn restrict(v: &Valuation, set: &ItemSet) -> Result<Self> {
        Self::from_fn(set, |t| v.value(t))
    }

    /// Residual utility `S ↦ v(S) − Σ_{j∈S} p_j` on subsets of `set`.
    pub fn residual(v: &Valuation, prices: &[Value], set: &ItemSet) -> Result<Self> {
        Self::from_fn(set, |t| v.value(t) - t.iter().map(|j| &prices[j]).sum::<Value>())
    }

    fn from_fn(set: &ItemSet, f: impl Fn(&ItemSet) -> Value) -> Result<Self> {
        let items = set.to_vec();
        if items.len() > MAX_UNDERAPPROX_ITEMS {
            return Err(Error::SizeGuard { what: "set function (items)", size: items.len(), limit: MAX_UNDERAPPROX_ITEMS });
        }
        let m = set.universe();
        let values = (0..1u64 << items.len())
            .map(|local| {
                let t = ItemSet::from_items(m, (0..items.len()).filter(|&p| local >> p & 1 == 1).map(|p| items[p]));
                f(&t)
            })
            .collect();
        Ok(SetFunction { items, values })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `f(D)`.
    pub fn full(&self) -> Value {
        self.values[self.values.len() - 1].clone()
    }
}

fn solve_packing(f: &SetFunction) -> Result<lp::LpSolution> {
    let d = f.len();
    let rows: Vec<Vec<Value>> = (1..1u64 << d)
        .map(|mask| (0..d).map(|p| if mask >> p & 1 == 1 { Value::one() } else { Value::zero() }).collect())
        .collect();
    let rhs: Vec<Value> = f.values[1..].to_vec();
    Ok(lp::maximize(&vec![Value::one(); d], &rows, &rhs)?)
}

/// Result of [`additive_underapprox`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Underapprox {
    /// Weight per entry of `SetFunction::items`.
    pub weights: Vec<Value>,
    /// `Σ a_j`.
    pub total: Value,
    /// `Σ a_j / f(D)`.
    pub ratio: Value,
    /// Whether the positivity blend was applied.
    pub repaired: bool,
}

/// Blend weight of the positivity repair.
pub fn repair_delta() -> Value {
    Value::new(1, 1000)
}

/// The largest additive function below `f`: maximizes `Σ a_j` subject to
/// `a(S) <= f(S)` for every `S ⊆ D` and `a >= 0`, solved exactly. If some
/// weight is zero it is blended with `u_j = min_{S∋j} f(S)/|D|`.
pub fn additive_underapprox(f: &SetFunction) -> Result<Underapprox> {
    let d = f.len();
    if d == 0 {
        return Err(Error::Precondition("under-approximation of an empty set".into()));
    }
    if let Some(mask) = (1..f.values.len()).find(|&s| !f.values[s].is_positive()) {
        return Err(Error::Precondition(format!(
            "f({}) = {} is not positive",
            mask,
            f.values[mask]
        )));
    }
    let sol = solve_packing(f)?;
    let mut weights = sol.x;
    let repaired = weights.iter().any(Value::is_zero);
    if repaired {
        let delta = repair_delta();
        let keep = Value::one() - &delta;
        let size = Value::from_usize(d);
        for (p, a) in weights.iter_mut().enumerate() {
            let u = (1..f.values.len())
                .filter(|s| s >> p & 1 == 1)
                .map(|s| &f.values[s])
                .min()
                .cloned()
                .expect("singleton constraint exists")
                / &size;
            *a = &keep * &*a + &delta * u;
        }
    }
    let total: Value = weights.iter().sum();
    let ratio = &total / f.full();
    Ok(Underapprox { weights, total, ratio, repaired })
}

impl Underapprox {
    /// Re-checks `a(S) <= f(S)` for every subset; returns the first violator.
    pub fn violation(&self, f: &SetFunction) -> Option<usize> {
        (1..f.values.len()).find(|&s| {
            let sum: Value = (0..f.len()).filter(|p| s >> p & 1 == 1).map(|p| &self.weights[p]).sum();
            sum > f.values[s]
        })
    }
}

const _: () = assert!(MAX_UNDERAPPROX_ITEMS <= MAX_TABLE_ITEMS);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::q;

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::from_int(x)).collect()
    }

    #[test]
    fn two_clause_tie_takes_first() {
        let v = Valuation::xos(2, vec![ints(&[2, 0]), ints(&[1, 1])]).unwrap();
        assert_eq!(xos_clause(&v, &ItemSet::full(2)).unwrap(), ints(&[2, 0]));
    }

    #[test]
    fn unit_demand_clause() {
        let v = Valuation::unit_demand(vec![Value::one(), q(1002, 1000), q(1003, 1000)]).unwrap();
        assert_eq!(xos_clause(&v, &ItemSet::from_items(3, [2])).unwrap(), vec![Value::zero(), Value::zero(), q(1003, 1000)]);
    }

    #[test]
    fn table_subadditivity_witness() {
        let v = Valuation::table(ints(&[0, 1, 1, 3])).unwrap();
        let c = check_class(&v, ValuationClass::Subadditive).unwrap();
        assert!(!c.holds);
        let (s, t) = c.witness.unwrap();
        assert_eq!((s.to_one_based(), t.to_one_based()), (vec![1], vec![2]));
    }

    #[test]
    fn complementary_table_is_not_xos() {
        let v = Valuation::table(ints(&[0, 0, 0, 1])).unwrap();
        assert!(matches!(xos_clause(&v, &ItemSet::full(2)), Err(Error::NotXos(_))));
        assert!(!check_class(&v, ValuationClass::XosConsistent).unwrap().holds);
    }

    #[test]
    fn underapprox_of_constant_function() {
        let f = SetFunction::new((0..4).collect(), {
            let mut v = vec![Value::one(); 16];
            v[0] = Value::zero();
            v
        })
        .unwrap();
        let u = additive_underapprox(&f).unwrap();
        assert_eq!(u.total, Value::one());
        assert_eq!(u.ratio, Value::one());
        assert!(u.weights.iter().all(Value::is_positive));
        assert_eq!(u.violation(&f), None);
    }

    #[test]
    fn underapprox_rejects_nonpositive() {
        let f = SetFunction::new(vec![0], ints(&[0, 0])).unwrap();
        assert!(additive_underapprox(&f).is_err());
    }
}
