use serde::Serialize;

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::mechanism::Instance;
use crate::value::Value;

/// Largest item count the subset program accepts.
pub const MAX_OPT_ITEMS: usize = 14;

/// Optimal welfare with one optimal allocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Opt {
    pub value: Value,
    /// Bundle of each bidder; unassigned items are left out.
    #[serde(skip)]
    pub allocation: Vec<ItemSet>,
}

/// Exact `OPT(v)` by dynamic programming over bidders and item subsets.
pub fn compute_opt(instance: &Instance) -> Result<Opt> {
    let (n, m) = (instance.n(), instance.m());
    if m > MAX_OPT_ITEMS {
        return Err(Error::SizeGuard { what: "welfare optimum (items)", size: m, limit: MAX_OPT_ITEMS });
    }
    let full = (1usize << m) - 1;
    // best[s]: optimum of the bidders seen so far on item set s.
    let mut best = vec![Value::zero(); full + 1];
    let mut choice: Vec<Vec<u32>> = Vec::with_capacity(n);
    for i in 0..n {
        let table = instance.valuation(i).value_table()?;
        let mut next = best.clone();
        let mut pick = vec![0u32; full + 1];
        for s in 1..=full {
            let mut sub = s;
            while sub > 0 {
                let cand = &table[sub] + &best[s & !sub];
                if cand > next[s] {
                    next[s] = cand;
                    pick[s] = sub as u32;
                }
                sub = (sub - 1) & s;
            }
        }
        best = next;
        choice.push(pick);
    }
    let mut allocation = vec![ItemSet::empty(m); n];
    let mut rest = full;
    for i in (0..n).rev() {
        let sub = choice[i][rest] as usize;
        allocation[i] = ItemSet::from_mask(m, sub as u64);
        rest &= !sub;
    }
    Ok(Opt { value: best[full].clone(), allocation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::build_hard_instance;
    use crate::valuations::Valuation;
    use crate::value::q;

    #[test]
    fn appendix_c_optimum() {
        let eps = q(1, 1000);
        let one = Value::one();
        let rows = vec![
            vec![one.clone(), Value::zero(), Value::zero()],
            vec![&one + &eps, &one + &eps * Value::from_int(2), &one + &eps * Value::from_int(3)],
            vec![Value::zero(), Value::zero(), one.clone()],
        ];
        let vals = rows.into_iter().map(|r| Valuation::unit_demand(r).unwrap()).collect();
        let inst = Instance::new(3, vals).unwrap();
        let opt = compute_opt(&inst).unwrap();
        assert_eq!(opt.value, q(3002, 1000));
        let total: Value = opt.allocation.iter().enumerate().map(|(i, s)| inst.valuation(i).value(s)).sum();
        assert_eq!(total, opt.value);
    }

    #[test]
    fn hard_instance_k2_optimum() {
        let hard = build_hard_instance(2).unwrap();
        let opt = compute_opt(&hard.instance().unwrap()).unwrap();
        assert_eq!(opt.value, q(11, 3));
    }

    #[test]
    fn size_guard() {
        let v = Valuation::additive(vec![Value::one(); 15]).unwrap();
        let inst = Instance::new(15, vec![v]).unwrap();
        assert!(matches!(compute_opt(&inst), Err(Error::SizeGuard { .. })));
    }
}
