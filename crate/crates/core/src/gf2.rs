//! Linear algebra over GF(2) and the two-bidder hard instance built from it.
//!
//! Item `j` (1-based) is identified with the `k`-bit vector whose binary
//! representation is `j`; internally item `j` sits at position `j - 1`.
//! Bidder 1 values a bundle by the minimum number of cover sets
//! `S_i = { j : i·j = 1 }` needed to cover it. Bidder 2 values bundles through
//! the family of `d`-dimensional subspaces, `d = k − log2 k`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::mechanism::{allocate, AuctionRules, BidProfile, Instance};
use crate::valuations::Valuation;
use crate::value::Value;

/// Largest `k` for which the subspace family is enumerated.
pub const MAX_ENUMERATED_K: usize = 8;
/// Largest `k` for which exact bidder-1 values come from the subset table.
pub const MAX_TABLE_K: usize = 4;

/// Inner product of two bit vectors over GF(2).
pub fn dot(a: u32, b: u32) -> bool {
    (a & b).count_ones() % 2 == 1
}

/// `m = 2^k − 1`.
pub fn item_count(k: usize) -> usize {
    (1usize << k) - 1
}

/// The cover set `S_i` over the `2^k − 1` items.
pub fn cover_set(k: usize, i: u32) -> ItemSet {
    let m = item_count(k);
    ItemSet::from_items(m, (1..=m as u32).filter(|&j| dot(i, j)).map(|j| j as usize - 1))
}

/// `S_1, ..., S_m`, produced lazily because the list is large at `k = 16`.
pub fn cover_sets(k: usize) -> impl ExactSizeIterator<Item = ItemSet> {
    assert!((1..=16).contains(&k), "cover sets need 1 <= k <= 16");
    (1..item_count(k) as u32 + 1).map(move |i| cover_set(k, i))
}

/// The Gaussian binomial coefficient `[k choose d]_2`.
pub fn gaussian_binomial(k: usize, d: usize) -> u64 {
    if d > k {
        return 0;
    }
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for i in 0..d {
        num *= (BigInt::from(1) << (k - i)) - 1;
        den *= (BigInt::from(1) << (i + 1)) - 1;
    }
    (num / den).to_u64().expect("fits in u64")
}

/// Reduced row echelon basis of the span of `vectors`, pivots on leading bits.
pub fn row_reduce(vectors: &[u32]) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for &v in vectors {
        let mut x = v;
        for &b in &basis {
            if x & top_bit(b) != 0 {
                x ^= b;
            }
        }
        if x != 0 {
            let t = top_bit(x);
            for b in basis.iter_mut() {
                if *b & t != 0 {
                    *b ^= x;
                }
            }
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

fn top_bit(x: u32) -> u32 {
    if x == 0 {
        0
    } else {
        1 << (31 - x.leading_zeros())
    }
}

/// Nonzero elements of the span of `basis`, ascending.
pub fn span(basis: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity((1 << basis.len()) - 1);
    for sel in 1u32..(1 << basis.len()) {
        let mut x = 0;
        for (l, &b) in basis.iter().enumerate() {
            if sel >> l & 1 == 1 {
                x ^= b;
            }
        }
        out.push(x);
    }
    out.sort_unstable();
    out
}

/// A subspace with the zero vector removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    /// Reduced row echelon basis.
    pub basis: Vec<u32>,
    /// Nonzero elements, ascending.
    pub elements: Vec<u32>,
    /// The elements as items.
    pub set: ItemSet,
}

impl Subspace {
    fn from_basis(k: usize, basis: Vec<u32>) -> Self {
        let elements = span(&basis);
        let set = ItemSet::from_items(item_count(k), elements.iter().map(|&x| x as usize - 1));
        Subspace { basis, elements, set }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// All `d`-dimensional subspaces of GF(2)^k, ordered by their item sets.
pub fn enumerate_subspaces(k: usize, d: usize) -> Result<Vec<Subspace>> {
    if k > MAX_ENUMERATED_K {
        return Err(Error::SizeGuard { what: "subspace enumeration (k)", size: k, limit: MAX_ENUMERATED_K });
    }
    if d > k {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(d);
    choose_pivots(k, d, k, &mut pivots, &mut out);
    out.sort_by(|a: &Subspace, b| a.set.cmp(&b.set));
    Ok(out)
}

fn choose_pivots(k: usize, d: usize, below: usize, pivots: &mut Vec<usize>, out: &mut Vec<Subspace>) {
    if pivots.len() == d {
        fill_rows(k, pivots, 0, &mut Vec::with_capacity(d), out);
        return;
    }
    for p in (0..below).rev() {
        pivots.push(p);
        choose_pivots(k, d, p, pivots, out);
        pivots.pop();
    }
}

fn fill_rows(k: usize, pivots: &[usize], r: usize, rows: &mut Vec<u32>, out: &mut Vec<Subspace>) {
    if r == pivots.len() {
        out.push(Subspace::from_basis(k, rows.clone()));
        return;
    }
    let p = pivots[r];
    let free: Vec<usize> = (0..p).filter(|b| !pivots.contains(b)).collect();
    for sel in 0u32..(1 << free.len()) {
        let mut row = 1u32 << p;
        for (l, &b) in free.iter().enumerate() {
            if sel >> l & 1 == 1 {
                row |= 1 << b;
            }
        }
        rows.push(row);
        fill_rows(k, pivots, r + 1, rows, out);
        rows.pop();
    }
}

/// Exact or upper-bound value of a cover query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverValue {
    pub value: usize,
    pub exact: bool,
}

fn cover_table(k: usize) -> &'static [u8] {
    static TABLES: [OnceLock<Vec<u8>>; MAX_TABLE_K + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    TABLES[k].get_or_init(|| build_cover_table(k))
}

/// Minimum cover sizes for every subset of items, by breadth-first search
/// over unions of cover sets followed by a superset-minimum pass.
fn build_cover_table(k: usize) -> Vec<u8> {
    let m = item_count(k);
    let size = 1usize << m;
    let sets: Vec<usize> = (1..=m as u32)
        .map(|i| cover_set(k, i).to_mask().expect("small k") as usize)
        .collect();
    let mut best = vec![u8::MAX; size];
    best[0] = 0;
    let mut frontier = vec![0usize];
    let mut layer = 0u8;
    while !frontier.is_empty() {
        layer += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for &s in &sets {
                let w = u | s;
                if best[w] == u8::MAX {
                    best[w] = layer;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    for bit in 0..m {
        for mask in 0..size {
            if mask >> bit & 1 == 0 {
                let up = best[mask | 1 << bit];
                if up < best[mask] {
                    best[mask] = up;
                }
            }
        }
    }
    best
}

/// Minimum number of cover sets whose union contains `t`.
///
/// Exact for `k <= 4` (table) and, for larger `k`, a greedy upper bound
/// flagged as inexact.
pub fn v1_value(k: usize, t: &ItemSet) -> CoverValue {
    if t.is_empty() {
        return CoverValue { value: 0, exact: true };
    }
    if k <= MAX_TABLE_K {
        let mask = t.to_mask().expect("small k") as usize;
        return CoverValue { value: cover_table(k)[mask] as usize, exact: true };
    }
    CoverValue { value: greedy_cover(k, t).len(), exact: false }
}

/// Greedy cover: repeatedly take the cover set hitting most uncovered items.
pub fn greedy_cover(k: usize, t: &ItemSet) -> Vec<u32> {
    let mut left = t.clone();
    let mut chosen = Vec::new();
    while !left.is_empty() {
        let mut best = (0usize, 0u32);
        for i in 1..=item_count(k) as u32 {
            let hit = left.iter().filter(|&j| dot(i, j as u32 + 1)).count();
            if hit > best.0 {
                best = (hit, i);
            }
        }
        let i = best.1;
        left = ItemSet::from_items(left.universe(), left.iter().filter(|&j| !dot(i, j as u32 + 1)));
        chosen.push(i);
    }
    chosen
}

/// Exact minimum cover size through the identity
/// `v1(T) = k − max { dim V : V ∩ T = ∅ }` over subspaces `V`.
pub fn v1_exact(k: usize, t: &ItemSet) -> Result<usize> {
    if t.is_empty() {
        return Ok(0);
    }
    if k <= MAX_TABLE_K {
        return Ok(v1_value(k, t).value);
    }
    if t.len() == item_count(k) {
        return Ok(k);
    }
    for dim in (1..k).rev() {
        for v in enumerate_subspaces(k, dim)? {
            if v.set.is_disjoint(t) {
                return Ok(k - dim);
            }
        }
    }
    Ok(k)
}

/// Indices `i` whose cover sets `S_i` cover everything outside `d_prime`.
///
/// Extends a basis of `d_prime` by unit vectors in increasing order, inverts
/// the basis matrix over GF(2) and returns the functionals dual to the added
/// vectors.
pub fn basis_cover(k: usize, d_prime: &Subspace) -> Vec<u32> {
    let mut basis = d_prime.basis.clone();
    for b in 0..k {
        if basis.len() == k {
            break;
        }
        let e = 1u32 << b;
        let mut trial = basis.clone();
        trial.push(e);
        if row_reduce(&trial).len() == trial.len() {
            basis.push(e);
        }
    }
    let d = d_prime.dim();
    // Solve A r = e_l where row i of A is basis[i]: Gauss-Jordan on [A | I].
    let mut rows: Vec<(u32, u32)> = basis.iter().enumerate().map(|(i, &x)| (x, 1u32 << i)).collect();
    for col in 0..k {
        let bit = 1u32 << col;
        let Some(p) = (col..k).find(|&r| rows[r].0 & bit != 0) else {
            unreachable!("basis is invertible")
        };
        rows.swap(col, p);
        let pivot = rows[col];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && row.0 & bit != 0 {
                row.0 ^= pivot.0;
                row.1 ^= pivot.1;
            }
        }
    }
    // Now row `col` reads: bit `col` of r = rows[col].1 · (right-hand side).
    (d..k)
        .map(|l| (0..k).fold(0u32, |r, col| if rows[col].1 >> l & 1 == 1 { r | 1 << col } else { r }))
        .collect()
}

/// The subspace family for one `k`.
#[derive(Debug)]
pub struct SubspaceFamily {
    pub k: usize,
    pub d: usize,
    pub subspaces: Vec<Subspace>,
}

impl SubspaceFamily {
    pub fn m(&self) -> usize {
        item_count(self.k)
    }

    /// First subspace (canonical order) contained in `t`.
    pub fn contained_in(&self, t: &ItemSet) -> Option<&Subspace> {
        self.subspaces.iter().find(|s| s.set.is_subset(t))
    }
}

/// `log2 k` for a power of two.
pub fn log2_exact(k: usize) -> Result<usize> {
    if k == 0 || !k.is_power_of_two() {
        return Err(Error::UnsupportedK(k));
    }
    Ok(k.trailing_zeros() as usize)
}

/// The hard instance: constants, cover system and (for `k <= 8`) the
/// subspace family.
#[derive(Clone, Debug)]
pub struct HardInstance {
    pub k: usize,
    pub m: usize,
    pub d: usize,
    /// `ρ = 4k/m`.
    pub rho: Value,
    family: Option<Arc<SubspaceFamily>>,
}

impl HardInstance {
    pub fn family(&self) -> Result<&Arc<SubspaceFamily>> {
        self.family.as_ref().ok_or(Error::SizeGuard {
            what: "subspace family (k)",
            size: self.k,
            limit: MAX_ENUMERATED_K,
        })
    }

    /// `ρ (2^d − 1)`: the largest value of bidder 2.
    pub fn max_v2(&self) -> Value {
        &self.rho * Value::from_usize((1 << self.d) - 1)
    }

    /// `ρ 2^d`.
    pub fn rho_two_d(&self) -> Value {
        &self.rho * Value::from_usize(1 << self.d)
    }

    /// `k − d + ρ 2^d`: welfare ceiling right after a bidder-2 update.
    pub fn welfare_ceiling(&self) -> Value {
        Value::from_usize(self.k - self.d) + self.rho_two_d()
    }

    pub fn v1(&self) -> Result<Valuation> {
        if self.k > MAX_ENUMERATED_K {
            return Err(Error::SizeGuard { what: "set-cover valuation (k)", size: self.k, limit: MAX_ENUMERATED_K });
        }
        Ok(Valuation::set_cover(self.k))
    }

    pub fn v2(&self) -> Result<Valuation> {
        Ok(Valuation::subspace(self.rho.clone(), self.family()?.clone()))
    }

    /// The two-bidder game `(v1, v2)`.
    pub fn instance(&self) -> Result<Instance> {
        Instance::new(self.m, vec![self.v1()?, self.v2()?])
    }

    /// First subspace (canonical order) with `Σ_D b1 < ρ|D|/2`.
    pub fn cheap_subspace(&self, b1: &[Value]) -> Result<Option<&Subspace>> {
        let fam = self.family()?;
        let half = &self.rho * Value::from_usize((1 << self.d) - 1) / Value::from_int(2);
        if let Some(sc) = Scaled::new(b1) {
            let bound = &half * &sc.denom;
            return Ok(fam.subspaces.iter().find(|s| int_value(sc.sum(&s.elements)) < bound));
        }
        Ok(fam.subspaces.iter().find(|s| s.elements.iter().map(|&x| &b1[x as usize - 1]).sum::<Value>() < half))
    }

    /// Bidder 2's demand through the structured oracle (see [`v2_demand_set`]).
    pub fn v2_demand(&self, prices: &[Value]) -> Result<(ItemSet, Value)> {
        v2_demand_set(self.family()?, &self.rho, prices)
    }
}

/// Builds the hard instance for a power-of-two `k`.
pub fn build_hard_instance(k: usize) -> Result<HardInstance> {
    let log = log2_exact(k)?;
    if k > 16 {
        return Err(Error::UnsupportedK(k));
    }
    let m = item_count(k);
    let d = k - log;
    let rho = Value::from_usize(4 * k) / Value::from_usize(m);
    let family = if k <= MAX_ENUMERATED_K { Some(Arc::new(family_for(k, d)?)) } else { None };
    Ok(HardInstance { k, m, d, rho, family })
}

fn family_for(k: usize, d: usize) -> Result<SubspaceFamily> {
    Ok(SubspaceFamily { k, d, subspaces: enumerate_subspaces(k, d)? })
}

/// `v2(T)`: `0` on the empty set, `ρ(2^d−1)` when `T` contains a subspace of
/// the family, `ρ(2^d−1)/2` otherwise.
pub fn v2_value(family: &SubspaceFamily, rho: &Value, t: &ItemSet) -> Value {
    if t.is_empty() {
        return Value::zero();
    }
    let full = rho * Value::from_usize((1 << family.d) - 1);
    if family.contained_in(t).is_some() {
        full
    } else {
        full / Value::from_int(2)
    }
}

/// Prices over a common denominator, for fast subspace sums.
struct Scaled {
    numer: Vec<i128>,
    denom: Value,
}

impl Scaled {
    fn new(prices: &[Value]) -> Option<Scaled> {
        let mut denom: i128 = 1;
        for p in prices {
            let (_, d) = p.small_parts()?;
            let g = num_integer::gcd(denom, d as i128);
            denom = denom.checked_mul(d as i128 / g)?;
            if denom > 1 << 60 {
                return None;
            }
        }
        let numer = prices
            .iter()
            .map(|p| {
                let (n, d) = p.small_parts().expect("checked above");
                n as i128 * (denom / d as i128)
            })
            .collect();
        Some(Scaled { numer, denom: int_value(denom) })
    }

    fn sum(&self, elements: &[u32]) -> i128 {
        elements.iter().map(|&x| self.numer[x as usize - 1]).sum()
    }
}

fn int_value(x: i128) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from_int(v),
        Err(_) => Value::from_big(num_rational::BigRational::from_integer(BigInt::from(x))),
    }
}

/// Exact cost `Σ_{j∈D} p_j` of every subspace, plus the minimum.
fn subspace_costs(family: &SubspaceFamily, prices: &[Value]) -> (Vec<Value>, Value) {
    let costs: Vec<Value> = match Scaled::new(prices) {
        Some(sc) => {
            let raw: Vec<i128> = family.subspaces.iter().map(|s| sc.sum(&s.elements)).collect();
            let min = raw.iter().copied().min().unwrap_or(0);
            // Exact values only where they are needed: at the minimum. Others
            // are replaced by a strictly larger stand-in.
            let min_value = int_value(min) / &sc.denom;
            let above = &min_value + Value::one();
            raw.into_iter().map(|c| if c == min { min_value.clone() } else { above.clone() }).collect()
        }
        None => family
            .subspaces
            .iter()
            .map(|s| s.elements.iter().map(|&x| &prices[x as usize - 1]).sum())
            .collect(),
    };
    let best = costs.iter().min().cloned().unwrap_or_default();
    (costs, best)
}

/// Structured demand oracle for bidder 2.
///
/// Every minimal maximizer is the empty set, a cheapest single item (when
/// singletons are not themselves subspaces), or a cheapest subspace none of
/// whose proper subsets does as well. Returns the smallest-mask minimal
/// maximizer and the maximum utility.
pub fn v2_demand_set(family: &SubspaceFamily, rho: &Value, prices: &[Value]) -> Result<(ItemSet, Value)> {
    let m = family.m();
    if prices.len() != m {
        return Err(Error::Dimension(format!("{} prices for {m} items", prices.len())));
    }
    let full = rho * Value::from_usize((1 << family.d) - 1);
    let half = &full / Value::from_int(2);

    let min_price = prices.iter().min().cloned().unwrap_or_default();
    let singles_distinct = family.d > 1;

    let (costs, best_cost) = subspace_costs(family, prices);

    let mut best = Value::zero();
    if singles_distinct {
        best = best.max_of(&half - &min_price);
    }
    if !family.subspaces.is_empty() {
        best = best.max_of(&full - &best_cost);
    }
    if best.is_zero() {
        return Ok((ItemSet::empty(m), best));
    }

    let mut candidates: Vec<ItemSet> = Vec::new();
    if singles_distinct && &half - &min_price == best {
        if let Some(j) = prices.iter().position(|p| *p == min_price) {
            candidates.push(ItemSet::from_items(m, [j]));
        }
    }
    for (s, c) in family.subspaces.iter().zip(&costs) {
        if &full - c != best {
            continue;
        }
        let cheapest_inside = s.elements.iter().map(|&x| &prices[x as usize - 1]).min().cloned().unwrap_or_default();
        if !singles_distinct || &half - &cheapest_inside < best {
            candidates.push(s.set.clone());
            break;
        }
    }
    let chosen = candidates.into_iter().min().expect("a maximizer exists when the optimum is positive");
    Ok((chosen, best))
}

/// Certificate returned with a beneficial deviation for bidder 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    /// The new bid row of bidder 1.
    pub row: Vec<Value>,
    /// Subspace of the family inside bidder 2's winnings.
    pub d_prime: Subspace,
    /// `Σ_{j∈W} b2_j`.
    pub bidder2_sum: Value,
    /// `ρ (2^d − 1)`, the largest value of bidder 2 and hence a bound on `bidder2_sum`.
    pub bidder2_bound: Value,
    /// `|W| / m`.
    pub increment_sum: Value,
    /// `Σ_{j∉W} b1_j`.
    pub bidder1_rest_sum: Value,
    /// Basis cover of `M \ D'`; its size bounds `v1(M \ W)`.
    pub cover: Vec<u32>,
    /// `ρ (2^d − 1) + 1 + |cover|`, the certified bound on the new bid total.
    pub total_bound: Value,
    /// `v1(M) = k`.
    pub grand_value: Value,
    /// Certified utility gain lower bound `d − ρ (2^d − 1)`.
    pub gain_bound: Value,
    /// Whether bidder 1 wins every item under the deviation.
    pub wins_everything: bool,
}

/// Bidder 1's deviation against a profile in which bidder 2 wins a bundle
/// containing a subspace of the family: outbid bidder 2 by `1/m` on its
/// winnings and keep the rest.
pub fn construct_deviation(hard: &HardInstance, bids: &BidProfile, rules: &AuctionRules) -> Result<Deviation> {
    let instance = hard.instance()?;
    let outcome = allocate(&instance, bids, rules)?;
    let w = outcome.allocation[1].clone();
    let fam = hard.family()?;
    let d_prime = fam
        .contained_in(&w)
        .cloned()
        .ok_or_else(|| Error::NoDeviation("bidder 2 wins no subspace of the family".into()))?;
    let m = hard.m;
    let step = Value::one() / Value::from_usize(m);
    let b1 = bids.row(0);
    let b2 = bids.row(1);

    let bidder2_sum: Value = w.iter().map(|j| &b2[j]).sum();
    let v2_w = v2_value(fam, &hard.rho, &w);
    if bidder2_sum > v2_w {
        return Err(Error::Precondition("bidder 2 overbids on its winnings".into()));
    }
    let bidder2_bound = hard.max_v2();
    let increment_sum = Value::from_usize(w.len()) / Value::from_usize(m);
    let bidder1_rest_sum: Value = (0..m).filter(|&j| !w.contains(j)).map(|j| &b1[j]).sum();
    let cover = basis_cover(hard.k, &d_prime);
    if bidder1_rest_sum > Value::from_usize(cover.len()) {
        return Err(Error::Precondition(
            "bidder 1 bids more outside bidder 2's winnings than their cover bound allows".into(),
        ));
    }
    let total_bound = &bidder2_bound + Value::one() + Value::from_usize(cover.len());
    let grand_value = Value::from_usize(hard.k);

    let row: Vec<Value> = (0..m).map(|j| if w.contains(j) { &b2[j] + &step } else { b1[j].clone() }).collect();
    let deviated = bids.with_row(0, row.clone())?;
    let after = allocate(&instance, &deviated, rules)?;
    let wins_everything = after.allocation[0].len() == m;
    let gain_bound = Value::from_usize(hard.d) - &bidder2_bound;
    Ok(Deviation {
        row,
        d_prime,
        bidder2_sum,
        bidder2_bound,
        increment_sum,
        bidder1_rest_sum,
        cover,
        total_bound,
        grand_value,
        gain_bound,
        wins_everything,
    })
}

impl Deviation {
    /// Whether the certificate chain closes: new bids total at most `v1(M)`
    /// and the gain bound is positive.
    pub fn certified(&self) -> bool {
        let total: Value = &self.bidder2_sum + &self.increment_sum + &self.bidder1_rest_sum;
        self.bidder2_sum <= self.bidder2_bound
            && self.increment_sum <= Value::one()
            && total <= self.total_bound
            && self.total_bound <= self.grand_value
            && self.gain_bound.is_positive()
            && self.wins_everything
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::q;

    #[test]
    fn cover_sets_k2() {
        let sets: Vec<Vec<usize>> = cover_sets(2).map(|s| s.to_one_based()).collect();
        assert_eq!(sets, vec![vec![1, 3], vec![2, 3], vec![1, 2]]);
        assert_eq!(cover_sets(1).map(|s| s.to_one_based()).collect::<Vec<_>>(), vec![vec![1]]);
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(enumerate_subspaces(2, 1).unwrap().len(), 3);
        let f = enumerate_subspaces(4, 2).unwrap();
        assert_eq!(f.len(), 35);
        assert_eq!(gaussian_binomial(4, 2), 35);
        assert_eq!(gaussian_binomial(8, 5), 97155);
        for x in 1..=15usize {
            assert_eq!(f.iter().filter(|s| s.set.contains(x - 1)).count(), 7);
        }
    }

    #[test]
    fn v1_small_values() {
        assert_eq!(v1_value(2, &ItemSet::empty(3)).value, 0);
        assert_eq!(v1_value(2, &ItemSet::full(3)).value, 2);
        assert_eq!(v1_value(2, &ItemSet::from_items(3, [0, 1])).value, 1);
        assert_eq!(v1_value(4, &ItemSet::full(15)).value, 4);
    }

    #[test]
    fn basis_cover_k2() {
        let fam = enumerate_subspaces(2, 1).unwrap();
        let three = fam.iter().find(|s| s.elements == vec![3]).unwrap();
        assert_eq!(basis_cover(2, three), vec![3]);
    }

    #[test]
    fn hard_instance_k2_constants() {
        let h = build_hard_instance(2).unwrap();
        assert_eq!((h.m, h.d), (3, 1));
        assert_eq!(h.rho, q(8, 3));
        let v2 = h.v2().unwrap();
        assert_eq!(v2.value(&ItemSet::from_items(3, [0])), q(8, 3));
        assert_eq!(v2.value(&ItemSet::empty(3)), Value::zero());
        assert!(build_hard_instance(3).is_err());
    }

    #[test]
    fn v2_demand_examples() {
        let h = build_hard_instance(2).unwrap();
        let (set, u) = h.v2_demand(&[Value::zero(), Value::from_int(10), Value::from_int(10)]).unwrap();
        assert_eq!(set.to_one_based(), vec![1]);
        assert_eq!(u, q(8, 3));
        let (set, u) = h.v2_demand(&vec![Value::from_int(5); 3]).unwrap();
        assert!(set.is_empty());
        assert!(u.is_zero());
    }

    #[test]
    fn cheap_subspace_k2() {
        let h = build_hard_instance(2).unwrap();
        let d = h.cheap_subspace(&[q(2, 3), q(2, 3), q(2, 3)]).unwrap().unwrap();
        assert_eq!(d.len(), 1);
        assert!(h.cheap_subspace(&vec![Value::from_int(2); 3]).unwrap().is_none());
    }
}
