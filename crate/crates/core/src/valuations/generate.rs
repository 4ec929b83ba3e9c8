//! Seeded random valuations. Every weight is a multiple of `1/1000`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::Value;

use super::Valuation;

const DENOM: i64 = 1000;

/// Kinds the generator can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Additive,
    UnitDemand,
    Xos,
    BudgetedAdditive,
    Coverage,
}

/// Generator parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    pub kind: GeneratorKind,
    pub items: usize,
    /// XOS clause count (default 3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clauses: Option<usize>,
    /// Coverage ground-set size (default `2m`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<usize>,
}

impl GeneratorParams {
    pub fn new(kind: GeneratorKind, items: usize) -> Self {
        GeneratorParams { kind, items, clauses: None, ground: None }
    }
}

fn weight(rng: &mut ChaCha8Rng, low: i64) -> Value {
    Value::new(rng.gen_range(low..=DENOM), DENOM)
}

/// A valuation drawn deterministically from `seed`.
pub fn generate(params: &GeneratorParams, seed: u64) -> Result<Valuation> {
    let m = params.items;
    if m == 0 {
        return Err(Error::InvalidParam("generated valuations need at least one item".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match params.kind {
        GeneratorKind::Additive => Valuation::additive((0..m).map(|_| weight(&mut rng, 0)).collect()),
        GeneratorKind::UnitDemand => Valuation::unit_demand((0..m).map(|_| weight(&mut rng, 0)).collect()),
        GeneratorKind::Xos => {
            let count = params.clauses.unwrap_or(3);
            if count == 0 {
                return Err(Error::InvalidParam("XOS generator needs at least one clause".into()));
            }
            let clauses = (0..count).map(|_| (0..m).map(|_| weight(&mut rng, 0)).collect()).collect();
            Valuation::xos(m, clauses)
        }
        GeneratorKind::BudgetedAdditive => {
            let weights: Vec<Value> = (0..m).map(|_| weight(&mut rng, 1)).collect();
            let (lo, hi) = (weights.iter().max().cloned().unwrap_or_default(), weights.iter().sum::<Value>());
            let steps = ((&hi - &lo) * Value::from_int(DENOM)).to_f64().round() as i64;
            let budget = lo + Value::new(rng.gen_range(0..=steps), DENOM);
            Valuation::budgeted_additive(weights, budget)
        }
        GeneratorKind::Coverage => {
            let g = params.ground.unwrap_or(2 * m);
            if g == 0 {
                return Err(Error::InvalidParam("coverage generator needs a nonempty ground set".into()));
            }
            let ground = (0..g).map(|_| weight(&mut rng, 1)).collect();
            let covers = (0..m)
                .map(|_| {
                    let mut c: Vec<usize> = (0..g).filter(|_| rng.gen_bool(0.3)).collect();
                    if c.is_empty() {
                        c.push(rng.gen_range(0..g));
                    }
                    c
                })
                .collect();
            Valuation::coverage(ground, covers)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::items::ItemSet;

    #[test]
    fn deterministic_in_seed() {
        let p = GeneratorParams { clauses: Some(3), ..GeneratorParams::new(GeneratorKind::Xos, 4) };
        let a = generate(&p, 7).unwrap();
        let b = generate(&p, 7).unwrap();
        assert_eq!(a.to_spec(), b.to_spec());
        assert_ne!(a.to_spec(), generate(&p, 8).unwrap().to_spec());
    }

    #[test]
    fn denominators_stay_small() {
        let p = GeneratorParams::new(GeneratorKind::BudgetedAdditive, 5);
        let v = generate(&p, 1).unwrap();
        let (_, d) = v.value(&ItemSet::full(5)).small_parts().unwrap();
        assert!(d <= 1000);
    }
}
