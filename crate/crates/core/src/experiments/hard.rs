use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{run, RunConfig};
use crate::error::{Error, Result};
use crate::gf2::{basis_cover, build_hard_instance, construct_deviation, dot, gaussian_binomial, HardInstance, Subspace};
use crate::mechanism::{allocate, AuctionRules, BidProfile};
use crate::strategies::Strategy;
use crate::value::Value;

use super::{BoundParams, BoundReport, Relation};

const DENOM: i64 = 1000;
/// Steps of the simulated hard-instance dynamics (20 updates per player).
const HARD_STEPS: usize = 40;

/// A random nonnegative row on `m` items, in multiples of `1/1000`, whose
/// total is at most `cap`. Mixes dense, sparse and single-item shapes.
pub fn grand_no_overbid_row<R: Rng>(rng: &mut R, m: usize, cap: &Value) -> Vec<Value> {
    let (num, den) = cap.small_parts().expect("row caps are small rationals");
    let budget = (num * DENOM / den).max(0);
    let total = rng.gen_range(0..=budget);
    let shape = rng.gen_range(0..3);
    let weights: Vec<i64> = (0..m)
        .map(|_| match shape {
            0 => rng.gen_range(0..=1000),
            1
                if rng.gen_bool(0.1) => {
                    rng.gen_range(1..=1000)
                }
            _ => 0,
        })
        .collect();
    let mut weights = weights;
    if weights.iter().all(|&w| w == 0) {
        weights[rng.gen_range(0..m)] = 1;
    }
    let sum: i64 = weights.iter().sum();
    weights.iter().map(|&w| Value::new((w as i128 * total as i128 / sum as i128) as i64, DENOM)).collect()
}

fn supported(k: usize) -> Result<HardInstance> {
    if !matches!(k, 2 | 4 | 8) {
        return Err(Error::UnsupportedK(k));
    }
    build_hard_instance(k)
}

/// Whether the cover sets indexed by `cover` contain every item outside `d`.
fn covers_complement(m: usize, d: &Subspace, cover: &[u32]) -> bool {
    let mut inside = vec![false; m + 1];
    for &x in &d.elements {
        inside[x as usize] = true;
    }
    (1..=m as u32).all(|x| inside[x as usize] || cover.iter().any(|&i| dot(i, x)))
}

/// Lemma-level checks of the hard instance for `k ∈ {2, 4, 8}`, plus the
/// simulated dynamics for `k ≤ 4`.
pub fn check_hard_instance(k: usize, samples: usize, seed: u64) -> Result<BoundReport> {
    let hard = supported(k)?;
    let (m, d) = (hard.m, hard.d);
    let family = hard.family()?.clone();
    let ceiling = hard.welfare_ceiling();
    let mut report = BoundReport::new(
        format!("hard-instance-k{k}"),
        BoundParams { n: 2, m, steps: if k <= 4 { HARD_STEPS } else { 0 }, ..Default::default() },
    );
    report.note(format!(
        "k={k} m={m} d={d} rho={} rho*2^d={} max v2={} ceiling k-d+rho*2^d={}",
        hard.rho,
        hard.rho_two_d(),
        hard.max_v2(),
        ceiling
    ));
    let k_value = Value::from_usize(k);
    report.check("family-size", None, Value::from_usize(family.subspaces.len()), Relation::Eq, Value::from_usize(gaussian_binomial(k, d) as usize));
    report.check("max-v2-at-most-4", None, hard.max_v2(), Relation::Le, Value::from_int(4));

    // (i) and (ii): cheap subspaces and demand supersets on sampled rows.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cheap, mut superset) = (0usize, 0usize);
    for s in 0..samples {
        let b1 = grand_no_overbid_row(&mut rng, m, &k_value);
        match hard.cheap_subspace(&b1)? {
            Some(_) => cheap += 1,
            None => {
                report.note(format!("sample {s}: no cheap subspace"));
                continue;
            }
        }
        let (set, _) = hard.v2_demand(&b1)?;
        if family.contained_in(&set).is_some() {
            superset += 1;
        } else {
            report.note(format!("sample {s}: demand set {set} contains no subspace"));
        }
    }
    report.check("cheap-subspace", None, Value::from_usize(cheap), Relation::Eq, Value::from_usize(samples));
    report.check("demand-superset", None, Value::from_usize(superset), Relation::Eq, Value::from_usize(cheap));

    // (iii): basis covers, exhaustively over the family.
    let (mut largest, mut covering) = (0usize, 0usize);
    for sub in &family.subspaces {
        let cover = basis_cover(k, sub);
        largest = largest.max(cover.len());
        if covers_complement(m, sub, &cover) {
            covering += 1;
        }
    }
    report.check("basis-cover-size", None, Value::from_usize(largest), Relation::Le, Value::from_usize(k - d));
    report.check(
        "basis-cover-covers",
        None,
        Value::from_usize(covering),
        Relation::Eq,
        Value::from_usize(family.subspaces.len()),
    );

    // (iv): dynamics with exact best responses for both players.
    if k <= 4 {
        let instance = hard.instance()?;
        let mut config = RunConfig::new(&instance, Strategy::SurplusSplit);
        config.steps = HARD_STEPS;
        let trace = run(&instance, &config)?;
        let mut updates = 0usize;
        for step in &trace.steps {
            let total: Value = step.bids.row(0).iter().sum();
            report.check("player1-grand-no-overbid", Some(step.t), total, Relation::Le, k_value.clone());
            if step.bidder == 1 {
                updates += 1;
                report.check("welfare-after-player2", Some(step.t), step.outcome.social_welfare.clone(), Relation::Le, ceiling.clone());
            }
        }
        report.check("player2-updates", None, Value::from_usize(updates), Relation::Ge, Value::from_int(20));
    } else {
        report.note("dynamics are simulated only for k <= 4");
    }
    Ok(report)
}

/// Lemma chain certifying that the hard instance at `k = 8` has no pure Nash
/// equilibrium in weakly no-overbidding strategies, plus the explicit
/// deviation on `samples` sampled profiles.
pub fn check_no_pne_lemmas(k: usize, samples: usize, seed: u64) -> Result<BoundReport> {
    if k != 8 {
        return Err(Error::UnsupportedK(k));
    }
    let hard = supported(k)?;
    let (m, d) = (hard.m, hard.d);
    let family = hard.family()?.clone();
    let mut report = BoundReport::new("no-pne-lemmas", BoundParams { n: 2, m, ..Default::default() });
    report.note("non-existence of a pure Nash equilibrium is certified by the lemma chain, not by search");
    let four = Value::from_int(4);
    let kv = Value::from_usize(k);
    let mv = Value::from_usize(m);
    let log = k - d;

    // Bidder 2's values never exceed 4, which all three inequalities use.
    report.check("max-v2-at-most-4", None, hard.max_v2(), Relation::Le, four.clone());
    // Grand bundle: Σ b1 ≤ k + 4, so some subspace has average price at most
    // (k + 4)/m, which must stay below ρ/2.
    report.check("grand-bundle-average", None, (&kv + &four) / &mv, Relation::Lt, &hard.rho / Value::from_int(2));
    // Cover: 4 + 1 + (k − d) ≤ k = v1(M).
    report.check("cover-bound", None, &four + Value::one() + Value::from_usize(log), Relation::Le, kv.clone());
    // Gain: d − 4 ≥ 1.
    report.check("gain-bound", None, Value::from_usize(d) - &four, Relation::Ge, Value::one());

    let largest = family.subspaces.iter().map(|s| basis_cover(k, s).len()).max().unwrap_or(0);
    report.check("basis-cover-size", None, Value::from_usize(largest), Relation::Le, Value::from_usize(log));

    // Explicit deviations on sampled profiles: bidder 1 bids at most 1 in
    // total, bidder 2 buys its demand set at those prices.
    let instance = hard.instance()?;
    let rules = AuctionRules::ascending(2, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut certified = 0usize;
    let gain_floor = Value::from_usize(d) - &four;
    for s in 0..samples {
        let b1 = grand_no_overbid_row(&mut rng, m, &Value::one());
        let (set, best) = hard.v2_demand(&b1)?;
        let share = &best / Value::from_usize(set.len().max(1));
        let b2: Vec<Value> = (0..m).map(|j| if set.contains(j) { &b1[j] + &share } else { Value::zero() }).collect();
        let bids = BidProfile::from_rows(vec![b1, b2])?;
        let dev = construct_deviation(&hard, &bids, &rules)?;
        let before = allocate(&instance, &bids, &rules)?.utility[0].clone();
        let after = allocate(&instance, &bids.with_row(0, dev.row.clone())?, &rules)?.utility[0].clone();
        let gain = &after - &before;
        if dev.certified() && gain >= gain_floor {
            certified += 1;
        } else {
            report.check("deviation-gain", Some(s), gain, Relation::Ge, gain_floor.clone());
        }
    }
    report.check("deviations-certified", None, Value::from_usize(certified), Relation::Eq, Value::from_usize(samples));
    Ok(report)
}
