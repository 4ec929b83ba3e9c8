use auction_lab::mechanism::declared_welfare;
use auction_lab::{allocate, AuctionRules, BidProfile, Instance, TieBreak, Valuation, Value};
use proptest::prelude::*;

fn small_value() -> impl Strategy<Value = Value> {
    // Few distinct values so ties are common.
    (0i64..6, 1i64..4).prop_map(|(a, b)| Value::new(a, b))
}

fn profile(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<Value>>> {
    prop::collection::vec(prop::collection::vec(small_value(), m), n)
}

fn setup() -> impl Strategy<Value = (Instance, BidProfile, AuctionRules)> {
    (1usize..5, 1usize..5).prop_flat_map(|(n, m)| {
        let orders = prop::collection::vec(Just((0..n).collect::<Vec<_>>()).prop_shuffle(), m);
        let weights = prop::collection::vec(prop::collection::vec(small_value(), m), n);
        (profile(n, m), orders, weights, any::<bool>()).prop_map(move |(rows, orders, weights, zero)| {
            let vals = weights.into_iter().map(|w| Valuation::additive(w).unwrap()).collect();
            let instance = Instance::new(m, vals).unwrap();
            let rules = AuctionRules { tie_break: TieBreak::from_orders(n, orders).unwrap(), allocate_zero_bids: zero };
            (instance, BidProfile::from_rows(rows).unwrap(), rules)
        })
    })
}

proptest! {
    #[test]
    fn every_item_goes_to_at_most_one_bidder((instance, bids, rules) in setup()) {
        let out = allocate(&instance, &bids, &rules).unwrap();
        for j in 0..instance.m() {
            let holders: Vec<usize> = (0..instance.n()).filter(|&i| out.allocation[i].contains(j)).collect();
            match out.winner[j] {
                Some(w) => prop_assert_eq!(holders, vec![w]),
                None => {
                    prop_assert!(holders.is_empty());
                    prop_assert!(!rules.allocate_zero_bids && bids.item_max(j).is_zero());
                }
            }
        }
        if rules.allocate_zero_bids {
            prop_assert!(out.winner.iter().all(Option::is_some));
        }
    }

    #[test]
    fn winner_dominates_with_priority_on_ties((instance, bids, rules) in setup()) {
        let out = allocate(&instance, &bids, &rules).unwrap();
        for j in 0..instance.m() {
            let Some(w) = out.winner[j] else { continue };
            for i in 0..instance.n() {
                prop_assert!(bids.get(w, j) >= bids.get(i, j));
                if i != w && bids.get(w, j) == bids.get(i, j) {
                    prop_assert!(rules.tie_break.prefers(j, w, i));
                }
            }
            let second = (0..instance.n()).filter(|&i| i != w).map(|i| bids.get(i, j).clone()).max().unwrap_or_else(Value::zero);
            prop_assert_eq!(&out.price[j], &second);
        }
    }

    #[test]
    fn declared_quantities((instance, bids, rules) in setup()) {
        let out = allocate(&instance, &bids, &rules).unwrap();
        prop_assert!(out.declared_utility.iter().all(|u| !u.is_negative()));
        let by_items: Value = (0..instance.m()).map(|j| bids.item_max(j)).sum();
        let by_winners: Value = (0..instance.n())
            .flat_map(|i| out.allocation[i].iter().map(move |j| (i, j)))
            .map(|(i, j)| bids.get(i, j).clone())
            .sum();
        prop_assert_eq!(&declared_welfare(&bids), &by_items);
        if rules.allocate_zero_bids {
            prop_assert_eq!(&out.declared_welfare, &by_items);
        }
        prop_assert_eq!(&out.declared_welfare, &by_winners);
    }

    #[test]
    fn allocation_is_deterministic((instance, bids, rules) in setup()) {
        let a = allocate(&instance, &bids, &rules).unwrap();
        let b = allocate(&instance, &bids, &rules).unwrap();
        prop_assert_eq!(a, b);
    }
}
