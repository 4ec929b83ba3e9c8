use auction_lab::dynamics::{is_pne, read_jsonl, validate_trace, write_jsonl};
use auction_lab::experiments::{
    check_aux_variant, check_average, check_lemmas, check_pointwise, measure, random_instance,
};
use auction_lab::strategies::check_safety;
use auction_lab::valuations::{GeneratorKind, GeneratorParams};
use auction_lab::{compute_opt, run, Aggressiveness, Instance, RunConfig, Schedule, Strategy as Update, Trace, Value};
use proptest::prelude::*;

fn instance(kind: GeneratorKind, n: usize, m: usize, seed: u64) -> Instance {
    random_instance(&GeneratorParams::new(kind, m), n, seed).unwrap()
}

fn xos_trace(n: usize, m: usize, seed: u64) -> Trace {
    let inst = instance(GeneratorKind::Xos, n, m, seed);
    run(&inst, &RunConfig::new(&inst, Update::XosUpdate)).unwrap()
}

fn subadditive_kind() -> impl Strategy<Value = GeneratorKind> {
    prop::sample::select(vec![GeneratorKind::BudgetedAdditive, GeneratorKind::Coverage])
}

fn bytes(trace: &Trace) -> Vec<u8> {
    let mut out = Vec::new();
    write_jsonl(trace, None, &mut out).unwrap();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn xos_updates_are_best_responses_with_unit_aggressiveness(n in 1usize..5, m in 1usize..7, seed: u64) {
        let trace = xos_trace(n, m, seed);
        for s in &trace.steps {
            prop_assert_eq!(&s.outcome.utility[s.bidder], &s.best_utility);
            match s.aggressiveness.as_ref().unwrap() {
                Aggressiveness::Finite(a) => prop_assert_eq!(a, &Value::one()),
                Aggressiveness::Unbounded => prop_assert!(s.best_utility.is_zero()),
            }
            prop_assert!(s.outcome.declared_utility.iter().all(|u| !u.is_negative()));
        }
        let safety = check_safety(&trace);
        prop_assert!(safety.allows(&Value::one()));
    }

    #[test]
    fn no_overbid_updates_are_safe_and_harmonic(kind in subadditive_kind(), n in 1usize..4, m in 1usize..6, seed: u64) {
        let inst = instance(kind, n, m, seed);
        let trace = run(&inst, &RunConfig::new(&inst, Update::SubadditiveNoOverbid)).unwrap();
        for s in &trace.steps {
            prop_assert_eq!(&s.outcome.utility[s.bidder], &s.best_utility);
            let size = s.demand_set.as_ref().map_or(0, |d| d.len());
            if size > 0 {
                let floor = Value::harmonic(size).recip().unwrap();
                prop_assert!(s.aggressiveness.as_ref().unwrap().at_least(&floor));
            }
        }
        prop_assert!(check_safety(&trace).allows(&Value::one()));
    }

    #[test]
    fn aggressive_updates_have_unit_aggressiveness(kind in subadditive_kind(), n in 1usize..4, m in 1usize..6, seed: u64) {
        let inst = instance(kind, n, m, seed);
        let mut config = RunConfig::new(&inst, Update::SubadditiveAggressive);
        config.steps = 2 * n;
        let trace = run(&inst, &config).unwrap();
        for s in &trace.steps {
            prop_assert_eq!(&s.outcome.utility[s.bidder], &s.best_utility);
            prop_assert!(s.aggressiveness.as_ref().unwrap().at_least(&Value::one()));
        }
        let safety = check_safety(&trace);
        prop_assert!(safety.feasible);
        prop_assert!(safety.min_beta.unwrap() <= Value::harmonic(m));
    }

    #[test]
    fn lemmas_and_bounds_hold_on_xos_traces(n in 1usize..5, m in 1usize..7, seed: u64) {
        let trace = xos_trace(n, m, seed);
        let opt = compute_opt(&trace.instance).unwrap().value;
        let lemmas = check_lemmas(&trace, &opt).unwrap();
        prop_assert!(lemmas.passed, "{}", lemmas.table());
        let pointwise = check_pointwise(&trace, &opt).unwrap();
        prop_assert!(pointwise.passed, "{}", pointwise.table());
        let average = check_average(&trace, &opt).unwrap();
        prop_assert!(average.passed, "{}", average.table());
        // With α = β = 1 the pointwise factor is 1/3.
        for t in n..=trace.len() {
            prop_assert!(trace.sw(t) * &Value::from_int(3) >= opt);
        }
    }

    #[test]
    fn aux_variant_holds_under_random_activation(n in 1usize..5, m in 1usize..6, seed: u64, schedule_seed: u64) {
        let inst = instance(GeneratorKind::Xos, n, m, seed);
        let mut config = RunConfig::new(&inst, Update::XosUpdate);
        config.schedule = Schedule::UniformRandom { seed: schedule_seed };
        config.steps = 3 * n;
        let trace = run(&inst, &config).unwrap();
        let report = check_aux_variant(&trace);
        prop_assert!(report.passed, "{}", report.table());
        // Same seed, same trace.
        prop_assert_eq!(bytes(&trace), bytes(&run(&inst, &config).unwrap()));
    }

    #[test]
    fn quiet_rounds_are_equilibria(n in 1usize..4, m in 1usize..5, seed: u64) {
        let trace = xos_trace(n, m, seed);
        for end in n..=trace.len() {
            let quiet = (end - n + 1..=end).all(|t| trace.bids(t) == trace.bids(t - 1));
            if quiet {
                prop_assert!(is_pne(&trace.instance, trace.bids(end), &trace.rules).unwrap().is_pne);
            }
        }
    }

    #[test]
    fn verdicts_are_invariant_under_scaling(n in 1usize..4, m in 1usize..6, seed: u64, num in 1i64..20, den in 1i64..20) {
        let c = Value::new(num, den);
        let inst = instance(GeneratorKind::Xos, n, m, seed);
        let scaled = inst.scaled(&c).unwrap();
        let config = RunConfig::new(&inst, Update::XosUpdate);
        let a = run(&inst, &config).unwrap();
        let b = run(&scaled, &RunConfig { initial: config.initial.scaled(&c), ..config.clone() }).unwrap();
        prop_assert_eq!(measure(&a).unwrap(), measure(&b).unwrap());
        let (oa, ob) = (compute_opt(&inst).unwrap().value, compute_opt(&scaled).unwrap().value);
        prop_assert_eq!(&(&oa * &c), &ob);
        for t in 0..=a.len() {
            prop_assert_eq!(&(a.sw(t) * &c), b.sw(t));
        }
        let verdicts = |tr: &Trace, opt: &Value| {
            (
                check_lemmas(tr, opt).unwrap().passed,
                check_pointwise(tr, opt).unwrap().passed,
                check_average(tr, opt).unwrap().passed,
            )
        };
        prop_assert_eq!(verdicts(&a, &oa), verdicts(&b, &ob));
        // A deliberately inflated optimum fails in both, at the same step.
        let big = &oa * Value::from_int(10) + Value::one();
        let fa = check_pointwise(&a, &big).unwrap();
        let fb = check_pointwise(&b, &(&big * &c)).unwrap();
        prop_assert_eq!(fa.passed, fb.passed);
        prop_assert_eq!(fa.first_failure().map(|f| f.t), fb.first_failure().map(|f| f.t));
    }

    #[test]
    fn traces_round_trip_through_jsonl(n in 1usize..4, m in 1usize..5, seed: u64, lazy: bool) {
        let inst = instance(GeneratorKind::Xos, n, m, seed);
        let mut config = RunConfig::new(&inst, Update::XosUpdate);
        config.lazy = lazy;
        let trace = run(&inst, &config).unwrap();
        let text = bytes(&trace);
        let (back, scenario) = read_jsonl(&text[..]).unwrap();
        prop_assert!(scenario.is_none());
        prop_assert_eq!(bytes(&back), text);
        prop_assert!(validate_trace(&back).is_ok());
    }
}
