use proptest::prelude::*;
use townsim::economy::{adjust_price, consumption_reserve, leisure_spend, rent, split_reserve};
use townsim::policy::{Policy, PolicySet};
use townsim::stats::welch;
use townsim::synth::largest_remainder;
use townsim::{ScenarioSchedule, Simulation, TownConfig};

fn schedule_for(mask: u16, start: u32, lift: Option<u32>) -> ScenarioSchedule {
    let names: Vec<String> = Policy::ALL
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, p)| format!("\"{}\"", p.name()))
        .collect();
    let mut text = String::from("name = \"prop\"\nhorizon_days = 12\n");
    if let Some(d) = lift {
        text.push_str(&format!("lift_all_day = {d}\n"));
    }
    text.push_str(&format!(
        "[[events]]\nday = {start}\nactivate = [{}]\n",
        names.join(", ")
    ));
    ScenarioSchedule::from_toml_str(&text).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// The per-period audit fails the step if money is created or lost.
    #[test]
    fn money_is_conserved_under_any_policy_mix(
        seed in 0u64..1_000,
        mask in 0u16..512,
        start in 0u32..5,
        lift in proptest::option::of(5u32..10),
    ) {
        let mut cfg = TownConfig::default().with_population(800);
        cfg.population.initial_infected_share = 0.02;
        let mut sim = Simulation::new(cfg, schedule_for(mask, start, lift), seed).unwrap();
        let money = sim.town().total_money();
        sim.run_until_day(12).unwrap();
        let total = sim.town().total_money();
        prop_assert!((total - money).abs() <= 1e-9 * money);
        let r = sim.records();
        prop_assert!(r.windows(2).all(|w| w[1].cum_deaths >= w[0].cum_deaths));
        prop_assert!(r.iter().all(|d| d.active_infections + d.cum_deaths <= 800));
    }
}

proptest! {
    #[test]
    fn largest_remainder_hits_the_total(
        shares in proptest::collection::vec(0.0f64..1.0, 1..20),
        total in 0usize..100_000,
    ) {
        prop_assume!(shares.iter().sum::<f64>() > 1e-6);
        let q = largest_remainder(&shares, total);
        prop_assert_eq!(q.iter().sum::<usize>(), total);
        let s: f64 = shares.iter().sum();
        for (x, &n) in shares.iter().zip(&q) {
            prop_assert!((n as f64 - x / s * total as f64).abs() < 1.0 + 1e-6);
        }
    }

    #[test]
    fn applying_a_day_twice_changes_nothing(mask in 0u16..512, day in 0u32..4, lift in proptest::option::of(0u32..4)) {
        let s = schedule_for(mask, day, lift);
        let mut set = PolicySet::default();
        s.apply_day(day, &mut set);
        let once = set;
        prop_assert!(!s.apply_day(day, &mut set));
        prop_assert_eq!(once, set);
    }

    #[test]
    fn schedules_survive_toml(mask in 0u16..512, day in 0u32..50, lift in proptest::option::of(0u32..200)) {
        let s = schedule_for(mask, day, lift);
        let back = ScenarioSchedule::from_toml_str(&s.to_toml_string()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn reserve_never_exceeds_funds(funds in -5.0f64..100.0, income in 0.0f64..50.0, share in 0.0f64..=1.0) {
        let r = consumption_reserve(funds, income, share);
        prop_assert!(r >= 0.0);
        prop_assert!(r <= funds.max(0.0) + 1e-12);
    }

    #[test]
    fn reserve_split_adds_up(reserve in 0.0f64..10.0, share in 0.0f64..=1.0, ml in 0.0f64..10.0, funds in 0.0f64..10.0) {
        let (goods, leisure) = split_reserve(reserve, share, ml, funds);
        prop_assert!(goods >= 0.0 && leisure >= 0.0);
        prop_assert!((goods + leisure - reserve).abs() < 1e-12);
    }

    #[test]
    fn visit_spending_is_bounded(price in 0.01f64..5.0, available in 0.0f64..20.0, splash in 0.0f64..=1.0) {
        let spend = leisure_spend(price, available, splash);
        prop_assert!(spend >= 0.0);
        prop_assert!(spend <= available.max(price.min(available)) + 1e-12);
    }

    #[test]
    fn rent_is_a_fixed_share_of_positive_funds(funds in -10.0f64..100.0) {
        let r = rent(funds, 0.4);
        prop_assert!(r >= 0.0);
        prop_assert!(r <= funds.max(0.0));
    }

    #[test]
    fn leisure_prices_stay_positive(
        price in 1e-6f64..10.0,
        guests in 0u32..2_000,
        std_cap in 1.0f64..50.0,
        over in 1.0f64..6.0,
    ) {
        let ec = TownConfig::default().economy;
        let next = adjust_price(price, guests, std_cap, std_cap * over, &ec);
        prop_assert!(next > 0.0);
        prop_assert!(next / price >= 0.98 - 1e-12 && next / price <= 1.05 + 1e-12);
    }

    #[test]
    fn welch_is_antisymmetric(
        a in proptest::collection::vec(-100.0f64..100.0, 2..30),
        b in proptest::collection::vec(-100.0f64..100.0, 2..30),
    ) {
        if let (Ok(x), Ok(y)) = (welch(&a, &b), welch(&b, &a)) {
            prop_assert!((x.t + y.t).abs() < 1e-9 * (1.0 + x.t.abs()));
            prop_assert!((x.p - y.p).abs() < 1e-9);
            prop_assert!((x.dof - y.dof).abs() < 1e-6 * x.dof);
            prop_assert!((0.0..=1.0).contains(&x.p));
        }
    }
}
