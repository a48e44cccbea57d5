use townsim::economy::{
    clear_goods_market, collect_rents, execute_pay, init_economy, pay_for, produce, Pay,
};
use townsim::rng::RngStreams;
use townsim::synth::synthesize;
use townsim::town::FirmKind;
use townsim::types::NONE;
use townsim::{Activity, Profession, Town, TownConfig};

fn town(n: usize) -> (Town, TownConfig) {
    let cfg = TownConfig::default().with_population(n);
    let town = synthesize(&cfg, &mut RngStreams::new(3).setup).unwrap();
    (town, cfg)
}

fn first(town: &Town, p: Profession, employed: bool) -> u32 {
    town.agents
        .iter()
        .find(|a| a.profession == p && a.employed == employed)
        .map(|a| a.id)
        .unwrap()
}

#[test]
fn wage_and_benefit_amounts() {
    let (mut town, cfg) = town(3_000);
    let bc = first(&town, Profession::BlueCollar, true);
    let firm = town.agents[bc as usize].employer as usize;
    let before = (town.agents[bc as usize].funds, town.firms[firm].funds);
    let mut gov = 0.0;
    let pay = pay_for(&town, &cfg, bc, Activity::OnSite).unwrap();
    assert_eq!(pay, Pay::Wage);
    execute_pay(&mut town, &cfg, bc, pay, Some(1), &mut gov);
    assert!((town.agents[bc as usize].funds - before.0 - 0.81).abs() < 1e-12);
    let gross = cfg.professions.blue_collar.gross_wage;
    assert!((before.1 - town.firms[firm].funds - gross).abs() < 1e-12);
    assert!((gov - (gross - 0.81)).abs() < 1e-12);
    assert!((town.income[bc as usize][1] - 0.81).abs() < 1e-12);

    let sw = first(&town, Profession::Service, false);
    let before = town.agents[sw as usize].funds;
    let mut gov = 0.0;
    let pay = pay_for(&town, &cfg, sw, Activity::Home).unwrap();
    execute_pay(&mut town, &cfg, sw, pay, None, &mut gov);
    assert!((town.agents[sw as usize].funds - before - 0.396).abs() < 1e-12);
    assert!((gov + 0.396).abs() < 1e-12);
}

#[test]
fn caregiving_blue_collar_receives_two_thirds() {
    let (town, cfg) = town(3_000);
    let bc = first(&town, Profession::BlueCollar, true);
    assert_eq!(
        pay_for(&town, &cfg, bc, Activity::HomeCaregiving),
        Some(Pay::Replacement(0.67))
    );
}

/// Replacements pass through the firm: sales and costs rise by the same
/// amount and the firm's funds do not move.
#[test]
fn quarantine_pay_leaves_profit_unchanged() {
    let (mut town, cfg) = town(3_000);
    let bc = first(&town, Profession::BlueCollar, true);
    let firm = town.agents[bc as usize].employer as usize;
    let f = &town.firms[firm];
    let (funds, profit) = (f.funds, f.week_sales - f.week_costs);
    let pay = pay_for(&town, &cfg, bc, Activity::HomeIsolated).unwrap();
    let mut gov = 0.0;
    execute_pay(&mut town, &cfg, bc, pay, None, &mut gov);
    let f = &town.firms[firm];
    assert_eq!(f.funds, funds);
    assert!((f.week_sales - f.week_costs - profit).abs() < 1e-12);
    assert!(f.week_costs > 0.0);
    assert!((gov + cfg.economy.quarantine_pay * 0.81).abs() < 1e-12);
}

#[test]
fn production_by_activity() {
    let (mut town, cfg) = town(3_000);
    let ec = &cfg.economy;
    let n = town.agents.len();
    let factory = town
        .firms
        .iter()
        .position(|f| f.kind == FirmKind::Factory && !f.employees.is_empty())
        .unwrap();
    let office = town
        .firms
        .iter()
        .position(|f| f.kind == FirmKind::Office && f.employees.len() >= 2)
        .unwrap();
    let mut act = vec![Activity::Home; n];
    for &e in &town.firms[factory].employees {
        act[e as usize] = Activity::OnSite;
    }
    let staff = town.firms[office].employees.clone();
    act[staff[0] as usize] = Activity::TeleworkCaregiving;
    for &e in &staff[1..] {
        act[e as usize] = Activity::Telework;
    }
    produce(&mut town, ec, &act);
    let bc = town.firms[factory].employees.len() as f64;
    assert!((town.firms[factory].day_output - bc * ec.blue_collar_productivity).abs() < 1e-12);
    let wc = ec.white_collar_productivity;
    assert!((wc - 1.77 / 1.28).abs() < 1e-4);
    let expected = wc * (0.8 + (staff.len() - 1) as f64);
    assert!((town.firms[office].day_output - expected).abs() < 1e-12);
}

#[test]
fn commercial_funds_and_setup_conservation() {
    let (mut town, cfg) = town(5_000);
    let report = init_economy(&mut town, &cfg).unwrap();
    assert!((report.money_after - report.money_before).abs() <= 1e-9 * report.money_before);
    assert!(report.leisure_price > 0.0);
    // Commercial funds start at (2 + 0.4) × staff × 1; the setup cycle
    // then pays one wage per worker and one rent.
    for f in town.firms.iter().filter(|f| f.kind == FirmKind::Commercial) {
        let staff = f.employees.len() as f64;
        let after_wages = 2.4 * staff - staff;
        let expected = after_wages - after_wages * 0.4 / 1.4;
        assert!(
            (f.funds - expected).abs() < 1e-9,
            "{} vs {}",
            f.funds,
            expected
        );
    }
}

/// On the setup day the goods market pays factories and offices their
/// wage bill marked up by the expected profit rate.
#[test]
fn setup_day_revenue_covers_costs_with_expected_markup() {
    let (mut town, cfg) = town(20_000);
    let report = init_economy(&mut town, &cfg).unwrap();
    let costs: f64 = town
        .firms
        .iter()
        .filter(|f| f.kind != FirmKind::Commercial)
        .map(|f| f.employees.len() as f64 * cfg.professions.row(f.profession()).gross_wage)
        .sum();
    let revenue = report.goods_price * report.output;
    let ratio = revenue / costs;
    assert!((ratio - 1.4).abs() < 0.014, "revenue/costs = {ratio}");
    assert!(report.g0 > 0.0);
}

#[test]
fn rents_are_taxed_at_the_owner_rate() {
    let (mut town, cfg) = town(3_000);
    let f = town.firms.iter().position(|f| f.owner != NONE).unwrap();
    for (i, firm) in town.firms.iter_mut().enumerate() {
        firm.funds = if i == f { 7.0 } else { 0.0 };
    }
    let owner = town.firms[f].owner as usize;
    let before = (town.agents[owner].funds, town.government.savings);
    let total = collect_rents(&mut town, &cfg.economy, None);
    assert!((total - 2.0).abs() < 1e-12);
    assert!((town.agents[owner].funds - before.0 - 1.1).abs() < 1e-12);
    assert!((town.government.savings - before.1 - 0.9).abs() < 1e-12);
    assert!((town.firms[f].funds - 5.0).abs() < 1e-12);
}

#[test]
fn zero_supply_skips_the_market() {
    let (mut town, cfg) = town(2_000);
    for f in town.firms.iter_mut() {
        f.day_output = 0.0;
    }
    let money = town.total_money();
    let out = clear_goods_market(&mut town, &cfg.economy, 50.0);
    assert_eq!(out.price, None);
    assert_eq!(out.purchase, 0.0);
    assert_eq!(town.total_money(), money);
}

#[test]
fn zero_demand_gives_zero_price() {
    let (mut town, cfg) = town(2_000);
    for a in town.agents.iter_mut() {
        a.funds = 0.0;
    }
    let f = town
        .firms
        .iter()
        .position(|f| f.kind == FirmKind::Factory)
        .unwrap();
    town.firms[f].day_output = 3.0;
    let before = town.firms[f].funds;
    let out = clear_goods_market(&mut town, &cfg.economy, 0.0);
    assert_eq!(out.price, Some(0.0));
    assert_eq!(town.firms[f].funds, before);
}
