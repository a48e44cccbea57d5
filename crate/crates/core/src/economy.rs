//! Production, incomes, the goods market, leisure pricing, profits, the
//! labor market and the government ledger.

use rand::Rng;

use crate::config::{EconomyConfig, TownConfig};
use crate::error::SetupError;
use crate::rng::SimRng;
use crate::social::Activity;
use crate::town::{pool_index, FirmKind, Town};
use crate::types::{AgentId, FirmId, FiscalMode, Profession, NONE};

/// Leisure spending for one visit: the price plus a fraction `splash` of
/// what remains available.
pub fn leisure_spend(price: f64, available: f64, splash: f64) -> f64 {
    if available <= price {
        return price.min(available.max(0.0));
    }
    price + splash * (available - price)
}

/// Consumption reserve: a share of the larger of funds and weekly income,
/// never more than the funds.
pub fn consumption_reserve(funds: f64, weekly_income: f64, share: f64) -> f64 {
    if funds <= 0.0 {
        return 0.0;
    }
    (share * funds.max(weekly_income)).min(funds)
}

/// Split a reserve into (goods budget, leisure contribution). Agents whose
/// leisure savings already cover their funds put nothing aside.
pub fn split_reserve(
    reserve: f64,
    leisure_share: f64,
    leisure_savings: f64,
    funds: f64,
) -> (f64, f64) {
    if leisure_savings >= funds {
        return (reserve, 0.0);
    }
    let leisure = reserve * leisure_share;
    (reserve - leisure, leisure)
}

/// Rent paid out of firm funds: `funds * r / (1 + r)`, zero when funds
/// are not positive.
pub fn rent(funds: f64, expected_profit_rate: f64) -> f64 {
    if funds <= 0.0 {
        0.0
    } else {
        funds * expected_profit_rate / (1.0 + expected_profit_rate)
    }
}

/// Goods price clearing nominal demand against real supply.
pub fn goods_price(budgets: f64, purchase: f64, supply: f64) -> Option<f64> {
    (supply > 0.0).then(|| (budgets + purchase) / supply)
}

/// Weekly leisure price update from the guest count of the week.
pub fn adjust_price(
    price: f64,
    week_guests: u32,
    standard_capacity: f64,
    max_capacity: f64,
    ec: &EconomyConfig,
) -> f64 {
    let mean = week_guests as f64 / 14.0;
    if max_capacity > 0.0 && mean / max_capacity > ec.utilization_max {
        price * (1.0 + ec.price_step_large)
    } else if mean / standard_capacity < ec.utilization_low {
        price * (1.0 - ec.price_step_small)
    } else if mean / standard_capacity > ec.utilization_high {
        price * (1.0 + ec.price_step_small)
    } else {
        price
    }
}

/// Weekly profit rate, undefined without costs.
pub fn profit_rate(sales: f64, costs: f64) -> Option<f64> {
    (costs > 0.0).then(|| (sales - costs) / costs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaborDecision {
    Hire,
    Fire,
    /// Fire the last worker and close the firm for good.
    Dissolve,
    Hold,
}

pub fn labor_decision(
    rate: f64,
    employees: usize,
    funds: f64,
    ec: &EconomyConfig,
) -> LaborDecision {
    let gap = rate - ec.expected_profit_rate;
    if gap > ec.profit_buffer {
        LaborDecision::Hire
    } else if -gap > ec.profit_buffer {
        match employees {
            0 => LaborDecision::Hold,
            1 if funds < 0.0 => LaborDecision::Dissolve,
            1 => LaborDecision::Hold,
            _ => LaborDecision::Fire,
        }
    } else {
        LaborDecision::Hold
    }
}

/// Government purchase on a consumption day.
pub fn government_purchase(mode: FiscalMode, g0: f64, savings: f64) -> f64 {
    match mode {
        FiscalMode::Fixed => g0,
        FiscalMode::ZeroDeficit => savings.max(0.0),
    }
}

/// How an agent is paid for one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pay {
    Wage,
    /// A fraction of the net wage replacing the wage.
    Replacement(f64),
    /// A public transfer of a fixed amount.
    Transfer(f64),
}

/// Payment owed for an agent's activity in a pay period, if any.
pub fn pay_for(town: &Town, cfg: &TownConfig, id: AgentId, activity: Activity) -> Option<Pay> {
    let a = &town.agents[id as usize];
    if !a.alive {
        return None;
    }
    let ec = &cfg.economy;
    let row = cfg.professions.row(a.profession);
    match a.profession {
        Profession::Child | Profession::Pensioner => Some(Pay::Transfer(row.net_wage)),
        Profession::Owner => None,
        _ if !a.employed => Some(Pay::Transfer(ec.unemployment_benefit * row.net_wage)),
        _ => Some(match activity {
            Activity::Hospital | Activity::HomeSick => Pay::Replacement(ec.sick_pay),
            Activity::HomeIsolated => Pay::Replacement(ec.quarantine_pay),
            Activity::HomeCaregiving => Pay::Replacement(ec.caregiving_pay),
            Activity::HomeBenefit => Pay::Replacement(ec.unemployment_benefit),
            _ => Pay::Wage,
        }),
    }
}

/// Execute a payment. Public flows are accumulated in `gov` so that the
/// government balance is updated once per pass.
pub fn execute_pay(
    town: &mut Town,
    cfg: &TownConfig,
    id: AgentId,
    pay: Pay,
    window: Option<usize>,
    gov: &mut f64,
) {
    let (profession, employer) = {
        let a = &town.agents[id as usize];
        (a.profession, a.employer)
    };
    let row = cfg.professions.row(profession);
    let private = profession.is_private() && employer != NONE;
    let received = match pay {
        Pay::Transfer(amount) => {
            *gov -= amount;
            amount
        }
        Pay::Wage if private => {
            let f = &mut town.firms[employer as usize];
            f.funds -= row.gross_wage;
            f.week_costs += row.gross_wage;
            *gov += row.gross_wage - row.net_wage;
            row.net_wage
        }
        Pay::Wage => {
            *gov -= row.net_wage;
            row.net_wage
        }
        Pay::Replacement(frac) => {
            let amount = frac * row.net_wage;
            *gov -= amount;
            if private {
                let f = &mut town.firms[employer as usize];
                f.week_sales += amount;
                f.week_costs += amount;
            }
            amount
        }
    };
    town.agents[id as usize].funds += received;
    if let Some(slot) = window {
        town.income[id as usize][slot] += received;
    }
}

/// Output of factories and offices given each agent's activity. Sets
/// `day_output` on every firm and returns the total.
pub fn produce(town: &mut Town, ec: &EconomyConfig, activity: &[Activity]) -> f64 {
    let mut total = 0.0;
    for f in town.firms.iter_mut() {
        f.day_output = 0.0;
        if f.dissolved || f.kind == FirmKind::Commercial {
            continue;
        }
        let mut y = 0.0;
        for &e in &f.employees {
            let eff = match activity[e as usize] {
                Activity::OnSite => 1.0,
                Activity::Telework => ec.telework_efficiency,
                Activity::TeleworkCaregiving => {
                    ec.telework_efficiency * ec.caregiving_telework_efficiency
                }
                _ => 0.0,
            };
            y += eff;
        }
        y *= match f.kind {
            FirmKind::Factory => ec.blue_collar_productivity,
            _ => ec.white_collar_productivity,
        };
        f.day_output = y;
        total += y;
    }
    total
}

/// Sum of goods budgets the living agents would spend right now.
pub fn goods_budgets(town: &Town, ec: &EconomyConfig) -> f64 {
    town.agents
        .iter()
        .filter(|a| a.alive)
        .map(|a| {
            let reserve =
                consumption_reserve(a.funds, town.weekly_income(a.id), ec.consumption_share);
            split_reserve(reserve, a.leisure_share, a.leisure_savings, a.funds).0
        })
        .sum()
}

/// Goods market of one consumption day.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MarketOutcome {
    pub supply: f64,
    pub budgets: f64,
    pub purchase: f64,
    /// `None` on a day without supply, when nothing changes hands.
    pub price: Option<f64>,
}

/// Reserve, split and spend; firms receive `price * output`.
pub fn clear_goods_market(town: &mut Town, ec: &EconomyConfig, purchase: f64) -> MarketOutcome {
    let supply: f64 = town.firms.iter().map(|f| f.day_output).sum();
    if supply <= 0.0 {
        return MarketOutcome {
            supply,
            budgets: 0.0,
            purchase: 0.0,
            price: None,
        };
    }
    let mut budgets = 0.0;
    for id in 0..town.agents.len() {
        if !town.agents[id].alive {
            continue;
        }
        let weekly: f64 = town.income[id].iter().sum();
        let a = &mut town.agents[id];
        let reserve = consumption_reserve(a.funds, weekly, ec.consumption_share);
        if reserve <= 0.0 {
            continue;
        }
        let (goods, leisure) = split_reserve(reserve, a.leisure_share, a.leisure_savings, a.funds);
        a.funds -= reserve;
        a.leisure_savings += leisure;
        budgets += goods;
    }
    let price = goods_price(budgets, purchase, supply).expect("positive supply");
    for f in town.firms.iter_mut().filter(|f| f.day_output > 0.0) {
        let revenue = price * f.day_output;
        f.funds += revenue;
        f.week_sales += revenue;
    }
    town.government.savings -= purchase;
    town.government.last_purchase = purchase;
    MarketOutcome {
        supply,
        budgets,
        purchase,
        price: Some(price),
    }
}

/// Rents from every firm to its owner, taxed at the owner rate. Returns
/// the total gross rent.
pub fn collect_rents(town: &mut Town, ec: &EconomyConfig, window: Option<usize>) -> f64 {
    let mut total = 0.0;
    let mut gov = 0.0;
    for i in 0..town.firms.len() {
        let f = &mut town.firms[i];
        if f.dissolved {
            continue;
        }
        let r = rent(f.funds, ec.expected_profit_rate);
        if r <= 0.0 {
            continue;
        }
        f.funds -= r;
        total += r;
        let owner = f.owner;
        if owner == NONE || !town.agents[owner as usize].alive {
            gov += r;
            continue;
        }
        let net = (1.0 - ec.owner_tax) * r;
        gov += r - net;
        town.agents[owner as usize].funds += net;
        if let Some(slot) = window {
            town.income[owner as usize][slot] += net;
        }
    }
    town.government.savings += gov;
    total
}

/// Outcome of the weekly firm update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WeeklyOutcome {
    pub hires: u32,
    pub fires: u32,
    pub dissolved: u32,
}

/// Sunday evening: leisure prices, profits, hiring and firing, then reset
/// the weekly accumulators.
pub fn weekly_update(town: &mut Town, cfg: &TownConfig, rng: &mut SimRng) -> WeeklyOutcome {
    let ec = &cfg.economy;
    let mut out = WeeklyOutcome::default();
    for i in 0..town.firms.len() {
        if town.firms[i].dissolved {
            continue;
        }
        if town.firms[i].kind == FirmKind::Commercial {
            let loc = &town.locations[town.firms[i].location as usize];
            let (std_cap, max_cap) = (loc.standard_capacity, loc.max_capacity as f64);
            let f = &mut town.firms[i];
            f.price = adjust_price(f.price, f.week_guests, std_cap, max_cap, ec);
        }
        let f = &town.firms[i];
        let rate = profit_rate(f.week_sales, f.week_costs);
        town.firms[i].last_profit_rate = rate;
        if let Some(rate) = rate {
            let f = &town.firms[i];
            match labor_decision(rate, f.employees.len(), f.funds, ec) {
                LaborDecision::Hire => {
                    if hire(town, i as FirmId, rng) {
                        out.hires += 1;
                    }
                }
                LaborDecision::Fire => {
                    fire(town, i as FirmId, rng);
                    out.fires += 1;
                }
                LaborDecision::Dissolve => {
                    fire(town, i as FirmId, rng);
                    out.fires += 1;
                    out.dissolved += 1;
                    let f = &mut town.firms[i];
                    f.dissolved = true;
                    let loc = f.location as usize;
                    town.locations[loc].closed = true;
                }
                LaborDecision::Hold => {}
            }
        }
        let f = &mut town.firms[i];
        f.week_sales = 0.0;
        f.week_costs = 0.0;
        f.week_guests = 0;
    }
    out
}

/// Hire a random unemployed worker of the firm's profession.
pub fn hire(town: &mut Town, firm: FirmId, rng: &mut SimRng) -> bool {
    let (kind, location) = {
        let f = &town.firms[firm as usize];
        (f.kind, f.location)
    };
    let pool = pool_index(town.firms[firm as usize].profession()).expect("private firm");
    if town.unemployed[pool].is_empty() {
        return false;
    }
    let id = town.unemployed[pool].get(rng.random_range(0..town.unemployed[pool].len()));
    town.unemployed[pool].remove(id);
    let a = &mut town.agents[id as usize];
    a.employed = true;
    a.employer = firm;
    a.workplace = location;
    town.firms[firm as usize].employees.push(id);
    if kind == FirmKind::Commercial {
        crate::synth::schedule_service_shifts(town, firm);
    }
    true
}

/// Fire a random employee.
pub fn fire(town: &mut Town, firm: FirmId, rng: &mut SimRng) {
    let n = town.firms[firm as usize].employees.len();
    if n == 0 {
        return;
    }
    let id = town.firms[firm as usize]
        .employees
        .remove(rng.random_range(0..n));
    let a = &mut town.agents[id as usize];
    a.employed = false;
    a.employer = NONE;
    a.workplace = NONE;
    a.shifts = 0;
    if let Some(pool) = pool_index(a.profession) {
        town.unemployed[pool].insert(id);
    }
    if town.firms[firm as usize].kind == FirmKind::Commercial {
        crate::synth::schedule_service_shifts(town, firm);
    }
}

/// Calibrated starting state of the economy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SetupReport {
    pub leisure_price: f64,
    pub goods_price: f64,
    pub g0: f64,
    pub output: f64,
    /// Total money before the setup cycle, including the government's
    /// initial stock.
    pub money_before: f64,
    pub money_after: f64,
    pub initial_unemployment: f64,
    pub leisure_savings: f64,
}

/// Expected weekly commercial visits of one agent: commercial share of
/// the plan-choice weight times the number of leisure phases per week.
pub fn expected_weekly_visits(
    cfg: &TownConfig,
    age_group: u8,
    profession: Profession,
    employed: bool,
) -> f64 {
    let le = &cfg.leisure;
    let Some(b) = cfg.leisure_bracket(age_group) else {
        return 0.0;
    };
    let attr = le.attractiveness_mean / le.table_attractiveness;
    let edges = 0.5 * (le.facility_edges_min + le.facility_edges_max) as f64;
    let friends = 0.5 * (le.friends_min + le.friends_max) as f64;
    let commercial = edges * b.commercial * attr * le.kappa / le.table_kappa;
    let noncommercial = edges * b.noncommercial * attr;
    let total = friends * b.friend + commercial + noncommercial + b.home;
    let phases = if profession == Profession::Child || (profession.is_worker() && employed) {
        9.0
    } else {
        14.0
    };
    phases * commercial / total
}

/// Prices, leisure shares, funds, incomes and government purchases, then
/// one work, pay, produce and clear cycle (the setup period).
pub fn init_economy(town: &mut Town, cfg: &TownConfig) -> Result<SetupReport, SetupError> {
    let ec = &cfg.economy;
    let pe = ec.expected_profit_rate;
    let commercial_workers: usize = town
        .firms
        .iter()
        .filter(|f| f.kind == FirmKind::Commercial)
        .map(|f| f.employees.len())
        .sum();
    let has_commercial = town.firms.iter().any(|f| f.kind == FirmKind::Commercial);
    if !has_commercial && !town.agents.is_empty() {
        return Err(SetupError::NoLeisureFacilities);
    }

    let w_sw = cfg.professions.service.gross_wage;
    let revenue = 5.0 * commercial_workers as f64 * w_sw * (1.0 + pe);
    let visits: f64 = town
        .agents
        .iter()
        .map(|a| expected_weekly_visits(cfg, a.age_group, a.profession, a.employed))
        .sum();
    let price = if visits > 0.0 && revenue > 0.0 {
        revenue / visits
    } else {
        w_sw
    };
    town.default_leisure_price = price;

    let private_gross: f64 = town
        .agents
        .iter()
        .filter(|a| a.employed && a.profession.is_private())
        .map(|a| cfg.professions.row(a.profession).gross_wage)
        .sum();
    let owners = town
        .agents
        .iter()
        .filter(|a| a.profession == Profession::Owner)
        .count();
    let owner_income = if owners > 0 {
        (1.0 - ec.owner_tax) * private_gross * pe / owners as f64
    } else {
        0.0
    };

    // Income windows: one week of regular payments, on the slots where the
    // dynamics would pay them.
    for id in 0..town.agents.len() {
        let a = &town.agents[id];
        let row = cfg.professions.row(a.profession);
        let w = &mut town.income[id];
        *w = [0.0; 21];
        let weekday_slots = [1usize, 4, 7, 10, 13];
        let rent_slots = [3usize, 6, 9, 12, 15];
        match a.profession {
            Profession::Owner => rent_slots.iter().for_each(|&s| w[s] = owner_income),
            Profession::Child | Profession::Pensioner => {
                weekday_slots.iter().for_each(|&s| w[s] = row.net_wage)
            }
            _ if !a.employed => weekday_slots
                .iter()
                .for_each(|&s| w[s] = ec.unemployment_benefit * row.net_wage),
            p if p.works_shifts() => {
                for slot in 0..21u32 {
                    if a.shifts & (1 << slot) != 0 {
                        w[((slot + 1) % 21) as usize] = row.net_wage;
                    }
                }
            }
            _ => weekday_slots.iter().for_each(|&s| w[s] = row.net_wage),
        }
    }

    let mut income_by_profession = [0.0f64; 8];
    let mut count_by_profession = [0usize; 8];
    for a in &town.agents {
        income_by_profession[a.profession.index()] +=
            town.income[a.id as usize].iter().sum::<f64>();
        count_by_profession[a.profession.index()] += 1;
    }
    for id in 0..town.agents.len() {
        let a = &town.agents[id];
        let p = a.profession.index();
        let mean_income = income_by_profession[p] / count_by_profession[p].max(1) as f64;
        let visits = expected_weekly_visits(cfg, a.age_group, a.profession, a.employed);
        let mut h = if mean_income > 0.0 {
            visits * price / mean_income
        } else {
            0.0
        };
        if a.profession == Profession::Owner {
            h *= 2.0;
        }
        let owner = a.profession == Profession::Owner;
        town.agents[id].leisure_share = h.clamp(0.0, 1.0);
        // Rents arrive after the goods market, so at consumption time an
        // owner's window holds four of them; a week of rent in hand keeps
        // the reserve equal to one day's rent.
        town.agents[id].funds = if owner { 5.0 * owner_income } else { 0.0 };
        // Savers carry one visit's price over from the previous week.
        town.agents[id].leisure_savings = if h > 0.0 { price } else { 0.0 };
    }

    for f in town.firms.iter_mut() {
        let wages: f64 = f.employees.len() as f64 * cfg.professions.row(f.profession()).gross_wage;
        f.funds = match f.kind {
            FirmKind::Commercial => (2.0 + pe) * wages,
            _ => wages,
        };
        f.price = price;
    }

    // Setup cycle: everybody works and is paid once.
    town.government.savings = 0.0;
    let money_initial = town.total_money();
    let mut gov = 0.0;
    for id in 0..town.agents.len() as AgentId {
        if let Some(pay) = pay_for(town, cfg, id, Activity::OnSite) {
            execute_pay(town, cfg, id, pay, None, &mut gov);
        }
    }
    let onsite = vec![Activity::OnSite; town.agents.len()];
    let output = produce(town, ec, &onsite);
    let factory_office_costs: f64 = town
        .firms
        .iter()
        .filter(|f| f.kind != FirmKind::Commercial)
        .map(|f| f.week_costs)
        .sum();
    let g0 = ((1.0 + pe) * factory_office_costs - goods_budgets(town, ec)).max(0.0);
    // The government starts with the stock that leaves exactly g0 after
    // the setup payments.
    town.government.savings = g0 - gov;
    let money_before = money_initial + town.government.savings;
    town.government.savings += gov;
    town.government.g0 = g0;
    let market = clear_goods_market(town, ec, g0);
    collect_rents(town, ec, None);
    for f in town.firms.iter_mut() {
        f.week_sales = 0.0;
        f.week_costs = 0.0;
        f.week_guests = 0;
        f.day_output = 0.0;
    }
    town.setup_output = output;
    Ok(SetupReport {
        leisure_price: price,
        goods_price: market.price.unwrap_or(0.0),
        g0,
        output,
        money_before,
        money_after: town.total_money(),
        initial_unemployment: town.private_unemployment_rate(),
        leisure_savings: town.total_leisure_savings(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ec() -> EconomyConfig {
        TownConfig::default().economy
    }

    #[test]
    fn rent_split() {
        let r = rent(7.0, 0.4);
        assert!((r - 2.0).abs() < 1e-12);
        assert!(((1.0 - 0.45) * r - 1.1).abs() < 1e-12);
        assert_eq!(rent(-1.0, 0.4), 0.0);
    }

    #[test]
    fn reserve_rules() {
        assert_eq!(consumption_reserve(10.0, 5.0, 0.2), 2.0);
        assert_eq!(consumption_reserve(1.0, 10.0, 0.2), 1.0);
        assert_eq!(consumption_reserve(0.0, 10.0, 0.2), 0.0);
        assert_eq!(split_reserve(2.0, 0.25, 5.0, 4.0), (2.0, 0.0));
        assert_eq!(split_reserve(2.0, 0.25, 1.0, 4.0), (1.5, 0.5));
    }

    #[test]
    fn leisure_spending() {
        assert!((leisure_spend(1.0, 3.0, 0.4) - 1.8).abs() < 1e-12);
        assert_eq!(leisure_spend(1.0, 1.0, 0.4), 1.0);
    }

    #[test]
    fn price_updates() {
        let ec = ec();
        assert!((adjust_price(1.0, 0, 8.0, 32.0, &ec) - 0.98).abs() < 1e-12);
        assert!((adjust_price(1.0, 14 * 32, 8.0, 32.0, &ec) - 1.05).abs() < 1e-12);
        assert_eq!(adjust_price(1.0, 14 * 12, 8.0, 32.0, &ec), 1.0);
        assert!((adjust_price(1.0, 14 * 20, 8.0, 32.0, &ec) - 1.02).abs() < 1e-12);
    }

    #[test]
    fn labor_rules() {
        let ec = ec();
        assert_eq!(labor_decision(0.55, 3, 1.0, &ec), LaborDecision::Hire);
        assert_eq!(labor_decision(0.35, 3, 1.0, &ec), LaborDecision::Hold);
        assert_eq!(labor_decision(0.2, 3, 1.0, &ec), LaborDecision::Fire);
        assert_eq!(labor_decision(-1.0, 1, 1.0, &ec), LaborDecision::Hold);
        assert_eq!(labor_decision(-1.0, 1, -1.0, &ec), LaborDecision::Dissolve);
        assert_eq!(profit_rate(0.0, 2.0), Some(-1.0));
        assert_eq!(profit_rate(1.0, 0.0), None);
    }

    #[test]
    fn goods_market_and_government() {
        assert_eq!(goods_price(140.0, 0.0, 100.0), Some(1.4));
        assert_eq!(goods_price(0.0, 0.0, 100.0), Some(0.0));
        assert_eq!(goods_price(10.0, 0.0, 0.0), None);
        assert_eq!(government_purchase(FiscalMode::ZeroDeficit, 3.0, -5.0), 0.0);
        assert_eq!(government_purchase(FiscalMode::Fixed, 3.0, -5.0), 3.0);
    }
}
