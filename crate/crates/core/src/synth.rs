//! Town synthesis: population, households, workplaces, schools, hospitals,
//! leisure facilities, social networks and shift rosters.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::{TownConfig, AGE_GROUPS};
use crate::error::SetupError;
use crate::rng::SimRng;
use crate::social::LeisureLadder;
use crate::town::{
    pool_index, Agent, Firm, FirmKind, Hospital, Household, HouseholdKind, IdPool, Location,
    RetirementHome, School, SchoolClass, Town,
};
use crate::types::{AgentId, FirmId, LocationKind, Profession, NONE};

/// Integer quotas proportional to `shares` that sum to `total`
/// (largest-remainder rounding; ties go to the earlier entry).
pub fn largest_remainder(shares: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = shares.iter().sum();
    if total == 0 || sum <= 0.0 {
        return vec![0; shares.len()];
    }
    let exact: Vec<f64> = shares.iter().map(|s| s / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn normal(rng: &mut SimRng, mean: f64, sd: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    mean + sd * z
}

/// Week-slot mask of health worker number `k` within a hospital roster:
/// a fixed phase `k mod 3` on five consecutive days starting at day
/// `(k / 3) mod 7`.
pub fn health_shift_mask(k: usize) -> u32 {
    let phase = (k % 3) as u32;
    let start = ((k / 3) % 7) as u32;
    (0..5).fold(0, |m, d| m | 1 << (((start + d) % 7) * 3 + phase))
}

/// The fourteen leisure-phase slots of a week with their staffing weight:
/// peak shifts (weekday afternoons and weekends) count double.
pub fn service_slot_weights() -> [(u32, f64); 14] {
    let mut out = [(0, 0.0); 14];
    for day in 0..7u32 {
        for phase in 0..2u32 {
            let peak = day >= 5 || phase == 1;
            out[(day * 2 + phase) as usize] = (day * 3 + phase, if peak { 2.0 } else { 1.0 });
        }
    }
    out
}

/// Five shifts on distinct days per service worker of one firm, filling
/// each slot towards `5 n w / sum(w)` workers.
pub fn schedule_service_shifts(town: &mut Town, firm: FirmId) {
    let slots = service_slot_weights();
    let total_w: f64 = slots.iter().map(|s| s.1).sum();
    let staff = town.firms[firm as usize].employees.clone();
    let n = staff.len() as f64;
    let mut assigned = [0f64; 14];
    for &id in &staff {
        let mut mask = 0u32;
        let mut days_used = 0u8;
        for _ in 0..5 {
            let mut best: Option<(usize, f64)> = None;
            for (i, &(_, w)) in slots.iter().enumerate() {
                if days_used & (1 << (i / 2)) != 0 {
                    continue;
                }
                let deficit = 5.0 * n * w / total_w - assigned[i];
                if best.is_none_or(|(_, d)| deficit > d + 1e-12) {
                    best = Some((i, deficit));
                }
            }
            let Some((i, _)) = best else { break };
            assigned[i] += 1.0;
            days_used |= 1 << (i / 2);
            mask |= 1 << slots[i].0;
        }
        town.agents[id as usize].shifts = mask;
    }
}

/// Reassign health shifts for one hospital's roster.
pub fn schedule_health_shifts(town: &mut Town, hospital: usize) {
    let staff = town.hospitals[hospital].staff.clone();
    for (k, id) in staff.into_iter().enumerate() {
        town.agents[id as usize].shifts = health_shift_mask(k);
    }
}

/// Household counts per kind after adapting to the available members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HouseholdPlan {
    pub counts: [usize; 8],
}

const S: usize = 0;
const SWK: usize = 1;
const C: usize = 2;
const CWK: usize = 3;
const IG: usize = 4;
const IWK: usize = 5;
const SP: usize = 6;
const PC: usize = 7;

fn largest_of(counts: &[usize; 8], kinds: &[usize]) -> Option<usize> {
    kinds
        .iter()
        .copied()
        .filter(|&k| counts[k] > 0)
        .max_by_key(|&k| (counts[k], std::cmp::Reverse(k)))
}

/// Adapt household kind counts so that every household can receive its
/// minimum members from the pools.
pub fn plan_households(
    mut counts: [usize; 8],
    kids: usize,
    adults: usize,
    intergen_pensioners: usize,
    alone_pensioners: usize,
) -> Result<HouseholdPlan, SetupError> {
    let kid_slots = |c: &[usize; 8]| c[SWK] + c[CWK] + c[IWK];
    while kid_slots(&counts) > kids {
        let k = largest_of(&counts, &[SWK, CWK, IWK]).expect("kid slots exist");
        counts[k] -= 1;
        counts[k - 1] += 1;
    }
    while counts[IG] + counts[IWK] > intergen_pensioners {
        let k = largest_of(&counts, &[IG, IWK]).expect("intergenerational households exist");
        counts[k] -= 1;
        counts[if k == IG { C } else { CWK }] += 1;
    }
    while counts[SP] + 2 * counts[PC] > alone_pensioners {
        if counts[PC] > 0 {
            counts[PC] -= 1;
            counts[SP] += 1;
        } else {
            counts[SP] -= 1;
        }
    }
    let adult_need = |c: &[usize; 8]| c[S] + c[SWK] + 2 * c[C] + 2 * c[CWK] + c[IG] + c[IWK];
    while adult_need(&counts) > adults {
        if counts[C] > 0 {
            counts[C] -= 1;
            counts[S] += 1;
        } else if counts[CWK] > 0 {
            counts[CWK] -= 1;
            counts[SWK] += 1;
        } else if counts[S] > 0 {
            counts[S] -= 1;
        } else if counts[IG] > 0 {
            counts[IG] -= 1;
        } else if counts[SWK] > 0 {
            counts[SWK] -= 1;
        } else {
            counts[IWK] -= 1;
        }
    }
    if kids > 0 && kid_slots(&counts) == 0 {
        match largest_of(&counts, &[S, C, IG]) {
            Some(k) => {
                counts[k] -= 1;
                counts[k + 1] += 1;
            }
            None => {
                return Err(SetupError::InfeasibleHouseholds {
                    attempts: 1,
                    reason: format!("{kids} children but no adult to live with"),
                })
            }
        }
    }
    Ok(HouseholdPlan { counts })
}

/// Build a complete town for `cfg`, drawing from `rng`.
pub fn synthesize(cfg: &TownConfig, rng: &mut SimRng) -> Result<Town, SetupError> {
    let n = cfg.population.size;
    let mut town = Town {
        unemployed: [
            IdPool::with_universe(n),
            IdPool::with_universe(n),
            IdPool::with_universe(n),
        ],
        ..Town::default()
    };
    populate(cfg, &mut town, rng);
    build_households(cfg, &mut town, rng)?;
    build_workplaces(cfg, &mut town, rng);
    build_networks(cfg, &mut town, rng);
    town.income = vec![[0.0; 21]; n];
    Ok(town)
}

fn populate(cfg: &TownConfig, town: &mut Town, rng: &mut SimRng) {
    let n = cfg.population.size;
    let shares: Vec<f64> = Profession::ALL
        .iter()
        .map(|&p| cfg.professions.row(p).share)
        .collect();
    let quotas = largest_remainder(&shares, n);
    let mut professions: Vec<Profession> = Vec::with_capacity(n);
    for (p, &q) in Profession::ALL.iter().zip(&quotas) {
        professions.extend(std::iter::repeat_n(*p, q));
    }
    professions.shuffle(rng);

    let age_shares: Vec<f64> = cfg.age_groups.iter().map(|r| r.share).collect();
    let samplers: Vec<WeightedIndex<f64>> = Profession::ALL
        .iter()
        .map(|p| {
            let (lo, hi) = p.age_span();
            WeightedIndex::new(&age_shares[lo as usize..=hi as usize])
                .expect("age shares are positive")
        })
        .collect();
    debug_assert_eq!(age_shares.len(), AGE_GROUPS);
    town.agents = professions
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let age = p.age_span().0 + samplers[p.index()].sample(rng) as u8;
            Agent::new(i as AgentId, age, p)
        })
        .collect();

    for p in Profession::ALL.into_iter().filter(|p| p.is_worker()) {
        let mut members: Vec<AgentId> = town
            .agents
            .iter()
            .filter(|a| a.profession == p)
            .map(|a| a.id)
            .collect();
        members.shuffle(rng);
        let unemployed =
            (cfg.professions.row(p).unemployment * members.len() as f64).round() as usize;
        for (k, &id) in members.iter().enumerate() {
            let employed = k >= unemployed;
            town.agents[id as usize].employed = employed;
            if !employed {
                if let Some(pool) = pool_index(p) {
                    town.unemployed[pool].insert(id);
                }
            }
        }
    }
}

fn add_location(town: &mut Town, kind: LocationKind, index: u32) -> u32 {
    town.locations.push(Location {
        kind,
        index,
        standard_capacity: 0.0,
        max_capacity: 0,
        attractiveness: 0.0,
        closed: false,
    });
    (town.locations.len() - 1) as u32
}

fn build_households(cfg: &TownConfig, town: &mut Town, rng: &mut SimRng) -> Result<(), SetupError> {
    let n = cfg.population.size;
    let hh = &cfg.households;
    let mut kids: Vec<AgentId> = Vec::new();
    let mut adults: Vec<AgentId> = Vec::new();
    let mut pensioners: Vec<AgentId> = Vec::new();
    for a in &town.agents {
        match a.profession {
            Profession::Child => kids.push(a.id),
            Profession::Pensioner => pensioners.push(a.id),
            _ => adults.push(a.id),
        }
    }
    kids.shuffle(rng);
    adults.shuffle(rng);
    pensioners.shuffle(rng);
    let residence = largest_remainder(
        &[
            hh.pensioners_intergenerational,
            hh.pensioners_retirement_home,
            hh.pensioners_alone,
        ],
        pensioners.len(),
    );
    let mut intergen: Vec<AgentId> = pensioners[..residence[0]].to_vec();
    let home_residents: Vec<AgentId> =
        pensioners[residence[0]..residence[0] + residence[1]].to_vec();
    let mut alone: Vec<AgentId> = pensioners[residence[0] + residence[1]..].to_vec();

    let total = (hh.per_capita * n as f64).round() as usize;
    let quotas = largest_remainder(&hh.type_shares(), total);
    let mut counts = [0usize; 8];
    counts.copy_from_slice(&quotas);
    if counts[IG] + counts[IWK] == 0 && !intergen.is_empty() {
        alone.append(&mut intergen);
    }
    let plan = plan_households(
        counts,
        kids.len(),
        adults.len(),
        intergen.len(),
        alone.len(),
    )?;
    if plan.counts[IG] + plan.counts[IWK] == 0 {
        alone.append(&mut intergen);
    }

    let mut kid_iter = kids.into_iter();
    let mut adult_iter = adults.into_iter();
    let mut ig_iter = intergen.into_iter();
    let mut alone_iter = alone.into_iter();
    for (k, kind) in HouseholdKind::ALL.into_iter().enumerate() {
        for _ in 0..plan.counts[k] {
            let (n_adults, n_kids, n_ig, n_alone) = match kind {
                HouseholdKind::Single => (1, 0, 0, 0),
                HouseholdKind::SingleWithChildren => (1, 1, 0, 0),
                HouseholdKind::Couple => (2, 0, 0, 0),
                HouseholdKind::CoupleWithChildren => (2, 1, 0, 0),
                HouseholdKind::Intergenerational => (1, 0, 1, 0),
                HouseholdKind::IntergenerationalWithChildren => (1, 1, 1, 0),
                HouseholdKind::SinglePensioner => (0, 0, 0, 1),
                HouseholdKind::PensionerCouple => (0, 0, 0, 2),
            };
            let mut members = Vec::with_capacity(4);
            members.extend(adult_iter.by_ref().take(n_adults));
            members.extend(ig_iter.by_ref().take(n_ig));
            members.extend(alone_iter.by_ref().take(n_alone));
            members.extend(kid_iter.by_ref().take(n_kids));
            town.households.push(Household {
                location: NONE,
                kind,
                members,
                caregiver: NONE,
            });
        }
    }
    let with_kids: Vec<usize> = (0..town.households.len())
        .filter(|&h| {
            matches!(
                town.households[h].kind,
                HouseholdKind::SingleWithChildren
                    | HouseholdKind::CoupleWithChildren
                    | HouseholdKind::IntergenerationalWithChildren
            )
        })
        .collect();
    let adult_homes: Vec<usize> = (0..town.households.len())
        .filter(|&h| (town.households[h].kind as usize) < SP)
        .collect();
    let ig_homes: Vec<usize> = (0..town.households.len())
        .filter(|&h| {
            matches!(
                town.households[h].kind,
                HouseholdKind::Intergenerational | HouseholdKind::IntergenerationalWithChildren
            )
        })
        .collect();
    for id in kid_iter {
        let h = with_kids[rng.random_range(0..with_kids.len())];
        town.households[h].members.push(id);
    }
    for id in adult_iter {
        if adult_homes.is_empty() {
            town.households.push(Household {
                location: NONE,
                kind: HouseholdKind::Single,
                members: vec![id],
                caregiver: NONE,
            });
        } else {
            let h = adult_homes[rng.random_range(0..adult_homes.len())];
            town.households[h].members.push(id);
        }
    }
    for id in ig_iter {
        let h = ig_homes[rng.random_range(0..ig_homes.len())];
        town.households[h].members.push(id);
    }
    for id in alone_iter {
        town.households.push(Household {
            location: NONE,
            kind: HouseholdKind::SinglePensioner,
            members: vec![id],
            caregiver: NONE,
        });
    }
    for h in 0..town.households.len() {
        let loc = add_location(town, LocationKind::Household, h as u32);
        town.households[h].location = loc;
        for i in 0..town.households[h].members.len() {
            let m = town.households[h].members[i] as usize;
            town.agents[m].home = loc;
            town.agents[m].household = h as u32;
        }
    }

    let homes = if n == 0 {
        0
    } else {
        ((cfg.locations.retirement_homes_per_capita * n as f64).round() as usize).max(1)
    };
    for r in 0..homes {
        let loc = add_location(town, LocationKind::RetirementHome, r as u32);
        town.retirement_homes.push(RetirementHome {
            location: loc,
            residents: Vec::new(),
        });
    }
    for (i, id) in home_residents.into_iter().enumerate() {
        let r = i % homes;
        town.retirement_homes[r].residents.push(id);
        town.agents[id as usize].home = town.retirement_homes[r].location;
    }
    Ok(())
}

fn build_workplaces(cfg: &TownConfig, town: &mut Town, rng: &mut SimRng) {
    let lc = &cfg.locations;
    let n = cfg.population.size;
    let employed_of = |town: &Town, p: Profession, rng: &mut SimRng| {
        let mut v: Vec<AgentId> = town
            .agents
            .iter()
            .filter(|a| a.profession == p && a.employed)
            .map(|a| a.id)
            .collect();
        v.shuffle(rng);
        v
    };

    let mut owners: Vec<AgentId> = town
        .agents
        .iter()
        .filter(|a| a.profession == Profession::Owner)
        .map(|a| a.id)
        .collect();
    owners.shuffle(rng);
    for (p, kind, loc_kind, per) in [
        (
            Profession::BlueCollar,
            FirmKind::Factory,
            LocationKind::Factory,
            lc.blue_collar_per_factory,
        ),
        (
            Profession::WhiteCollar,
            FirmKind::Office,
            LocationKind::Office,
            lc.white_collar_per_office,
        ),
        (
            Profession::Service,
            FirmKind::Commercial,
            LocationKind::Commercial,
            lc.service_per_facility,
        ),
    ] {
        let workers = employed_of(town, p, rng);
        for chunk in workers.chunks(per as usize) {
            let id = town.firms.len() as FirmId;
            let loc = add_location(town, loc_kind, id);
            let owner = if owners.is_empty() {
                NONE
            } else {
                owners[id as usize % owners.len()]
            };
            for &w in chunk {
                let a = &mut town.agents[w as usize];
                a.employer = id;
                a.workplace = loc;
            }
            town.firms.push(Firm {
                id,
                kind,
                location: loc,
                owner,
                funds: 0.0,
                employees: chunk.to_vec(),
                dissolved: false,
                price: 0.0,
                week_sales: 0.0,
                week_costs: 0.0,
                week_guests: 0,
                day_output: 0.0,
                last_profit_rate: None,
            });
            if kind == FirmKind::Commercial {
                let l = &mut town.locations[loc as usize];
                l.standard_capacity = cfg.epidemic.commercial_standard_capacity;
                l.max_capacity =
                    (cfg.epidemic.max_capacity_factor * l.standard_capacity).floor() as u32;
                schedule_service_shifts(town, id);
            }
        }
    }

    let commercial = town
        .firms
        .iter()
        .filter(|f| f.kind == FirmKind::Commercial)
        .count();
    let noncommercial = (lc.noncommercial_per_commercial * commercial as f64).round() as usize;
    for z in 0..noncommercial {
        let loc = add_location(town, LocationKind::NonCommercial, z as u32);
        let l = &mut town.locations[loc as usize];
        l.standard_capacity = cfg.epidemic.noncommercial_standard_capacity;
        l.max_capacity = (cfg.epidemic.max_capacity_factor * l.standard_capacity).floor() as u32;
    }
    let le = &cfg.leisure;
    for l in town
        .locations
        .iter_mut()
        .filter(|l| l.kind.is_leisure_facility())
    {
        let a = normal(
            rng,
            le.attractiveness_mean,
            le.attractiveness_sd * le.attractiveness_mean,
        );
        l.attractiveness = a.max(0.01 * le.attractiveness_mean);
    }

    let teachers = employed_of(town, Profession::Teacher, rng);
    let mut kids: Vec<AgentId> = town
        .agents
        .iter()
        .filter(|a| a.profession == Profession::Child)
        .map(|a| a.id)
        .collect();
    kids.shuffle(rng);
    let mut schools = teachers.len().div_ceil(lc.teachers_per_school as usize);
    if schools == 0 && !kids.is_empty() {
        schools = 1;
    }
    for s in 0..schools {
        let loc = add_location(town, LocationKind::School, s as u32);
        town.schools.push(School {
            location: loc,
            classes: Vec::new(),
            teachers: Vec::new(),
        });
    }
    for (k, &t) in teachers.iter().enumerate() {
        let s = (k / lc.teachers_per_school as usize).min(schools - 1);
        town.schools[s].teachers.push(t);
        town.agents[t as usize].workplace = town.schools[s].location;
    }
    if schools > 0 {
        let per = kids.len().div_ceil(schools).max(1);
        for (s, chunk) in kids.chunks(per).enumerate() {
            let n_classes = ((chunk.len() as f64 / lc.class_size as f64).round() as usize).max(1);
            let first = town.classes.len();
            for _ in 0..n_classes {
                town.schools[s].classes.push(town.classes.len() as u32);
                town.classes.push(SchoolClass {
                    school: s as u32,
                    members: Vec::new(),
                });
            }
            for (i, &kid) in chunk.iter().enumerate() {
                let c = first + i % n_classes;
                town.classes[c].members.push(kid);
                town.agents[kid as usize].class = c as u32;
            }
        }
    }

    let hospitals = if n == 0 {
        0
    } else {
        ((lc.hospitals_per_capita * n as f64).round() as usize).max(1)
    };
    let beds = largest_remainder(
        &vec![1.0; hospitals],
        (lc.beds_per_capita * n as f64).round() as usize,
    );
    let icus = largest_remainder(
        &vec![1.0; hospitals],
        (lc.icus_per_capita * n as f64).round() as usize,
    );
    for h in 0..hospitals {
        let loc = add_location(town, LocationKind::Hospital, h as u32);
        town.hospitals.push(Hospital {
            location: loc,
            beds: beds[h] as u32,
            icus: icus[h] as u32,
            beds_used: 0,
            icus_used: 0,
            staff: Vec::new(),
        });
    }
    if hospitals > 0 {
        let staff = employed_of(town, Profession::Health, rng);
        for (k, id) in staff.into_iter().enumerate() {
            let h = k % hospitals;
            town.hospitals[h].staff.push(id);
            town.agents[id as usize].workplace = town.hospitals[h].location;
        }
        for h in 0..hospitals {
            schedule_health_shifts(town, h);
        }
    }
}

/// Random symmetric friendships realizing the drawn degrees as closely as
/// stub matching allows. Leftover stubs are dropped.
pub fn friendship_edges(degrees: &[(AgentId, u32)], rng: &mut SimRng) -> Vec<(AgentId, AgentId)> {
    let mut stubs: Vec<AgentId> = degrees
        .iter()
        .flat_map(|&(id, d)| std::iter::repeat_n(id, d as usize))
        .collect();
    let mut seen: HashSet<(AgentId, AgentId)> = HashSet::with_capacity(stubs.len());
    let mut edges = Vec::with_capacity(stubs.len() / 2);
    for _round in 0..8 {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(rng);
        let mut left = Vec::new();
        let mut i = 0;
        while i + 1 < stubs.len() {
            let (a, b) = (stubs[i], stubs[i + 1]);
            let key = (a.min(b), a.max(b));
            if a != b && seen.insert(key) {
                edges.push(key);
            } else {
                left.push(a);
                left.push(b);
            }
            i += 2;
        }
        if i < stubs.len() {
            left.push(stubs[i]);
        }
        if left.len() == stubs.len() {
            break;
        }
        stubs = left;
    }
    if !stubs.is_empty() {
        log::debug!(
            "friendship stub matching left {} stubs unmatched",
            stubs.len()
        );
    }
    edges
}

fn build_networks(cfg: &TownConfig, town: &mut Town, rng: &mut SimRng) {
    let le = &cfg.leisure;
    let n = town.agents.len();
    town.friends = vec![Vec::new(); n];
    town.facility_edges = vec![Vec::new(); n];
    let degrees: Vec<(AgentId, u32)> = town
        .agents
        .iter()
        .filter(|a| a.plans_leisure())
        .map(|a| (a.id, rng.random_range(le.friends_min..=le.friends_max)))
        .collect();
    for (a, b) in friendship_edges(&degrees, rng) {
        let mean_a = cfg
            .leisure_bracket(town.agents[a as usize].age_group)
            .map_or(0.0, |br| br.friend);
        let mean_b = cfg
            .leisure_bracket(town.agents[b as usize].age_group)
            .map_or(0.0, |br| br.friend);
        let mean = 0.5 * (mean_a + mean_b);
        let w = normal(rng, mean, le.preference_sd * mean).max(0.0);
        town.friends[a as usize].push((b, w));
        town.friends[b as usize].push((a, w));
    }
    for list in town.friends.iter_mut() {
        list.sort_unstable_by_key(|e| e.0);
    }

    let nc: Vec<u32> = (0..town.locations.len() as u32)
        .filter(|&l| town.locations[l as usize].kind == LocationKind::NonCommercial)
        .collect();
    let c: Vec<u32> = (0..town.locations.len() as u32)
        .filter(|&l| town.locations[l as usize].kind == LocationKind::Commercial)
        .collect();
    for id in 0..n {
        let a = &town.agents[id];
        let Some(bracket) = cfg.leisure_bracket(a.age_group).cloned() else {
            continue;
        };
        town.agents[id].home_preference = bracket.home;
        let nc_mean = bracket.noncommercial / le.table_attractiveness;
        let c_mean = bracket.commercial / (le.table_attractiveness * le.table_kappa);
        for (pool, mean) in [(&nc, nc_mean), (&c, c_mean)] {
            let k = (rng.random_range(le.facility_edges_min..=le.facility_edges_max) as usize)
                .min(pool.len());
            for i in rand::seq::index::sample(rng, pool.len(), k).into_iter() {
                let w = normal(rng, mean, le.preference_sd * mean).max(0.0);
                town.facility_edges[id].push((pool[i], w));
            }
        }
    }
    town.ladders = (0..n)
        .map(|id| {
            LeisureLadder::build(
                &town.friends[id],
                &town.facility_edges[id],
                &town.locations,
                le.kappa,
            )
        })
        .collect();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStreams;

    #[test]
    fn largest_remainder_sums() {
        assert_eq!(largest_remainder(&[0.5, 0.25, 0.25], 7), vec![3, 2, 2]);
        assert_eq!(largest_remainder(&[1.0, 1.0], 3), vec![2, 1]);
        assert_eq!(largest_remainder(&[0.3, 0.7], 0), vec![0, 0]);
    }

    #[test]
    fn health_masks_cover_five_days() {
        for k in 0..21 {
            let m = health_shift_mask(k);
            assert_eq!(m.count_ones(), 5);
            for s in 0..21 {
                if m & (1 << s) != 0 {
                    assert_eq!(s % 3, (k % 3) as u32);
                }
            }
        }
        let full: u32 = (0..21).map(health_shift_mask).fold(0, |a, m| a | m);
        assert_eq!(full, (1 << 21) - 1);
    }

    #[test]
    fn service_weights_total() {
        let w = service_slot_weights();
        assert_eq!(w.iter().map(|s| s.1).sum::<f64>(), 23.0);
        assert!(w.iter().all(|&(slot, _)| slot % 3 != 2));
    }

    #[test]
    fn household_plan_converts_when_pools_are_short() {
        let plan = plan_households([1, 2, 1, 2, 1, 1, 1, 2], 2, 100, 0, 3).unwrap();
        let c = plan.counts;
        assert_eq!(c[SWK] + c[CWK] + c[IWK], 2);
        assert_eq!(c[IG] + c[IWK], 0);
        assert!(c[SP] + 2 * c[PC] <= 3);
        assert!(plan_households([0, 0, 0, 0, 0, 0, 1, 0], 3, 0, 0, 1).is_err());
    }

    #[test]
    fn tiny_town_synthesizes() {
        let cfg = TownConfig::default().with_population(300);
        let mut rng = RngStreams::new(11).setup;
        let town = synthesize(&cfg, &mut rng).unwrap();
        assert_eq!(town.agents.len(), 300);
        for a in &town.agents {
            assert_ne!(a.home, NONE);
        }
    }
}
