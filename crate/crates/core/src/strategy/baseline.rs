//! Reference strategies that use no optimization: a fixed heuristic and a
//! seeded random player.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::budget::{Expenditure, ExpenditurePlan};
use super::formulations::{fit_plan, spread_race_budgets};
use super::pit::optimize_pit_plan;
use crate::championship::Rules;
use crate::error::StrategyError;
use crate::sim::{minimal_fuel, RacePlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    /// Equal budget per race, split within a race in proportion to 1 / price.
    Hrlf,
    /// Random spends and random pit laps, drawn inside the rules.
    Unstructured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselinePlan {
    pub expenditures: ExpenditurePlan,
    pub race_plans: Vec<RacePlan>,
}

pub fn baseline_plan(kind: BaselineKind, seed: u64, rules: &Rules) -> Result<BaselinePlan, StrategyError> {
    match kind {
        BaselineKind::Hrlf => {
            let expenditures = hrlf_expenditures(rules);
            let config = rules.sim_config();
            let cars = expenditures.trajectory(&rules.base_car, &rules.schedule);
            let race_plans = rules
                .races
                .iter()
                .zip(&cars)
                .map(|(v, car)| optimize_pit_plan(&v.circuit, car, &rules.limits, &config))
                .collect::<Result<_, _>>()?;
            Ok(BaselinePlan {
                expenditures,
                race_plans,
            })
        }
        BaselineKind::Unstructured => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let expenditures = random_expenditures(&mut rng, rules);
            let race_plans = rules
                .races
                .iter()
                .map(|v| random_race_plan(&mut rng, v.circuit.laps, v.circuit.fuel_per_lap, rules))
                .collect::<Result<_, _>>()?;
            Ok(BaselinePlan {
                expenditures,
                race_plans,
            })
        }
    }
}

pub fn hrlf_expenditures(rules: &Rules) -> ExpenditurePlan {
    let m = rules.num_races();
    let budgets = vec![rules.limits.total_budget / m as f64; m];
    let schedule = &rules.schedule;
    spread_race_budgets(
        &budgets,
        |race| {
            let [a, h, w] = schedule.at(race);
            [1.0 / a, 1.0 / h, 1.0 / w]
        },
        &rules.limits,
        schedule,
        &rules.base_car,
    )
}

/// Draw a total improvement for each parameter uniformly inside its limit,
/// scatter it over the races, and reject draws that overspend.
fn random_expenditures(rng: &mut ChaCha8Rng, rules: &Rules) -> ExpenditurePlan {
    let m = rules.num_races();
    let base = &rules.base_car;
    let room = rules.limits.headroom(base);
    // Percent of the base value still available for each parameter.
    let max_pct = [
        room[0] / (0.01 * base.aero),
        room[1] / (0.01 * base.horsepower),
        room[2] / (0.01 * base.dry_weight),
    ];
    for _ in 0..10_000 {
        let mut plan = ExpenditurePlan::zeros(m);
        for (j, max) in max_pct.iter().enumerate() {
            let pct = rng.random::<f64>() * max;
            let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            let wsum: f64 = w.iter().sum();
            for (i, wi) in w.iter().enumerate() {
                let mut x = plan.races[i].as_array();
                x[j] = pct * wi / wsum * rules.schedule.at(i + 1)[j];
                plan.races[i] = Expenditure::from_array(x);
            }
        }
        if plan.total() <= rules.limits.total_budget {
            return fit_plan(&plan, &rules.limits, &rules.schedule, base);
        }
    }
    ExpenditurePlan::zeros(m)
}

/// Random stop count and pit laps among the plans the tank allows.
fn random_race_plan(rng: &mut ChaCha8Rng, laps: u32, fpl: f64, rules: &Rules) -> Result<RacePlan, StrategyError> {
    let tank = rules.limits.tank_capacity;
    let fits = |l: u32| l > 0 && minimal_fuel(l, fpl) <= tank;
    let max_stops = rules.limits.max_stops.min(2);
    let stops: Vec<usize> = (0..=max_stops)
        .filter(|s| minimal_fuel(laps.div_ceil(*s as u32 + 1), fpl) <= tank)
        .collect();
    if stops.is_empty() {
        return Err(StrategyError::Uncompletable);
    }
    let s = stops[rng.random_range(0..stops.len())];
    for _ in 0..10_000 {
        let mut pits: Vec<u32> = (0..s).map(|_| rng.random_range(1..laps)).collect();
        pits.sort_unstable();
        pits.dedup();
        if pits.len() != s {
            continue;
        }
        let plan = RacePlan::from_pit_laps(laps, &pits, fpl);
        if plan.stints.iter().all(|st| fits(st.laps)) {
            return Ok(plan);
        }
    }
    Ok(RacePlan::even(laps, s, fpl))
}
