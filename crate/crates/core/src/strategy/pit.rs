//! Refuelling strategy, chosen independently of the budget.

use super::budget::CarLimits;
use crate::error::StrategyError;
use crate::geometry::Circuit;
use crate::sim::{minimal_fuel, CarState, LapModel, RacePlan, SimConfig, FUEL_EPS};

/// Try every stop count up to `limits.max_stops` and every split of the laps
/// into stints, each stint loaded with exactly the fuel it burns, and return
/// the fastest plan. Ties go to fewer stops, then to earlier pit laps.
pub fn optimize_pit_plan(
    circuit: &Circuit,
    car: &CarState,
    limits: &CarLimits,
    config: &SimConfig,
) -> Result<RacePlan, StrategyError> {
    let laps = circuit.laps;
    let fpl = circuit.fuel_per_lap;
    let tank = limits.tank_capacity.min(config.tank_capacity);
    let max_stops = limits.max_stops.min(2);
    if minimal_fuel(laps, fpl) > (max_stops + 1) as f64 * tank + FUEL_EPS {
        return Err(StrategyError::Uncompletable);
    }
    let model = LapModel::new(circuit, car, config)?;

    // cost[l] is the time of an l-lap stint fuelled for exactly l laps, or
    // None when that load does not fit in the tank.
    let mut cost: Vec<Option<f64>> = vec![None; laps as usize + 1];
    for l in 1..=laps {
        let load = minimal_fuel(l, fpl);
        if load > tank {
            break;
        }
        cost[l as usize] = Some((0..l).map(|j| model.lap_time(load - j as f64 * fpl)).sum());
    }
    let c = |l: u32| cost[l as usize];
    let pen = circuit.pit_penalty;

    let mut best: Option<(f64, Vec<u32>)> = None;
    let mut consider = |t: f64, pits: Vec<u32>| {
        if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
            best = Some((t, pits));
        }
    };
    if let Some(t) = c(laps) {
        consider(t, vec![]);
    }
    if max_stops >= 1 {
        for a in 1..laps {
            if let (Some(x), Some(y)) = (c(a), c(laps - a)) {
                consider(x + y + pen, vec![a]);
            }
        }
    }
    if max_stops >= 2 {
        for a in 1..laps {
            let Some(x) = c(a) else { continue };
            for b in a + 1..laps {
                if let (Some(y), Some(z)) = (c(b - a), c(laps - b)) {
                    consider(x + y + z + 2.0 * pen, vec![a, b]);
                }
            }
        }
    }
    let (_, pits) = best.ok_or(StrategyError::Uncompletable)?;
    Ok(RacePlan::from_pit_laps(laps, &pits, fpl))
}
