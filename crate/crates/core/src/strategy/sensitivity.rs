//! Finite-difference sensitivities of race time to spending.

use serde::{Deserialize, Serialize};

use super::budget::{apply_expenditure, CarLimits, CostSchedule, Expenditure};
use crate::error::StrategyError;
use crate::geometry::Circuit;
use crate::sim::{run_race, CarState, RacePlan, SimConfig};

/// Seconds of race time saved per dollar, per parameter, at one race.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sensitivity {
    #[serde(rename = "aero_s_per_usd")]
    pub aero: f64,
    #[serde(rename = "horsepower_s_per_usd")]
    pub horsepower: f64,
    #[serde(rename = "weight_s_per_usd")]
    pub weight: f64,
}

impl Sensitivity {
    pub fn new(aero: f64, horsepower: f64, weight: f64) -> Self {
        Sensitivity {
            aero,
            horsepower,
            weight,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.aero, self.horsepower, self.weight]
    }

    /// Time saved by spending `x` at these rates.
    pub fn gain(&self, x: &Expenditure) -> f64 {
        self.aero * x.aero + self.horsepower * x.horsepower + self.weight * x.weight
    }
}

/// Default finite-difference step, in dollars.
pub const DEFAULT_PROBE: f64 = 10_000.0;

/// Everything needed to time one race for one car.
#[derive(Debug, Clone, Copy)]
pub struct RaceContext<'a> {
    pub circuit: &'a Circuit,
    /// 1-based race number, selecting the prices.
    pub race: usize,
    pub schedule: &'a CostSchedule,
    pub base: &'a CarState,
    pub limits: &'a CarLimits,
    pub config: &'a SimConfig,
}

/// Forward differences: spend `probe` dollars on one parameter at a time and
/// measure the race-time reduction per dollar with `plan` held fixed.
pub fn estimate_sensitivities(
    ctx: &RaceContext<'_>,
    car: &CarState,
    plan: &RacePlan,
    probe: f64,
) -> Result<Sensitivity, StrategyError> {
    if !(probe.is_finite() && probe > 0.0) {
        return Err(StrategyError::InvalidInput("probe must be positive".into()));
    }
    let time =
        |c: &CarState| -> Result<f64, StrategyError> { Ok(run_race(ctx.circuit, c, plan, ctx.config)?.total_time) };
    let t0 = time(car)?;
    let names = ["aero", "horsepower", "weight"];
    let mut s = [0.0; 3];
    for j in 0..3 {
        let mut x = [0.0; 3];
        x[j] = probe;
        let probed = apply_expenditure(car, &Expenditure::from_array(x), ctx.race, ctx.schedule, ctx.base);
        let crossed = match j {
            0 => probed.aero > ctx.limits.aero_max,
            1 => probed.horsepower > ctx.limits.horsepower_max,
            _ => probed.dry_weight < ctx.limits.weight_min,
        };
        if crossed {
            return Err(StrategyError::LimitCrossed {
                parameter: names[j],
                race: ctx.race,
            });
        }
        s[j] = (t0 - time(&probed)?) / probe;
    }
    Ok(Sensitivity::new(s[0], s[1], s[2]))
}

/// Equal thirds of every dollar go to each parameter.
pub const EQUAL_THIRDS: [f64; 3] = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];

/// Seconds saved per dollar when each dollar is split across the parameters
/// in the fixed `fractions`. The split is linear in the measured
/// sensitivities.
pub fn estimate_impact(
    ctx: &RaceContext<'_>,
    car: &CarState,
    plan: &RacePlan,
    probe: f64,
    fractions: [f64; 3],
) -> Result<f64, StrategyError> {
    let s = estimate_sensitivities(ctx, car, plan, probe)?;
    Ok(impact_from(&s, fractions))
}

pub fn impact_from(s: &Sensitivity, fractions: [f64; 3]) -> f64 {
    let v = s.as_array();
    (0..3).map(|j| fractions[j] * v[j]).sum()
}
