//! Head-to-head comparison of the allocation strategies over a full season.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::baseline::{baseline_plan, BaselineKind};
use super::budget::{apply_expenditure, ExpenditurePlan};
use super::formulations::{
    default_alphas, default_clf_caps, fit_plan, solve_clf, solve_cmlf, solve_rlf, spread_race_budgets, ClfBudgetRow,
    GainPattern,
};
use super::pit::optimize_pit_plan;
use super::sensitivity::{estimate_sensitivities, impact_from, RaceContext, Sensitivity, DEFAULT_PROBE, EQUAL_THIRDS};
use crate::championship::{Championship, Rules, Submission};
use crate::error::StrategyError;
use crate::sim::{run_race, RacePlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Cmlf,
    Clf,
    Rlf,
    Hrlf,
    Unstructured(u64),
}

impl Strategy {
    /// The standard line-up, with one random player.
    pub fn lineup(seed: u64) -> Vec<Strategy> {
        vec![
            Strategy::Cmlf,
            Strategy::Clf,
            Strategy::Rlf,
            Strategy::Hrlf,
            Strategy::Unstructured(seed),
        ]
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Cmlf => f.write_str("CMLF"),
            Strategy::Clf => f.write_str("CLF"),
            Strategy::Rlf => f.write_str("RLF"),
            Strategy::Hrlf => f.write_str("H"),
            Strategy::Unstructured(seed) => write!(f, "U{seed}"),
        }
    }
}

/// Per-race inputs shared by every strategy: the base car's best pit plans
/// and its sensitivities under those plans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonAnalysis {
    pub pit_plans: Vec<RacePlan>,
    pub sensitivities: Vec<Sensitivity>,
}

pub fn analyze_season(rules: &Rules, probe: f64) -> Result<SeasonAnalysis, StrategyError> {
    let config = rules.sim_config();
    let mut pit_plans = Vec::with_capacity(rules.num_races());
    let mut sensitivities = Vec::with_capacity(rules.num_races());
    for (i, v) in rules.races.iter().enumerate() {
        let plan = optimize_pit_plan(&v.circuit, &rules.base_car, &rules.limits, &config)?;
        let ctx = RaceContext {
            circuit: &v.circuit,
            race: i + 1,
            schedule: &rules.schedule,
            base: &rules.base_car,
            limits: &rules.limits,
            config: &config,
        };
        sensitivities.push(estimate_sensitivities(&ctx, &rules.base_car, &plan, probe)?);
        pit_plans.push(plan);
    }
    Ok(SeasonAnalysis {
        pit_plans,
        sensitivities,
    })
}

/// A strategy's season: spends per race, and pit plans where the strategy
/// fixes its own (otherwise each race's plan is optimized for the car).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyPlan {
    pub expenditures: ExpenditurePlan,
    pub race_plans: Option<Vec<RacePlan>>,
}

pub fn plan_strategy(
    strategy: Strategy,
    rules: &Rules,
    season: &SeasonAnalysis,
) -> Result<StrategyPlan, StrategyError> {
    let m = rules.num_races();
    let budget = rules.limits.total_budget;
    let (schedule, limits, base) = (&rules.schedule, &rules.limits, &rules.base_car);
    let sens = &season.sensitivities;
    let expenditures = match strategy {
        Strategy::Cmlf => solve_cmlf(sens, schedule, limits, base, budget, &GainPattern::default())?,
        Strategy::Clf => {
            let impacts: Vec<f64> = sens.iter().map(|s| impact_from(s, EQUAL_THIRDS)).collect();
            let caps = default_clf_caps(schedule, limits, base);
            let alloc = solve_clf(&impacts, &default_alphas(m), budget, &caps, ClfBudgetRow::Dollars)?;
            spread_race_budgets(&alloc.b, |_| EQUAL_THIRDS, limits, schedule, base)
        }
        Strategy::Rlf => {
            let mut plan = ExpenditurePlan::zeros(m);
            let mut car = *base;
            let mut carry = 0.0;
            for (i, s) in sens.iter().enumerate() {
                let b = budget / m as f64 + carry;
                let x = solve_rlf(s, limits, &car, i + 1, schedule, base, b)?;
                carry = (b - x.total()).max(0.0);
                car = apply_expenditure(&car, &x, i + 1, schedule, base);
                plan.races[i] = x;
            }
            fit_plan(&plan, limits, schedule, base)
        }
        Strategy::Hrlf => baseline_plan(BaselineKind::Hrlf, 0, rules)?.expenditures,
        Strategy::Unstructured(seed) => {
            let b = baseline_plan(BaselineKind::Unstructured, seed, rules)?;
            return Ok(StrategyPlan {
                expenditures: b.expenditures,
                race_plans: Some(b.race_plans),
            });
        }
    };
    Ok(StrategyPlan {
        expenditures,
        race_plans: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentRow {
    pub strategy: String,
    pub cumulative_time: f64,
    pub gain: f64,
    pub fraction: f64,
    pub points: f64,
    pub points_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentReport {
    pub reference_time: f64,
    pub rows: Vec<TournamentRow>,
}

impl TournamentReport {
    /// Build the report from season totals: `(name, cumulative time, points)`.
    /// Fractions are relative to the largest gain and the most points.
    pub fn from_totals(reference_time: f64, totals: &[(String, f64, f64)]) -> Self {
        let best_time = totals.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        let best_gain = reference_time - best_time;
        let max_points = totals.iter().map(|t| t.2).fold(0.0, f64::max);
        let rows = totals
            .iter()
            .map(|(name, time, points)| TournamentRow {
                strategy: name.clone(),
                cumulative_time: *time,
                gain: reference_time - time,
                fraction: if best_gain != 0.0 {
                    (reference_time - time) / best_gain
                } else {
                    1.0
                },
                points: *points,
                points_fraction: if max_points > 0.0 { points / max_points } else { 0.0 },
            })
            .collect();
        TournamentReport { reference_time, rows }
    }

    pub fn row(&self, strategy: &str) -> Option<&TournamentRow> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }
}

impl fmt::Display for TournamentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:>16} {:>9} {:>8} {:>9}",
            "formulation", "cumulative time", "fraction", "points", "fraction"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<12} {:>16.2} {:>9.2} {:>8} {:>9.2}",
                r.strategy, r.cumulative_time, r.fraction, r.points, r.points_fraction
            )?;
        }
        write!(f, "{:<12} {:>16.2}", "reference", self.reference_time)
    }
}

/// Play a season with one team per strategy through the championship engine.
pub fn run_tournament(strategies: &[Strategy], rules: &Rules) -> Result<TournamentReport, StrategyError> {
    if strategies.len() < 2 {
        return Err(StrategyError::InvalidInput(
            "a tournament needs at least two strategies".into(),
        ));
    }
    let config = rules.sim_config();
    let season = analyze_season(rules, DEFAULT_PROBE)?;
    let plans = strategies
        .iter()
        .map(|s| plan_strategy(*s, rules, &season))
        .collect::<Result<Vec<_>, _>>()?;

    let mut championship = Championship::new(rules.clone());
    let mut ids = Vec::with_capacity(strategies.len());
    for s in strategies {
        let (id, _) = championship
            .register_team(&s.to_string())
            .map_err(|e| StrategyError::InvalidInput(e.to_string()))?;
        ids.push(id);
    }
    let mut cars = vec![rules.base_car; strategies.len()];
    let mut totals = vec![0.0; strategies.len()];
    for race in 1..=rules.num_races() {
        let venue = &rules.races[race - 1];
        for (k, plan) in plans.iter().enumerate() {
            let x = plan.expenditures.races[race - 1];
            cars[k] = apply_expenditure(&cars[k], &x, race, &rules.schedule, &rules.base_car);
            let race_plan = match &plan.race_plans {
                Some(p) => p[race - 1].clone(),
                None => optimize_pit_plan(&venue.circuit, &cars[k], &rules.limits, &config)?,
            };
            championship
                .submit(
                    ids[k],
                    Submission {
                        race,
                        expenditure: x,
                        race_plan,
                    },
                )
                .map_err(|e| StrategyError::InvalidInput(format!("{}: {e}", strategies[k])))?;
        }
        let (cls, _) = championship
            .run_race(race)
            .map_err(|e| StrategyError::InvalidInput(e.to_string()))?;
        for (k, id) in ids.iter().enumerate() {
            let f =
                cls.finishers.iter().find(|f| f.team == *id).ok_or_else(|| {
                    StrategyError::InvalidInput(format!("{} did not finish race {race}", strategies[k]))
                })?;
            totals[k] += f.total_time;
        }
    }

    let mut reference = 0.0;
    for v in &rules.races {
        reference += run_race(&v.circuit, &rules.base_car, &v.reference_plan(), &config)?.total_time;
    }
    let rows: Vec<(String, f64, f64)> = strategies
        .iter()
        .zip(&ids)
        .zip(&totals)
        .map(|((s, id), t)| {
            let pts = championship.team(*id).map_or(0, |t| t.points_total);
            (s.to_string(), *t, f64::from(pts))
        })
        .collect();
    Ok(TournamentReport::from_totals(reference, &rows))
}
