//! The three budget-allocation linear programs: one race at a time (RLF),
//! budget across races by weighted impact (CLF), and the whole season in one
//! program with carried-forward gains and per-race floors (CMLF).
//!
//! Every program is posed in megadollars so that coefficients stay near unit
//! scale; results are converted back to dollars and trimmed so that they pass
//! the championship's validation exactly.

use serde::{Deserialize, Serialize};

use super::budget::{
    apply_expenditure, conversion_coefficients, split_with_caps, CarLimits, CostSchedule, Expenditure, ExpenditurePlan,
};
use super::sensitivity::Sensitivity;
use crate::error::StrategyError;
use crate::lp::{solve, LpProblem, LpStatus, Relation};
use crate::sim::CarState;

const MEGA: f64 = 1e6;

fn check_budget(budget: f64) -> Result<(), StrategyError> {
    if budget.is_finite() && budget >= 0.0 {
        Ok(())
    } else {
        Err(StrategyError::InvalidInput(format!(
            "budget must be >= 0, got {budget}"
        )))
    }
}

/// Dollars that would take `car` to each limit at race `race` prices.
pub fn headroom_dollars(
    car: &CarState,
    limits: &CarLimits,
    race: usize,
    schedule: &CostSchedule,
    base: &CarState,
) -> [f64; 3] {
    let conv = conversion_coefficients(schedule, base)[race - 1].as_array();
    let room = limits.headroom(car);
    [room[0] / conv[0], room[1] / conv[1], room[2] / conv[2]]
}

/// The single-race program: maximize `s . x` within the race budget and the
/// remaining headroom of each parameter.
pub fn rlf_problem(
    sens: &Sensitivity,
    limits: &CarLimits,
    car: &CarState,
    race: usize,
    schedule: &CostSchedule,
    base: &CarState,
    budget: f64,
) -> LpProblem {
    let conv = conversion_coefficients(schedule, base)[race - 1].as_array();
    let room = limits.headroom(car);
    let mut p = LpProblem::new(sens.as_array().iter().map(|s| s * MEGA).collect());
    for j in 0..3 {
        let mut row = vec![0.0; 3];
        row[j] = conv[j] * MEGA;
        p.add(row, Relation::Le, room[j]);
    }
    p.add(vec![1.0; 3], Relation::Le, budget / MEGA);
    p
}

pub fn solve_rlf(
    sens: &Sensitivity,
    limits: &CarLimits,
    car: &CarState,
    race: usize,
    schedule: &CostSchedule,
    base: &CarState,
    budget: f64,
) -> Result<Expenditure, StrategyError> {
    check_budget(budget)?;
    let problem = rlf_problem(sens, limits, car, race, schedule, base, budget);
    let sol = solve(&problem)?;
    if sol.status != LpStatus::Optimal {
        return Err(StrategyError::Solver(sol.status.to_string()));
    }
    let cap = headroom_dollars(car, limits, race, schedule, base);
    let mut x = [0.0; 3];
    for j in 0..3 {
        x[j] = (sol.x[j] * MEGA).clamp(0.0, cap[j]);
    }
    let total: f64 = x.iter().sum();
    if total > budget {
        let f = budget / total;
        x.iter_mut().for_each(|v| *v *= f);
    }
    Ok(Expenditure::from_array(x))
}

/// Which budget row the championship-level program uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClfBudgetRow {
    /// `sum B_i <= B`.
    #[default]
    Dollars,
    /// `sum I_i B_i <= B`, the row as originally printed.
    ImpactWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChampionshipAllocation {
    /// Dollars assigned to each race.
    pub b: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Seconds saved per dollar at each race.
    pub impacts: Vec<f64>,
}

/// `alpha_i = M - i + 1`: the number of races a dollar spent at race `i`
/// keeps paying off in.
pub fn default_alphas(races: usize) -> Vec<f64> {
    (1..=races).map(|i| (races - i + 1) as f64).collect()
}

/// Cost of taking the base car to all three limits at each race's prices.
pub fn default_clf_caps(schedule: &CostSchedule, limits: &CarLimits, base: &CarState) -> Vec<f64> {
    (1..=schedule.races())
        .map(|race| headroom_dollars(base, limits, race, schedule, base).iter().sum())
        .collect()
}

pub fn clf_problem(impacts: &[f64], alphas: &[f64], budget: f64, caps: &[f64], row: ClfBudgetRow) -> LpProblem {
    let m = impacts.len();
    let mut p = LpProblem::new((0..m).map(|i| alphas[i] * impacts[i] * MEGA).collect());
    match row {
        ClfBudgetRow::Dollars => p.add(vec![1.0; m], Relation::Le, budget / MEGA),
        ClfBudgetRow::ImpactWeighted => p.add(impacts.iter().map(|v| v * MEGA).collect(), Relation::Le, budget),
    };
    for (i, cap) in caps.iter().enumerate() {
        let mut r = vec![0.0; m];
        r[i] = 1.0;
        p.add(r, Relation::Le, cap / MEGA);
    }
    p
}

pub fn solve_clf(
    impacts: &[f64],
    alphas: &[f64],
    budget: f64,
    caps: &[f64],
    row: ClfBudgetRow,
) -> Result<ChampionshipAllocation, StrategyError> {
    check_budget(budget)?;
    let m = impacts.len();
    if alphas.len() != m || caps.len() != m {
        return Err(StrategyError::InvalidInput(
            "impacts, alphas and caps differ in length".into(),
        ));
    }
    if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) || impacts.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(StrategyError::InvalidInput(
            "alphas must be > 0 and impacts >= 0".into(),
        ));
    }
    let sol = solve(&clf_problem(impacts, alphas, budget, caps, row))?;
    if sol.status != LpStatus::Optimal {
        return Err(StrategyError::Solver(sol.status.to_string()));
    }
    let mut b: Vec<f64> = (0..m).map(|i| (sol.x[i] * MEGA).clamp(0.0, caps[i].max(0.0))).collect();
    if row == ClfBudgetRow::Dollars {
        let total: f64 = b.iter().sum();
        if total > budget {
            b.iter_mut().for_each(|v| *v *= budget / total);
        }
    }
    Ok(ChampionshipAllocation {
        b,
        alphas: alphas.to_vec(),
        impacts: impacts.to_vec(),
    })
}

/// Turn per-race budgets into spends. Race `i` gets its budget plus whatever
/// earlier races could not place; it is split by `weights(i)` and water-filled
/// against the remaining headroom.
pub fn spread_race_budgets(
    budgets: &[f64],
    weights: impl Fn(usize) -> [f64; 3],
    limits: &CarLimits,
    schedule: &CostSchedule,
    base: &CarState,
) -> ExpenditurePlan {
    let mut car = *base;
    let mut carry = 0.0;
    let mut plan = ExpenditurePlan::zeros(budgets.len());
    for (i, b) in budgets.iter().enumerate() {
        let race = i + 1;
        let cap = headroom_dollars(&car, limits, race, schedule, base);
        let (spend, left) = split_with_caps(b + carry, weights(race), cap);
        carry = left;
        plan.races[i] = Expenditure::from_array(spend);
        car = apply_expenditure(&car, &plan.races[i], race, schedule, base);
    }
    fit_plan(&plan, limits, schedule, base)
}

/// Seconds gained at each race, with every earlier dollar carried forward at
/// the ratio of that parameter's prices.
pub fn cumulative_gain(plan: &ExpenditurePlan, sens: &[Sensitivity], schedule: &CostSchedule) -> Vec<f64> {
    let m = plan.races.len().min(sens.len());
    (1..=m)
        .map(|i| {
            let bi = schedule.at(i);
            let si = sens[i - 1].as_array();
            (1..=i)
                .map(|k| {
                    let bk = schedule.at(k);
                    let xk = plan.races[k - 1].as_array();
                    (0..3).map(|j| bi[j] / bk[j] * si[j] * xk[j]).sum::<f64>()
                })
                .sum()
        })
        .collect()
}

/// Minimum per-race gain `delta_g_ref * lambda^(i-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPattern {
    #[serde(rename = "delta_g_ref_s")]
    pub delta_g_ref: f64,
    pub lambda: f64,
}

impl Default for GainPattern {
    fn default() -> Self {
        GainPattern {
            delta_g_ref: 0.5,
            lambda: 1.15,
        }
    }
}

impl GainPattern {
    pub fn floors(&self, races: usize) -> Vec<f64> {
        (0..races)
            .map(|i| self.delta_g_ref * self.lambda.powi(i as i32))
            .collect()
    }
}

pub fn gain_floors(pattern: &GainPattern, races: usize) -> Vec<f64> {
    pattern.floors(races)
}

/// Variable `3 * (i - 1) + j` is the spend, in megadollars, on parameter `j`
/// (aero, horsepower, weight) at race `i`.
pub fn cmlf_problem(
    sens: &[Sensitivity],
    schedule: &CostSchedule,
    limits: &CarLimits,
    base: &CarState,
    budget: f64,
    pattern: &GainPattern,
) -> LpProblem {
    cmlf_problem_upto(sens, schedule, limits, base, budget, pattern, sens.len())
}

fn cmlf_problem_upto(
    sens: &[Sensitivity],
    schedule: &CostSchedule,
    limits: &CarLimits,
    base: &CarState,
    budget: f64,
    pattern: &GainPattern,
    floor_races: usize,
) -> LpProblem {
    let m = sens.len();
    let n = 3 * m;
    let conv = conversion_coefficients(schedule, base);
    let mut objective = vec![0.0; n];
    for k in 1..=m {
        let bk = schedule.at(k);
        for j in 0..3 {
            objective[3 * (k - 1) + j] = (k..=m)
                .map(|i| schedule.at(i)[j] / bk[j] * sens[i - 1].as_array()[j])
                .sum::<f64>()
                * MEGA;
        }
    }
    let mut p = LpProblem::new(objective);
    p.add(vec![1.0; n], Relation::Le, budget / MEGA);
    let room = limits.headroom(base);
    for i in 1..=m {
        for j in 0..3 {
            let mut row = vec![0.0; n];
            for k in 1..=i {
                row[3 * (k - 1) + j] = conv[k - 1].as_array()[j] * MEGA;
            }
            p.add(row, Relation::Le, room[j]);
        }
    }
    let floors = pattern.floors(m);
    for i in 1..=floor_races {
        let mut row = vec![0.0; n];
        let s = sens[i - 1].as_array();
        for j in 0..3 {
            row[3 * (i - 1) + j] = s[j] * MEGA;
        }
        p.add(row, Relation::Ge, floors[i - 1]);
    }
    p
}

pub fn solve_cmlf(
    sens: &[Sensitivity],
    schedule: &CostSchedule,
    limits: &CarLimits,
    base: &CarState,
    budget: f64,
    pattern: &GainPattern,
) -> Result<ExpenditurePlan, StrategyError> {
    check_budget(budget)?;
    let m = sens.len();
    if m == 0 || schedule.races() < m {
        return Err(StrategyError::InvalidInput(
            "need one sensitivity per scheduled race".into(),
        ));
    }
    if !(pattern.delta_g_ref > 0.0 && pattern.lambda >= 1.0) {
        return Err(StrategyError::InvalidInput(
            "gain pattern needs delta_g_ref > 0 and lambda >= 1".into(),
        ));
    }
    let sol = solve(&cmlf_problem(sens, schedule, limits, base, budget, pattern))?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(StrategyError::Infeasible {
                race: cmlf_binding_race(sens, schedule, limits, base, budget, pattern)?,
            })
        }
        LpStatus::Unbounded => return Err(StrategyError::Solver(sol.status.to_string())),
    }
    let plan = ExpenditurePlan {
        races: (0..m)
            .map(|i| Expenditure::new(sol.x[3 * i] * MEGA, sol.x[3 * i + 1] * MEGA, sol.x[3 * i + 2] * MEGA))
            .collect(),
    };
    Ok(fit_plan(&plan, limits, schedule, base))
}

/// The first race whose floor cannot be met even with the whole budget, or
/// failing that the first race at which the floors so far become jointly
/// unattainable.
fn cmlf_binding_race(
    sens: &[Sensitivity],
    schedule: &CostSchedule,
    limits: &CarLimits,
    base: &CarState,
    budget: f64,
    pattern: &GainPattern,
) -> Result<usize, StrategyError> {
    let floors = pattern.floors(sens.len());
    for (i, floor) in floors.iter().enumerate() {
        let race = i + 1;
        let x = solve_rlf(&sens[i], limits, base, race, schedule, base, budget)?;
        if sens[i].gain(&x) < floor - 1e-9 * floor.max(1.0) {
            return Ok(race);
        }
    }
    for upto in 1..=sens.len() {
        let p = cmlf_problem_upto(sens, schedule, limits, base, budget, pattern, upto);
        if solve(&p)?.status == LpStatus::Infeasible {
            return Ok(upto);
        }
    }
    Ok(sens.len())
}

/// Clamp a plan so that it passes validation exactly: no negative spend, no
/// parameter beyond its limit, total within the budget.
pub fn fit_plan(
    plan: &ExpenditurePlan,
    limits: &CarLimits,
    schedule: &CostSchedule,
    base: &CarState,
) -> ExpenditurePlan {
    let mut car = *base;
    let mut spent = 0.0;
    let mut out = ExpenditurePlan::zeros(plan.races.len());
    for (i, x) in plan.races.iter().enumerate() {
        let race = i + 1;
        let cap = headroom_dollars(&car, limits, race, schedule, base);
        let mut v = x.as_array();
        for j in 0..3 {
            v[j] = if v[j].is_finite() { v[j].clamp(0.0, cap[j]) } else { 0.0 };
        }
        let left = (limits.total_budget - spent).max(0.0);
        let total: f64 = v.iter().sum();
        if total > left {
            v.iter_mut().for_each(|s| *s *= left / total);
        }
        out.races[i] = Expenditure::from_array(v);
        spent += out.races[i].total();
        car = apply_expenditure(&car, &out.races[i], race, schedule, base);
    }
    out
}
