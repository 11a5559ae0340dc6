//! Budget-allocation strategies and the tools they share.

mod baseline;
mod budget;
mod formulations;
mod pit;
mod sensitivity;
mod tournament;

pub use baseline::{baseline_plan, hrlf_expenditures, BaselineKind, BaselinePlan};
pub use budget::{
    apply_expenditure, conversion_coefficients, split_with_caps, CarLimits, Conversion, CostSchedule, Expenditure,
    ExpenditurePlan,
};
pub use formulations::{
    clf_problem, cmlf_problem, cumulative_gain, default_alphas, default_clf_caps, fit_plan, gain_floors,
    headroom_dollars, rlf_problem, solve_clf, solve_cmlf, solve_rlf, spread_race_budgets, ChampionshipAllocation,
    ClfBudgetRow, GainPattern,
};
pub use pit::optimize_pit_plan;
pub use sensitivity::{
    estimate_impact, estimate_sensitivities, impact_from, RaceContext, Sensitivity, DEFAULT_PROBE, EQUAL_THIRDS,
};
pub use tournament::{
    analyze_season, plan_strategy, run_tournament, SeasonAnalysis, Strategy, StrategyPlan, TournamentReport,
    TournamentRow,
};
