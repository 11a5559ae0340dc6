//! Engine for a five-race Formula 1 championship game: circuit geometry, lap
//! and race simulation, a small LP solver, budget-allocation strategies and
//! the championship rulebook.

pub mod championship;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod sim;
pub mod strategy;

pub use championship::{Championship, Classification, Rules, Submission, TeamState};
pub use error::{CalibrationError, CircuitError, GeometryError, LpError, RaceError, RulesError, StrategyError};
pub use geometry::{Circuit, CurveElement, Element, StraightElement};
pub use lp::{LpProblem, LpSolution, LpStatus, Relation};
pub use sim::{CarState, RacePlan, RaceResult, SimConfig, Stint};
pub use strategy::{CarLimits, CostSchedule, Expenditure, ExpenditurePlan, Sensitivity};
