//! The game's rulebook and state machine.

mod engine;
mod events;
mod rules;

pub use engine::{
    award_points, car_history, rank_standings, run_grand_prix, spend_by_race, standings, validate_submission,
    Championship, Classification, DnfEntry, EngineError, Event, Finisher, GrandPrix, Outcome, RaceEntry, Standing,
    Submission, TeamId, TeamState, TeamUpdate, Violation, AERO_TOL, BUDGET_TOL, HORSEPOWER_TOL, WEIGHT_TOL,
};
pub use events::{read_log, replay, write_record, LogRecord, ReplayError};
pub use rules::{CircuitSource, Rules, RulesFile, Venue, VenueEntry};
