use thiserror::Error;

/// Errors raised while loading or validating a circuit description.
#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("circuit parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("circuit invariants violated: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curve angle must be positive and finite, got {0}")]
    BadAngle(f64),
    #[error("non-finite or non-positive geometry input: {0}")]
    BadInput(&'static str),
}

/// Simulator failures. At championship level every one of these is a DNF.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RaceError {
    #[error("fuel exhausted on lap {0}")]
    FuelExhausted(u32),
    #[error("fuel load of stint {stint} ({load} kg) exceeds the tank capacity")]
    TankOverflow { stint: usize, load: f64 },
    #[error("{0} stints requested, at most 3 are allowed")]
    TooManyStops(usize),
    #[error("race plan covers {planned} laps but the circuit has {required}")]
    LapMismatch { planned: u32, required: u32 },
    #[error("race plan has no stints")]
    EmptyPlan,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrationError {
    #[error("reference time {target} s not attainable for speed scale in [{lo}, {hi}]")]
    NoBracket { target: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Race(#[from] RaceError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row {row} has {got} coefficients, expected {expected}")]
    RowLength { row: usize, got: usize, expected: usize },
    #[error("non-finite value in problem data")]
    NonFinite,
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
    #[error("instance too large for enumeration: {vars} variables, {rows} rows")]
    TooLarge { vars: usize, rows: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error("probe on {parameter} at race {race} would cross its limit")]
    LimitCrossed { parameter: &'static str, race: usize },
    #[error("gain floors cannot all be met; first binding race is {race}")]
    Infeasible { race: usize },
    #[error("race cannot be completed with the allowed stops and tank capacity")]
    Uncompletable,
    #[error("linear program returned {0}")]
    Solver(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Race(#[from] RaceError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("rules parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("circuit {path}: {source}")]
    Circuit {
        path: String,
        #[source]
        source: CircuitError,
    },
    #[error("rules invariants violated: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
