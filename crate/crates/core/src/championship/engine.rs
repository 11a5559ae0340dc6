//! Submissions, Grand Prix runs, points and standings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rules::Rules;
use crate::sim::{run_race, CarState, RacePlan, FUEL_EPS};
use crate::strategy::{apply_expenditure, CostSchedule, Expenditure};

pub type TeamId = u32;

/// Slack on the parameter limits, absorbing round-off in accumulated spends.
pub const AERO_TOL: f64 = 1e-12;
pub const HORSEPOWER_TOL: f64 = 1e-9;
pub const WEIGHT_TOL: f64 = 1e-9;
/// Slack on the season budget, in dollars.
pub const BUDGET_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    /// 1-based race number.
    pub race: usize,
    pub expenditure: Expenditure,
    pub race_plan: RacePlan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
}

impl Violation {
    fn new(code: &str, message: impl Into<String>) -> Self {
        Violation {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Finished {
        total_time: f64,
        stint_times: Vec<f64>,
        pit_laps: Vec<u32>,
        position: usize,
        points: u32,
    },
    Dnf {
        reasons: Vec<String>,
    },
}

/// One team's race, as the team itself sees it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaceEntry {
    pub race: usize,
    /// The spend actually applied; zero when the submission was rejected.
    pub expenditure: Expenditure,
    pub race_plan: Option<RacePlan>,
    /// Car after the race's spend.
    pub car: CarState,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamState {
    pub id: TeamId,
    pub name: String,
    pub car: CarState,
    pub spent_total: f64,
    pub points_total: u32,
    pub history: Vec<RaceEntry>,
}

impl TeamState {
    pub fn new(id: TeamId, name: impl Into<String>, car: CarState) -> Self {
        TeamState {
            id,
            name: name.into(),
            car,
            spent_total: 0.0,
            points_total: 0,
            history: Vec::new(),
        }
    }

    /// Fastest finish of the season, if any.
    pub fn best_time(&self) -> Option<f64> {
        self.history
            .iter()
            .filter_map(|e| match e.outcome {
                Outcome::Finished { total_time, .. } => Some(total_time),
                Outcome::Dnf { .. } => None,
            })
            .min_by(f64::total_cmp)
    }
}

/// Check a submission for race `next_race` against the rules. Every broken
/// rule is reported.
pub fn validate_submission(
    team: &TeamState,
    sub: &Submission,
    rules: &Rules,
    next_race: usize,
) -> Result<(), Vec<Violation>> {
    let mut v = Vec::new();
    let limits = &rules.limits;
    let Some(venue) = rules.venue(sub.race) else {
        v.push(Violation::new(
            "race_index",
            format!("race {} is not on the calendar", sub.race),
        ));
        return Err(v);
    };
    if sub.race != next_race {
        v.push(Violation::new(
            "race_index",
            format!("submissions are open for race {next_race}, not race {}", sub.race),
        ));
    }

    let x = sub.expenditure.as_array();
    if x.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        v.push(Violation::new(
            "negative_spend",
            "every spend must be a finite amount >= 0",
        ));
    } else {
        let total = team.spent_total + sub.expenditure.total();
        if total > limits.total_budget + BUDGET_TOL {
            v.push(Violation::new(
                "budget",
                format!(
                    "season spend would reach {total:.2} $, the budget is {:.2} $",
                    limits.total_budget
                ),
            ));
        }
        let car = apply_expenditure(&team.car, &sub.expenditure, sub.race, &rules.schedule, &rules.base_car);
        if car.aero > limits.aero_max + AERO_TOL {
            v.push(Violation::new(
                "aero_max",
                format!("aero would reach {:.6}, the limit is {}", car.aero, limits.aero_max),
            ));
        }
        if car.horsepower > limits.horsepower_max + HORSEPOWER_TOL {
            v.push(Violation::new(
                "horsepower_max",
                format!(
                    "horsepower would reach {:.3} HP, the limit is {} HP",
                    car.horsepower, limits.horsepower_max
                ),
            ));
        }
        if car.dry_weight < limits.weight_min - WEIGHT_TOL {
            v.push(Violation::new(
                "weight_min",
                format!(
                    "weight would drop to {:.3} kg, the minimum is {} kg",
                    car.dry_weight, limits.weight_min
                ),
            ));
        }
    }

    let plan = &sub.race_plan;
    let circuit = &venue.circuit;
    if plan.stints.is_empty() {
        v.push(Violation::new("empty_plan", "the race plan has no stints"));
    }
    if plan.stops() > limits.max_stops {
        v.push(Violation::new(
            "max_stops",
            format!(
                "{} pit stops planned, at most {} allowed",
                plan.stops(),
                limits.max_stops
            ),
        ));
    }
    for (i, s) in plan.stints.iter().enumerate() {
        let n = i + 1;
        if s.laps == 0 {
            v.push(Violation::new("stint_laps", format!("stint {n} has no laps")));
        }
        if !(s.fuel.is_finite() && s.fuel >= 0.0) {
            v.push(Violation::new(
                "fuel",
                format!("stint {n} fuel must be a finite amount >= 0"),
            ));
            continue;
        }
        if s.fuel > limits.tank_capacity {
            v.push(Violation::new(
                "tank_capacity",
                format!(
                    "stint {n} loads {} kg, the tank holds {} kg",
                    s.fuel, limits.tank_capacity
                ),
            ));
        }
        if s.laps > 0 {
            // Same test the simulator applies at the start of the last lap.
            let last = s.fuel - (s.laps - 1) as f64 * circuit.fuel_per_lap;
            if last - circuit.fuel_per_lap < -FUEL_EPS {
                v.push(Violation::new(
                    "fuel_insufficient",
                    format!(
                        "stint {n} needs {} kg for {} laps, loads {} kg",
                        s.laps as f64 * circuit.fuel_per_lap,
                        s.laps,
                        s.fuel
                    ),
                ));
            }
        }
    }
    let planned = plan.total_laps();
    if !plan.stints.is_empty() && planned != circuit.laps {
        v.push(Violation::new(
            "laps",
            format!("stints cover {planned} laps, the race is {} laps", circuit.laps),
        ));
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Published race detail for one finisher. Car parameters and spends are
/// deliberately absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finisher {
    pub position: usize,
    pub team: TeamId,
    pub name: String,
    pub total_time: f64,
    pub points: u32,
    pub stint_times: Vec<f64>,
    pub pit_laps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnfEntry {
    pub team: TeamId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub race: usize,
    pub finishers: Vec<Finisher>,
    pub dnf: Vec<DnfEntry>,
}

impl Classification {
    pub fn points_of(&self, team: TeamId) -> u32 {
        self.finishers.iter().find(|f| f.team == team).map_or(0, |f| f.points)
    }
}

/// Positions and points for finishers already sorted by time. Equal times
/// share the better position and its points; the next finisher's position
/// skips accordingly.
pub fn award_points(sorted_times: &[f64], points_table: &[u32]) -> Vec<(usize, u32)> {
    let mut out: Vec<(usize, u32)> = Vec::with_capacity(sorted_times.len());
    for (i, t) in sorted_times.iter().enumerate() {
        let position = if i > 0 && sorted_times[i - 1] == *t {
            out[i - 1].0
        } else {
            i + 1
        };
        let pts = points_table.get(position - 1).copied().unwrap_or(0);
        out.push((position, pts));
    }
    out
}

/// Everything a Grand Prix changes for one team.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamUpdate {
    pub team: TeamId,
    pub entry: RaceEntry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrandPrix {
    pub classification: Classification,
    pub updates: Vec<TeamUpdate>,
}

/// Run race `race` for every team. Missing or invalid submissions and
/// simulator failures are DNFs; an invalid submission's spend is not applied.
pub fn run_grand_prix(
    race: usize,
    teams: &[TeamState],
    submissions: &BTreeMap<TeamId, Submission>,
    rules: &Rules,
) -> GrandPrix {
    let venue = rules.venue(race).expect("race on the calendar");
    let config = rules.sim_config();
    let mut finished: Vec<(usize, f64, Vec<f64>, Vec<u32>)> = Vec::new();
    let mut updates: Vec<TeamUpdate> = Vec::with_capacity(teams.len());
    for (idx, team) in teams.iter().enumerate() {
        let dnf = |reasons: Vec<String>| RaceEntry {
            race,
            expenditure: Expenditure::default(),
            race_plan: None,
            car: team.car,
            outcome: Outcome::Dnf { reasons },
        };
        let entry = match submissions.get(&team.id) {
            None => dnf(vec!["no_submission".into()]),
            Some(sub) => match validate_submission(team, sub, rules, race) {
                Err(v) => dnf(v.into_iter().map(|v| v.code).collect()),
                Ok(()) => {
                    let car = apply_expenditure(&team.car, &sub.expenditure, race, &rules.schedule, &rules.base_car);
                    let outcome = match run_race(&venue.circuit, &car, &sub.race_plan, &config) {
                        Ok(r) => {
                            finished.push((idx, r.total_time, r.stint_times, r.pit_laps));
                            // Position and points are filled in below.
                            Outcome::Finished {
                                total_time: r.total_time,
                                stint_times: Vec::new(),
                                pit_laps: Vec::new(),
                                position: 0,
                                points: 0,
                            }
                        }
                        Err(e) => Outcome::Dnf {
                            reasons: vec![e.to_string()],
                        },
                    };
                    RaceEntry {
                        race,
                        expenditure: sub.expenditure,
                        race_plan: Some(sub.race_plan.clone()),
                        car,
                        outcome,
                    }
                }
            },
        };
        updates.push(TeamUpdate { team: team.id, entry });
    }

    finished.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let times: Vec<f64> = finished.iter().map(|f| f.1).collect();
    let awarded = award_points(&times, &rules.points);
    let mut finishers = Vec::with_capacity(finished.len());
    for ((idx, total, stints, pits), (position, points)) in finished.into_iter().zip(awarded) {
        let team = &teams[idx];
        updates[idx].entry.outcome = Outcome::Finished {
            total_time: total,
            stint_times: stints.clone(),
            pit_laps: pits.clone(),
            position,
            points,
        };
        finishers.push(Finisher {
            position,
            team: team.id,
            name: team.name.clone(),
            total_time: total,
            points,
            stint_times: stints,
            pit_laps: pits,
        });
    }
    let dnf = teams
        .iter()
        .zip(&updates)
        .filter(|(_, u)| matches!(u.entry.outcome, Outcome::Dnf { .. }))
        .map(|(t, _)| DnfEntry {
            team: t.id,
            name: t.name.clone(),
        })
        .collect();
    GrandPrix {
        classification: Classification { race, finishers, dnf },
        updates,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standing {
    pub position: usize,
    pub team: TeamId,
    pub name: String,
    pub points: u32,
    pub best_time: Option<f64>,
}

/// Order by points, then by best single-race time (teams without a finish
/// last), then by the input order.
pub fn rank_standings(mut rows: Vec<Standing>) -> Vec<Standing> {
    rows.sort_by(|a, b| {
        b.points.cmp(&a.points).then_with(|| match (a.best_time, b.best_time) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        })
    });
    for (i, r) in rows.iter_mut().enumerate() {
        r.position = i + 1;
    }
    rows
}

pub fn standings(teams: &[TeamState]) -> Vec<Standing> {
    rank_standings(
        teams
            .iter()
            .map(|t| Standing {
                position: 0,
                team: t.id,
                name: t.name.clone(),
                points: t.points_total,
                best_time: t.best_time(),
            })
            .collect(),
    )
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("unknown team {0}")]
    UnknownTeam(TeamId),
    #[error("team name must be non-empty and unique")]
    BadTeamName,
    #[error("registration closed once the first race has run")]
    RegistrationClosed,
    #[error("race {race} is closed")]
    RaceClosed { race: usize },
    #[error("race {race} is not open; next race is {next:?}")]
    RaceNotOpen { race: usize, next: Option<usize> },
    #[error("submission rejected: {}", .0.iter().map(|v| v.code.as_str()).collect::<Vec<_>>().join(", "))]
    Rejected(Vec<Violation>),
}

/// What happened, in order. Replaying these events rebuilds the championship.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Created {
        rules: Box<Rules>,
    },
    Registered {
        team: TeamId,
        name: String,
    },
    Submitted {
        team: TeamId,
        submission: Submission,
    },
    RaceRun {
        race: usize,
        classification: Classification,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Championship {
    rules: Rules,
    teams: Vec<TeamState>,
    pending: BTreeMap<TeamId, Submission>,
    results: Vec<Classification>,
}

impl Championship {
    pub fn new(rules: Rules) -> Self {
        Championship {
            rules,
            teams: Vec::new(),
            pending: BTreeMap::new(),
            results: Vec::new(),
        }
    }

    pub fn creation_event(&self) -> Event {
        Event::Created {
            rules: Box::new(self.rules.clone()),
        }
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn teams(&self) -> &[TeamState] {
        &self.teams
    }

    pub fn team(&self, id: TeamId) -> Option<&TeamState> {
        self.teams.iter().find(|t| t.id == id)
    }

    /// Next race to be run, or `None` once the season is over.
    pub fn next_race(&self) -> Option<usize> {
        let n = self.results.len() + 1;
        (n <= self.rules.num_races()).then_some(n)
    }

    pub fn races_run(&self) -> usize {
        self.results.len()
    }

    pub fn classification(&self, race: usize) -> Option<&Classification> {
        race.checked_sub(1).and_then(|i| self.results.get(i))
    }

    pub fn pending_submission(&self, team: TeamId) -> Option<&Submission> {
        self.pending.get(&team)
    }

    pub fn standings(&self) -> Vec<Standing> {
        standings(&self.teams)
    }

    pub fn register_team(&mut self, name: &str) -> Result<(TeamId, Event), EngineError> {
        let name = name.trim();
        if name.is_empty() || self.teams.iter().any(|t| t.name == name) {
            return Err(EngineError::BadTeamName);
        }
        if !self.results.is_empty() {
            return Err(EngineError::RegistrationClosed);
        }
        let id = self.teams.len() as TeamId + 1;
        self.teams.push(TeamState::new(id, name, self.rules.base_car));
        Ok((
            id,
            Event::Registered {
                team: id,
                name: name.to_string(),
            },
        ))
    }

    /// Accept a submission for the open race, replacing any earlier one.
    pub fn submit(&mut self, team: TeamId, sub: Submission) -> Result<Event, EngineError> {
        let state = self.team(team).ok_or(EngineError::UnknownTeam(team))?;
        if sub.race >= 1 && sub.race <= self.results.len() {
            return Err(EngineError::RaceClosed { race: sub.race });
        }
        let next = self.next_race();
        if Some(sub.race) != next {
            return Err(EngineError::RaceNotOpen { race: sub.race, next });
        }
        validate_submission(state, &sub, &self.rules, sub.race).map_err(EngineError::Rejected)?;
        self.pending.insert(team, sub.clone());
        Ok(Event::Submitted { team, submission: sub })
    }

    /// Run race `race`. Running an already-run race returns its stored
    /// classification and no event.
    pub fn run_race(&mut self, race: usize) -> Result<(Classification, Option<Event>), EngineError> {
        if let Some(c) = self.classification(race) {
            return Ok((c.clone(), None));
        }
        let next = self.next_race();
        if Some(race) != next {
            return Err(EngineError::RaceNotOpen { race, next });
        }
        let gp = run_grand_prix(race, &self.teams, &self.pending, &self.rules);
        self.apply_grand_prix(&gp);
        self.pending.clear();
        self.results.push(gp.classification.clone());
        Ok((
            gp.classification.clone(),
            Some(Event::RaceRun {
                race,
                classification: gp.classification,
            }),
        ))
    }

    fn apply_grand_prix(&mut self, gp: &GrandPrix) {
        for u in &gp.updates {
            let t = self.teams.iter_mut().find(|t| t.id == u.team).expect("team exists");
            t.car = u.entry.car;
            t.spent_total += u.entry.expenditure.total();
            if let Outcome::Finished { points, .. } = u.entry.outcome {
                t.points_total += points;
            }
            t.history.push(u.entry.clone());
        }
    }
}

/// Season budget split that is easy to read in reports.
pub fn spend_by_race(team: &TeamState) -> Vec<f64> {
    team.history.iter().map(|e| e.expenditure.total()).collect()
}

/// Car at the start of each race from a team's history.
pub fn car_history(team: &TeamState, base: &CarState, schedule: &CostSchedule) -> Vec<CarState> {
    let mut car = *base;
    team.history
        .iter()
        .map(|e| {
            car = apply_expenditure(&car, &e.expenditure, e.race, schedule, base);
            car
        })
        .collect()
}
