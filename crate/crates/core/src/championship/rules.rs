//! The rulebook: prices, limits, scoring, the base car and the calendar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::RulesError;
use crate::geometry::Circuit;
use crate::sim::{CarState, RacePlan, SimConfig};
use crate::strategy::{CarLimits, CostSchedule};

/// One Grand Prix on the calendar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Venue {
    pub circuit: Circuit,
    /// Race time of the unimproved car on its reference plan.
    pub reference_time_s: f64,
    /// Stops in the reference plan.
    pub reference_stops: usize,
}

impl Venue {
    /// Even stints with minimal fuel and `reference_stops` stops.
    pub fn reference_plan(&self) -> RacePlan {
        RacePlan::even(self.circuit.laps, self.reference_stops, self.circuit.fuel_per_lap)
    }
}

/// Rules with every circuit resolved and embedded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rules {
    #[serde(default)]
    pub season: String,
    pub schedule: CostSchedule,
    pub limits: CarLimits,
    pub points: Vec<u32>,
    pub base_car: CarState,
    #[serde(default)]
    pub sim: SimConfig,
    pub races: Vec<Venue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CircuitSource {
    Path(String),
    Inline(Box<Circuit>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueEntry {
    pub circuit: CircuitSource,
    pub reference_time_s: f64,
    pub reference_stops: usize,
}

/// On-disk form of the rules, where circuits may be file references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulesFile {
    #[serde(default)]
    pub season: String,
    pub schedule: CostSchedule,
    pub limits: CarLimits,
    pub points: Vec<u32>,
    pub base_car: CarState,
    #[serde(default)]
    pub sim: SimConfig,
    pub races: Vec<VenueEntry>,
}

const SHIPPED_RULES: &str = include_str!("../../data/rules.json");
const SHIPPED_CIRCUITS: [(&str, &str); 5] = [
    ("circuits/sepang.json", include_str!("../../data/circuits/sepang.json")),
    (
        "circuits/silverstone.json",
        include_str!("../../data/circuits/silverstone.json"),
    ),
    ("circuits/austin.json", include_str!("../../data/circuits/austin.json")),
    ("circuits/monza.json", include_str!("../../data/circuits/monza.json")),
    ("circuits/sochi.json", include_str!("../../data/circuits/sochi.json")),
];

fn parse_err(e: serde_json::Error) -> RulesError {
    RulesError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl RulesFile {
    pub fn from_json_str(text: &str) -> Result<Self, RulesError> {
        serde_json::from_str(text).map_err(parse_err)
    }

    /// Resolve circuit references through `load`, which maps a reference to
    /// the circuit file's text.
    pub fn resolve_with(
        self,
        mut load: impl FnMut(&str) -> Result<String, std::io::Error>,
    ) -> Result<Rules, RulesError> {
        let mut races = Vec::with_capacity(self.races.len());
        for v in self.races {
            let circuit = match v.circuit {
                CircuitSource::Inline(c) => (*c).validate().map_err(|source| RulesError::Circuit {
                    path: "<inline>".into(),
                    source,
                })?,
                CircuitSource::Path(p) => {
                    let text = load(&p)?;
                    Circuit::from_json_str(&text).map_err(|source| RulesError::Circuit {
                        path: p.clone(),
                        source,
                    })?
                }
            };
            races.push(Venue {
                circuit,
                reference_time_s: v.reference_time_s,
                reference_stops: v.reference_stops,
            });
        }
        Rules {
            season: self.season,
            schedule: self.schedule,
            limits: self.limits,
            points: self.points,
            base_car: self.base_car,
            sim: self.sim,
            races,
        }
        .validate()
    }
}

impl Rules {
    /// The 2019 season as shipped with the crate.
    pub fn shipped() -> Rules {
        RulesFile::from_json_str(SHIPPED_RULES)
            .and_then(|f| {
                f.resolve_with(|p| {
                    SHIPPED_CIRCUITS
                        .iter()
                        .find(|(name, _)| *name == p)
                        .map(|(_, text)| text.to_string())
                        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, p.to_string()))
                })
            })
            .expect("shipped rules are valid")
    }

    /// Load a rules file; circuit paths are relative to the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Rules, RulesError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let dir = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        RulesFile::from_json_str(&text)?.resolve_with(|p| std::fs::read_to_string(dir.join(p)))
    }

    /// Parse rules with inline circuits (the form stored in event logs).
    pub fn from_json_str(text: &str) -> Result<Rules, RulesError> {
        let rules: Rules = serde_json::from_str(text).map_err(parse_err)?;
        rules.validate()
    }

    pub fn validate(self) -> Result<Self, RulesError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(RulesError::Invalid(v))
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = self.schedule.violations();
        let m = self.races.len();
        if m == 0 {
            out.push("calendar has no races".into());
        }
        if self.schedule.races() != m {
            out.push(format!(
                "cost schedule covers {} races, calendar has {m}",
                self.schedule.races()
            ));
        }
        if self.points.is_empty() || self.points.windows(2).any(|w| w[0] <= w[1]) {
            out.push("points table must be non-empty and strictly decreasing".into());
        }
        let l = &self.limits;
        let b = &self.base_car;
        if !b.is_valid() {
            out.push("base car parameters must be positive".into());
        }
        if !(l.aero_max > b.aero && l.horsepower_max > b.horsepower && l.weight_min < b.dry_weight) {
            out.push("limits must leave room above the base car".into());
        }
        if l.weight_min <= 0.0 {
            out.push("weight_min_kg must be positive".into());
        }
        if !(l.tank_capacity > 0.0 && l.total_budget >= 0.0) {
            out.push("tank capacity must be positive and budget non-negative".into());
        }
        if l.max_stops > 2 {
            out.push("at most two stops are supported".into());
        }
        let s = &self.sim;
        if !(s.cp > 0.0 && s.braking_slope > 0.0 && s.aero_speed_exponent > 0.0) {
            out.push("simulator coefficients must be positive".into());
        }
        for (i, v) in self.races.iter().enumerate() {
            if !(v.reference_time_s.is_finite() && v.reference_time_s > 0.0) {
                out.push(format!("race {}: reference_time_s must be positive", i + 1));
            }
            if v.reference_stops > l.max_stops {
                out.push(format!("race {}: reference_stops exceeds max_stops", i + 1));
            }
        }
        out
    }

    pub fn num_races(&self) -> usize {
        self.races.len()
    }

    /// Venue of 1-based race `race`.
    pub fn venue(&self, race: usize) -> Option<&Venue> {
        race.checked_sub(1).and_then(|i| self.races.get(i))
    }

    /// Simulator settings with the tank capacity taken from the limits.
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            tank_capacity: self.limits.tank_capacity,
            ..self.sim
        }
    }

    /// Sum of the reference race times.
    pub fn reference_total(&self) -> f64 {
        self.races.iter().map(|v| v.reference_time_s).sum()
    }
}
