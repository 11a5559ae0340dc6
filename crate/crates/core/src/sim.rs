//! Deterministic lap, stint and race timing.
//!
//! Curves are driven at a speed limit set by the curve and the car's
//! aerodynamic parameter. On a straight the car gains speed linearly with
//! distance at a rate proportional to power over total weight, is capped by
//! the circuit's top speed, and sheds speed linearly with distance to meet the
//! next curve's limit. Each linear phase is timed as length over mean speed.

use serde::{Deserialize, Serialize};

use crate::error::{CalibrationError, RaceError};
use crate::geometry::{Circuit, CurveElement, Layout, Segment};

/// Slack allowed when checking that a stint's fuel covers its last lap.
pub const FUEL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarState {
    pub aero: f64,
    #[serde(rename = "horsepower_hp")]
    pub horsepower: f64,
    #[serde(rename = "dry_weight_kg")]
    pub dry_weight: f64,
}

impl CarState {
    pub const BASELINE: CarState = CarState {
        aero: 1.0,
        horsepower: 830.0,
        dry_weight: 702.0,
    };

    pub fn is_valid(&self) -> bool {
        [self.aero, self.horsepower, self.dry_weight]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
    }
}

impl Default for CarState {
    fn default() -> Self {
        Self::BASELINE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Speed gained per metre per unit of power-to-weight (m/s per m per HP/kg).
    pub cp: f64,
    /// Speed shed per metre under braking, (m/s)/m.
    pub braking_slope: f64,
    pub aero_speed_exponent: f64,
    pub tank_capacity: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            cp: 0.08,
            braking_slope: 1.2,
            aero_speed_exponent: 0.5,
            tank_capacity: 70.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stint {
    pub laps: u32,
    /// Fuel on board when the stint starts.
    #[serde(rename = "fuel_kg")]
    pub fuel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RacePlan {
    pub stints: Vec<Stint>,
}

impl RacePlan {
    pub fn stops(&self) -> usize {
        self.stints.len().saturating_sub(1)
    }

    /// Cumulative lap numbers at which the car pits.
    pub fn pit_laps(&self) -> Vec<u32> {
        let mut acc = 0;
        let mut out = Vec::new();
        for s in self.stints.iter().take(self.stints.len().saturating_sub(1)) {
            acc += s.laps;
            out.push(acc);
        }
        out
    }

    pub fn total_laps(&self) -> u32 {
        self.stints.iter().map(|s| s.laps).sum()
    }

    /// Laps split as evenly as possible (earlier stints take the remainder),
    /// each stint fuelled with exactly what it burns.
    pub fn even(laps: u32, stops: usize, fuel_per_lap: f64) -> RacePlan {
        let n = stops as u32 + 1;
        let base = laps / n;
        let extra = laps % n;
        let stints = (0..n)
            .map(|i| {
                let l = base + u32::from(i < extra);
                Stint {
                    laps: l,
                    fuel: minimal_fuel(l, fuel_per_lap),
                }
            })
            .collect();
        RacePlan { stints }
    }

    /// Plan from stint boundaries given as cumulative pit laps.
    pub fn from_pit_laps(laps: u32, pit_laps: &[u32], fuel_per_lap: f64) -> RacePlan {
        let mut prev = 0;
        let mut stints = Vec::with_capacity(pit_laps.len() + 1);
        for &p in pit_laps.iter().chain(std::iter::once(&laps)) {
            let l = p - prev;
            stints.push(Stint {
                laps: l,
                fuel: minimal_fuel(l, fuel_per_lap),
            });
            prev = p;
        }
        RacePlan { stints }
    }
}

pub fn minimal_fuel(laps: u32, fuel_per_lap: f64) -> f64 {
    laps as f64 * fuel_per_lap
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LapRecord {
    pub time: f64,
    pub fuel_at_start: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaceResult {
    pub total_time: f64,
    /// Stint times, pit penalties included.
    pub stint_times: Vec<f64>,
    pub pit_laps: Vec<u32>,
    pub stint_end_fuel: Vec<f64>,
    pub lap_trace: Vec<LapRecord>,
}

/// Display form of a race result: times rounded to hundredths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaceSummary {
    pub total_s: f64,
    pub stint_s: Vec<f64>,
    pub pit_laps: Vec<u32>,
}

pub fn round_hundredths(t: f64) -> f64 {
    (t * 100.0).round() / 100.0
}

impl RaceResult {
    pub fn summary(&self) -> RaceSummary {
        RaceSummary {
            total_s: round_hundredths(self.total_time),
            stint_s: self.stint_times.iter().copied().map(round_hundredths).collect(),
            pit_laps: self.pit_laps.clone(),
        }
    }
}

pub fn curve_speed(curve: &CurveElement, aero: f64, speed_scale: f64, config: &SimConfig) -> f64 {
    curve.ref_speed * aero.powf(config.aero_speed_exponent) * speed_scale
}

/// Time over one effective straight and the speed at its end.
///
/// The straight is split into up to three phases: accelerate from `v_in` at
/// `cp * H / weight` per metre, cruise at `max_speed`, brake at
/// `braking_slope` per metre to `v_next_limit`. If even braking from the start
/// cannot reach the next limit, the car brakes the whole way and leaves the
/// faster speed for the next curve to absorb.
pub fn straight_traverse(
    v_in: f64,
    v_next_limit: f64,
    effective_length: f64,
    car: &CarState,
    weight_total: f64,
    max_speed: f64,
    config: &SimConfig,
) -> (f64, f64) {
    if effective_length <= 0.0 {
        return (0.0, v_in.min(v_next_limit));
    }
    let len = effective_length;
    let gain = config.cp * car.horsepower / weight_total;
    let brake = config.braking_slope;
    let v0 = v_in.min(max_speed);
    let target = v_next_limit.min(max_speed);

    let phase = |l: f64, a: f64, b: f64| if l > 0.0 { l / (0.5 * (a + b)) } else { 0.0 };

    if target + brake * len < v0 {
        let exit = (v0 - brake * len).max(f64::MIN_POSITIVE);
        return (phase(len, v0, exit), exit);
    }

    // Distance at which the acceleration line meets the braking line.
    let meet = (target + brake * len - v0) / (gain + brake);
    if meet >= len {
        let top = v0 + gain * len;
        if top <= max_speed {
            return (phase(len, v0, top), top);
        }
        let s1 = (max_speed - v0) / gain;
        return (
            phase(s1, v0, max_speed) + phase(len - s1, max_speed, max_speed),
            max_speed,
        );
    }

    let peak = v0 + gain * meet;
    if peak <= max_speed {
        return (phase(meet, v0, peak) + phase(len - meet, peak, target), target);
    }
    let s1 = (max_speed - v0) / gain;
    let s3 = (max_speed - target) / brake;
    let s2 = (len - s1 - s3).max(0.0);
    (
        phase(s1, v0, max_speed) + phase(s2, max_speed, max_speed) + phase(s3, max_speed, target),
        target,
    )
}

/// A circuit prepared for repeated lap evaluation by one car.
#[derive(Debug, Clone)]
pub struct LapModel<'a> {
    circuit: &'a Circuit,
    layout: Layout,
    car: CarState,
    config: SimConfig,
    speeds: Vec<f64>,
}

impl<'a> LapModel<'a> {
    pub fn new(circuit: &'a Circuit, car: &CarState, config: &SimConfig) -> Result<Self, RaceError> {
        if !car.is_valid() {
            return Err(RaceError::InvalidInput(format!(
                "car parameters must be positive: {car:?}"
            )));
        }
        let layout = Layout::new(circuit).map_err(|e| RaceError::InvalidInput(e.to_string()))?;
        let speeds = layout
            .segments
            .iter()
            .map(|s| match s {
                Segment::Curve { curve, .. } => curve_speed(curve, car.aero, circuit.speed_scale, config),
                Segment::Straight { .. } => 0.0,
            })
            .collect();
        Ok(LapModel {
            circuit,
            layout,
            car: *car,
            config: *config,
            speeds,
        })
    }

    pub fn lap_time(&self, fuel_on_board: f64) -> f64 {
        let weight = self.car.dry_weight + fuel_on_board.max(0.0);
        let mut total = 0.0;
        for (i, seg) in self.layout.segments.iter().enumerate() {
            match seg {
                Segment::Curve { path, .. } => total += path.arc_length / self.speeds[i],
                Segment::Straight {
                    effective,
                    prev_curve,
                    next_curve,
                    ..
                } => {
                    let (t, _) = straight_traverse(
                        self.speeds[*prev_curve],
                        self.speeds[*next_curve],
                        *effective,
                        &self.car,
                        weight,
                        self.circuit.max_speed,
                        &self.config,
                    );
                    total += t;
                }
            }
        }
        total
    }

    pub fn run(&self, plan: &RacePlan) -> Result<RaceResult, RaceError> {
        let circuit = self.circuit;
        check_plan(plan, circuit.laps, self.config.tank_capacity)?;

        let mut lap_no = 0u32;
        let mut stint_times = Vec::with_capacity(plan.stints.len());
        let mut stint_end_fuel = Vec::with_capacity(plan.stints.len());
        let mut lap_trace = Vec::with_capacity(circuit.laps as usize);
        for (idx, stint) in plan.stints.iter().enumerate() {
            let mut t = if idx > 0 { circuit.pit_penalty } else { 0.0 };
            for j in 0..stint.laps {
                lap_no += 1;
                let fuel = stint.fuel - j as f64 * circuit.fuel_per_lap;
                if fuel - circuit.fuel_per_lap < -FUEL_EPS {
                    return Err(RaceError::FuelExhausted(lap_no));
                }
                let lt = self.lap_time(fuel);
                lap_trace.push(LapRecord {
                    time: lt,
                    fuel_at_start: fuel,
                });
                t += lt;
            }
            stint_times.push(t);
            stint_end_fuel.push(stint.fuel - stint.laps as f64 * circuit.fuel_per_lap);
        }
        Ok(RaceResult {
            total_time: stint_times.iter().sum(),
            stint_times,
            pit_laps: plan.pit_laps(),
            stint_end_fuel,
            lap_trace,
        })
    }
}

fn check_plan(plan: &RacePlan, laps: u32, tank: f64) -> Result<(), RaceError> {
    if plan.stints.is_empty() {
        return Err(RaceError::EmptyPlan);
    }
    if plan.stints.len() > 3 {
        return Err(RaceError::TooManyStops(plan.stints.len()));
    }
    for (i, s) in plan.stints.iter().enumerate() {
        if !(s.fuel.is_finite() && s.fuel >= 0.0) {
            return Err(RaceError::InvalidInput(format!("stint {} fuel must be >= 0", i + 1)));
        }
        if s.laps == 0 {
            return Err(RaceError::InvalidInput(format!("stint {} has no laps", i + 1)));
        }
        if s.fuel > tank {
            return Err(RaceError::TankOverflow {
                stint: i + 1,
                load: s.fuel,
            });
        }
    }
    let planned = plan.total_laps();
    if planned != laps {
        return Err(RaceError::LapMismatch {
            planned,
            required: laps,
        });
    }
    Ok(())
}

pub fn lap_time(circuit: &Circuit, car: &CarState, fuel_on_board: f64, config: &SimConfig) -> Result<f64, RaceError> {
    Ok(LapModel::new(circuit, car, config)?.lap_time(fuel_on_board))
}

pub fn run_race(
    circuit: &Circuit,
    car: &CarState,
    plan: &RacePlan,
    config: &SimConfig,
) -> Result<RaceResult, RaceError> {
    LapModel::new(circuit, car, config)?.run(plan)
}

pub const SCALE_BRACKET: (f64, f64) = (0.5, 2.0);

/// Speed scale at which `plan` finishes in `reference_time`.
///
/// Race time falls strictly as the scale grows, so plain bisection on the
/// bracket converges; it runs until the bracket collapses to round-off.
pub fn calibrate_speed_scale(
    circuit: &Circuit,
    car: &CarState,
    reference_time: f64,
    plan: &RacePlan,
    config: &SimConfig,
) -> Result<f64, CalibrationError> {
    if !(reference_time.is_finite() && reference_time > 0.0) {
        return Err(RaceError::InvalidInput("reference time must be positive".into()).into());
    }
    let mut scaled = circuit.clone();
    let mut time_at = |scale: f64| -> Result<f64, RaceError> {
        scaled.speed_scale = scale;
        Ok(run_race(&scaled, car, plan, config)?.total_time)
    };
    let (mut lo, mut hi) = SCALE_BRACKET;
    let (t_lo, t_hi) = (time_at(lo)?, time_at(hi)?);
    if !(t_hi <= reference_time && reference_time <= t_lo) {
        return Err(CalibrationError::NoBracket {
            target: reference_time,
            lo,
            hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let t = time_at(mid)?;
        if t == reference_time {
            return Ok(mid);
        }
        if t > reference_time {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
