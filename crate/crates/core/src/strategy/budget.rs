//! Money and car-parameter bookkeeping shared by the formulations and the
//! championship rulebook.

use serde::{Deserialize, Serialize};

use crate::sim::CarState;

/// Dollars per 1% improvement of each parameter, per race.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSchedule {
    #[serde(rename = "aero_usd")]
    pub aero: Vec<f64>,
    #[serde(rename = "horsepower_usd")]
    pub horsepower: Vec<f64>,
    #[serde(rename = "weight_usd")]
    pub weight: Vec<f64>,
}

impl CostSchedule {
    /// The 2019 championship price list.
    pub fn season_2019() -> Self {
        CostSchedule {
            aero: vec![700_000.0, 600_000.0, 500_000.0, 450_000.0, 400_000.0],
            horsepower: vec![120_000.0, 100_000.0, 90_000.0, 85_000.0, 80_000.0],
            weight: vec![150_000.0, 120_000.0, 100_000.0, 90_000.0, 80_000.0],
        }
    }

    pub fn races(&self) -> usize {
        self.aero.len()
    }

    /// Prices at 1-based race `race`, as `[aero, horsepower, weight]`.
    pub fn at(&self, race: usize) -> [f64; 3] {
        let i = race - 1;
        [self.aero[i], self.horsepower[i], self.weight[i]]
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let m = self.aero.len();
        if m == 0 {
            out.push("cost schedule has no races".into());
        }
        if self.horsepower.len() != m || self.weight.len() != m {
            out.push("cost schedule rows differ in length".into());
        }
        for (name, row) in [
            ("aero", &self.aero),
            ("horsepower", &self.horsepower),
            ("weight", &self.weight),
        ] {
            if row.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                out.push(format!("{name} costs must be positive"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarLimits {
    pub aero_max: f64,
    #[serde(rename = "horsepower_max_hp")]
    pub horsepower_max: f64,
    #[serde(rename = "weight_min_kg")]
    pub weight_min: f64,
    #[serde(rename = "tank_capacity_kg")]
    pub tank_capacity: f64,
    pub max_stops: usize,
    #[serde(rename = "total_budget_usd")]
    pub total_budget: f64,
}

impl Default for CarLimits {
    fn default() -> Self {
        CarLimits {
            aero_max: 1.09,
            horsepower_max: 1025.0,
            weight_min: 650.0,
            tank_capacity: 70.0,
            max_stops: 2,
            total_budget: 6_000_000.0,
        }
    }
}

impl CarLimits {
    /// Remaining room to improve `car`, in parameter units, as
    /// `[aero, horsepower, weight]` (weight counts kilograms still removable).
    pub fn headroom(&self, car: &CarState) -> [f64; 3] {
        [
            (self.aero_max - car.aero).max(0.0),
            (self.horsepower_max - car.horsepower).max(0.0),
            (car.dry_weight - self.weight_min).max(0.0),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Expenditure {
    #[serde(rename = "aero_usd")]
    pub aero: f64,
    #[serde(rename = "horsepower_usd")]
    pub horsepower: f64,
    #[serde(rename = "weight_usd")]
    pub weight: f64,
}

impl Expenditure {
    pub fn new(aero: f64, horsepower: f64, weight: f64) -> Self {
        Expenditure {
            aero,
            horsepower,
            weight,
        }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Expenditure::new(v[0], v[1], v[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.aero, self.horsepower, self.weight]
    }

    pub fn total(&self) -> f64 {
        self.aero + self.horsepower + self.weight
    }
}

impl std::ops::Add for Expenditure {
    type Output = Expenditure;
    fn add(self, o: Expenditure) -> Expenditure {
        Expenditure::new(
            self.aero + o.aero,
            self.horsepower + o.horsepower,
            self.weight + o.weight,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExpenditurePlan {
    pub races: Vec<Expenditure>,
}

impl ExpenditurePlan {
    pub fn zeros(races: usize) -> Self {
        ExpenditurePlan {
            races: vec![Expenditure::default(); races],
        }
    }

    pub fn total(&self) -> f64 {
        self.races.iter().map(Expenditure::total).sum()
    }

    /// Car state entering each race after that race's spend, starting from
    /// `base`.
    pub fn trajectory(&self, base: &CarState, schedule: &CostSchedule) -> Vec<CarState> {
        let mut car = *base;
        self.races
            .iter()
            .enumerate()
            .map(|(i, x)| {
                car = apply_expenditure(&car, x, i + 1, schedule, base);
                car
            })
            .collect()
    }
}

impl std::ops::Add for &ExpenditurePlan {
    type Output = ExpenditurePlan;
    fn add(self, o: &ExpenditurePlan) -> ExpenditurePlan {
        ExpenditurePlan {
            races: self.races.iter().zip(&o.races).map(|(a, b)| *a + *b).collect(),
        }
    }
}

/// Parameter change per dollar at one race: aero units, HP, and kilograms
/// removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conversion {
    pub aero: f64,
    pub horsepower: f64,
    pub weight: f64,
}

impl Conversion {
    pub fn as_array(&self) -> [f64; 3] {
        [self.aero, self.horsepower, self.weight]
    }
}

/// One percent of the base value buys at the listed price.
pub fn conversion_coefficients(schedule: &CostSchedule, base: &CarState) -> Vec<Conversion> {
    (1..=schedule.races())
        .map(|race| {
            let [ba, bh, bw] = schedule.at(race);
            Conversion {
                aero: 0.01 * base.aero / ba,
                horsepower: 0.01 * base.horsepower / bh,
                weight: 0.01 * base.dry_weight / bw,
            }
        })
        .collect()
}

/// Improvements are a percentage of the base car and carry forward.
pub fn apply_expenditure(
    car: &CarState,
    x: &Expenditure,
    race: usize,
    schedule: &CostSchedule,
    base: &CarState,
) -> CarState {
    let [ba, bh, bw] = schedule.at(race);
    CarState {
        aero: car.aero + 0.01 * base.aero * (x.aero / ba),
        horsepower: car.horsepower + 0.01 * base.horsepower * (x.horsepower / bh),
        dry_weight: car.dry_weight - 0.01 * base.dry_weight * (x.weight / bw),
    }
}

/// Split `amount` over the three parameters in proportion to `weights`, never
/// spending more on a parameter than `cap` allows; whatever a saturated
/// parameter cannot absorb is shared among the rest. Returns the spend and
/// the amount left over.
pub fn split_with_caps(amount: f64, weights: [f64; 3], cap: [f64; 3]) -> ([f64; 3], f64) {
    let mut spend = [0.0; 3];
    let mut open = [true; 3];
    let mut left = amount.max(0.0);
    for _ in 0..3 {
        let wsum: f64 = (0..3).filter(|&j| open[j]).map(|j| weights[j]).sum();
        if left <= 0.0 || wsum <= 0.0 {
            break;
        }
        let mut saturated = false;
        for j in 0..3 {
            if open[j] && spend[j] + left * weights[j] / wsum >= cap[j] {
                saturated = true;
            }
        }
        if !saturated {
            for j in 0..3 {
                if open[j] {
                    spend[j] += left * weights[j] / wsum;
                }
            }
            left = 0.0;
            break;
        }
        // Fill every parameter whose share overflows, then redistribute.
        let share_left = left;
        for j in 0..3 {
            if open[j] && spend[j] + share_left * weights[j] / wsum >= cap[j] {
                left -= cap[j] - spend[j];
                spend[j] = cap[j];
                open[j] = false;
            }
        }
        left = left.max(0.0);
    }
    (spend, left)
}
