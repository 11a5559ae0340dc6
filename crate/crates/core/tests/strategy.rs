use approx::assert_relative_eq;
use f1champ_core::championship::{validate_submission, Rules, Submission, TeamState};
use f1champ_core::geometry::{Circuit, CurveElement, Element, StraightElement};
use f1champ_core::lp::solve;
use f1champ_core::sim::{run_race, CarState, RacePlan, SimConfig};
use f1champ_core::strategy::Strategy as Player;
use f1champ_core::strategy::*;
use f1champ_core::StrategyError;
use proptest::prelude::*;
use std::f64::consts::PI;

const MEGA: f64 = 1e6;

fn schedule() -> CostSchedule {
    CostSchedule::season_2019()
}

fn limits() -> CarLimits {
    CarLimits::default()
}

fn base() -> CarState {
    CarState::BASELINE
}

/// Fractional knapsack: fill the best-paying items first.
fn greedy(rates: &[f64], caps: &[f64], budget: f64) -> f64 {
    let mut order: Vec<usize> = (0..rates.len()).collect();
    order.sort_by(|&a, &b| rates[b].total_cmp(&rates[a]));
    let mut left = budget;
    let mut value = 0.0;
    for i in order {
        if rates[i] <= 0.0 || left <= 0.0 {
            break;
        }
        let take = caps[i].min(left);
        value += rates[i] * take;
        left -= take;
    }
    value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rlf_equals_greedy_knapsack(
        s in prop::array::uniform3(1e-7f64..1e-4),
        race in 1usize..=5,
        a in 1.0f64..1.09,
        h in 830.0f64..1025.0,
        w in 650.0f64..702.0,
        budget in 0.0f64..6e6,
    ) {
        let car = CarState { aero: a, horsepower: h, dry_weight: w };
        let sens = Sensitivity::new(s[0], s[1], s[2]);
        let caps = headroom_dollars(&car, &limits(), race, &schedule(), &base());
        let want = greedy(&s, &caps, budget);
        let x = solve_rlf(&sens, &limits(), &car, race, &schedule(), &base(), budget).unwrap();
        let got = sens.gain(&x);
        prop_assert!((got - want).abs() <= 1e-6 * want.max(1e-12), "{got} vs {want}");
        prop_assert!(x.total() <= budget * (1.0 + 1e-12));
        let after = apply_expenditure(&car, &x, race, &schedule(), &base());
        prop_assert!(after.aero <= limits().aero_max + 1e-12);
        prop_assert!(after.horsepower <= limits().horsepower_max + 1e-9);
        prop_assert!(after.dry_weight >= limits().weight_min - 1e-9);
    }

    #[test]
    fn clf_equals_weighted_knapsack(
        impacts in prop::collection::vec(1e-7f64..1e-4, 5),
        caps in prop::collection::vec(1e5f64..4e6, 5),
        budget in 0.0f64..8e6,
    ) {
        let alphas = default_alphas(5);
        let alloc = solve_clf(&impacts, &alphas, budget, &caps, ClfBudgetRow::Dollars).unwrap();
        let rates: Vec<f64> = (0..5).map(|i| alphas[i] * impacts[i]).collect();
        let want = greedy(&rates, &caps, budget);
        let got: f64 = (0..5).map(|i| rates[i] * alloc.b[i]).sum();
        prop_assert!((got - want).abs() <= 1e-6 * want.max(1e-12), "{got} vs {want}");
    }

    #[test]
    fn cumulative_gain_is_additive(
        a in prop::collection::vec(prop::array::uniform3(0.0f64..5e5), 5),
        b in prop::collection::vec(prop::array::uniform3(0.0f64..5e5), 5),
        s in prop::collection::vec(prop::array::uniform3(1e-7f64..1e-4), 5),
    ) {
        let plan = |v: &[[f64; 3]]| ExpenditurePlan { races: v.iter().map(|x| Expenditure::from_array(*x)).collect() };
        let sens: Vec<Sensitivity> = s.iter().map(|v| Sensitivity::new(v[0], v[1], v[2])).collect();
        let (pa, pb) = (plan(&a), plan(&b));
        let ga = cumulative_gain(&pa, &sens, &schedule());
        let gb = cumulative_gain(&pb, &sens, &schedule());
        let gab = cumulative_gain(&(&pa + &pb), &sens, &schedule());
        for i in 0..5 {
            prop_assert!((gab[i] - ga[i] - gb[i]).abs() <= 1e-9 * (1.0 + gab[i].abs()));
        }
    }

    #[test]
    fn impact_is_a_convex_combination(s in prop::array::uniform3(0.0f64..1e-4), f in prop::array::uniform3(0.0f64..1.0)) {
        let total: f64 = f.iter().sum();
        prop_assume!(total > 1e-6);
        let frac = [f[0] / total, f[1] / total, f[2] / total];
        let i = impact_from(&Sensitivity::new(s[0], s[1], s[2]), frac);
        let lo = s.iter().cloned().fold(f64::MAX, f64::min);
        let hi = s.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!(i >= lo * (1.0 - 1e-12) && i <= hi * (1.0 + 1e-12));
    }
}

#[test]
fn clf_impact_weighted_row_variant() {
    let impacts = [2e-5, 1e-5, 3e-5];
    let alphas = default_alphas(3);
    let caps = [1e7; 3];
    let alloc = solve_clf(&impacts, &alphas, 1e6, &caps, ClfBudgetRow::ImpactWeighted).unwrap();
    let used: f64 = (0..3).map(|i| impacts[i] * alloc.b[i]).sum();
    assert!(used <= 1e6 * (1.0 + 1e-9));
}

fn shipped_sensitivities(rules: &Rules) -> Vec<Sensitivity> {
    analyze_season(rules, DEFAULT_PROBE).unwrap().sensitivities
}

#[test]
fn shipped_sensitivities_are_positive_and_probe_stable() {
    let rules = Rules::shipped();
    let config = rules.sim_config();
    let season = analyze_season(&rules, DEFAULT_PROBE).unwrap();
    for (i, v) in rules.races.iter().enumerate() {
        let ctx = RaceContext {
            circuit: &v.circuit,
            race: i + 1,
            schedule: &rules.schedule,
            base: &rules.base_car,
            limits: &rules.limits,
            config: &config,
        };
        let small = season.sensitivities[i].as_array();
        let large = estimate_sensitivities(&ctx, &rules.base_car, &season.pit_plans[i], 2.0 * DEFAULT_PROBE)
            .unwrap()
            .as_array();
        for j in 0..3 {
            assert!(small[j] > 0.0, "race {} parameter {j}", i + 1);
            assert!(
                (small[j] - large[j]).abs() <= 0.05 * small[j],
                "race {}: {small:?} vs {large:?}",
                i + 1
            );
        }
        let impact = estimate_impact(&ctx, &rules.base_car, &season.pit_plans[i], DEFAULT_PROBE, EQUAL_THIRDS).unwrap();
        assert_relative_eq!(
            impact,
            impact_from(&season.sensitivities[i], EQUAL_THIRDS),
            max_relative = 1e-12
        );
    }
}

#[test]
fn probing_at_a_limit_is_refused() {
    let rules = Rules::shipped();
    let config = rules.sim_config();
    let v = &rules.races[0];
    let ctx = RaceContext {
        circuit: &v.circuit,
        race: 1,
        schedule: &rules.schedule,
        base: &rules.base_car,
        limits: &rules.limits,
        config: &config,
    };
    let maxed = CarState {
        horsepower: rules.limits.horsepower_max,
        ..rules.base_car
    };
    let err = estimate_sensitivities(&ctx, &maxed, &v.reference_plan(), DEFAULT_PROBE).unwrap_err();
    assert!(matches!(
        err,
        StrategyError::LimitCrossed {
            parameter: "horsepower",
            race: 1
        }
    ));
}

fn cmlf_objective(sens: &[Sensitivity], budget: f64, pattern: &GainPattern) -> Option<f64> {
    let p = cmlf_problem(sens, &schedule(), &limits(), &base(), budget, pattern);
    let s = solve(&p).unwrap();
    s.is_optimal().then_some(s.objective_value)
}

#[test]
fn cmlf_floors_match_the_pattern() {
    let f = gain_floors(&GainPattern::default(), 5);
    let want = [0.5, 0.575, 0.66125, 0.7604375, 0.874503125];
    for (a, b) in f.iter().zip(want) {
        assert_relative_eq!(*a, b, max_relative = 1e-12);
    }
}

#[test]
fn cmlf_objective_grows_with_budget_and_shrinks_with_floors() {
    let sens = shipped_sensitivities(&Rules::shipped());
    let pattern = GainPattern::default();
    let mut prev = f64::NEG_INFINITY;
    for budget in [2e6, 3e6, 4e6, 5e6, 6e6, 8e6] {
        let v = cmlf_objective(&sens, budget, &pattern).unwrap();
        assert!(v >= prev - 1e-9, "budget {budget}: {v} < {prev}");
        prev = v;
    }
    let mut prev = f64::INFINITY;
    for g in [0.0, 0.25, 0.5, 1.0, 1.5] {
        let p = GainPattern {
            delta_g_ref: g,
            lambda: 1.15,
        };
        let Some(v) = cmlf_objective(&sens, 6e6, &p) else { break };
        assert!(v <= prev + 1e-9, "floor {g}: {v} > {prev}");
        prev = v;
    }
}

#[test]
fn cmlf_plan_satisfies_every_row() {
    let rules = Rules::shipped();
    let sens = shipped_sensitivities(&rules);
    let pattern = GainPattern::default();
    let plan = solve_cmlf(&sens, &rules.schedule, &rules.limits, &rules.base_car, 6e6, &pattern).unwrap();
    let x: Vec<f64> = plan.races.iter().flat_map(|e| e.as_array()).map(|v| v / MEGA).collect();
    let p = cmlf_problem(&sens, &rules.schedule, &rules.limits, &rules.base_car, 6e6, &pattern);
    assert!(p.violations(&x, 1e-9).is_empty(), "rows {:?}", p.violations(&x, 1e-9));
    assert!(plan.total() <= 6e6 + 1e-6);
    let floors = pattern.floors(5);
    for i in 0..5 {
        assert!(sens[i].gain(&plan.races[i]) >= floors[i] * (1.0 - 1e-9));
    }
}

#[test]
fn cmlf_reports_the_race_that_cannot_reach_its_floor() {
    let mut sens = vec![Sensitivity::new(3e-5, 3e-5, 3e-5); 5];
    sens[4] = Sensitivity::new(1e-10, 1e-10, 1e-10);
    let err = solve_cmlf(&sens, &schedule(), &limits(), &base(), 6e6, &GainPattern::default()).unwrap_err();
    assert!(matches!(err, StrategyError::Infeasible { race: 5 }), "{err}");
}

fn toy_circuit(pit_penalty: f64) -> Circuit {
    let c = |inner_radius, angle, ref_speed| {
        Element::Curve(CurveElement {
            inner_radius,
            angle,
            ref_speed,
        })
    };
    let s = |length| Element::Straight(StraightElement { length });
    Circuit {
        name: "toy".into(),
        track_width: 12.0,
        laps: 10,
        max_speed: 85.0,
        pit_penalty,
        fuel_per_lap: 2.0,
        speed_scale: 1.0,
        elements: vec![
            s(900.0),
            c(30.0, PI / 2.0, 30.0),
            s(400.0),
            c(60.0, PI, 45.0),
            s(600.0),
            c(25.0, PI / 2.0, 26.0),
        ],
    }
}

fn toy_limits(tank: f64) -> (CarLimits, SimConfig) {
    let limits = CarLimits {
        tank_capacity: tank,
        ..CarLimits::default()
    };
    let config = SimConfig {
        tank_capacity: tank,
        ..SimConfig::default()
    };
    (limits, config)
}

/// Every pit-lap choice run through the full race simulator.
fn enumerate_best(c: &Circuit, config: &SimConfig) -> (f64, Vec<u32>) {
    let mut candidates: Vec<Vec<u32>> = vec![vec![]];
    for a in 1..c.laps {
        candidates.push(vec![a]);
        for b in a + 1..c.laps {
            candidates.push(vec![a, b]);
        }
    }
    let mut best = (f64::INFINITY, vec![]);
    for pits in candidates {
        let plan = RacePlan::from_pit_laps(c.laps, &pits, c.fuel_per_lap);
        if let Ok(r) = run_race(c, &base(), &plan, config) {
            if r.total_time < best.0 - 1e-9 {
                best = (r.total_time, pits);
            }
        }
    }
    best
}

#[test]
fn pit_optimizer_matches_enumeration() {
    let (limits, config) = toy_limits(12.0);
    let c = toy_circuit(20.0);
    let plan = optimize_pit_plan(&c, &base(), &limits, &config).unwrap();
    let t = run_race(&c, &base(), &plan, &config).unwrap().total_time;
    let (best, _) = enumerate_best(&c, &config);
    assert_relative_eq!(t, best, max_relative = 1e-12);
}

#[test]
fn free_stops_use_them_all_and_dear_stops_avoid_them() {
    let (limits, config) = toy_limits(12.0);
    let plan = optimize_pit_plan(&toy_circuit(0.0), &base(), &limits, &config).unwrap();
    assert_eq!(plan.stops(), 2);
    let (limits, config) = toy_limits(25.0);
    let plan = optimize_pit_plan(&toy_circuit(1e6), &base(), &limits, &config).unwrap();
    assert_eq!(plan.stops(), 0);
    let (limits, config) = toy_limits(6.0);
    let err = optimize_pit_plan(&toy_circuit(20.0), &base(), &limits, &config).unwrap_err();
    assert!(matches!(err, StrategyError::Uncompletable));
}

#[test]
fn shipped_pit_stop_counts() {
    let rules = Rules::shipped();
    let season = analyze_season(&rules, DEFAULT_PROBE).unwrap();
    let stops: Vec<usize> = season.pit_plans.iter().map(|p| p.stops()).collect();
    assert_eq!(stops, vec![1, 2, 2, 2, 2]);
}

#[test]
fn heuristic_spends_an_equal_share_each_race() {
    let rules = Rules::shipped();
    let plan = hrlf_expenditures(&rules);
    for x in &plan.races {
        assert_relative_eq!(x.total(), 1.2e6, max_relative = 1e-9);
    }
}

#[test]
fn random_player_is_deterministic() {
    let rules = Rules::shipped();
    let a = baseline_plan(BaselineKind::Unstructured, 42, &rules).unwrap();
    let b = baseline_plan(BaselineKind::Unstructured, 42, &rules).unwrap();
    let c = baseline_plan(BaselineKind::Unstructured, 43, &rules).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

/// Play a plan through validation race by race.
fn assert_valid(plan: &ExpenditurePlan, race_plans: &[RacePlan], rules: &Rules, label: &str) {
    let mut team = TeamState::new(1, label, rules.base_car);
    for race in 1..=rules.num_races() {
        let sub = Submission {
            race,
            expenditure: plan.races[race - 1],
            race_plan: race_plans[race - 1].clone(),
        };
        if let Err(v) = validate_submission(&team, &sub, rules, race) {
            panic!("{label} race {race}: {v:?}");
        }
        team.spent_total += sub.expenditure.total();
        team.car = apply_expenditure(&team.car, &sub.expenditure, race, &rules.schedule, &rules.base_car);
    }
}

#[test]
fn hundred_random_players_stay_inside_the_rules() {
    let rules = Rules::shipped();
    for seed in 0..100 {
        let b = baseline_plan(BaselineKind::Unstructured, seed, &rules).unwrap();
        assert_valid(&b.expenditures, &b.race_plans, &rules, &format!("U{seed}"));
    }
}

#[test]
fn every_strategy_plan_is_legal() {
    let rules = Rules::shipped();
    let season = analyze_season(&rules, DEFAULT_PROBE).unwrap();
    let config = rules.sim_config();
    for s in Player::lineup(9) {
        let p = plan_strategy(s, &rules, &season).unwrap();
        let race_plans = match p.race_plans {
            Some(r) => r,
            None => {
                let cars = p.expenditures.trajectory(&rules.base_car, &rules.schedule);
                rules
                    .races
                    .iter()
                    .zip(&cars)
                    .map(|(v, car)| optimize_pit_plan(&v.circuit, car, &rules.limits, &config).unwrap())
                    .collect()
            }
        };
        assert_valid(&p.expenditures, &race_plans, &rules, &s.to_string());
    }
}

#[test]
fn tournament_runs_through_the_engine() {
    let rules = Rules::shipped();
    let report = run_tournament(&Player::lineup(1), &rules).unwrap();
    assert_eq!(report.rows.len(), 5);
    assert_relative_eq!(report.reference_time, rules.reference_total(), max_relative = 1e-3);
    let best = report.rows.iter().map(|r| r.fraction).fold(f64::MIN, f64::max);
    assert_relative_eq!(best, 1.0);
}
