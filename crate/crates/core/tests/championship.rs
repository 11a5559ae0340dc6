use f1champ_core::championship::*;
use f1champ_core::sim::{CarState, RacePlan};
use f1champ_core::strategy::{optimize_pit_plan, CarLimits, Expenditure};
use std::io::Cursor;

fn plan_for(rules: &Rules, race: usize, car: &CarState) -> RacePlan {
    let v = rules.venue(race).unwrap();
    optimize_pit_plan(&v.circuit, car, &rules.limits, &rules.sim_config()).unwrap()
}

struct Script {
    championship: Championship,
    log: Vec<u8>,
    seq: u64,
}

impl Script {
    fn new(rules: Rules) -> Self {
        let championship = Championship::new(rules);
        let mut s = Script {
            log: Vec::new(),
            seq: 0,
            championship,
        };
        let created = s.championship.creation_event();
        s.record(created);
        s
    }

    fn record(&mut self, event: Event) {
        self.seq += 1;
        let rec = LogRecord {
            seq: self.seq,
            ts_ms: 1_700_000_000_000 + self.seq,
            event,
        };
        write_record(&mut self.log, &rec).unwrap();
    }

    fn register(&mut self, name: &str) -> TeamId {
        let (id, e) = self.championship.register_team(name).unwrap();
        self.record(e);
        id
    }

    fn submit(&mut self, team: TeamId, race: usize, x: Expenditure) {
        let rules = self.championship.rules().clone();
        let car = f1champ_core::strategy::apply_expenditure(
            &self.championship.team(team).unwrap().car,
            &x,
            race,
            &rules.schedule,
            &rules.base_car,
        );
        let sub = Submission {
            race,
            expenditure: x,
            race_plan: plan_for(&rules, race, &car),
        };
        let e = self.championship.submit(team, sub).unwrap();
        self.record(e);
    }

    fn run(&mut self, race: usize) -> Classification {
        let (c, e) = self.championship.run_race(race).unwrap();
        self.record(e.expect("first run emits an event"));
        c
    }
}

fn scripted_season() -> Script {
    let mut s = Script::new(Rules::shipped());
    let a = s.register("Aero First");
    let b = s.register("Engine Shop");
    let c = s.register("Back Markers");
    for race in 1..=5 {
        s.submit(a, race, Expenditure::new(250_000.0, 50_000.0, 0.0));
        s.submit(b, race, Expenditure::new(0.0, 400_000.0, 150_000.0));
        // The third team skips race 3 entirely.
        if race != 3 {
            s.submit(c, race, Expenditure::new(10_000.0, 10_000.0, 10_000.0));
        }
        s.run(race);
    }
    s
}

#[test]
fn replay_reproduces_every_classification_bit_for_bit() {
    let s = scripted_season();
    let records = read_log(Cursor::new(&s.log)).unwrap();
    assert_eq!(records.len() as u64, s.seq);
    let replayed = replay(&records).unwrap();
    for race in 1..=5 {
        let live = s.championship.classification(race).unwrap();
        let again = replayed.classification(race).unwrap();
        assert_eq!(
            serde_json::to_string(live).unwrap(),
            serde_json::to_string(again).unwrap()
        );
        for (x, y) in live.finishers.iter().zip(&again.finishers) {
            assert_eq!(x.total_time.to_bits(), y.total_time.to_bits());
        }
    }
    assert_eq!(replayed.teams(), s.championship.teams());
    assert_eq!(replayed.standings(), s.championship.standings());
}

#[test]
fn replay_detects_a_tampered_result() {
    let s = scripted_season();
    let mut records = read_log(Cursor::new(&s.log)).unwrap();
    let last = records.last_mut().unwrap();
    if let Event::RaceRun { classification, .. } = &mut last.event {
        classification.finishers[0].total_time += 0.001;
    }
    assert!(matches!(replay(&records), Err(ReplayError::Diverged { .. })));
    assert!(matches!(replay(&records[1..]), Err(ReplayError::MissingCreation)));
}

#[test]
fn skipped_race_is_a_dnf_and_points_are_conserved() {
    let s = scripted_season();
    let table = &s.championship.rules().points;
    for race in 1..=5 {
        let c = s.championship.classification(race).unwrap();
        let awarded: u32 = c.finishers.iter().map(|f| f.points).sum();
        let expected: u32 = table.iter().take(c.finishers.len()).sum();
        assert_eq!(awarded, expected, "race {race}");
        assert_eq!(c.finishers.len() + c.dnf.len(), 3);
    }
    let third = s.championship.classification(3).unwrap();
    assert_eq!(third.dnf.len(), 1);
    assert_eq!(third.dnf[0].name, "Back Markers");
    let total: u32 = s.championship.teams().iter().map(|t| t.points_total).sum();
    let per_race: u32 = (1..=5)
        .map(|r| {
            s.championship
                .classification(r)
                .unwrap()
                .finishers
                .iter()
                .map(|f| f.points)
                .sum::<u32>()
        })
        .sum();
    assert_eq!(total, per_race);
}

#[test]
fn budget_and_limits_hold_all_season() {
    let s = scripted_season();
    let rules = s.championship.rules();
    let l: &CarLimits = &rules.limits;
    for t in s.championship.teams() {
        let spent: f64 = spend_by_race(t).iter().sum();
        assert!((spent - t.spent_total).abs() <= 1e-6);
        assert!(t.spent_total <= l.total_budget + BUDGET_TOL);
        for car in car_history(t, &rules.base_car, &rules.schedule) {
            assert!(car.aero <= l.aero_max + AERO_TOL);
            assert!(car.horsepower <= l.horsepower_max + HORSEPOWER_TOL);
            assert!(car.dry_weight >= l.weight_min - WEIGHT_TOL);
        }
    }
}

#[test]
fn overspending_is_refused_at_submission() {
    let mut c = Championship::new(Rules::shipped());
    let (id, _) = c.register_team("Spendthrift").unwrap();
    let rules = c.rules().clone();
    let sub = Submission {
        race: 1,
        expenditure: Expenditure::new(0.0, 0.0, 7_000_000.0),
        race_plan: plan_for(&rules, 1, &rules.base_car),
    };
    let Err(EngineError::Rejected(v)) = c.submit(id, sub) else {
        panic!("overspend accepted");
    };
    assert!(v.iter().any(|v| v.code == "budget"));
}

#[test]
fn closed_races_and_late_registration() {
    let mut c = Championship::new(Rules::shipped());
    let (id, _) = c.register_team("Solo").unwrap();
    assert!(matches!(c.register_team("Solo"), Err(EngineError::BadTeamName)));
    let (first, event) = c.run_race(1).unwrap();
    assert!(event.is_some());
    let (again, event) = c.run_race(1).unwrap();
    assert!(event.is_none());
    assert_eq!(first, again);
    assert!(matches!(c.register_team("Late"), Err(EngineError::RegistrationClosed)));
    let rules = c.rules().clone();
    let sub = Submission {
        race: 1,
        expenditure: Expenditure::default(),
        race_plan: plan_for(&rules, 1, &rules.base_car),
    };
    assert!(matches!(c.submit(id, sub), Err(EngineError::RaceClosed { race: 1 })));
    assert!(matches!(
        c.run_race(3),
        Err(EngineError::RaceNotOpen { race: 3, next: Some(2) })
    ));
}

#[test]
fn full_grid_scores_the_whole_table() {
    let mut c = Championship::new(Rules::shipped());
    let rules = c.rules().clone();
    let ids: Vec<TeamId> = (0..12)
        .map(|k| c.register_team(&format!("Team {k}")).unwrap().0)
        .collect();
    for (k, id) in ids.iter().enumerate() {
        let x = Expenditure::new(40_000.0 * k as f64, 0.0, 0.0);
        let car = f1champ_core::strategy::apply_expenditure(&rules.base_car, &x, 1, &rules.schedule, &rules.base_car);
        c.submit(
            *id,
            Submission {
                race: 1,
                expenditure: x,
                race_plan: plan_for(&rules, 1, &car),
            },
        )
        .unwrap();
    }
    let (cls, _) = c.run_race(1).unwrap();
    assert_eq!(cls.finishers.len(), 12);
    let awarded: u32 = cls.finishers.iter().map(|f| f.points).sum();
    assert_eq!(awarded, rules.points.iter().sum::<u32>());
    // The biggest spender wins, and positions run 1..=12.
    assert_eq!(cls.finishers[0].team, ids[11]);
    let positions: Vec<usize> = cls.finishers.iter().map(|f| f.position).collect();
    assert_eq!(positions, (1..=12).collect::<Vec<_>>());
    // Standings after one race follow the classification.
    let order: Vec<TeamId> = c.standings().iter().map(|s| s.team).collect();
    let finish: Vec<TeamId> = cls.finishers.iter().map(|f| f.team).collect();
    assert_eq!(order, finish);
}

#[test]
fn published_results_hide_cars_and_spending() {
    let s = scripted_season();
    for race in 1..=5 {
        let json = serde_json::to_value(s.championship.classification(race).unwrap()).unwrap();
        let text = json.to_string();
        for key in [
            "car",
            "aero",
            "horsepower",
            "dry_weight",
            "expenditure",
            "spent",
            "reasons",
            "fuel",
        ] {
            assert!(!text.contains(&format!("\"{key}")), "race {race} leaks {key}: {text}");
        }
    }
}

#[test]
fn tied_times_share_points() {
    let table = [25, 18, 15, 12, 10, 8, 6, 4, 2, 1];
    let awarded = award_points(&[100.0, 100.0, 101.0, 102.0], &table);
    assert_eq!(awarded, vec![(1, 25), (1, 25), (3, 15), (4, 12)]);
    let far: Vec<f64> = (0..12).map(|i| i as f64).collect();
    let awarded = award_points(&far, &table);
    assert_eq!(awarded[10], (11, 0));
    assert_eq!(awarded[11], (12, 0));
}

/// Points per team from the 2019 championship table, Team 1 first.
const SEASON_2019_POINTS: [[u32; 5]; 11] = [
    [5, 1, 2, 3, 12],
    [7, 9, 17, 9, 2],
    [12, 0, 25, 17, 7],
    [6, 3, 5, 12, 9],
    [0, 7, 2, 1, 17],
    [0, 25, 12, 25, 3],
    [17, 12, 7, 7, 1],
    [9, 3, 1, 2, 5],
    [0, 2, 0, 0, 0],
    [3, 5, 9, 5, 9],
    [25, 17, 3, 2, 25],
];

#[test]
fn historical_points_put_team_eleven_on_top() {
    let teams: Vec<TeamState> = SEASON_2019_POINTS
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut t = TeamState::new(i as TeamId + 1, format!("Team {}", i + 1), CarState::BASELINE);
            t.points_total = row.iter().sum();
            t
        })
        .collect();
    let table = standings(&teams);
    assert_eq!(table[0].name, "Team 11");
    assert_eq!(table[0].points, 72);
    assert_eq!(table[0].position, 1);
    assert!(table.windows(2).all(|w| w[0].points >= w[1].points));
}
