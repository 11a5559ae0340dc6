use f1champ_core::lp::{brute_force_oracle, solve, LpProblem, LpStatus, Relation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(rng: &mut ChaCha8Rng) -> LpProblem {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(1..=8);
    let mut p = LpProblem::new((0..n).map(|_| rng.random_range(-9..=9) as f64).collect());
    for _ in 0..m {
        let rel = match rng.random_range(0..6) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        p.add(
            (0..n).map(|_| rng.random_range(-9..=9) as f64).collect(),
            rel,
            rng.random_range(-9..=9) as f64,
        );
    }
    p
}

#[test]
fn simplex_matches_enumeration_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = [0usize; 3];
    for k in 0..2000 {
        let p = random_problem(&mut rng);
        let a = solve(&p).unwrap();
        let b = brute_force_oracle(&p).unwrap();
        assert_eq!(a.status, b.status, "instance {k}:\n{p}");
        seen[a.status as usize] += 1;
        if a.is_optimal() {
            assert!(
                (a.objective_value - b.objective_value).abs() <= 1e-6 * (1.0 + b.objective_value.abs()),
                "instance {k}: {} vs {}\n{p}",
                a.objective_value,
                b.objective_value
            );
        }
    }
    assert!(seen.iter().all(|&c| c > 50), "status mix {seen:?}");
}

/// Strong duality and complementary slackness from the reported multipliers.
#[test]
fn duals_certify_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 300 {
        let p = random_problem(&mut rng);
        let s = solve(&p).unwrap();
        if !s.is_optimal() {
            continue;
        }
        checked += 1;
        let n = p.num_vars();
        for (c, y) in p.constraints.iter().zip(&s.duals) {
            match c.relation {
                Relation::Le => assert!(*y >= -1e-9),
                Relation::Ge => assert!(*y <= 1e-9),
                Relation::Eq => {}
            }
            let lhs: f64 = c.coefficients.iter().zip(&s.x).map(|(a, x)| a * x).sum();
            assert!((y * (lhs - c.rhs)).abs() <= 1e-6, "row slack with nonzero dual");
        }
        for j in 0..n {
            let reduced: f64 = p
                .constraints
                .iter()
                .zip(&s.duals)
                .map(|(c, y)| c.coefficients[j] * y)
                .sum::<f64>()
                - p.objective[j];
            assert!(reduced >= -1e-6, "dual infeasible at column {j}");
            assert!((reduced * s.x[j]).abs() <= 1e-6);
        }
        let dual_obj: f64 = p.constraints.iter().zip(&s.duals).map(|(c, y)| c.rhs * y).sum();
        assert!((dual_obj - s.objective_value).abs() <= 1e-6 * (1.0 + dual_obj.abs()));
    }
}

#[test]
fn degenerate_vertex_agrees_with_oracle() {
    let mut p = LpProblem::new(vec![3.0, 2.0]);
    p.add(vec![1.0, 0.0], Relation::Le, 2.0);
    p.add(vec![0.0, 1.0], Relation::Le, 2.0);
    p.add(vec![1.0, 1.0], Relation::Le, 4.0);
    p.add(vec![2.0, 1.0], Relation::Le, 6.0);
    let a = solve(&p).unwrap();
    let b = brute_force_oracle(&p).unwrap();
    assert_eq!(a.status, LpStatus::Optimal);
    assert!((a.objective_value - 10.0).abs() < 1e-9);
    assert!((a.objective_value - b.objective_value).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Scaling the objective by a positive factor leaves the argmax optimal
    /// and scales the optimum by the same factor.
    #[test]
    fn positive_objective_scaling(seed in any::<u64>(), factor in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng);
        let base = solve(&p).unwrap();
        prop_assume!(base.is_optimal());
        let mut scaled = p.clone();
        scaled.objective.iter_mut().for_each(|c| *c *= factor);
        let s = solve(&scaled).unwrap();
        prop_assert_eq!(s.status, LpStatus::Optimal);
        let tol = 1e-6 * (1.0 + s.objective_value.abs());
        prop_assert!((s.objective_value - factor * base.objective_value).abs() <= tol);
        prop_assert!((scaled.objective_at(&base.x) - s.objective_value).abs() <= tol);
    }
}
