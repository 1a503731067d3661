mod common;

use common::naive;
use greenroute_core::exact::{solve_exact, ExactStatus, Unlimited};
use greenroute_core::model::check_feasibility;

#[test]
fn plan_count_matches_lah_numbers() {
    // Lah numbers L(4, k) for k = 1..=4
    let mut count = 0;
    naive::for_each_plan(4, 4, &mut |_| count += 1);
    assert_eq!(count, 24 + 36 + 12 + 1);
    let mut single = 0;
    naive::for_each_plan(4, 1, &mut |_| single += 1);
    assert_eq!(single, 24);
}

#[test]
fn five_customers_match_full_enumeration() {
    for (seed, inst) in common::instances(5, 100, 8, None) {
        let res = solve_exact(&inst, 0.0, &mut Unlimited);
        match naive::solve(&inst, 0.0) {
            Some(best) => {
                assert_eq!(res.status, ExactStatus::Optimal, "seed {seed}");
                assert_eq!(res.optimum.unwrap().total, best.total, "seed {seed}");
                assert!(check_feasibility(&inst, res.solution.as_ref().unwrap(), 0.0).is_feasible());
            }
            None => assert_eq!(res.status, ExactStatus::Infeasible, "seed {seed}"),
        }
    }
}

#[test]
fn tight_fleet_matches_full_enumeration() {
    for (seed, inst) in common::instances(6, 7, 4, Some(2)) {
        let res = solve_exact(&inst, 0.0, &mut Unlimited);
        let best = naive::solve(&inst, 0.0);
        assert_eq!(res.optimum.map(|o| o.total), best.map(|b| b.total), "seed {seed}");
    }
}
