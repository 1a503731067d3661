//! Brute force over every set of customer sequences, no pruning.

use greenroute_core::model::{assign_levels, check_feasibility, evaluate, Instance, NodeId, Route, Solution};

pub struct Best {
    pub total: f64,
    pub solution: Solution,
}

fn to_solution(inst: &Instance, seqs: &[Vec<NodeId>], depart: f64) -> Solution {
    Solution::new(
        seqs.iter()
            .map(|s| {
                let mut r = Route::through(inst, s, 1);
                assign_levels(inst, &mut r, depart);
                r
            })
            .collect(),
    )
}

/// Calls `visit` once for every way to arrange customers `1..=n` into at most
/// `fleet` non-empty ordered routes.
pub fn for_each_plan(n: usize, fleet: usize, visit: &mut dyn FnMut(&[Vec<NodeId>])) {
    fn place(c: usize, n: usize, fleet: usize, seqs: &mut Vec<Vec<NodeId>>, visit: &mut dyn FnMut(&[Vec<NodeId>])) {
        if c > n {
            visit(seqs);
            return;
        }
        for r in 0..seqs.len() {
            for pos in 0..=seqs[r].len() {
                seqs[r].insert(pos, c);
                place(c + 1, n, fleet, seqs, visit);
                seqs[r].remove(pos);
            }
        }
        if seqs.len() < fleet {
            seqs.push(vec![c]);
            place(c + 1, n, fleet, seqs, visit);
            seqs.pop();
        }
    }
    place(1, n, fleet, &mut Vec::new(), visit);
}

/// Cheapest feasible plan, or `None` if there is none.
pub fn solve(inst: &Instance, depart: f64) -> Option<Best> {
    let mut best: Option<Best> = None;
    for_each_plan(inst.n(), inst.fleet_size, &mut |seqs| {
        let sol = to_solution(inst, seqs, depart);
        if !check_feasibility(inst, &sol, depart).is_feasible() {
            return;
        }
        let total = evaluate(inst, &sol).unwrap().total;
        if best.as_ref().is_none_or(|b| total < b.total) {
            best = Some(Best { total, solution: sol });
        }
    });
    best
}
