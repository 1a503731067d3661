use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    assign_levels, check_feasibility, check_route, simulate_route, Instance, NodeId, Route, Solution, TOLERANCE,
};

/// Outcome of the construction heuristic.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialSolution {
    pub solution: Solution,
    pub feasible: bool,
    /// Repair moves applied while building the returned solution.
    pub repairs: usize,
    /// Permutations discarded before the returned one.
    pub restarts: usize,
}

fn leveled_route(inst: &Instance, customers: &[NodeId], depart_time: f64) -> Route {
    let mut route = Route::through(inst, customers, 1);
    assign_levels(inst, &mut route, depart_time);
    route
}

/// Customer position at which `customers` first fails on time: a late service
/// start, a departure outside every speed bracket, or a late return (blamed
/// on the last customer).
fn first_late(inst: &Instance, customers: &[NodeId], depart_time: f64) -> Option<usize> {
    let route = leveled_route(inst, customers, depart_time);
    let timing = simulate_route(inst, &route, depart_time);
    if inst.level_at(timing.visits[0].departure).is_none() {
        return Some(0);
    }
    for (p, t) in timing.visits[1..=customers.len()].iter().enumerate() {
        let late = t.service_start > inst.nodes[t.node].tw_close + TOLERANCE;
        if late || inst.level_at(t.departure).is_none() {
            return Some(p);
        }
    }
    let end = timing.visits.last().expect("route has an end depot");
    (end.service_start > inst.nodes[end.node].tw_close + TOLERANCE).then(|| customers.len().saturating_sub(1))
}

/// Applies the end/front repair rule up to `n` times. Returns the number of
/// repairs made.
fn repair(inst: &Instance, seq: &mut Vec<NodeId>, depart_time: f64) -> usize {
    let mut repairs = 0;
    for _ in 0..inst.n() {
        let Some(p) = first_late(inst, seq, depart_time) else { break };
        repair_step(seq, p);
        repairs += 1;
    }
    repairs
}

/// The late customer at `p` goes to the end, its successor to the front.
fn repair_step(seq: &mut Vec<NodeId>, p: usize) {
    let late = seq.remove(p);
    if p < seq.len() {
        let next = seq.remove(p);
        seq.insert(0, next);
    }
    seq.push(late);
}

/// Routes built from one permutation, with the number of repairs used.
fn build(inst: &Instance, perm: &[NodeId], depart_time: f64) -> (Solution, usize) {
    let mut chunks: VecDeque<Vec<NodeId>> = VecDeque::new();
    let mut load = 0.0;
    for &c in perm {
        let demand = inst.nodes[c].demand;
        match chunks.back_mut() {
            Some(chunk) if load + demand <= inst.capacity + TOLERANCE => chunk.push(c),
            _ => {
                chunks.push_back(alloc::vec![c]);
                load = 0.0;
            }
        }
        load += demand;
    }
    let mut repairs = 0;
    let mut seqs = Vec::new();
    while let Some(mut seq) = chunks.pop_front() {
        repairs += repair(inst, &mut seq, depart_time);
        // split off whatever the repair rule could not fix
        while let Some(p) = first_late(inst, &seq, depart_time).filter(|&p| p > 0) {
            chunks.push_front(seq.split_off(p));
        }
        seqs.push(seq);
    }
    if seqs.len() > inst.fleet_size {
        eliminate_routes(inst, &mut seqs, depart_time);
    }
    let routes = seqs.iter().map(|seq| leveled_route(inst, seq, depart_time)).collect();
    (Solution::new(routes), repairs)
}

fn route_ok(inst: &Instance, seq: &[NodeId], depart_time: f64) -> bool {
    check_route(inst, 0, &leveled_route(inst, seq, depart_time), depart_time).is_feasible()
}

/// Dissolves the shortest routes while the fleet is exceeded, inserting their
/// customers one by one at the first feasible position of another route.
fn eliminate_routes(inst: &Instance, seqs: &mut Vec<Vec<NodeId>>, depart_time: f64) {
    let mut order: Vec<usize> = (0..seqs.len()).collect();
    order.sort_by_key(|&r| seqs[r].len());
    let mut dissolved = Vec::new();
    for victim in order {
        if seqs.len() - dissolved.len() <= inst.fleet_size {
            break;
        }
        let mut trial = seqs.clone();
        let moved = core::mem::take(&mut trial[victim]);
        let placed = moved.iter().all(|&c| {
            (0..trial.len()).filter(|&r| r != victim && !dissolved.contains(&r)).any(|r| {
                (0..=trial[r].len()).any(|pos| {
                    trial[r].insert(pos, c);
                    if route_ok(inst, &trial[r], depart_time) {
                        true
                    } else {
                        trial[r].remove(pos);
                        false
                    }
                })
            })
        });
        if placed {
            *seqs = trial;
            dissolved.push(victim);
        }
    }
    seqs.retain(|s| !s.is_empty());
}

/// Random permutation, capacity split, per-route window repair, then route
/// elimination if the fleet is exceeded. Tries up to
/// `attempts` permutations and returns the first feasible result, or the one
/// with the fewest violations.
pub fn initial_solution<R: Rng + ?Sized>(
    inst: &Instance,
    attempts: usize,
    depart_time: f64,
    rng: &mut R,
) -> InitialSolution {
    let mut perm: Vec<NodeId> = inst.customers().collect();
    let mut best: Option<(usize, InitialSolution)> = None;
    for restarts in 0..attempts.max(1) {
        perm.shuffle(rng);
        let (solution, repairs) = build(inst, &perm, depart_time);
        let violations = check_feasibility(inst, &solution, depart_time).violations.len();
        let candidate = InitialSolution { solution, feasible: violations == 0, repairs, restarts };
        if violations == 0 {
            return candidate;
        }
        if best.as_ref().is_none_or(|(v, _)| violations < *v) {
            best = Some((violations, candidate));
        }
    }
    let (_, mut best) = best.expect("at least one permutation is tried");
    best.restarts = attempts.max(1) - 1;
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testing::line;
    use crate::model::{evaluate, SpeedLevel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn unconstrained_windows_keep_the_permutation() {
        let mut inst = line(&[1.0; 6]);
        for node in &mut inst.nodes {
            node.tw_open = 0.0;
            node.tw_close = f64::INFINITY;
        }
        inst.speed_levels =
            vec![SpeedLevel { id: 1, lower: 40.0, avg: 60.0, upper: 60.0, bracket_start: 0.0, bracket_end: f64::INFINITY }];
        let init = initial_solution(&inst, 10, 0.0, &mut rng(5));
        let mut shuffled: Vec<NodeId> = inst.customers().collect();
        shuffled.shuffle(&mut rng(5));
        assert!(init.feasible);
        assert_eq!((init.repairs, init.restarts), (0, 0));
        assert_eq!(init.solution.customer_sequences(), [shuffled]);
    }

    #[test]
    fn one_customer_is_forced() {
        let inst = line(&[1.0]);
        let init = initial_solution(&inst, 51, 0.0, &mut rng(0));
        assert!(init.feasible);
        assert_eq!(init.solution.customer_sequences(), [vec![1]]);
    }

    #[test]
    fn capacity_split_respects_capacity() {
        let inst = line(&[4.0, 4.0, 4.0, 4.0]);
        let init = initial_solution(&inst, 54, 0.0, &mut rng(2));
        assert!(init.feasible);
        for r in &init.solution.routes {
            assert!(r.demand(&inst) <= inst.capacity);
        }
    }

    /// Every ordering of the customers into a single route that is feasible.
    fn feasible_orders(inst: &Instance) -> Vec<Vec<NodeId>> {
        let mut out = Vec::new();
        let c: Vec<NodeId> = inst.customers().collect();
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    if a == b || b == d || a == d {
                        continue;
                    }
                    let seq = vec![c[a], c[b], c[d]];
                    let sol = Solution::new(vec![leveled_route(inst, &seq, 0.0)]);
                    if check_feasibility(inst, &sol, 0.0).is_feasible() {
                        out.push(seq);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn repair_moves_an_unreachable_customer_forward() {
        // customer 1 must be served first; customer 3 closes early too
        let mut inst = line(&[1.0, 1.0, 1.0]);
        inst.fleet_size = 1;
        inst.nodes[1].tw_close = 0.2;
        inst.nodes[3].tw_close = 1.1;
        let oracle = feasible_orders(&inst);
        assert!(!oracle.is_empty());
        for seed in 0..30 {
            let init = initial_solution(&inst, 53, 0.0, &mut rng(seed));
            assert!(init.feasible, "seed {seed}");
            let seq = &init.solution.customer_sequences()[0];
            assert!(oracle.contains(seq), "seed {seed}: {seq:?} not in {oracle:?}");
            assert!(evaluate(&inst, &init.solution).is_ok());
        }
    }

    #[test]
    fn repair_step_moves_late_customer_to_end_and_successor_to_front() {
        let mut seq = vec![2, 1, 3, 4];
        repair_step(&mut seq, 1);
        assert_eq!(seq, [3, 2, 4, 1]);
        let mut seq = vec![2, 1, 3];
        repair_step(&mut seq, 2);
        assert_eq!(seq, [2, 1, 3]);
    }

    #[test]
    fn late_position_is_detected() {
        let mut inst = line(&[1.0, 1.0, 1.0]);
        inst.nodes[1].tw_close = 0.2;
        assert_eq!(first_late(&inst, &[2, 1, 3], 0.0), Some(1));
        assert_eq!(first_late(&inst, &[1, 2, 3], 0.0), None);
    }

    #[test]
    fn infeasible_instance_is_flagged() {
        let mut inst = line(&[1.0, 1.0]);
        inst.nodes[2].tw_close = 0.01;
        let init = initial_solution(&inst, 5, 0.0, &mut rng(1));
        assert!(!init.feasible);
        assert_eq!(init.restarts, 4);
        assert_eq!(init.solution.customer_count(), 2);
    }
}
