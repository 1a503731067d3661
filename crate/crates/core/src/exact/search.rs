use alloc::vec::Vec;

use crate::model::{assign_levels, evaluate, Instance, NodeId, ObjectiveBreakdown, Route, Solution, TOLERANCE};

/// Interrupts a search. Polled every few thousand nodes.
pub trait SearchBudget {
    fn exhausted(&mut self, nodes_explored: u64) -> bool;
}

/// Never interrupts.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unlimited;

impl SearchBudget for Unlimited {
    fn exhausted(&mut self, _: u64) -> bool {
        false
    }
}

/// Stops after a fixed number of search nodes.
#[derive(Debug, Clone, Copy)]
pub struct NodeLimit(pub u64);

impl SearchBudget for NodeLimit {
    fn exhausted(&mut self, nodes_explored: u64) -> bool {
        nodes_explored >= self.0
    }
}

impl<F: FnMut(u64) -> bool> SearchBudget for F {
    fn exhausted(&mut self, nodes_explored: u64) -> bool {
        self(nodes_explored)
    }
}

const POLL_INTERVAL: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactStatus {
    /// Complete search; the solution is optimal.
    Optimal,
    /// Budget ran out with a feasible incumbent in hand.
    Incumbent,
    /// Complete search found no feasible solution.
    Infeasible,
    /// Budget ran out before any feasible solution was found.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub status: ExactStatus,
    pub solution: Option<Solution>,
    pub optimum: Option<ObjectiveBreakdown>,
    pub nodes_explored: u64,
    /// The search ran to completion.
    pub proven: bool,
}

/// Partial route under construction.
#[derive(Debug, Clone, Copy)]
struct Frontier {
    last: NodeId,
    load: f64,
    /// Departure time from `last`.
    time: f64,
    /// Sum of `unit * alpha * d` over the route so far; a customer's payload
    /// cost is its demand times this prefix at its arrival.
    prefix: f64,
    len: usize,
    /// Smallest customer unvisited when the route was opened. Every route must
    /// contain its own such customer, which fixes one route order.
    anchor: NodeId,
}

struct Search<'a, B: ?Sized> {
    inst: &'a Instance,
    budget: &'a mut B,
    depart_time: f64,
    order: Vec<NodeId>,
    visited: Vec<bool>,
    routes: Vec<Vec<NodeId>>,
    remaining: usize,
    remaining_demand: f64,
    /// Lower bound on the cost of entering each customer.
    entry_bound: Vec<f64>,
    /// Sum of `entry_bound` over unvisited customers.
    open_bound: f64,
    /// Lower bound on a closing edge.
    close_bound: f64,
    best: Option<(f64, Vec<Vec<NodeId>>)>,
    nodes: u64,
    aborted: bool,
}

/// Travel and per-edge cost terms that do not depend on load.
struct Leg {
    arrival: f64,
    fixed: f64,
    haul: f64,
}

impl<'a, B: SearchBudget + ?Sized> Search<'a, B> {
    fn leg(&self, from: NodeId, to: NodeId, time: f64) -> Option<Leg> {
        let inst = self.inst;
        let level = inst.level_at(time)?;
        let d = inst.distance(from, to);
        let unit = inst.unit_cost();
        let haul = unit * inst.alpha.get(from, to) * d;
        let fixed = haul * inst.vehicle_weight + unit * d * inst.beta * level.avg * level.avg;
        Some(Leg { arrival: time + d / level.avg, fixed, haul })
    }

    fn pruned(&self, cost: f64) -> bool {
        self.best.as_ref().is_some_and(|(best, _)| cost >= *best)
    }

    fn open_route(&mut self, cost: f64) {
        let used = self.routes.len();
        if used >= self.inst.fleet_size {
            return;
        }
        let spare = (self.inst.fleet_size - used) as f64 * self.inst.capacity;
        if self.remaining_demand > spare + TOLERANCE {
            return;
        }
        let anchor = self.order.iter().copied().filter(|&c| !self.visited[c]).min().expect("customers remain");
        let start = self.inst.start_depot();
        let time = self.depart_time + self.inst.nodes[start].service;
        self.routes.push(Vec::new());
        self.extend(cost, Frontier { last: start, load: 0.0, time, prefix: 0.0, len: 0, anchor });
        self.routes.pop();
    }

    fn extend(&mut self, cost: f64, at: Frontier) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(POLL_INTERVAL) && self.budget.exhausted(self.nodes) {
            self.aborted = true;
        }
        if self.aborted || self.inst.level_at(at.time).is_none() {
            return;
        }
        for idx in 0..self.order.len() {
            let c = self.order[idx];
            if self.visited[c] {
                continue;
            }
            let node = &self.inst.nodes[c];
            if at.load + node.demand > self.inst.capacity + TOLERANCE {
                continue;
            }
            let Some(leg) = self.leg(at.last, c, at.time) else { return };
            if leg.arrival > node.tw_close + TOLERANCE {
                continue;
            }
            let prefix = at.prefix + leg.haul;
            let next_cost = cost + leg.fixed + node.demand * prefix;
            let bound = self.open_bound - self.entry_bound[c] + self.close_bound;
            if self.pruned(next_cost + bound) {
                continue;
            }
            let departure = leg.arrival.max(node.tw_open) + node.service;
            self.visit(c, true);
            self.routes.last_mut().expect("a route is open").push(c);
            let next = Frontier { last: c, load: at.load + node.demand, time: departure, prefix, len: at.len + 1, ..at };
            self.extend(next_cost, next);
            self.routes.last_mut().expect("a route is open").pop();
            self.visit(c, false);
            if self.aborted {
                return;
            }
        }
        if at.len > 0 && self.visited[at.anchor] {
            self.close(cost, at);
        }
    }

    fn close(&mut self, cost: f64, at: Frontier) {
        let end = self.inst.end_depot();
        let Some(leg) = self.leg(at.last, end, at.time) else { return };
        if leg.arrival > self.inst.nodes[end].tw_close + TOLERANCE {
            return;
        }
        let cost = cost + leg.fixed;
        if self.remaining == 0 {
            if !self.pruned(cost) {
                self.best = Some((cost, self.routes.clone()));
            }
        } else if !self.pruned(cost + self.open_bound + self.close_bound) {
            self.open_route(cost);
        }
    }

    fn visit(&mut self, c: NodeId, on: bool) {
        self.visited[c] = on;
        let demand = self.inst.nodes[c].demand;
        if on {
            self.remaining -= 1;
            self.remaining_demand -= demand;
            self.open_bound -= self.entry_bound[c];
        } else {
            self.remaining += 1;
            self.remaining_demand += demand;
            self.open_bound += self.entry_bound[c];
        }
    }
}

/// Cheapest conceivable cost of an edge `(i, j)`: slowest average speed and,
/// for the payload term, the demand of `j` alone.
fn edge_bound(inst: &Instance, i: NodeId, j: NodeId, min_sq_speed: f64) -> f64 {
    let unit = inst.unit_cost();
    let d = inst.distance(i, j);
    let haul = unit * inst.alpha.get(i, j) * d;
    haul * (inst.vehicle_weight + inst.nodes[j].demand) + unit * d * inst.beta * min_sq_speed
}

/// Depth-first branch and bound over ordered partitions of the customers.
///
/// Routes are built one at a time. Branches are cut on capacity, on a missed
/// time window, on the fleet limit and when the partial cost plus a bound on
/// the remaining entries reaches the incumbent. Speed levels follow the
/// departure brackets, as in the checker. Customers are tried in order of
/// closing time.
pub fn solve_exact<B: SearchBudget + ?Sized>(inst: &Instance, depart_time: f64, budget: &mut B) -> ExactResult {
    let n = inst.n();
    let dim = inst.nodes.len();
    let min_sq_speed = inst.speed_levels.iter().map(|l| l.avg * l.avg).fold(f64::INFINITY, f64::min);
    let entry_bound: Vec<f64> = (0..dim)
        .map(|j| {
            if inst.is_depot(j) {
                return 0.0;
            }
            core::iter::once(inst.start_depot())
                .chain(inst.customers())
                .filter(|&i| i != j)
                .map(|i| edge_bound(inst, i, j, min_sq_speed))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let end = inst.end_depot();
    let close_bound = inst.customers().map(|i| edge_bound(inst, i, end, min_sq_speed)).fold(f64::INFINITY, f64::min);
    let mut order: Vec<NodeId> = inst.customers().collect();
    order.sort_by(|&a, &b| inst.nodes[a].tw_close.total_cmp(&inst.nodes[b].tw_close).then(a.cmp(&b)));

    let mut search = Search {
        inst,
        budget,
        depart_time,
        order,
        visited: alloc::vec![false; dim],
        routes: Vec::new(),
        remaining: n,
        remaining_demand: inst.total_demand(),
        open_bound: entry_bound.iter().sum(),
        entry_bound,
        close_bound: if n == 0 { 0.0 } else { close_bound },
        best: None,
        nodes: 0,
        aborted: false,
    };
    if n == 0 {
        search.best = Some((0.0, Vec::new()));
    } else {
        search.open_route(0.0);
    }

    let proven = !search.aborted;
    let nodes_explored = search.nodes;
    let solution = search.best.map(|(_, seqs)| {
        Solution::new(
            seqs.iter()
                .map(|seq| {
                    let mut route = Route::through(inst, seq, 1);
                    assign_levels(inst, &mut route, depart_time);
                    route
                })
                .collect(),
        )
    });
    let optimum = solution.as_ref().map(|s| evaluate(inst, s).expect("search builds well-formed routes"));
    let status = match (&solution, proven) {
        (Some(_), true) => ExactStatus::Optimal,
        (Some(_), false) => ExactStatus::Incumbent,
        (None, true) => ExactStatus::Infeasible,
        (None, false) => ExactStatus::Unknown,
    };
    ExactResult { status, solution, optimum, nodes_explored, proven }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_feasibility;
    use crate::model::testing::{line, single_customer};

    #[test]
    fn one_customer_is_forced() {
        let inst = single_customer();
        let res = solve_exact(&inst, 0.0, &mut Unlimited);
        assert_eq!(res.status, ExactStatus::Optimal);
        assert_eq!(res.solution.as_ref().unwrap().customer_sequences(), [vec![1]]);
        assert_eq!(res.optimum.unwrap().total, 74.5);
    }

    #[test]
    fn three_customers_one_vehicle_matches_all_orders() {
        let mut inst = line(&[1.0, 2.0, 3.0]);
        inst.fleet_size = 1;
        // off-line positions so orders differ in cost
        inst.distances.set(1, 3, 5.0);
        inst.distances.set(3, 1, 5.0);
        let perms = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
        let brute = perms
            .iter()
            .map(|p| {
                let mut route = Route::through(&inst, p, 1);
                assign_levels(&inst, &mut route, 0.0);
                evaluate(&inst, &Solution::new(vec![route])).unwrap().total
            })
            .fold(f64::INFINITY, f64::min);
        let res = solve_exact(&inst, 0.0, &mut Unlimited);
        assert!(res.proven);
        assert_eq!(res.optimum.unwrap().total, brute);
    }

    #[test]
    fn infeasible_instance_is_reported() {
        let mut inst = line(&[1.0, 1.0]);
        inst.nodes[2].tw_close = 0.01;
        let res = solve_exact(&inst, 0.0, &mut Unlimited);
        assert_eq!(res.status, ExactStatus::Infeasible);
        assert!(res.proven && res.solution.is_none());
    }

    #[test]
    fn fleet_limit_is_respected() {
        let mut inst = line(&[6.0, 6.0, 6.0]);
        inst.fleet_size = 2;
        assert_eq!(solve_exact(&inst, 0.0, &mut Unlimited).status, ExactStatus::Infeasible);
        inst.fleet_size = 3;
        let res = solve_exact(&inst, 0.0, &mut Unlimited);
        assert_eq!(res.solution.unwrap().routes.len(), 3);
    }

    #[test]
    fn node_budget_leaves_result_unproven() {
        let inst = line(&[1.0; 9]);
        let res = solve_exact(&inst, 0.0, &mut NodeLimit(POLL_INTERVAL));
        assert!(!res.proven);
        assert!(matches!(res.status, ExactStatus::Incumbent | ExactStatus::Unknown));
        if let Some(sol) = &res.solution {
            assert!(check_feasibility(&inst, sol, 0.0).is_feasible());
        }
    }

    #[test]
    fn optimum_is_feasible() {
        let inst = line(&[3.0, 4.0, 2.0, 5.0, 1.0]);
        let res = solve_exact(&inst, 0.0, &mut Unlimited);
        assert_eq!(res.status, ExactStatus::Optimal);
        assert!(check_feasibility(&inst, res.solution.as_ref().unwrap(), 0.0).is_feasible());
    }
}
