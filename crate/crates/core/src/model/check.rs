use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::instance::{Instance, LevelId, NodeId};
use super::solution::{Route, Solution};
use super::timing::{simulate_route, RouteTiming};
use super::{validate_route_structure, StructureProblem};

/// Absolute slack allowed on time and load comparisons.
pub const TOLERANCE: f64 = 1e-9;

/// Constraint families of the routing model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintFamily {
    /// Route demand within vehicle capacity.
    Capacity,
    /// Every customer served exactly once.
    Assignment,
    /// Depot-to-depot paths, at most one per vehicle.
    Routing,
    /// Service start inside `[a_i, b_i]`.
    TimeWindow,
    /// Service start no earlier than predecessor departure plus travel.
    Timing,
    /// Inflow minus outflow of load equals the customer demand.
    FlowBalance,
    /// Edge load within `[q_j, q_max - q_i]`.
    LoadBound,
    /// Each used edge runs at the level whose bracket holds its departure time.
    SpeedLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Structure { route: usize, problem: StructureProblem },
    FleetSize { routes: usize, fleet: usize },
    Capacity { route: usize, demand: f64, excess: f64 },
    /// Customer served `count` times (0 or more than 1).
    Assignment { customer: NodeId, count: usize },
    TooEarly { route: usize, node: NodeId, service_start: f64, excess: f64 },
    TooLate { route: usize, node: NodeId, service_start: f64, excess: f64 },
    Timing { route: usize, node: NodeId, earliest: f64, service_start: f64, excess: f64 },
    FlowBalance { route: usize, node: NodeId, imbalance: f64 },
    LoadBound { route: usize, from: NodeId, to: NodeId, load: f64, lower: f64, upper: f64, excess: f64 },
    SpeedLevel { route: usize, from: NodeId, to: NodeId, level: LevelId, departure: f64, expected: Option<LevelId> },
}

impl Violation {
    pub fn family(&self) -> ConstraintFamily {
        use ConstraintFamily as F;
        match self {
            Self::Structure { .. } | Self::FleetSize { .. } => F::Routing,
            Self::Capacity { .. } => F::Capacity,
            Self::Assignment { .. } => F::Assignment,
            Self::TooEarly { .. } | Self::TooLate { .. } => F::TimeWindow,
            Self::Timing { .. } => F::Timing,
            Self::FlowBalance { .. } => F::FlowBalance,
            Self::LoadBound { .. } => F::LoadBound,
            Self::SpeedLevel { .. } => F::SpeedLevel,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Structure { route, problem } => write!(f, "route {route}: {problem}"),
            Self::FleetSize { routes, fleet } => write!(f, "{routes} routes exceed fleet of {fleet}"),
            Self::Capacity { route, demand, excess } => {
                write!(f, "route {route}: demand {demand} exceeds capacity by {excess}")
            }
            Self::Assignment { customer, count } => write!(f, "customer {customer} served {count} times"),
            Self::TooEarly { route, node, service_start, excess } => {
                write!(f, "route {route}: node {node} served at {service_start}, {excess} h before window opens")
            }
            Self::TooLate { route, node, service_start, excess } => {
                write!(f, "route {route}: node {node} served at {service_start}, {excess} h after window closes")
            }
            Self::Timing { route, node, earliest, service_start, excess } => write!(
                f,
                "route {route}: node {node} served at {service_start} but cannot be reached before {earliest} ({excess} h short)"
            ),
            Self::FlowBalance { route, node, imbalance } => {
                write!(f, "route {route}: load balance at node {node} off by {imbalance}")
            }
            Self::LoadBound { route, from, to, load, lower, upper, excess } => write!(
                f,
                "route {route}: load {load} on edge {from}->{to} outside [{lower}, {upper}] by {excess}"
            ),
            Self::SpeedLevel { route, from, to, level, departure, expected } => {
                write!(f, "route {route}: edge {from}->{to} departs at {departure} on level {level}, ")?;
                match expected {
                    Some(e) => write!(f, "bracket requires level {e}"),
                    None => f.write_str("no speed bracket covers that time"),
                }
            }
        }
    }
}

/// Result of a feasibility check. Empty means feasible.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    /// Edges `(route, from, to)` whose arrival falls in a different bracket than
    /// their departure. Informational only.
    pub straddling: Vec<(usize, NodeId, NodeId)>,
}

impl ViolationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn families(&self) -> Vec<ConstraintFamily> {
        let mut families: Vec<_> = self.violations.iter().map(Violation::family).collect();
        families.sort();
        families.dedup();
        families
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            f.write_str("feasible")?;
        } else {
            write!(f, "{} violation(s)", self.violations.len())?;
            for v in &self.violations {
                write!(f, "\n  - {v}")?;
            }
        }
        for (route, from, to) in &self.straddling {
            write!(f, "\n  note: route {route} edge {from}->{to} crosses a speed bracket")?;
        }
        Ok(())
    }
}

/// Checks every constraint on the schedule implied by `depart_time`.
pub fn check_feasibility(inst: &Instance, sol: &Solution, depart_time: f64) -> ViolationReport {
    check_solution(inst, sol, |_, route| simulate_route(inst, route, depart_time))
}

/// Checks a solution against explicitly supplied schedules, one per route.
///
/// Unlike [`check_feasibility`] the timing and loads are taken as given, so
/// timing consistency and flow balance are checked as well.
pub fn check_with_timing(inst: &Instance, sol: &Solution, timings: &[RouteTiming]) -> ViolationReport {
    check_solution(inst, sol, |idx, _| timings.get(idx).cloned().unwrap_or_default())
}

fn check_solution(
    inst: &Instance,
    sol: &Solution,
    mut timing_of: impl FnMut(usize, &Route) -> RouteTiming,
) -> ViolationReport {
    let mut report = ViolationReport::default();
    if sol.routes.len() > inst.fleet_size {
        report.violations.push(Violation::FleetSize { routes: sol.routes.len(), fleet: inst.fleet_size });
    }
    let mut served = vec![0usize; inst.nodes.len()];
    for (idx, route) in sol.routes.iter().enumerate() {
        if let Err(problem) = validate_route_structure(inst, route) {
            report.violations.push(Violation::Structure { route: idx, problem });
            continue;
        }
        for c in route.customers() {
            served[c] += 1;
        }
        let timing = timing_of(idx, route);
        check_route_into(inst, idx, route, &timing, &mut report);
    }
    for c in inst.customers() {
        if served[c] != 1 {
            report.violations.push(Violation::Assignment { customer: c, count: served[c] });
        }
    }
    report
}

/// Route-local checks (capacity, windows, timing, loads, speed levels) on a
/// structurally valid route, against its simulated schedule.
pub fn check_route(inst: &Instance, idx: usize, route: &Route, depart_time: f64) -> ViolationReport {
    let mut report = ViolationReport::default();
    match validate_route_structure(inst, route) {
        Ok(()) => check_route_into(inst, idx, route, &simulate_route(inst, route, depart_time), &mut report),
        Err(problem) => report.violations.push(Violation::Structure { route: idx, problem }),
    }
    report
}

fn check_route_into(inst: &Instance, idx: usize, route: &Route, timing: &RouteTiming, report: &mut ViolationReport) {
    let out = &mut report.violations;
    if timing.visits.len() != route.visits.len() || timing.loads.len() + 1 != route.visits.len() {
        out.push(Violation::Structure { route: idx, problem: StructureProblem::ScheduleMismatch });
        return;
    }

    let demand = route.demand(inst);
    if demand > inst.capacity + TOLERANCE {
        out.push(Violation::Capacity { route: idx, demand, excess: demand - inst.capacity });
    }

    for (visit, t) in route.visits.iter().zip(&timing.visits) {
        let node = &inst.nodes[visit.node];
        if t.service_start < node.tw_open - TOLERANCE {
            out.push(Violation::TooEarly {
                route: idx,
                node: visit.node,
                service_start: t.service_start,
                excess: node.tw_open - t.service_start,
            });
        }
        if t.service_start > node.tw_close + TOLERANCE {
            out.push(Violation::TooLate {
                route: idx,
                node: visit.node,
                service_start: t.service_start,
                excess: t.service_start - node.tw_close,
            });
        }
    }

    for (e, (from, to)) in route.edges().enumerate() {
        let (tf, tt) = (&timing.visits[e], &timing.visits[e + 1]);
        let (nf, nt) = (&inst.nodes[from.node], &inst.nodes[to.node]);
        let d = inst.distance(from.node, to.node);

        // departure may be later than service end, but not earlier
        let ready = tf.service_start + nf.service;
        let leave = tf.departure.max(ready);
        let travel = inst.level(to.speed_level).map_or(f64::INFINITY, |l| d / l.avg);
        let earliest = leave + travel;
        if tt.service_start < earliest - TOLERANCE {
            out.push(Violation::Timing {
                route: idx,
                node: to.node,
                earliest,
                service_start: tt.service_start,
                excess: earliest - tt.service_start,
            });
        }

        let load = timing.loads[e];
        let (lower, upper) = (nt.demand, inst.capacity - nf.demand);
        let excess = (lower - load).max(load - upper);
        if excess > TOLERANCE {
            out.push(Violation::LoadBound { route: idx, from: from.node, to: to.node, load, lower, upper, excess });
        }

        let expected = inst.level_at(leave).map(|l| l.id);
        if expected != Some(to.speed_level) {
            out.push(Violation::SpeedLevel {
                route: idx,
                from: from.node,
                to: to.node,
                level: to.speed_level,
                departure: leave,
                expected,
            });
        }
        if e + 1 < timing.loads.len() {
            let imbalance = load - timing.loads[e + 1] - nt.demand;
            if libm::fabs(imbalance) > TOLERANCE {
                out.push(Violation::FlowBalance { route: idx, node: to.node, imbalance });
            }
        }
        if timing.straddles.get(e).copied().unwrap_or(false) {
            report.straddling.push((idx, from.node, to.node));
        }
    }
}
