//! Problem data, the fuel/emission objective, route timing under
//! time-of-day speed brackets, and the constraint checker.
//!
//! Time is in hours, distance in km, speed in km/h. Loads and money are
//! abstract units.

mod check;
mod cost;
mod instance;
mod solution;
mod timing;

use core::fmt;

pub use check::{
    check_feasibility, check_route, check_with_timing, ConstraintFamily, Violation, ViolationReport, TOLERANCE,
};
pub use cost::{edge_cost, evaluate, route_cost, ObjectiveBreakdown};
pub use instance::{Instance, LevelId, Matrix, Node, NodeId, SpeedLevel};
pub use solution::{Route, Solution, Visit};
pub use timing::{assign_levels, simulate_route, RouteTiming, VisitTiming};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid instance: {reason}{}", at_suffix(.index))]
    InvalidInstance { reason: &'static str, index: Option<usize> },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown speed level {0}")]
    UnknownLevel(LevelId),
    #[error("edge from node {0} to itself")]
    SelfLoop(NodeId),
    #[error("route {route}: {problem}")]
    Malformed { route: usize, problem: StructureProblem },
}

impl ModelError {
    pub(crate) fn invalid(reason: &'static str) -> Self {
        Self::InvalidInstance { reason, index: None }
    }

    pub(crate) fn invalid_at(reason: &'static str, index: usize) -> Self {
        Self::InvalidInstance { reason, index: Some(index) }
    }
}

struct AtSuffix(Option<usize>);

impl fmt::Display for AtSuffix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(i) => write!(f, " (entry {i})"),
            None => Ok(()),
        }
    }
}

fn at_suffix(index: &Option<usize>) -> AtSuffix {
    AtSuffix(*index)
}

/// Why a route is not a depot-to-depot path over known nodes and levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StructureProblem {
    #[error("route has fewer than two visits")]
    TooShort,
    #[error("route does not start at the start depot")]
    MissingStartDepot,
    #[error("route does not end at the end depot")]
    MissingEndDepot,
    #[error("depot visited mid-route at position {position}")]
    DepotMidRoute { position: usize },
    #[error("unknown node {node} at position {position}")]
    UnknownNode { position: usize, node: NodeId },
    #[error("unknown speed level {level} at position {position}")]
    UnknownLevel { position: usize, level: LevelId },
    #[error("schedule does not match the route's visits")]
    ScheduleMismatch,
}

pub(crate) fn validate_route_structure(inst: &Instance, route: &Route) -> Result<(), StructureProblem> {
    let visits = &route.visits;
    if visits.len() < 2 {
        return Err(StructureProblem::TooShort);
    }
    let end = inst.end_depot();
    for (position, v) in visits.iter().enumerate() {
        if v.node > end {
            return Err(StructureProblem::UnknownNode { position, node: v.node });
        }
        // the start depot's level is never used for travel
        if position > 0 && inst.level(v.speed_level).is_none() {
            return Err(StructureProblem::UnknownLevel { position, level: v.speed_level });
        }
    }
    if visits[0].node != inst.start_depot() {
        return Err(StructureProblem::MissingStartDepot);
    }
    if visits[visits.len() - 1].node != end {
        return Err(StructureProblem::MissingEndDepot);
    }
    let last = visits.len() - 1;
    if let Some(position) = (1..last).find(|&p| inst.is_depot(visits[p].node)) {
        return Err(StructureProblem::DepotMidRoute { position });
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod testing {
    use alloc::vec::Vec;

    use super::*;

    /// One customer 100 km from the depot: alpha 0.001, w 10, q 5, beta 1e-4,
    /// one 60 km/h level, unit cost 1.
    pub fn single_customer() -> Instance {
        let nodes = alloc::vec![
            Node::depot(0, 0.0, 0.0, 0.0, 24.0),
            Node { id: 1, x: 100.0, y: 0.0, demand: 5.0, service: 0.5, tw_open: 0.0, tw_close: 24.0 },
            Node::depot(2, 0.0, 0.0, 0.0, 24.0),
        ];
        let distances = Matrix::euclidean(&nodes);
        Instance {
            nodes,
            distances,
            fleet_size: 1,
            vehicle_weight: 10.0,
            capacity: 10.0,
            fuel_cost: 1.0,
            emission_cost: 0.0,
            alpha: Matrix::broadcast(3, 0.001),
            beta: 0.0001,
            speed_levels: alloc::vec![SpeedLevel {
                id: 1,
                lower: 40.0,
                avg: 60.0,
                upper: 60.0,
                bracket_start: 0.0,
                bracket_end: 24.0
            }],
            emission_params: (1.0, 0.0),
        }
    }

    /// Customers every 10 km along the x axis with the given demands; two
    /// levels (60 km/h before hour 8, 50 km/h until hour 16).
    pub fn line(demands: &[f64]) -> Instance {
        let n = demands.len();
        let mut nodes: Vec<Node> = Vec::with_capacity(n + 2);
        nodes.push(Node::depot(0, 0.0, 0.0, 0.0, 16.0));
        for (k, &demand) in demands.iter().enumerate() {
            let id = k + 1;
            nodes.push(Node { id, x: 10.0 * id as f64, y: 0.0, demand, service: 0.25, tw_open: 0.0, tw_close: 16.0 });
        }
        nodes.push(Node::depot(n + 1, 0.0, 0.0, 0.0, 16.0));
        let distances = Matrix::euclidean(&nodes);
        Instance {
            nodes,
            distances,
            fleet_size: n.max(1),
            vehicle_weight: 10.0,
            capacity: 10.0,
            fuel_cost: 1.0,
            emission_cost: 1.0,
            alpha: Matrix::broadcast(n + 2, 1.0),
            beta: 0.01,
            speed_levels: two_levels(),
            emission_params: (1.0, 0.0),
        }
    }

    pub fn two_levels() -> Vec<SpeedLevel> {
        alloc::vec![
            SpeedLevel { id: 1, lower: 40.0, avg: 60.0, upper: 60.0, bracket_start: 0.0, bracket_end: 8.0 },
            SpeedLevel { id: 2, lower: 30.0, avg: 50.0, upper: 50.0, bracket_start: 8.0, bracket_end: 16.0 },
        ]
    }
}
