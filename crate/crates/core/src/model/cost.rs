use core::ops::{Add, AddAssign};

use super::instance::{Instance, LevelId, NodeId};
use super::solution::{Route, Solution};
use super::{validate_route_structure, ModelError};

/// The three objective sums plus the derived fuel proxy and emission.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ObjectiveBreakdown {
    /// Cost of hauling the empty vehicle.
    pub tare: f64,
    /// Cost of hauling the payload.
    pub payload: f64,
    /// Cost of the squared-speed term.
    pub speed: f64,
    /// `tare + payload + speed`.
    pub total: f64,
    /// Fuel proxy `alpha * (w + f) * d + beta * v^2 * d`, summed.
    pub fuel: f64,
    /// Emission `delta1 * fuel + delta2` per non-empty route, summed.
    pub emission: f64,
}

impl ObjectiveBreakdown {
    fn from_terms(tare: f64, payload: f64, speed: f64, fuel: f64, emission: f64) -> Self {
        Self { tare, payload, speed, total: tare + payload + speed, fuel, emission }
    }
}

impl Add for ObjectiveBreakdown {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::from_terms(
            self.tare + rhs.tare,
            self.payload + rhs.payload,
            self.speed + rhs.speed,
            self.fuel + rhs.fuel,
            self.emission + rhs.emission,
        )
    }
}

impl AddAssign for ObjectiveBreakdown {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl core::iter::Sum for ObjectiveBreakdown {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

/// Cost of traversing `(i, j)` carrying `load` at speed level `level`.
///
/// The emission field carries only the slope part `delta1 * F`; the intercept is
/// charged once per route by [`route_cost`].
pub fn edge_cost(
    inst: &Instance,
    i: NodeId,
    j: NodeId,
    load: f64,
    level: LevelId,
) -> Result<ObjectiveBreakdown, ModelError> {
    let dim = inst.nodes.len();
    for node in [i, j] {
        if node >= dim {
            return Err(ModelError::UnknownNode(node));
        }
    }
    if i == j {
        return Err(ModelError::SelfLoop(i));
    }
    let avg = inst.level(level).ok_or(ModelError::UnknownLevel(level))?.avg;
    Ok(edge_cost_unchecked(inst, i, j, load, avg))
}

#[inline]
pub(crate) fn edge_cost_unchecked(inst: &Instance, i: NodeId, j: NodeId, load: f64, avg: f64) -> ObjectiveBreakdown {
    let unit = inst.unit_cost();
    let d = inst.distance(i, j);
    let alpha = inst.alpha.get(i, j);
    let tare = unit * alpha * d * inst.vehicle_weight;
    let payload = unit * alpha * load * d;
    let speed = unit * d * inst.beta * (avg * avg);
    let fuel = alpha * (inst.vehicle_weight + load) * d + inst.beta * (avg * avg) * d;
    ObjectiveBreakdown::from_terms(tare, payload, speed, fuel, inst.emission_params.0 * fuel)
}

/// Objective contribution of one route. Loads are the downstream demand sums.
///
/// The route must be structurally valid (known nodes and levels).
pub fn route_cost(inst: &Instance, route: &Route) -> ObjectiveBreakdown {
    // walk backwards so each edge load is an exact suffix sum
    let mut load = 0.0;
    let mut acc = ObjectiveBreakdown::default();
    for w in route.visits.windows(2).rev() {
        let (from, to) = (w[0], w[1]);
        load += inst.nodes[to.node].demand;
        let avg = inst.level(to.speed_level).map_or(0.0, |l| l.avg);
        acc += edge_cost_unchecked(inst, from.node, to.node, load, avg);
    }
    if !route.is_empty() {
        acc.emission += inst.emission_params.1;
    }
    acc
}

/// Objective of a whole solution. Defined on infeasible solutions as well;
/// only structurally malformed routes are rejected.
pub fn evaluate(inst: &Instance, sol: &Solution) -> Result<ObjectiveBreakdown, ModelError> {
    sol.routes
        .iter()
        .enumerate()
        .map(|(idx, route)| {
            validate_route_structure(inst, route).map_err(|problem| ModelError::Malformed { route: idx, problem })?;
            Ok(route_cost(inst, route))
        })
        .sum()
}
