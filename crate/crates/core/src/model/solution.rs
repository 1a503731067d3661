use alloc::vec::Vec;

use super::instance::{Instance, LevelId, NodeId};

/// A stop on a route together with the speed level of the edge arriving at it.
///
/// For the start depot there is no arriving edge; its level mirrors the first
/// edge of the route (see [`Route::canonicalize`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Visit {
    pub node: NodeId,
    pub speed_level: LevelId,
}

impl Visit {
    pub fn new(node: NodeId, speed_level: LevelId) -> Self {
        Self { node, speed_level }
    }
}

/// One vehicle's path from the start depot to the end depot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Route {
    pub visits: Vec<Visit>,
}

impl Route {
    pub fn new(visits: Vec<Visit>) -> Self {
        let mut route = Self { visits };
        route.canonicalize();
        route
    }

    /// Route through `customers` in order, every edge on `level`.
    pub fn through(inst: &Instance, customers: &[NodeId], level: LevelId) -> Self {
        let mut visits = Vec::with_capacity(customers.len() + 2);
        visits.push(Visit::new(inst.start_depot(), level));
        visits.extend(customers.iter().map(|&c| Visit::new(c, level)));
        visits.push(Visit::new(inst.end_depot(), level));
        Self { visits }
    }

    /// Copies the first edge's level onto the start depot visit.
    pub fn canonicalize(&mut self) {
        if self.visits.len() >= 2 {
            self.visits[0].speed_level = self.visits[1].speed_level;
        }
    }

    /// Customer visits, i.e. everything between the two depot visits.
    pub fn customer_visits(&self) -> &[Visit] {
        match self.visits.len() {
            0..=2 => &[],
            len => &self.visits[1..len - 1],
        }
    }

    pub fn customers(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.customer_visits().iter().map(|v| v.node)
    }

    pub fn customer_count(&self) -> usize {
        self.visits.len().saturating_sub(2)
    }

    pub fn is_empty(&self) -> bool {
        self.customer_count() == 0
    }

    /// Consecutive `(from, to)` visit pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Visit, Visit)> + '_ {
        self.visits.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn demand(&self, inst: &Instance) -> f64 {
        self.customers().map(|c| inst.nodes[c].demand).sum()
    }
}

/// A set of routes, one per used vehicle.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Solution {
    pub routes: Vec<Route>,
}

impl Solution {
    pub fn new(routes: Vec<Route>) -> Self {
        Self { routes }
    }

    /// Builds a solution from customer sequences with a single level everywhere.
    pub fn from_sequences(inst: &Instance, sequences: &[Vec<NodeId>], level: LevelId) -> Self {
        Self { routes: sequences.iter().map(|s| Route::through(inst, s, level)).collect() }
    }

    pub fn customer_sequences(&self) -> Vec<Vec<NodeId>> {
        self.routes.iter().map(|r| r.customers().collect()).collect()
    }

    pub fn customer_count(&self) -> usize {
        self.routes.iter().map(Route::customer_count).sum()
    }

    pub fn canonicalize(&mut self) {
        self.routes.iter_mut().for_each(Route::canonicalize);
    }
}
