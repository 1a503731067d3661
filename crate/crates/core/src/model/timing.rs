use alloc::vec::Vec;

use super::instance::{Instance, LevelId, NodeId, SpeedLevel};
use super::solution::Route;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisitTiming {
    pub node: NodeId,
    pub arrival: f64,
    pub service_start: f64,
    pub departure: f64,
}

/// Schedule of one route: one entry per visit and one load per edge.
///
/// `loads[e]` and `straddles[e]` describe the edge from `visits[e]` to `visits[e + 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RouteTiming {
    pub visits: Vec<VisitTiming>,
    pub loads: Vec<f64>,
    /// Diagnostic: the edge departs in one speed bracket and arrives in another.
    pub straddles: Vec<bool>,
}

impl RouteTiming {
    pub fn completion(&self) -> f64 {
        self.visits.last().map_or(0.0, |v| v.service_start)
    }
}

fn level_or_panic(inst: &Instance, id: LevelId) -> &SpeedLevel {
    inst.level(id).unwrap_or_else(|| panic!("route references unknown speed level {id}"))
}

fn same_bracket(inst: &Instance, a: f64, b: f64) -> bool {
    inst.level_at(a).map(|l| l.id) == inst.level_at(b).map(|l| l.id)
}

/// Forward timing and backward load accumulation along `route`.
///
/// Travel on each edge uses the average speed of the level stored on the
/// arriving visit; arriving early means waiting for the window to open.
///
/// # Panics
///
/// If the route references a node or speed level the instance does not have.
pub fn simulate_route(inst: &Instance, route: &Route, depart_time: f64) -> RouteTiming {
    let len = route.visits.len();
    let mut visits = Vec::with_capacity(len);
    let mut straddles = Vec::with_capacity(len.saturating_sub(1));
    let Some(first) = route.visits.first() else {
        return RouteTiming { visits, loads: Vec::new(), straddles };
    };
    visits.push(VisitTiming {
        node: first.node,
        arrival: depart_time,
        service_start: depart_time,
        departure: depart_time + inst.nodes[first.node].service,
    });
    for (from, to) in route.edges() {
        let prev = visits.last().copied().expect("visits is non-empty");
        let level = level_or_panic(inst, to.speed_level);
        let arrival = prev.departure + inst.distance(from.node, to.node) / level.avg;
        let node = &inst.nodes[to.node];
        let service_start = arrival.max(node.tw_open);
        straddles.push(!same_bracket(inst, prev.departure, arrival));
        visits.push(VisitTiming { node: to.node, arrival, service_start, departure: service_start + node.service });
    }
    let mut loads = alloc::vec![0.0; len.saturating_sub(1)];
    let mut load = 0.0;
    for e in (0..loads.len()).rev() {
        load += inst.nodes[route.visits[e + 1].node].demand;
        loads[e] = load;
    }
    RouteTiming { visits, loads, straddles }
}

/// Level used when no bracket contains the departure time: the nearest bracket.
fn fallback_level(inst: &Instance, time: f64) -> LevelId {
    let levels = inst.speed_levels.iter();
    let pick = if time < 0.0 {
        levels.min_by(|a, b| a.bracket_start.total_cmp(&b.bracket_start))
    } else {
        levels.max_by(|a, b| a.bracket_end.total_cmp(&b.bracket_end))
    };
    pick.map(|l| l.id).expect("instance has speed levels")
}

/// Sets every edge's level to the bracket containing its departure time.
///
/// Returns `false` if some departure falls outside every bracket; that edge
/// gets the nearest bracket's level and the checker will flag it.
pub fn assign_levels(inst: &Instance, route: &mut Route, depart_time: f64) -> bool {
    let mut all_covered = true;
    let mut departure = depart_time + route.visits.first().map_or(0.0, |v| inst.nodes[v.node].service);
    for e in 1..route.visits.len() {
        let (from, to) = (route.visits[e - 1].node, route.visits[e].node);
        let level = match inst.level_at(departure) {
            Some(l) => *l,
            None => {
                all_covered = false;
                *level_or_panic(inst, fallback_level(inst, departure))
            }
        };
        route.visits[e].speed_level = level.id;
        let node = &inst.nodes[to];
        let arrival = departure + inst.distance(from, to) / level.avg;
        departure = arrival.max(node.tw_open) + node.service;
    }
    route.canonicalize();
    all_covered
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testing::single_customer;

    #[test]
    fn empty_route_arrives_at_departure() {
        let mut inst = single_customer();
        inst.distances.set(0, 2, 0.0);
        let route = Route::through(&inst, &[], 1);
        let t = simulate_route(&inst, &route, 3.25);
        assert_eq!(t.visits[1].arrival, 3.25);
        assert_eq!(t.loads, [0.0]);
    }

    #[test]
    fn travel_time_is_distance_over_average_speed() {
        let mut inst = single_customer();
        inst.distances.set(0, 1, 120.0);
        let route = Route::through(&inst, &[1], 1);
        let t = simulate_route(&inst, &route, 0.0);
        assert_eq!(t.visits[1].arrival, 2.0);
        assert_eq!(t.visits[1].service_start, 2.0);
    }

    #[test]
    fn early_arrival_waits_for_window() {
        let mut inst = single_customer();
        inst.distances.set(0, 1, 120.0);
        inst.nodes[1].tw_open = 3.0;
        let t = simulate_route(&inst, &Route::through(&inst, &[1], 1), 0.0);
        assert_eq!(t.visits[1].arrival, 2.0);
        assert_eq!(t.visits[1].service_start, 3.0);
        assert_eq!(t.visits[1].departure, 3.0 + inst.nodes[1].service);
    }

    #[test]
    fn loads_are_downstream_demands() {
        let inst = crate::model::testing::line(&[2.0, 3.0, 4.0]);
        let t = simulate_route(&inst, &Route::through(&inst, &[1, 2, 3], 1), 0.0);
        assert_eq!(t.loads, [9.0, 7.0, 4.0, 0.0]);
    }

    #[test]
    fn levels_follow_departure_bracket() {
        let mut inst = crate::model::testing::line(&[1.0, 1.0]);
        // customer 1 opens after the day bracket closes
        inst.nodes[1].tw_open = 9.0;
        let mut route = Route::through(&inst, &[1, 2], 1);
        assert!(assign_levels(&inst, &mut route, 0.0));
        let levels: Vec<_> = route.visits.iter().map(|v| v.speed_level).collect();
        assert_eq!(levels, [1, 1, 2, 2]);
    }

    #[test]
    fn straddling_edge_is_flagged() {
        let mut inst = crate::model::testing::line(&[1.0]);
        inst.distances.set(0, 1, 480.0);
        inst.distances.set(1, 0, 480.0);
        let t = simulate_route(&inst, &Route::through(&inst, &[1], 1), 7.0);
        assert!(t.straddles[0]);
    }
}
