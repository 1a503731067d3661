//! Mixed-integer model in CPLEX LP text format.
//!
//! Variables, for usable edges `(i, j)`, vehicles `k` and levels `r`:
//!
//! - `x_i_j_k` binary, vehicle `k` drives `(i, j)`
//! - `z_i_j_r` binary, `(i, j)` is driven at level `r`
//! - `f_i_j >= 0`, load carried on `(i, j)`
//! - `y_i_k >= 0`, service start of vehicle `k` at node `i`
//!
//! An edge is usable if it leaves the start depot or a customer, enters a
//! customer or the end depot, is not a self loop and is not the direct
//! depot-to-depot edge; there are `n(n + 1)` of them.
//!
//! Row families and counts (`n` customers, `k` vehicles, `r` levels, `E` usable
//! edges):
//!
//! | rows          | count        | meaning                                   |
//! |---------------|--------------|-------------------------------------------|
//! | `cap_k`       | `k`          | vehicle capacity                          |
//! | `assign_i`    | `n`          | each customer left exactly once           |
//! | `cons_l_k`    | `n k`        | flow conservation at customers            |
//! | `depart_k`    | `k`          | at most one departure from the depot      |
//! | `arrive_k`    | `k`          | a vehicle that leaves returns             |
//! | `open_i_k`    | `(n + 2) k`  | service no earlier than the window opens  |
//! | `close_i_k`   | `(n + 2) k`  | service no later than the window closes   |
//! | `balance_i`   | `n`          | load drops by the demand at each customer |
//! | `loadlo_i_j`  | `E`          | load at least the demand ahead            |
//! | `loadhi_i_j`  | `E`          | load within capacity minus demand behind  |
//! | `speed_i_j`   | `E`          | one level on every driven edge            |
//! | `timing_i_j_k`| `n^2 k`      | big-M travel time between served nodes    |
//! | `return_j_k`  | `n k`        | big-M travel time back to the depot       |
//!
//! The big-M of `timing_i_j_k` is `max(0, b_i + g_i + d_ij / l - a_j)` with `l`
//! the smallest lower speed bound. `return_j_k` uses a single `L`, the largest
//! such value over all usable edges. Window rows of the end depot use its
//! incoming edges. Which clock bracket a level belongs to is not part of the
//! model and appears only as comments.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::model::{Instance, NodeId};

/// Closed-form sizes of the exported model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MilpCounts {
    pub edges: usize,
    pub x: usize,
    pub z: usize,
    pub f: usize,
    pub y: usize,
    pub rows: usize,
}

impl MilpCounts {
    pub fn new(n: usize, vehicles: usize, levels: usize) -> Self {
        let (k, e) = (vehicles, n * (n + 1));
        let rows = k + n + n * k + k + k + 2 * (n + 2) * k + n + 3 * e + n * n * k + n * k;
        Self { edges: e, x: e * k, z: e * levels, f: e, y: (n + 2) * k, rows }
    }

    pub fn of(inst: &Instance) -> Self {
        Self::new(inst.n(), inst.fleet_size, inst.speed_levels.len())
    }

    pub fn variables(&self) -> usize {
        self.x + self.z + self.f + self.y
    }
}

/// The usable edges in export order.
pub fn usable_edges(inst: &Instance) -> Vec<(NodeId, NodeId)> {
    let (start, end) = (inst.start_depot(), inst.end_depot());
    let tails = core::iter::once(start).chain(inst.customers());
    tails
        .flat_map(|i| inst.customers().chain(core::iter::once(end)).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && !(i == start && j == end))
        .collect()
}

/// Argument of the big-M clamp for `(i, j)`: `b_i + g_i + d_ij / l - a_j`.
pub fn big_m_raw(inst: &Instance, i: NodeId, j: NodeId) -> f64 {
    let (from, to) = (&inst.nodes[i], &inst.nodes[j]);
    from.tw_close + from.service + inst.distance(i, j) / inst.min_lower_speed() - to.tw_open
}

pub fn big_m(inst: &Instance, i: NodeId, j: NodeId) -> f64 {
    big_m_raw(inst, i, j).max(0.0)
}

/// Linear expression builder that wraps long rows.
struct Expr {
    text: String,
    terms: usize,
}

impl Expr {
    fn new() -> Self {
        Self { text: String::new(), terms: 0 }
    }

    fn term(&mut self, coef: f64, var: &str) -> &mut Self {
        if self.terms > 0 && self.terms.is_multiple_of(8) {
            self.text.push_str("\n   ");
        }
        let sign = if coef.is_sign_negative() { '-' } else { '+' };
        if self.terms == 0 && sign == '+' {
            write!(self.text, " {} {var}", coef.abs()).unwrap();
        } else {
            write!(self.text, " {sign} {} {var}", coef.abs()).unwrap();
        }
        self.terms += 1;
        self
    }
}

fn x(i: NodeId, j: NodeId, k: usize) -> String {
    alloc::format!("x_{i}_{j}_{k}")
}

fn z(i: NodeId, j: NodeId, r: u32) -> String {
    alloc::format!("z_{i}_{j}_{r}")
}

fn f(i: NodeId, j: NodeId) -> String {
    alloc::format!("f_{i}_{j}")
}

fn y(i: NodeId, k: usize) -> String {
    alloc::format!("y_{i}_{k}")
}

fn row(out: &mut String, name: &str, expr: &Expr, sense: &str, rhs: f64) {
    writeln!(out, " {name}:{} {sense} {rhs}", expr.text).unwrap();
}

/// Writes the model for `inst`. Vehicles are numbered from 1.
pub fn export_milp(inst: &Instance) -> String {
    let edges = usable_edges(inst);
    let vehicles: Vec<usize> = (1..=inst.fleet_size).collect();
    let customers: Vec<NodeId> = inst.customers().collect();
    let (start, end) = (inst.start_depot(), inst.end_depot());
    let nodes: Vec<NodeId> = (0..inst.nodes.len()).collect();
    let unit = inst.unit_cost();
    let l = inst.min_lower_speed();
    let big_l = edges.iter().map(|&(i, j)| big_m_raw(inst, i, j)).fold(0.0, f64::max);
    let out_of = |i: NodeId| edges.iter().filter(move |e| e.0 == i).map(|e| e.1);
    let into = |j: NodeId| edges.iter().filter(move |e| e.1 == j).map(|e| e.0);

    let counts = MilpCounts::of(inst);
    let mut out = String::new();
    writeln!(out, "\\ vehicle routing with load- and speed-dependent fuel cost").unwrap();
    writeln!(
        out,
        "\\ n = {}, vehicles = {}, levels = {}, usable edges = {}, variables = {}, rows = {}",
        inst.n(),
        inst.fleet_size,
        inst.speed_levels.len(),
        counts.edges,
        counts.variables(),
        counts.rows
    )
    .unwrap();
    writeln!(out, "\\ big-M: M_ij = max(0, b_i + g_i + d_ij / l - a_j) with g the service time, l = {l}").unwrap();
    writeln!(out, "\\ return rows use L = {big_l}, the largest M_ij argument over usable edges").unwrap();
    for level in &inst.speed_levels {
        writeln!(
            out,
            "\\ level {}: average speed {}, bracket [{}, {}) (not enforced by rows)",
            level.id, level.avg, level.bracket_start, level.bracket_end
        )
        .unwrap();
    }

    out.push_str("Minimize\n");
    let mut obj = Expr::new();
    for &(i, j) in &edges {
        let haul = unit * inst.alpha.get(i, j) * inst.distance(i, j);
        for &k in &vehicles {
            obj.term(haul * inst.vehicle_weight, &x(i, j, k));
        }
        obj.term(haul, &f(i, j));
        for level in &inst.speed_levels {
            obj.term(unit * inst.distance(i, j) * inst.beta * level.avg * level.avg, &z(i, j, level.id));
        }
    }
    writeln!(out, " obj:{}", obj.text).unwrap();

    out.push_str("Subject To\n");
    for &k in &vehicles {
        let mut e = Expr::new();
        for &i in &customers {
            for j in out_of(i) {
                e.term(inst.nodes[i].demand, &x(i, j, k));
            }
        }
        row(&mut out, &alloc::format!("cap_{k}"), &e, "<=", inst.capacity);
    }
    for &i in &customers {
        let mut e = Expr::new();
        for &k in &vehicles {
            for j in out_of(i) {
                e.term(1.0, &x(i, j, k));
            }
        }
        row(&mut out, &alloc::format!("assign_{i}"), &e, "=", 1.0);
    }
    for &c in &customers {
        for &k in &vehicles {
            let mut e = Expr::new();
            for i in into(c) {
                e.term(1.0, &x(i, c, k));
            }
            for j in out_of(c) {
                e.term(-1.0, &x(c, j, k));
            }
            row(&mut out, &alloc::format!("cons_{c}_{k}"), &e, "=", 0.0);
        }
    }
    for &k in &vehicles {
        let mut e = Expr::new();
        for j in out_of(start) {
            e.term(1.0, &x(start, j, k));
        }
        row(&mut out, &alloc::format!("depart_{k}"), &e, "<=", 1.0);
    }
    for &k in &vehicles {
        let mut e = Expr::new();
        for i in into(end) {
            e.term(1.0, &x(i, end, k));
        }
        for j in out_of(start) {
            e.term(-1.0, &x(start, j, k));
        }
        row(&mut out, &alloc::format!("arrive_{k}"), &e, "=", 0.0);
    }
    // window rows: a node counts as served by k if k leaves it (enters it, for the end depot)
    let served_by = |i: NodeId, k: usize, coef: f64, e: &mut Expr| {
        if i == end {
            for h in into(end) {
                e.term(coef, &x(h, end, k));
            }
        } else {
            for j in out_of(i) {
                e.term(coef, &x(i, j, k));
            }
        }
    };
    for &i in &nodes {
        for &k in &vehicles {
            let mut e = Expr::new();
            served_by(i, k, inst.nodes[i].tw_open, &mut e);
            e.term(-1.0, &y(i, k));
            row(&mut out, &alloc::format!("open_{i}_{k}"), &e, "<=", 0.0);
        }
    }
    for &i in &nodes {
        for &k in &vehicles {
            let mut e = Expr::new();
            e.term(1.0, &y(i, k));
            served_by(i, k, -inst.nodes[i].tw_close, &mut e);
            row(&mut out, &alloc::format!("close_{i}_{k}"), &e, "<=", 0.0);
        }
    }
    for &c in &customers {
        let mut e = Expr::new();
        for h in into(c) {
            e.term(1.0, &f(h, c));
        }
        for j in out_of(c) {
            e.term(-1.0, &f(c, j));
        }
        row(&mut out, &alloc::format!("balance_{c}"), &e, "=", inst.nodes[c].demand);
    }
    for &(i, j) in &edges {
        let mut e = Expr::new();
        e.term(1.0, &f(i, j));
        for &k in &vehicles {
            e.term(-inst.nodes[j].demand, &x(i, j, k));
        }
        row(&mut out, &alloc::format!("loadlo_{i}_{j}"), &e, ">=", 0.0);
    }
    for &(i, j) in &edges {
        let mut e = Expr::new();
        e.term(1.0, &f(i, j));
        for &k in &vehicles {
            e.term(-(inst.capacity - inst.nodes[i].demand), &x(i, j, k));
        }
        row(&mut out, &alloc::format!("loadhi_{i}_{j}"), &e, "<=", 0.0);
    }
    for &(i, j) in &edges {
        let mut e = Expr::new();
        for level in &inst.speed_levels {
            e.term(1.0, &z(i, j, level.id));
        }
        for &k in &vehicles {
            e.term(-1.0, &x(i, j, k));
        }
        row(&mut out, &alloc::format!("speed_{i}_{j}"), &e, "=", 0.0);
    }
    for &(i, j) in edges.iter().filter(|e| e.1 != end) {
        let m = big_m(inst, i, j);
        for &k in &vehicles {
            let mut e = Expr::new();
            e.term(1.0, &y(i, k)).term(-1.0, &y(j, k));
            for level in &inst.speed_levels {
                e.term(inst.distance(i, j) / level.avg, &z(i, j, level.id));
            }
            e.term(m, &x(i, j, k));
            row(&mut out, &alloc::format!("timing_{i}_{j}_{k}"), &e, "<=", m - inst.nodes[i].service);
        }
    }
    for &j in &customers {
        for &k in &vehicles {
            let mut e = Expr::new();
            e.term(1.0, &y(j, k)).term(-1.0, &y(end, k));
            for level in &inst.speed_levels {
                e.term(inst.distance(j, end) / level.avg, &z(j, end, level.id));
            }
            e.term(big_l, &x(j, end, k));
            row(&mut out, &alloc::format!("return_{j}_{k}"), &e, "<=", big_l - inst.nodes[j].service);
        }
    }

    out.push_str("Bounds\n");
    for &(i, j) in &edges {
        writeln!(out, " {} >= 0", f(i, j)).unwrap();
    }
    for &i in &nodes {
        for &k in &vehicles {
            writeln!(out, " {} >= 0", y(i, k)).unwrap();
        }
    }
    out.push_str("Binaries\n");
    for &(i, j) in &edges {
        for &k in &vehicles {
            writeln!(out, " {}", x(i, j, k)).unwrap();
        }
    }
    for &(i, j) in &edges {
        for level in &inst.speed_levels {
            writeln!(out, " {}", z(i, j, level.id)).unwrap();
        }
    }
    out.push_str("End\n");
    out
}
